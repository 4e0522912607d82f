#pragma once

#include <random>
#include <vector>

#include "cvlab/minima/contraction.hpp"

namespace cvlab {

/// A discrete path with parameters; point k sits at parameter times[k].
struct Chain {
  std::vector<MetricPoint> points;
  std::vector<double> times;
};

/// d_L(c_a, c_b) within [|t_a - t_b| / K - K, K |t_a - t_b| + K] for every ordered pair.
inline bool certify_quasi_geodesic(const Chain& c, double k) {
  const std::size_t n = c.points.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double dt = std::abs(c.times[a] - c.times[b]);
      const double d = lipschitz_stretch(c.points[a], c.points[b]).log_value();
      if (d > k * dt + k || d < dt / k - k) return false;
    }
  return true;
}

/// Grid points i..j of the line with each interior point, with probability
/// 1/2, moved by a Whitehead re-marking or an edge rescaling.
template <class Rng>
Chain perturbed_chain(const LineOfMinima& line, Rng& rng) {
  const std::size_t n = line.points.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t i = pick(rng), j = pick(rng);
  if (i > j) std::swap(i, j);
  if (j - i < 2 && n >= 3) {
    i = std::min(i, n - 3);
    j = i + 2;
  }
  Chain c;
  const auto& moves = whitehead_moves(line.mu.rank());
  std::uniform_int_distribution<std::size_t> mv(0, moves.size() - 1);
  std::uniform_int_distribution<int> f(2, 8);
  for (std::size_t k = i; k <= j; ++k) {
    c.times.push_back(line.t(k));
    const MarkedGraph& g = line.points[k].graph;
    if (k == i || k == j || std::bernoulli_distribution(0.5)(rng)) {
      c.points.push_back(line.points[k]);
    } else if (std::bernoulli_distribution(0.5)(rng)) {
      c.points.emplace_back(g.act(moves[mv(rng)].automorphism));
    } else {
      std::vector<Rational> ls;
      for (const auto& l : g.lengths()) ls.push_back(l * Rational(f(rng), 4));
      c.points.emplace_back(g.with_lengths(ls, MarkedGraph::Check::AnyVolume).normalized());
    }
  }
  return c;
}

struct MorseReport {
  double k = 0;
  std::size_t budget = 0;
  std::size_t attempted = 0;
  std::size_t certified = 0;
  double m_emp = 0;  // max distance from a certified chain point to the line
  bool inconclusive() const { return certified == 0; }
  double certification_rate() const { return attempted ? static_cast<double>(certified) / attempted : 0.0; }
};

inline constexpr std::size_t kMorseAttemptsPerChain = 20;

/// Collects up to `budget` certified K-quasi-geodesic chains with endpoints on
/// the line and reports how far they stray from it. Chains are drawn in
/// batches from per-chain seeds, so a larger budget extends a smaller one.
inline MorseReport morse_test(const LineOfMinima& line, double k, std::size_t budget, std::uint64_t seed) {
  if (k < 1) throw InvalidInput("K must be at least 1");
  MorseReport r;
  r.k = k;
  r.budget = budget;
  const std::size_t max_attempts = budget * kMorseAttemptsPerChain;
  const std::size_t batch = 32;
  while (r.certified < budget && r.attempted < max_attempts) {
    const std::size_t count = std::min(batch, max_attempts - r.attempted);
    const std::size_t base = r.attempted;
    const auto results = parallel_map(count, [&](std::size_t idx) {
      std::mt19937_64 rng(task_seed(seed, base + idx));
      const Chain c = perturbed_chain(line, rng);
      if (!certify_quasi_geodesic(c, k)) return -1.0;
      double worst = 0;
      for (const auto& p : c.points) worst = std::max(worst, nearest_on_line(line, p).distance);
      return worst;
    });
    for (double d : results) {
      ++r.attempted;
      if (d < 0) continue;
      ++r.certified;
      r.m_emp = std::max(r.m_emp, d);
      if (r.certified == budget) break;
    }
  }
  return r;
}

}  // namespace cvlab
