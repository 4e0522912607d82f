#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvlab/factorgraph/shadow.hpp"
#include "cvlab/freegroup/iwip.hpp"
#include "cvlab/laminations/lamination.hpp"

namespace cvlab {

/// Reduced words over abstract generators, encoded as Words of rank = number
/// of generators (letter a stands for the first generator, and so on).
inline std::vector<Word> reduced_words_up_to(int generators, int length) {
  std::vector<Word> out{Word(generators)};
  std::size_t from = 0;
  for (int len = 1; len <= length; ++len) {
    const std::size_t to = out.size();
    for (std::size_t i = from; i < to; ++i)
      for (int g = 1; g <= generators; ++g)
        for (Letter l : {static_cast<Letter>(g), static_cast<Letter>(-g)}) {
          const auto& w = out[i];
          if (!w.empty() && w.letters().back() == -l) continue;
          Word next = w;
          next.push_reduced(l);
          out.push_back(std::move(next));
        }
    from = to;
  }
  return out;
}

inline Automorphism evaluate_word(const std::vector<Automorphism>& gens, const Word& w) {
  Automorphism out = Automorphism::identity(gens.front().rank());
  for (Letter l : w.letters()) {
    const auto& g = gens[static_cast<std::size_t>(std::abs(l) - 1)];
    out = out * (l > 0 ? g : g.inverse());
  }
  return out;
}

namespace detail {

inline IntMatrix checked_product(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size();
  IntMatrix c(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        long p = 0;
        if (__builtin_mul_overflow(a[i][k], b[k][j], &p) || __builtin_add_overflow(c[i][j], p, &c[i][j]))
          throw Error("abelianization fingerprint overflow");
      }
  return c;
}

inline IntMatrix inverse_unimodular_of(const Automorphism& g) { return g.inverse().abelianization_matrix(); }

}  // namespace detail

struct FreenessCheck {
  int bound = 0;
  bool free = true;
  std::size_t words = 0;
  std::size_t collisions = 0;  // equal abelianizations checked exactly
  std::optional<std::pair<Word, Word>> witness;  // two distinct words equal in Out(F_n)
};

/// All reduced words of length <= bound in the generators and their inverses
/// are pairwise distinct in Out(F_n). Words are bucketed by abelianization;
/// only words in a shared bucket are composed and compared exactly.
inline FreenessCheck free_up_to(const std::vector<Automorphism>& gens, int bound) {
  if (gens.empty()) throw InvalidInput("no generators");
  if (bound < 0) throw InvalidInput("negative freeness bound");
  FreenessCheck r;
  r.bound = bound;
  const auto words = reduced_words_up_to(static_cast<int>(gens.size()), bound);
  r.words = words.size();
  std::vector<IntMatrix> fwd, bwd;
  for (const auto& g : gens) {
    fwd.push_back(g.abelianization_matrix());
    bwd.push_back(detail::inverse_unimodular_of(g));
  }
  std::map<IntMatrix, std::vector<std::size_t>> buckets;
  std::vector<IntMatrix> mats(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    IntMatrix m = Automorphism::identity(gens.front().rank()).abelianization_matrix();
    for (Letter l : words[i].letters())
      m = detail::checked_product(m, (l > 0 ? fwd : bwd)[static_cast<std::size_t>(std::abs(l) - 1)]);
    buckets[m].push_back(i);
  }
  for (const auto& [m, idx] : buckets) {
    if (idx.size() < 2) continue;
    std::vector<Automorphism> autos;
    for (auto i : idx) autos.push_back(evaluate_word(gens, words[i]));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        ++r.collisions;
        if (equal_in_out(autos[a], autos[b])) {
          const auto& wa = words[idx[a]];
          const auto& wb = words[idx[b]];
          if (!r.witness || wa.size() + wb.size() < r.witness->first.size() + r.witness->second.size())
            r.witness = std::make_pair(wa, wb);
          r.free = false;
        }
      }
  }
  return r;
}

struct SchottkySpec {
  Automorphism phi;
  Automorphism psi;
  int k = 1;
  std::vector<Automorphism> generators;  // phi^k, psi^k
  IwipVerdict phi_iwip;
  IwipVerdict psi_iwip;
  FillsCertificate independence;  // each lamination of phi fills with each lamination of psi
  FreenessCheck freeness;
};

/// Generators phi^k and psi^k after the iwip and independence preconditions,
/// with the freeness verdict up to word length `bound` attached.
inline SchottkySpec schottky_build(const Automorphism& phi, const Automorphism& psi, int k, int bound,
                                   int depth = 8) {
  if (k <= 0) throw InvalidInput("the power k must be positive");
  if (phi.rank() != psi.rank()) throw InvalidInput("generators of different ranks");
  SchottkySpec s;
  s.phi = phi;
  s.psi = psi;
  s.k = k;
  s.phi_iwip = iwip_heuristic(phi);
  s.psi_iwip = iwip_heuristic(psi);
  if (!s.phi_iwip.pass) throw InvalidInput("phi fails the iwip heuristic: " + s.phi_iwip.reason);
  if (!s.psi_iwip.pass) throw InvalidInput("psi fails the iwip heuristic: " + s.psi_iwip.reason);
  const ConjClass seed(Word::generator(phi.rank(), 1));
  const auto lp = iwip_laminations(IwipAxisSpec::make(phi, seed, depth));
  const auto lq = iwip_laminations(IwipAxisSpec::make(psi, seed, depth));
  for (const auto* a : {&lp.mu, &lp.nu})
    for (const auto* b : {&lq.mu, &lq.nu}) {
      s.independence = fills_certificate(*a, *b);
      if (!s.independence.certified) throw InvalidInput("fixed laminations of phi and psi do not fill");
    }
  s.generators = {phi.power(k), psi.power(k)};
  s.freeness = free_up_to(s.generators, bound);
  return s;
}

/// Generator words written with f/F for phi^k and g/G for psi^k.
inline std::string generator_word_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter l : w.letters()) {
    const char base = static_cast<char>('f' + std::abs(l) - 1);
    s += l > 0 ? base : static_cast<char>(base - 'a' + 'A');
  }
  return s;
}

struct OrbitPoint {
  Word word;
  double distance = 0;
  std::optional<FFDecision> shadow;  // for |g| >= 3
};

struct OrbitFit {
  std::vector<OrbitPoint> points;
  double c = 0;          // least-squares slope of d against |g|
  double c_prime = 0;    // smallest offset making d >= c |g| - c' hold at every point
  double residual = 0;   // root mean square residual of the least-squares fit
  double upper_slope = 0;
  std::size_t shadow_tested = 0;
  std::size_t shadow_fills = 0;
  std::size_t shadow_rechecked = 0;
  double fills_fraction() const { return shadow_tested ? static_cast<double>(shadow_fills) / shadow_tested : 0.0; }
};

/// Distances d(T, T.g) over reduced words 1 <= |g| <= bound, a lower-bound
/// linear fit, and the free-factor separation of Upsilon(T) and Upsilon(T.g).
inline OrbitFit orbit_qi_experiment(const SchottkySpec& spec, const MarkedGraph& t, int bound) {
  if (!spec.freeness.free || spec.freeness.bound < bound)
    throw InvalidInput("orbit experiment needs a freeness verdict at the requested length");
  if (t.rank() != spec.phi.rank()) throw InvalidInput("tree rank does not match the group");
  auto words = reduced_words_up_to(static_cast<int>(spec.generators.size()), bound);
  words.erase(words.begin());  // identity
  const MetricPoint base(t);
  const auto base_shadow = upsilon(t);
  OrbitFit fit;
  fit.points = parallel_map(words.size(), [&](std::size_t i) {
    const auto g = evaluate_word(spec.generators, words[i]);
    const MarkedGraph moved = t.act(g);
    OrbitPoint p{words[i], sym_distance(base, MetricPoint(moved)).value(), std::nullopt};
    if (words[i].size() >= 3) {
      const auto other = upsilon(moved);
      if (other.cls == base_shadow.cls || other.cls == base_shadow.cls.inverse()) {
        p.shadow = FFDecision{base_shadow.cls, other.cls, FFDistance::Undecided, {}};
      } else {
        p.shadow = ff_leq2(base_shadow.cls, other.cls);
      }
    }
    return p;
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.points.size());
  for (const auto& p : fit.points) {
    const double x = static_cast<double>(p.word.size());
    sx += x;
    sy += p.distance;
    sxx += x * x;
    sxy += x * p.distance;
    fit.upper_slope = std::max(fit.upper_slope, p.distance / x);
    if (p.shadow) {
      ++fit.shadow_tested;
      if (p.shadow->verdict == FFDistance::AtLeastThree) {
        ++fit.shadow_fills;
        if (recheck(*p.shadow)) ++fit.shadow_rechecked;
      }
    }
  }
  const double denom = n * sxx - sx * sx;
  fit.c = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - fit.c * sx) / n;
  double ss = 0;
  fit.c_prime = -std::numeric_limits<double>::infinity();
  for (const auto& p : fit.points) {
    const double x = static_cast<double>(p.word.size());
    const double e = p.distance - (fit.c * x + intercept);
    ss += e * e;
    fit.c_prime = std::max(fit.c_prime, fit.c * x - p.distance);
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace cvlab
