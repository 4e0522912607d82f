#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cvlab/core/parallel.hpp"
#include "cvlab/minima/search.hpp"
#include "cvlab/outerspace/lipschitz.hpp"

namespace cvlab {

/// Evenly spaced grid lo, lo + step, ..., hi.
inline std::vector<Rational> make_grid(const Rational& lo, const Rational& hi, const Rational& step) {
  if (sgn(step) <= 0 || hi < lo) throw InvalidInput("grid needs lo <= hi and a positive step");
  std::vector<Rational> g;
  for (Rational t = lo; t <= hi; t += step) g.push_back(t);
  return g;
}

/// Dyadic approximations of exp(t/2) and exp(-t/2).
struct AxisWeights {
  Rational mu_weight;
  Rational nu_weight;
};

inline AxisWeights axis_weights(const Rational& t) {
  const double half = to_double(t) / 2;
  return {dyadic_exp(half), dyadic_exp(-half)};
}

inline RationalLamination axis_objective(const RationalLamination& mu, const RationalLamination& nu, const Rational& t) {
  const auto w = axis_weights(t);
  return mu.scaled(w.mu_weight) + nu.scaled(w.nu_weight);
}

struct LineOfMinima {
  RationalLamination mu;
  RationalLamination nu;
  Rational eps;
  std::vector<Rational> grid;
  std::vector<MetricPoint> points;
  std::vector<Rational> values;
  std::vector<AxisWeights> weights;
  std::vector<std::vector<double>> distance;  // symmetrized distances between grid points
  double kappa_emp = 0;

  double t(std::size_t i) const { return to_double(grid[i]); }
};

/// Pairwise symmetrized distances and the empirical coarse-geodesic
/// constant max |d(gamma(s), gamma(t)) - |s - t||.
inline void measure_line(LineOfMinima& line) {
  const std::size_t n = line.points.size();
  line.distance.assign(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const auto ds = parallel_map(pairs.size(), [&](std::size_t k) {
    return sym_distance(line.points[pairs[k].first], line.points[pairs[k].second]).value();
  });
  line.kappa_emp = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    line.distance[i][j] = line.distance[j][i] = ds[k];
    line.kappa_emp = std::max(line.kappa_emp, std::abs(ds[k] - std::abs(line.t(j) - line.t(i))));
  }
}

/// gamma(t) for each grid value in increasing order, each search warm-started
/// from the previous point; the first point starts from the standard rose.
inline LineOfMinima line_of_minima(const RationalLamination& mu, const RationalLamination& nu, const Rational& eps,
                                   std::vector<Rational> grid) {
  if (mu.rank() != nu.rank()) throw InvalidInput("lamination rank mismatch");
  if (grid.empty()) throw InvalidInput("empty grid");
  std::sort(grid.begin(), grid.end());
  LineOfMinima line{mu, nu, eps, std::move(grid), {}, {}, {}, {}, 0};
  MarkedGraph seed = standard_rose(mu.rank());
  for (const auto& t : line.grid) {
    const auto w = axis_weights(t);
    const auto res = min_search(mu.scaled(w.mu_weight) + nu.scaled(w.nu_weight), eps, seed);
    seed = res.graph;
    line.points.emplace_back(res.graph);
    line.values.push_back(res.value);
    line.weights.push_back(w);
  }
  measure_line(line);
  return line;
}

struct Projection {
  std::size_t index = 0;
  double t_star = 0;
  Rational exp_t_star;
  bool clamped = false;
};

/// Snaps the balance parameter of T to the nearest grid value (ties to the
/// smaller t); flags values outside the grid.
inline Projection balancing_projection(const LineOfMinima& line, const MarkedGraph& t) {
  Projection p;
  p.exp_t_star = balance_param(t, line.mu, line.nu).exp_t;
  p.t_star = log_of(p.exp_t_star);
  double best = std::abs(line.t(0) - p.t_star);
  for (std::size_t i = 1; i < line.grid.size(); ++i) {
    const double d = std::abs(line.t(i) - p.t_star);
    if (d < best) {
      best = d;
      p.index = i;
    }
  }
  p.clamped = p.t_star < line.t(0) || p.t_star > line.t(line.grid.size() - 1);
  return p;
}

/// Distance from a point to the nearest grid point of the line.
struct NearestPoint {
  std::size_t index = 0;
  double distance = 0;
  std::vector<double> all;
};

inline NearestPoint nearest_on_line(const LineOfMinima& line, const MetricPoint& p) {
  NearestPoint np;
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    const double d = sym_distance(p, line.points[i]).value();
    np.all.push_back(d);
    if (i == 0 || d < np.distance) {
      np.distance = d;
      np.index = i;
    }
  }
  return np;
}

struct ShiftReport {
  double shift = 0;          // 2 log lambda
  Rational grid_shift;       // nearest representable multiple of the grid step
  double max_offset = 0;     // max over usable t of d(act(gamma(t), phi), gamma(t - grid_shift))
  std::size_t compared = 0;
};

/// Translation quasi-invariance: acting by the iwip moves the axis down by
/// about 2 log lambda in the parameter, since <T phi, mu> grows by lambda.
inline ShiftReport translation_offsets(const LineOfMinima& line, const Automorphism& phi, const Rational& lambda) {
  ShiftReport r;
  r.shift = 2 * log_of(lambda);
  if (line.grid.size() < 2) return r;
  const Rational step = line.grid[1] - line.grid[0];
  const long k = std::lround(r.shift / to_double(step));
  r.grid_shift = step * Rational(k);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < line.grid.size(); ++i) {
    const Rational target = line.grid[i] - r.grid_shift;
    for (std::size_t j = 0; j < line.grid.size(); ++j)
      if (line.grid[j] == target) pairs.emplace_back(i, j);
  }
  const auto ds = parallel_map(pairs.size(), [&](std::size_t k2) {
    const MetricPoint moved(line.points[pairs[k2].first].graph.act(phi));
    return sym_distance(moved, line.points[pairs[k2].second]).value();
  });
  for (double d : ds) r.max_offset = std::max(r.max_offset, d);
  r.compared = ds.size();
  return r;
}

}  // namespace cvlab
