#pragma once

#include <optional>
#include <vector>

#include "cvlab/core/rational.hpp"

namespace cvlab {

/// minimize c.x subject to A x = b, x >= 0, with b >= 0.
struct LinearProgram {
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

struct LpSolution {
  std::vector<Rational> x;
  Rational value;
  std::vector<int> basis;
  std::vector<Rational> reduced_costs;  // all >= 0 at an optimum
};

namespace detail {

class Tableau {
 public:
  // rows_[i] = [coefficients..., rhs]; cost_ = [reduced costs..., -objective]
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> cost;
  std::vector<int> basis;

  std::size_t cols() const { return cost.size() - 1; }

  void pivot(std::size_t r, std::size_t col) {
    auto& pr = rows[r];
    const Rational p = pr[col];
    for (auto& v : pr) v /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][col]) == 0) continue;
      const Rational f = rows[i][col];
      for (std::size_t j = 0; j < pr.size(); ++j)
        if (sgn(pr[j]) != 0) rows[i][j] -= f * pr[j];
    }
    if (sgn(cost[col]) != 0) {
      const Rational f = cost[col];
      for (std::size_t j = 0; j < pr.size(); ++j)
        if (sgn(pr[j]) != 0) cost[j] -= f * pr[j];
    }
    basis[r] = static_cast<int>(col);
  }

  /// Bland's rule: least entering index with negative reduced cost, least
  /// basic index among tied ratios. `usable` masks columns that may enter.
  /// Returns false when unbounded.
  bool run(const std::vector<bool>& usable) {
    while (true) {
      std::size_t enter = cols();
      for (std::size_t j = 0; j < cols(); ++j)
        if (usable[j] && sgn(cost[j]) < 0) {
          enter = j;
          break;
        }
      if (enter == cols()) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (sgn(rows[i][enter]) <= 0) continue;
        Rational ratio = rows[i].back() / rows[i][enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, enter);
    }
  }
};

}  // namespace detail

/// Exact two-phase simplex with Bland's rule. Returns nullopt when the
/// program is infeasible; throws on unboundedness.
inline std::optional<LpSolution> solve_lp(const LinearProgram& lp) {
  const std::size_t m = lp.a.size();
  const std::size_t n = lp.c.size();
  for (const auto& row : lp.a)
    if (row.size() != n) throw InvalidInput("constraint row width differs from the cost vector");
  if (lp.b.size() != m) throw InvalidInput("right-hand side length differs from the row count");
  for (const auto& v : lp.b)
    if (sgn(v) < 0) throw InvalidInput("right-hand side must be nonnegative");

  detail::Tableau t;
  const std::size_t width = n + m + 1;
  t.rows.assign(m, std::vector<Rational>(width, Rational(0)));
  t.cost.assign(width, Rational(0));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = lp.a[i][j];
    t.rows[i][n + i] = 1;
    t.rows[i].back() = lp.b[i];
    t.basis[i] = static_cast<int>(n + i);
  }
  // Phase 1: minimize the sum of artificials, priced out against the basis.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < width; ++j)
      if (j < n || j == width - 1) t.cost[j] -= t.rows[i][j];
  std::vector<bool> usable(n + m, true);
  t.run(usable);
  if (sgn(t.cost.back()) != 0) return std::nullopt;

  // Drive zero-valued artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < t.rows.size();) {
    if (static_cast<std::size_t>(t.basis[i]) < n) {
      ++i;
      continue;
    }
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(t.rows[i][j]) != 0) {
        col = j;
        break;
      }
    if (col == n) {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    t.pivot(i, col);
    ++i;
  }

  // Phase 2 on the original costs; artificial columns may not re-enter.
  std::fill(t.cost.begin(), t.cost.end(), Rational(0));
  for (std::size_t j = 0; j < n; ++j) t.cost[j] = lp.c[j];
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::size_t bj = static_cast<std::size_t>(t.basis[i]);
    if (sgn(t.cost[bj]) == 0) continue;
    const Rational f = t.cost[bj];
    for (std::size_t j = 0; j < width; ++j) t.cost[j] -= f * t.rows[i][j];
  }
  for (std::size_t j = n; j < n + m; ++j) usable[j] = false;
  if (!t.run(usable)) throw Error("linear program is unbounded");

  LpSolution s;
  s.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i) s.x[static_cast<std::size_t>(t.basis[i])] = t.rows[i].back();
  s.value = 0;
  for (std::size_t j = 0; j < n; ++j) s.value += lp.c[j] * s.x[j];
  s.basis = t.basis;
  s.reduced_costs.assign(t.cost.begin(), t.cost.begin() + static_cast<std::ptrdiff_t>(n));
  return s;
}

}  // namespace cvlab
