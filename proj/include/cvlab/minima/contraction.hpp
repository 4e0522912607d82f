#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cvlab/freegroup/factor.hpp"
#include "cvlab/minima/line.hpp"
#include "cvlab/outerspace/basic.hpp"
#include "cvlab/outerspace/random.hpp"

namespace cvlab {

/// A point of the line moved by one Whitehead re-marking or by rescaling
/// each edge by a factor in [1/2, 2] before renormalizing.
template <class Rng>
MarkedGraph perturb_axis_point(Rng& rng, const LineOfMinima& line) {
  std::uniform_int_distribution<std::size_t> pick(0, line.points.size() - 1);
  const MarkedGraph& g = line.points[pick(rng)].graph;
  if (std::bernoulli_distribution(0.5)(rng)) {
    const auto& moves = whitehead_moves(g.rank());
    std::uniform_int_distribution<std::size_t> m(0, moves.size() - 1);
    return g.act(moves[m(rng)].automorphism);
  }
  std::uniform_int_distribution<int> f(2, 8);
  std::vector<Rational> ls;
  for (const auto& l : g.lengths()) ls.push_back(l * Rational(f(rng), 4));
  return g.with_lengths(ls, MarkedGraph::Check::AnyVolume).normalized();
}

/// Exactly balanced tree (<U, mu> = <U, nu>) on the topology and marking of g,
/// found on the segment between a mu-heavy and a nu-heavy length vector.
inline std::optional<MarkedGraph> balanced_on(const MarkedGraph& g, const RationalLamination& mu,
                                              const RationalLamination& nu) {
  const auto cm = pairing_coefficients(g, mu);
  const auto cn = pairing_coefficients(g, nu);
  const std::size_t ne = cm.size();
  auto heavy = [&](int sign) {
    std::vector<Rational> l(ne);
    for (std::size_t e = 0; e < ne; ++e) l[e] = sgn(cm[e] - cn[e]) == sign ? Rational(100) : Rational(1);
    return l;
  };
  auto f = [&](const std::vector<Rational>& l) {
    Rational s = 0;
    for (std::size_t e = 0; e < ne; ++e) s += (cm[e] - cn[e]) * l[e];
    return s;
  };
  const auto la = heavy(1), lb = heavy(-1);
  const Rational fa = f(la), fb = f(lb);
  if (sgn(fa) <= 0 || sgn(fb) >= 0) return std::nullopt;
  const Rational lam = fa / (fa - fb);
  std::vector<Rational> l(ne);
  for (std::size_t e = 0; e < ne; ++e) l[e] = (1 - lam) * la[e] + lam * lb[e];
  return g.with_lengths(l, MarkedGraph::Check::AnyVolume).normalized();
}

struct ContractingItem {
  bool passed = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<Rational> min_value;  // smallest tested quantity
  Json witness;                       // first violation, self-contained
};

struct ContractingReport {
  Rational bound;
  std::size_t distinguished = 0;  // grid index of the distinguished point
  Rational item1_ratio;
  bool item1 = false;
  ContractingItem item2;
  ContractingItem item3;
  std::size_t item2_samples = 0;
  std::size_t balanced_trees = 0;
  std::size_t basic_laminations = 0;
  std::size_t far_trees = 0;
};

/// <S, mu_T + nu_T> / stretch(T, S), i.e. the item-2 quantity for S rescaled into Sigma(T).
inline Rational sigma_pairing(const MetricPoint& t, const MarkedGraph& s, const RationalLamination& lam) {
  return pairing(s, lam) / lipschitz_stretch(t.cands, s).value;
}

/// Re-evaluates an item-2 or item-3 witness from its serialized form alone.
inline bool recheck_witness(const Json& w) {
  const auto t = marked_graph_from_json(w.at("T"));
  const auto s = marked_graph_from_json(w.at("S"));
  const auto lam = lamination_from_json(w.at("lamination"), t.rank());
  const Rational bound = parse_rational(w.at("B").get<std::string>());
  const Rational v = pairing(s, lam) / lipschitz_stretch(t, s).value;
  return v < 1 / bound && to_string(v) == w.at("value").get<std::string>();
}

/// Checks the three contraction conditions at the grid point nearest t = 0:
/// item 1 exactly; items 2 and 3 over finite witness sets (a pass means
/// passed at this sample size; a violation is definitive).
template <class Rng>
ContractingReport contracting_certify(const LineOfMinima& line, const Rational& bound, std::size_t samples, Rng& rng) {
  ContractingReport r;
  r.bound = bound;
  double best = std::abs(line.t(0));
  for (std::size_t i = 1; i < line.grid.size(); ++i)
    if (std::abs(line.t(i)) < best) {
      best = std::abs(line.t(i));
      r.distinguished = i;
    }
  const MetricPoint& tp = line.points[r.distinguished];
  const MarkedGraph& t = tp.graph;
  const int rank = t.rank();
  const Rational pm = pairing(t, line.mu), pn = pairing(t, line.nu);
  r.item1_ratio = pm / pn;
  r.item1 = r.item1_ratio >= 1 / bound && r.item1_ratio <= bound;
  const Rational floor = 1 / bound;

  auto record = [&](ContractingItem& item, const MarkedGraph& s, const RationalLamination& lam) {
    const Rational v = sigma_pairing(tp, s, lam);
    ++item.checked;
    if (!item.min_value || v < *item.min_value) item.min_value = v;
    if (v < floor) {
      if (item.violations == 0)
        item.witness = {{"T", to_json(t)}, {"S", to_json(s)}, {"lamination", to_json(lam)},
                        {"B", to_string(bound)}, {"value", to_string(v)}};
      ++item.violations;
      item.passed = false;
    }
  };

  // Item 2 over random trees, the catalog topologies and perturbed axis points.
  const auto catalog = topology_catalog(rank);
  const RationalLamination both = line.mu.scaled(1 / pm) + line.nu.scaled(1 / pn);
  std::vector<MarkedGraph> item2_trees = catalog;
  while (item2_trees.size() < samples)
    item2_trees.push_back(item2_trees.size() % 2 ? perturb_axis_point(rng, line) : random_marked_graph(rng, catalog));
  for (const auto& s : item2_trees) record(r.item2, s, both);
  r.item2_samples = item2_trees.size();

  // Item 3: basic primitive classes of balanced trees, normalized at T...
  std::vector<RationalLamination> basic;
  std::set<ConjClass> seen_basic;
  for (std::size_t k = 0; k < samples && basic.size() < samples; ++k) {
    const MarkedGraph base = k % 2 ? perturb_axis_point(rng, line) : random_marked_graph(rng, catalog);
    const auto u = balanced_on(base, line.mu, line.nu);
    if (!u) continue;
    ++r.balanced_trees;
    int taken = 0;
    for (const auto& bc : basic_classes(*u).classes) {
      if (taken == 3) break;
      if (!is_primitive(bc.cls).primitive) continue;
      ++taken;
      if (!seen_basic.insert(bc.cls).second) continue;
      basic.push_back(RationalLamination::dirac(bc.cls, 1 / t.translation_length(bc.cls)));
    }
  }
  r.basic_laminations = basic.size();
  // ...against far trees: roses in which one axis class is a petal of tiny length.
  std::vector<MarkedGraph> far;
  std::uniform_int_distribution<int> tiny(60, 90);
  std::uniform_int_distribution<int> shear(-2, 2);
  for (const auto* lam : {&line.mu, &line.nu}) {
    const auto cert = is_primitive(lam->support().front().cls);
    if (!cert.primitive) continue;
    for (std::size_t k = 0; k < std::max<std::size_t>(samples / 20, 1); ++k) {
      std::vector<Word> b = cert.basis;
      b[1] = b[1] * b[0].power(shear(rng));
      mpz_class den = 1;
      den <<= static_cast<mp_bitcnt_t>(tiny(rng));
      std::vector<Rational> ls(static_cast<std::size_t>(rank), Rational(0));
      ls[0] = Rational(mpz_class(1), den);
      for (int i = 1; i < rank; ++i) ls[static_cast<std::size_t>(i)] = (1 - ls[0]) / (rank - 1);
      const auto s = rose_on_basis(b, ls);
      if (std::abs(balance_param(s, line.mu, line.nu).t()) <= 2 * to_double(bound)) continue;
      far.push_back(s);
    }
  }
  r.far_trees = far.size();
  for (const auto& s : far)
    for (const auto& xi : basic) record(r.item3, s, xi);
  return r;
}

struct AxisQualityReport {
  double kappa = 0;
  std::size_t samples = 0;
  std::size_t clamped = 0;
  std::size_t pairs_tested = 0;
  std::size_t item1_violations = 0;
  std::size_t item2_violations = 0;
  std::size_t item3_checked = 0;
  std::size_t item3_violations = 0;
  double worst_item1_slack = 0;  // most negative (lhs - rhs) seen, 0 if none
  double worst_item2_slack = 0;
  double worst_item3_distance = 0;  // largest d(S, projection) over near-closest S

  /// A kappa at which this sample set has no violations (pairs only drop out as kappa grows).
  double kappa_sufficient() const {
    return std::max(kappa - std::min(worst_item1_slack, worst_item2_slack), worst_item3_distance);
  }
  std::size_t violations() const { return item1_violations + item2_violations + item3_violations; }
};

/// Empirical contraction test at kappa = kappa_emp over sample trees: for
/// pairs whose projections are at least kappa apart, the one-sided and
/// symmetrized distances must nearly factor through the projections; and
/// near-closest line points must lie within kappa of the projection.
inline AxisQualityReport axis_quality_on(const LineOfMinima& line, std::vector<MarkedGraph> trees) {
  AxisQualityReport r;
  r.kappa = line.kappa_emp;
  r.samples = trees.size();

  std::vector<MetricPoint> pts;
  std::vector<Projection> proj;
  for (auto& g : trees) {
    const auto p = balancing_projection(line, g);
    if (p.clamped) {
      ++r.clamped;
      continue;
    }
    proj.push_back(p);
    pts.emplace_back(std::move(g));
  }
  const std::size_t n = pts.size();
  const std::size_t gsz = line.points.size();
  // One-sided distances between samples and from/to every grid point.
  const auto to_line = parallel_map(n, [&](std::size_t i) {
    std::vector<std::pair<double, double>> v;  // (d_L(T, gamma_j), d_L(gamma_j, T))
    for (std::size_t j = 0; j < gsz; ++j)
      v.emplace_back(lipschitz_stretch(pts[i], line.points[j]).log_value(),
                     lipschitz_stretch(line.points[j], pts[i]).log_value());
    return v;
  });
  const auto between = parallel_map(n, [&](std::size_t i) {
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) v[j] = lipschitz_stretch(pts[i], pts[j]).log_value();
    return v;
  });
  auto dl_line = [&](std::size_t a, std::size_t b) {  // d_L(gamma_a, gamma_b)
    return a == b ? 0.0 : lipschitz_stretch(line.points[a], line.points[b]).log_value();
  };
  std::vector<std::vector<double>> dl_grid(gsz, std::vector<double>(gsz, 0.0));
  for (std::size_t a = 0; a < gsz; ++a)
    for (std::size_t b = 0; b < gsz; ++b) dl_grid[a][b] = dl_line(a, b);

  const double kappa = r.kappa;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t pi = proj[i].index, pj = proj[j].index;
      if (line.distance[pi][pj] < kappa) continue;
      ++r.pairs_tested;
      const double lhs1 = between[i][j];
      const double rhs1 = to_line[i][pi].first + dl_grid[pi][pj] + to_line[j][pj].second - kappa;
      if (lhs1 < rhs1 - 1e-12) ++r.item1_violations;
      r.worst_item1_slack = std::min(r.worst_item1_slack, lhs1 - rhs1);
      if (i < j) {
        const double lhs2 = between[i][j] + between[j][i];
        const double rhs2 = to_line[i][pi].first + to_line[i][pi].second + line.distance[pi][pj] +
                            to_line[j][pj].first + to_line[j][pj].second - kappa;
        if (lhs2 < rhs2 - 1e-12) ++r.item2_violations;
        r.worst_item2_slack = std::min(r.worst_item2_slack, lhs2 - rhs2);
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(gsz);
    double inf = 0;
    for (std::size_t k = 0; k < gsz; ++k) {
      d[k] = to_line[i][k].first + to_line[i][k].second;
      if (k == 0 || d[k] < inf) inf = d[k];
    }
    for (std::size_t k = 0; k < gsz; ++k) {
      if (d[k] > inf + 1) continue;
      ++r.item3_checked;
      const double dp = line.distance[k][proj[i].index];
      r.worst_item3_distance = std::max(r.worst_item3_distance, dp);
      if (dp > kappa + 1e-12) ++r.item3_violations;
    }
  }
  return r;
}

/// axis_quality_on over `samples` trees, alternately random and perturbed axis points.
template <class Rng>
AxisQualityReport axis_quality(const LineOfMinima& line, std::size_t samples, Rng& rng) {
  const auto catalog = topology_catalog(line.mu.rank());
  std::vector<MarkedGraph> trees;
  for (std::size_t k = 0; k < samples; ++k)
    trees.push_back(k % 2 ? perturb_axis_point(rng, line) : random_marked_graph(rng, catalog));
  return axis_quality_on(line, std::move(trees));
}

}  // namespace cvlab
