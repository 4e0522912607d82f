#pragma once

#include <optional>
#include <vector>

#include "cvlab/freegroup/whitehead.hpp"
#include "cvlab/laminations/lamination.hpp"
#include "cvlab/minima/simplex.hpp"
#include "cvlab/outerspace/candidates.hpp"

namespace cvlab {

/// Minimize a nonnegative linear form in the edge lengths of one marked
/// graph over the closed simplex {volume 1, every embedded circle >= eps}.
struct SimplexProgram {
  MarkedGraph graph;  // lengths are ignored; topology and marking matter
  std::vector<Rational> objective;
  Rational eps;
  std::vector<EdgePath> circles;

  SimplexProgram(MarkedGraph g, const RationalLamination& lam, Rational e)
      : graph(std::move(g)), objective(pairing_coefficients(graph, lam)), eps(std::move(e)), circles(embedded_circles(graph)) {
    if (sgn(eps) <= 0) throw InvalidInput("epsilon must be positive");
  }

  LinearProgram to_lp() const {
    const std::size_t ne = static_cast<std::size_t>(graph.edge_count());
    const std::size_t nc = circles.size();
    LinearProgram lp;
    lp.c.assign(ne + nc, Rational(0));
    for (std::size_t e = 0; e < ne; ++e) lp.c[e] = objective[e];
    lp.a.push_back(std::vector<Rational>(ne + nc, Rational(0)));
    for (std::size_t e = 0; e < ne; ++e) lp.a[0][e] = 1;
    lp.b.push_back(Rational(1));
    for (std::size_t k = 0; k < nc; ++k) {
      std::vector<Rational> row(ne + nc, Rational(0));
      for (int d : circles[k]) row[static_cast<std::size_t>(edge_of(d))] = 1;
      row[ne + k] = -1;
      lp.a.push_back(std::move(row));
      lp.b.push_back(eps);
    }
    return lp;
  }

  bool feasible_point(const std::vector<Rational>& lengths) const {
    Rational vol = 0;
    for (const auto& l : lengths) {
      if (sgn(l) < 0) return false;
      vol += l;
    }
    if (vol != 1) return false;
    for (const auto& c : circles) {
      Rational s = 0;
      for (int d : c) s += lengths[static_cast<std::size_t>(edge_of(d))];
      if (s < eps) return false;
    }
    return true;
  }

  Rational evaluate(const std::vector<Rational>& lengths) const {
    Rational s = 0;
    for (std::size_t e = 0; e < lengths.size(); ++e) s += objective[e] * lengths[e];
    return s;
  }
};

struct SimplexOptimum {
  std::vector<Rational> lengths;  // may contain zeros on a forest
  Rational value;
  LpSolution lp;
};

inline std::optional<SimplexOptimum> simplex_min(const SimplexProgram& prog) {
  auto sol = solve_lp(prog.to_lp());
  if (!sol) return std::nullopt;
  SimplexOptimum o;
  o.lengths.assign(sol->x.begin(), sol->x.begin() + prog.graph.edge_count());
  o.value = prog.evaluate(o.lengths);
  o.lp = std::move(*sol);
  return o;
}

/// The marked graph carrying the given lengths with its zero-length edges
/// (a forest, since every circle is positive) collapsed.
inline MarkedGraph realize(const MarkedGraph& g, const std::vector<Rational>& lengths) {
  MarkedGraph h = g.with_lengths(
      [&] {
        std::vector<Rational> ls = lengths;
        for (auto& l : ls)
          if (sgn(l) == 0) l = 1;  // placeholder; the edge is collapsed below
        return ls;
      }(),
      MarkedGraph::Check::AnyVolume);
  for (int e = g.edge_count() - 1; e >= 0; --e)
    if (sgn(lengths[static_cast<std::size_t>(e)]) == 0) h = h.collapse(e);
  h.validate();
  return h;
}

struct MinPoint {
  MarkedGraph graph;
  Rational value;
};

inline std::optional<MinPoint> optimize_on(const MarkedGraph& g, const RationalLamination& obj, const Rational& eps) {
  const SimplexProgram prog(g, obj, eps);
  auto o = simplex_min(prog);
  if (!o) return std::nullopt;
  return MinPoint{realize(g, o->lengths), o->value};
}

/// Topologies and markings adjacent to g: blow-ups of each vertex, every
/// one-edge collapse followed by each blow-up of the merged vertex, and for
/// roses every Whitehead re-marking.
inline std::vector<MarkedGraph> search_neighbors(const MarkedGraph& g) {
  std::vector<MarkedGraph> out;
  for (int v = 0; v < g.vertex_count(); ++v)
    for (auto& h : g.blow_ups(v)) out.push_back(std::move(h));
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.tail == ed.head) continue;
    const int keep = ed.head == g.basepoint() ? ed.head : ed.tail;
    const int gone = keep == ed.head ? ed.tail : ed.head;
    const int merged = keep > gone ? keep - 1 : keep;
    const MarkedGraph h = g.collapse(e).normalized();
    out.push_back(h);
    for (auto& k : h.blow_ups(merged)) out.push_back(std::move(k));
  }
  if (g.vertex_count() == 1)
    for (const auto& mv : whitehead_moves(g.rank())) out.push_back(g.act(mv.automorphism));
  return out;
}

struct MinSearchResult {
  MarkedGraph graph;
  Rational value;
  int steps = 0;
  std::size_t programs_solved = 0;
};

inline constexpr int kMinSearchStepCap = 10000;

/// Local search for a minimizer of <., obj> over the eps-thick part: move to
/// the strictly best neighbor until none improves. The result is a local
/// minimum; global optimality is not claimed.
inline MinSearchResult min_search(const RationalLamination& obj, const Rational& eps, const MarkedGraph& seed) {
  if (obj.rank() != seed.rank()) throw InvalidInput("objective and seed have different ranks");
  auto start = optimize_on(seed, obj, eps);
  if (!start) throw Infeasible("epsilon is infeasible on the seed topology");
  MinSearchResult r{start->graph, start->value, 0, 1};
  while (r.steps < kMinSearchStepCap) {
    std::optional<MinPoint> best;
    for (const auto& h : search_neighbors(r.graph)) {
      auto p = optimize_on(h, obj, eps);
      ++r.programs_solved;
      if (p && p->value < r.value && (!best || p->value < best->value)) best = std::move(p);
    }
    if (!best) break;
    r.graph = std::move(best->graph);
    r.value = std::move(best->value);
    ++r.steps;
  }
  return r;
}

}  // namespace cvlab
