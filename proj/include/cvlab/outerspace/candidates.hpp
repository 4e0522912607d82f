#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cvlab/outerspace/marked_graph.hpp"

namespace cvlab {

/// Every embedded circle once, oriented so that its least edge is traversed
/// forward and listed first.
inline std::vector<EdgePath> embedded_circles(const MarkedGraph& g) {
  std::vector<EdgePath> out;
  const int ne = g.edge_count();
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = g.edge(e);
    if (ed.tail == ed.head) {
      out.push_back({2 * e});
      continue;
    }
    std::vector<bool> used(static_cast<std::size_t>(g.vertex_count()), false);
    used[static_cast<std::size_t>(ed.tail)] = true;
    used[static_cast<std::size_t>(ed.head)] = true;
    EdgePath path{2 * e};
    auto dfs = [&](auto&& self, int at) -> void {
      for (int d = 2 * (e + 1); d < 2 * ne; ++d) {
        if (g.origin(d) != at) continue;
        const int k = edge_of(d);
        if (g.edge(k).tail == g.edge(k).head) continue;
        const int t = g.terminus(d);
        if (t == ed.tail) {
          path.push_back(d);
          out.push_back(path);
          path.pop_back();
          continue;
        }
        if (used[static_cast<std::size_t>(t)]) continue;
        used[static_cast<std::size_t>(t)] = true;
        path.push_back(d);
        self(self, t);
        path.pop_back();
        used[static_cast<std::size_t>(t)] = false;
      }
    };
    dfs(dfs, ed.head);
  }
  return out;
}

namespace detail {

inline std::vector<int> circle_vertices(const MarkedGraph& g, const EdgePath& c) {
  std::vector<int> vs;
  for (int d : c) vs.push_back(g.origin(d));
  return vs;
}

// The circle rotated to start (and end) at vertex v, which it must pass through.
inline EdgePath rotate_to(const MarkedGraph& g, const EdgePath& c, int v) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (g.origin(c[i]) == v) {
      EdgePath r(c.begin() + static_cast<std::ptrdiff_t>(i), c.end());
      r.insert(r.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
      return r;
    }
  throw Error("internal: circle does not pass through vertex");
}

inline EdgePath concat(std::initializer_list<const EdgePath*> parts) {
  EdgePath out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

}  // namespace detail

enum class CandidateKind { EmbeddedCircle, FigureEight, Barbell };

inline const char* to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::EmbeddedCircle: return "embedded-circle";
    case CandidateKind::FigureEight: return "figure-eight";
    case CandidateKind::Barbell: return "barbell";
  }
  return "?";
}

struct Candidate {
  ConjClass cls;
  CandidateKind kind = CandidateKind::EmbeddedCircle;
  EdgePath loop;  // tight loop in the source graph
  Rational length;
};

struct CandidateSet {
  std::vector<Candidate> loops;
};

/// Embedded circles, figure-eights (two circles meeting in one vertex) and
/// barbells (two disjoint circles joined by an embedded arc), each translated
/// to a conjugacy class through the marking. The second circle of a
/// figure-eight or barbell is taken in both orientations; reversing both
/// circles only inverts the class, so that is skipped. Duplicate classes keep
/// their first position.
inline CandidateSet candidates(const MarkedGraph& g) {
  CandidateSet out;
  std::set<ConjClass> seen;
  auto add = [&](EdgePath loop, CandidateKind kind) {
    ConjClass c = g.class_of(loop);
    if (!seen.insert(c).second) return;
    Rational len = g.path_length(loop);
    out.loops.push_back({std::move(c), kind, std::move(loop), std::move(len)});
  };
  const auto circles = embedded_circles(g);
  for (const auto& c : circles) add(c, CandidateKind::EmbeddedCircle);

  std::vector<std::vector<int>> verts;
  for (const auto& c : circles) verts.push_back(detail::circle_vertices(g, c));
  auto shared = [&](std::size_t i, std::size_t j) {
    std::vector<int> s;
    for (int v : verts[i])
      if (std::find(verts[j].begin(), verts[j].end(), v) != verts[j].end()) s.push_back(v);
    return s;
  };
  for (std::size_t i = 0; i < circles.size(); ++i)
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      const auto s = shared(i, j);
      if (s.size() != 1) continue;
      const EdgePath c1 = detail::rotate_to(g, circles[i], s[0]);
      const EdgePath c2 = detail::rotate_to(g, circles[j], s[0]);
      const EdgePath c2r = reversed_path(c2);
      add(detail::concat({&c1, &c2}), CandidateKind::FigureEight);
      add(detail::concat({&c1, &c2r}), CandidateKind::FigureEight);
    }

  for (std::size_t i = 0; i < circles.size(); ++i)
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      if (!shared(i, j).empty()) continue;
      std::vector<int> on(static_cast<std::size_t>(g.vertex_count()), 0);
      for (int v : verts[i]) on[static_cast<std::size_t>(v)] = 1;
      for (int v : verts[j]) on[static_cast<std::size_t>(v)] = 2;
      // Embedded arcs from circle i to circle j through vertices on neither.
      std::vector<EdgePath> arcs;
      std::vector<bool> used(static_cast<std::size_t>(g.vertex_count()), false);
      EdgePath arc;
      auto dfs = [&](auto&& self, int at) -> void {
        for (int d = 0; d < 2 * g.edge_count(); ++d) {
          if (g.origin(d) != at) continue;
          const int t = g.terminus(d);
          const int where = on[static_cast<std::size_t>(t)];
          if (where == 1 || t == at) continue;
          if (where == 2) {
            arc.push_back(d);
            arcs.push_back(arc);
            arc.pop_back();
            continue;
          }
          if (used[static_cast<std::size_t>(t)]) continue;
          used[static_cast<std::size_t>(t)] = true;
          arc.push_back(d);
          self(self, t);
          arc.pop_back();
          used[static_cast<std::size_t>(t)] = false;
        }
      };
      for (int v : verts[i]) dfs(dfs, v);
      for (const auto& p : arcs) {
        const EdgePath c1 = detail::rotate_to(g, circles[i], g.origin(p.front()));
        const EdgePath c2 = detail::rotate_to(g, circles[j], g.terminus(p.back()));
        const EdgePath c2r = reversed_path(c2);
        const EdgePath back = reversed_path(p);
        add(detail::concat({&c1, &p, &c2, &back}), CandidateKind::Barbell);
        add(detail::concat({&c1, &p, &c2r, &back}), CandidateKind::Barbell);
      }
    }
  return out;
}

struct SystoleReport {
  Rational systole;
  bool in_thick = false;
};

/// The shortest immersed loop is an embedded circle.
inline SystoleReport systole_thick(const MarkedGraph& g, const Rational& eps) {
  if (sgn(eps) <= 0) throw InvalidInput("epsilon must be positive");
  SystoleReport r;
  bool first = true;
  for (const auto& c : embedded_circles(g)) {
    Rational l = g.path_length(c);
    if (first || l < r.systole) r.systole = l;
    first = false;
  }
  r.in_thick = r.systole >= eps;
  return r;
}

}  // namespace cvlab
