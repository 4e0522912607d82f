#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cvlab/freegroup/factor.hpp"
#include "cvlab/outerspace/candidates.hpp"

namespace cvlab {

/// Multiplicative stretch factor exp(d_L(S, T)) with a class attaining it.
struct Stretch {
  Rational value;
  ConjClass witness;

  double log_value() const { return log_of(value); }
};

inline void check_same_rank(const MarkedGraph& s, const MarkedGraph& t) {
  if (s.rank() != t.rank())
    throw InvalidInput("rank mismatch: " + std::to_string(s.rank()) + " vs " + std::to_string(t.rank()));
}

/// max over the candidates of S of len_T / len_S; ties go to the earlier candidate.
inline Stretch lipschitz_stretch(const CandidateSet& cands_of_s, const MarkedGraph& t) {
  Stretch best;
  bool first = true;
  for (const auto& c : cands_of_s.loops) {
    Rational r = t.translation_length(c.cls) / c.length;
    if (first || r > best.value) {
      best.value = std::move(r);
      best.witness = c.cls;
      first = false;
    }
  }
  if (first) throw Error("internal: empty candidate set");
  return best;
}

inline Stretch lipschitz_stretch(const MarkedGraph& s, const MarkedGraph& t) {
  check_same_rank(s, t);
  return lipschitz_stretch(candidates(s), t);
}

/// Symmetrized distance, stored as the exact pair of stretch factors.
struct SymDistance {
  Stretch forward;   // S -> T
  Stretch backward;  // T -> S

  Rational product() const { return forward.value * backward.value; }
  double value() const { return forward.log_value() + backward.log_value(); }
  bool zero() const { return forward.value == 1 && backward.value == 1; }
};

inline SymDistance sym_distance(const MarkedGraph& s, const MarkedGraph& t) {
  check_same_rank(s, t);
  return {lipschitz_stretch(s, t), lipschitz_stretch(t, s)};
}

/// A marked graph with its candidate set computed once.
struct MetricPoint {
  MarkedGraph graph;
  CandidateSet cands;

  MetricPoint() = default;
  explicit MetricPoint(MarkedGraph g) : graph(std::move(g)), cands(candidates(graph)) {}
};

inline Stretch lipschitz_stretch(const MetricPoint& s, const MetricPoint& t) {
  check_same_rank(s.graph, t.graph);
  return lipschitz_stretch(s.cands, t.graph);
}

inline SymDistance sym_distance(const MetricPoint& s, const MetricPoint& t) {
  return {lipschitz_stretch(s, t), lipschitz_stretch(t, s)};
}

/// Looks for a length-preserving graph isomorphism S -> T that carries the
/// marking of S to the marking of T up to an inner automorphism.
inline bool marked_isometric(const MarkedGraph& s, const MarkedGraph& t) {
  check_same_rank(s, t);
  if (s.vertex_count() != t.vertex_count() || s.edge_count() != t.edge_count()) return false;
  if (s.topology_key() != t.topology_key()) return false;
  auto sorted_lengths = [](const MarkedGraph& g) {
    auto l = g.lengths();
    std::sort(l.begin(), l.end());
    return l;
  };
  if (sorted_lengths(s) != sorted_lengths(t)) return false;

  const int nv = s.vertex_count();
  const int ne = s.edge_count();
  std::vector<int> vmap(static_cast<std::size_t>(nv), -1), vused(static_cast<std::size_t>(nv), 0);
  std::vector<int> emap(static_cast<std::size_t>(ne), -1);  // edge of S -> directed edge of T
  std::vector<int> eused(static_cast<std::size_t>(ne), 0);

  auto check_marking = [&]() {
    std::vector<Word> images;
    for (int i = 1; i <= s.rank(); ++i) {
      Word w(s.rank());
      for (int d : s.marking(i)) {
        const int td = emap[static_cast<std::size_t>(edge_of(d))];
        w *= t.word_of(d & 1 ? flip(td) : td);
      }
      images.push_back(std::move(w));
    }
    return inner_conjugator(images).has_value();
  };

  std::function<bool(int)> assign_edges = [&](int e) -> bool {
    if (e == ne) return check_marking();
    const Edge& se = s.edge(e);
    const int a = vmap[static_cast<std::size_t>(se.tail)];
    const int b = vmap[static_cast<std::size_t>(se.head)];
    for (int d = 0; d < 2 * ne; ++d) {
      const int k = edge_of(d);
      if (eused[static_cast<std::size_t>(k)]) continue;
      if (t.origin(d) != a || t.terminus(d) != b || t.length(k) != se.length) continue;
      eused[static_cast<std::size_t>(k)] = 1;
      emap[static_cast<std::size_t>(e)] = d;
      if (assign_edges(e + 1)) return true;
      eused[static_cast<std::size_t>(k)] = 0;
    }
    return false;
  };
  std::function<bool(int)> assign_vertices = [&](int v) -> bool {
    if (v == nv) return assign_edges(0);
    for (int w = 0; w < nv; ++w) {
      if (vused[static_cast<std::size_t>(w)]) continue;
      vused[static_cast<std::size_t>(w)] = 1;
      vmap[static_cast<std::size_t>(v)] = w;
      if (assign_vertices(v + 1)) return true;
      vused[static_cast<std::size_t>(w)] = 0;
    }
    return false;
  };
  return assign_vertices(0);
}

/// Rose whose i-th petal represents basis[i]; lengths default to 1/n.
inline MarkedGraph rose_on_basis(const std::vector<Word>& basis, std::vector<Rational> lengths = {}) {
  const int rank = static_cast<int>(basis.size());
  const auto to_basis = Automorphism::from_images(basis);
  // act(R, psi) makes petal i represent psi^{-1}(x_i).
  return standard_rose(rank, std::move(lengths)).act(to_basis.inverse());
}

/// A rose in which the primitive class alpha is a petal: the petals carry
/// the basis certified by the primitivity test, all of length 1/n.
inline MarkedGraph rose_adapted_to(const ConjClass& alpha) {
  const auto res = is_primitive(alpha);
  if (!res.primitive) throw InvalidInput("class " + alpha.str() + " is not primitive");
  return rose_on_basis(res.basis);
}

}  // namespace cvlab
