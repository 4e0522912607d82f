#pragma once

#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cvlab/freegroup/automorphism.hpp"

namespace cvlab {

/// Type-2 Whitehead automorphism (A, a): a is fixed, and for every other
/// basis letter x, x -> x a if only x is in A, a^{-1} x if only x^{-1} is in A,
/// a^{-1} x a if both are.
struct WhiteheadMove {
  Letter multiplier = 1;
  std::vector<Letter> subset;  // letters of A other than the multiplier
  Automorphism automorphism;
};

namespace detail {

inline Automorphism whitehead_automorphism(int rank, Letter a, const std::vector<bool>& in_set) {
  // in_set is indexed by letter_key
  auto images = [&](Letter mult, auto member) {
    std::vector<Word> ims;
    for (int i = 1; i <= rank; ++i) {
      Word x = Word::generator(rank, i);
      if (i == std::abs(mult)) {
        ims.push_back(x);
        continue;
      }
      const bool pos = member(i);
      const bool neg = member(-i);
      const Word m = Word::generator(rank, mult);
      Word img = x;
      if (pos) img = img * m;
      if (neg) img = m.inverse() * img;
      ims.push_back(img);
    }
    return ims;
  };
  auto member = [&](Letter l) { return static_cast<bool>(in_set[static_cast<std::size_t>(letter_key(l))]); };
  // (A, a)^{-1} = (A - a + a^{-1}, a^{-1}); membership of the other letters is unchanged.
  return Automorphism(images(a, member), images(-a, member));
}

}  // namespace detail

/// All nontrivial type-2 Whitehead moves of rank n in a fixed enumeration
/// order (multiplier by alphabet order, then subset bitmask ascending).
/// Moves that conjugate every other letter are omitted: they fix every
/// conjugacy class.
inline const std::vector<WhiteheadMove>& whitehead_moves(int rank) {
  static std::mutex mu;
  static std::map<int, std::vector<WhiteheadMove>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(rank);
  if (it != cache.end()) return it->second;
  std::vector<WhiteheadMove> moves;
  for (int key = 0; key < 2 * rank; ++key) {
    const Letter a = (key % 2 == 0) ? key / 2 + 1 : -(key / 2 + 1);
    std::vector<Letter> others;
    for (int k = 0; k < 2 * rank; ++k) {
      const Letter l = (k % 2 == 0) ? k / 2 + 1 : -(k / 2 + 1);
      if (std::abs(l) != std::abs(a)) others.push_back(l);
    }
    const unsigned full = (1u << others.size()) - 1u;
    for (unsigned mask = 1; mask < full; ++mask) {
      std::vector<bool> in_set(static_cast<std::size_t>(2 * rank), false);
      std::vector<Letter> subset;
      for (std::size_t b = 0; b < others.size(); ++b)
        if (mask & (1u << b)) {
          in_set[static_cast<std::size_t>(letter_key(others[b]))] = true;
          subset.push_back(others[b]);
        }
      moves.push_back({a, subset, detail::whitehead_automorphism(rank, a, in_set)});
    }
  }
  return cache.emplace(rank, std::move(moves)).first->second;
}

inline std::size_t total_length(std::span<const ConjClass> classes) {
  return std::accumulate(classes.begin(), classes.end(), std::size_t{0},
                         [](std::size_t s, const ConjClass& c) { return s + c.size(); });
}

/// Undirected multigraph on the 2n letters (vertex id = letter_key): for each
/// cyclic word, an edge joins each letter to the inverse of its successor.
class WhiteheadGraph {
 public:
  WhiteheadGraph() = default;
  WhiteheadGraph(int rank, std::span<const ConjClass> classes) : rank_(rank) {
    for (const auto& c : classes) {
      const auto ls = c.word().letters();
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const Letter u = ls[i];
        const Letter v = -ls[(i + 1) % ls.size()];
        edges_.emplace_back(letter_key(u), letter_key(v));
      }
    }
  }

  int rank() const { return rank_; }
  int vertex_count() const { return 2 * rank_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool connected() const { return components_without(-1) == 1; }

  /// A vertex whose removal disconnects the remaining vertices.
  std::optional<int> cut_vertex() const {
    if (!connected()) return std::nullopt;
    for (int v = 0; v < vertex_count(); ++v)
      if (components_without(v) > 1) return v;
    return std::nullopt;
  }

 private:
  int components_without(int removed) const {
    std::vector<int> parent(static_cast<std::size_t>(vertex_count()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      return x;
    };
    for (auto [u, v] : edges_) {
      if (u == removed || v == removed) continue;
      parent[static_cast<std::size_t>(find(u))] = find(v);
    }
    int count = 0;
    for (int v = 0; v < vertex_count(); ++v)
      if (v != removed && find(v) == v) ++count;
    return count;
  }

  int rank_ = 2;
  std::vector<std::pair<int, int>> edges_;
};

struct WhiteheadReport {
  std::vector<ConjClass> minimized;
  Automorphism reducer;  // reducer applied to the inputs gives `minimized`
  std::size_t total_length = 0;
  WhiteheadGraph graph;
  int moves_applied = 0;
};

inline std::vector<ConjClass> apply_all(const Automorphism& phi, std::span<const ConjClass> classes) {
  std::vector<ConjClass> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(phi.apply(c));
  return out;
}

/// Greedy steepest descent over all Whitehead moves; ties go to the earliest
/// move in enumeration order.
inline WhiteheadReport whitehead_minimize(std::span<const ConjClass> classes) {
  if (classes.empty()) throw InvalidInput("whitehead_minimize needs at least one class");
  const int rank = classes.front().rank();
  for (const auto& c : classes)
    if (c.rank() != rank) throw InvalidInput("classes of mixed rank");
  WhiteheadReport rep;
  rep.minimized.assign(classes.begin(), classes.end());
  rep.reducer = Automorphism::identity(rank);
  rep.total_length = total_length(rep.minimized);
  const auto& moves = whitehead_moves(rank);
  while (true) {
    std::size_t best = rep.total_length;
    const WhiteheadMove* best_move = nullptr;
    std::vector<ConjClass> best_classes;
    for (const auto& mv : moves) {
      auto next = apply_all(mv.automorphism, rep.minimized);
      const auto len = total_length(next);
      if (len < best) {
        best = len;
        best_move = &mv;
        best_classes = std::move(next);
      }
    }
    if (!best_move) break;
    rep.minimized = std::move(best_classes);
    rep.reducer = best_move->automorphism * rep.reducer;
    rep.total_length = best;
    ++rep.moves_applied;
  }
  rep.graph = WhiteheadGraph(rank, rep.minimized);
  return rep;
}

}  // namespace cvlab
