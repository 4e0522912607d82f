#pragma once

#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cvlab/freegroup/word.hpp"

namespace cvlab {

/// Folded Stallings graph of a finitely generated subgroup H = <y_1..y_k> of F_n.
///
/// Each edge carries a label word over the subgroup generators such that the
/// product of labels along any closed path at the base vertex spells that
/// element of H in the y's. Folding preserves this by gauging the vertex that
/// gets merged away.
class StallingsGraph {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    Letter label = 1;  // positive generator of F_n
    Word h;            // word in the subgroup generators
    bool alive = true;
  };

  static StallingsGraph fold(std::span<const Word> generators, int rank) {
    StallingsGraph g;
    g.rank_ = rank;
    g.gen_count_ = static_cast<int>(generators.size());
    const int hrank = std::max(1, g.gen_count_);
    g.vertex_alive_.push_back(true);
    g.incident_.emplace_back();
    for (std::size_t j = 0; j < generators.size(); ++j) {
      const Word& y = generators[j];
      if (y.rank() != rank) throw InvalidInput("generator rank mismatch");
      if (y.empty()) continue;
      int at = 0;
      for (std::size_t p = 0; p < y.size(); ++p) {
        const bool last = p + 1 == y.size();
        const int next = last ? 0 : g.add_vertex();
        const Letter l = y[p];
        Word h(hrank);
        if (last) h = Word(hrank, {l > 0 ? static_cast<Letter>(j + 1) : -static_cast<Letter>(j + 1)});
        if (l > 0) g.add_edge(at, next, l, h);
        else g.add_edge(next, at, -l, h);
        at = next;
      }
    }
    g.run_folds();
    return g;
  }

  int rank() const { return rank_; }
  int vertex_count() const {
    int c = 0;
    for (bool a : vertex_alive_) c += a ? 1 : 0;
    return c;
  }
  int edge_count() const {
    int c = 0;
    for (const auto& e : edges_) c += e.alive ? 1 : 0;
    return c;
  }
  /// Rank of the subgroup (first Betti number of the folded graph).
  int subgroup_rank() const { return edge_count() - vertex_count() + 1; }
  /// True when a fold identified two parallel edges with different labels,
  /// i.e. the generators satisfy a nontrivial relation.
  bool dependent() const { return dependent_; }

  bool is_whole_group() const { return vertex_count() == 1 && edge_count() == rank_; }

  /// The generators form a free basis of the subgroup they generate.
  bool generators_free() const { return !dependent_ && subgroup_rank() == gen_count_; }

  bool accepts(const Word& w) const {
    auto end = read(0, w);
    return end && *end == 0;
  }

  /// Some conjugate of the cyclic word lies in H.
  bool accepts_conjugate(const ConjClass& c) const {
    if (c.trivial()) return true;
    for (int v = 0; v < static_cast<int>(vertex_alive_.size()); ++v) {
      if (!vertex_alive_[static_cast<std::size_t>(v)]) continue;
      auto end = read(v, c.word());
      if (end && *end == v) return true;
    }
    return false;
  }

  /// When H = F_n, expresses each basis letter x_i as a word in the generators.
  std::optional<std::vector<Word>> express_basis() const {
    if (!is_whole_group()) return std::nullopt;
    std::vector<Word> out(static_cast<std::size_t>(rank_));
    for (const auto& e : edges_)
      if (e.alive) out[static_cast<std::size_t>(e.label - 1)] = e.h;
    return out;
  }

 private:
  int add_vertex() {
    vertex_alive_.push_back(true);
    incident_.emplace_back();
    return static_cast<int>(vertex_alive_.size()) - 1;
  }

  void add_edge(int from, int to, Letter label, Word h) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({from, to, label, std::move(h), true});
    incident_[static_cast<std::size_t>(from)].push_back(id);
    if (to != from) incident_[static_cast<std::size_t>(to)].push_back(id);
  }

  std::optional<int> step(int v, Letter l) const {
    for (int id : incident_[static_cast<std::size_t>(v)]) {
      const Edge& e = edges_[static_cast<std::size_t>(id)];
      if (!e.alive) continue;
      if (l > 0 && e.from == v && e.label == l) return e.to;
      if (l < 0 && e.to == v && e.label == -l) return e.from;
    }
    return std::nullopt;
  }

  std::optional<int> read(int v, const Word& w) const {
    for (Letter l : w.letters()) {
      auto n = step(v, l);
      if (!n) return std::nullopt;
      v = *n;
    }
    return v;
  }

  // Half-edge at v: (edge id, signed label, contribution to H, far end).
  struct Half {
    int id;
    Letter signed_label;
    bool outgoing;
  };

  void kill_edge(int id) {
    Edge& e = edges_[static_cast<std::size_t>(id)];
    e.alive = false;
    for (int v : {e.from, e.to}) {
      auto& inc = incident_[static_cast<std::size_t>(v)];
      inc.erase(std::remove(inc.begin(), inc.end(), id), inc.end());
    }
  }

  // Merges `gone` into `keep` after gauging `gone` by g.
  void merge(int keep, int gone, const Word& g) {
    const Word ginv = g.inverse();
    for (int id : incident_[static_cast<std::size_t>(gone)]) {
      Edge& e = edges_[static_cast<std::size_t>(id)];
      if (e.from == gone) e.h = g * e.h;
      if (e.to == gone) e.h = e.h * ginv;
      if (e.from == gone) e.from = keep;
      if (e.to == gone) e.to = keep;
      auto& inc = incident_[static_cast<std::size_t>(keep)];
      if (std::find(inc.begin(), inc.end(), id) == inc.end()) inc.push_back(id);
    }
    incident_[static_cast<std::size_t>(gone)].clear();
    vertex_alive_[static_cast<std::size_t>(gone)] = false;
  }

  bool fold_at(int v) {
    std::map<Letter, Half> seen;
    for (int id : incident_[static_cast<std::size_t>(v)]) {
      const Edge& e = edges_[static_cast<std::size_t>(id)];
      std::vector<Half> halves;
      if (e.from == v) halves.push_back({id, e.label, true});
      if (e.to == v) halves.push_back({id, -e.label, false});
      for (const Half& h : halves) {
        auto [it, fresh] = seen.emplace(h.signed_label, h);
        if (fresh) continue;
        if (it->second.id == id) continue;
        fold_pair(v, it->second, h);
        return true;
      }
    }
    return false;
  }

  void fold_pair(int v, const Half& a, const Half& b) {
    (void)v;
    const Edge& ea = edges_[static_cast<std::size_t>(a.id)];
    const Edge& eb = edges_[static_cast<std::size_t>(b.id)];
    const int wa = a.outgoing ? ea.to : ea.from;
    const int wb = b.outgoing ? eb.to : eb.from;
    const Word ca = a.outgoing ? ea.h : ea.h.inverse();
    const Word cb = b.outgoing ? eb.h : eb.h.inverse();
    if (wa == wb) {
      if (!(ca == cb)) dependent_ = true;
      kill_edge(b.id);
      pending_.push_back(wa);
      return;
    }
    if (wb == 0) {
      // Keep the base vertex: merge wa into wb, dropping edge a.
      const Word g = cb.inverse() * ca;
      kill_edge(a.id);
      merge(wb, wa, g);
      pending_.push_back(wb);
    } else {
      const Word g = ca.inverse() * cb;
      kill_edge(b.id);
      merge(wa, wb, g);
      pending_.push_back(wa);
    }
  }

  void run_folds() {
    for (int v = 0; v < static_cast<int>(vertex_alive_.size()); ++v) pending_.push_back(v);
    while (!pending_.empty()) {
      const int v = pending_.back();
      pending_.pop_back();
      if (!vertex_alive_[static_cast<std::size_t>(v)]) continue;
      while (fold_at(v)) {
        if (!vertex_alive_[static_cast<std::size_t>(v)]) break;
      }
    }
    prune_hair();
  }

  // Removes valence-one non-base vertices repeatedly; they never support
  // reduced closed paths.
  void prune_hair() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 1; v < static_cast<int>(vertex_alive_.size()); ++v) {
        if (!vertex_alive_[static_cast<std::size_t>(v)]) continue;
        auto& inc = incident_[static_cast<std::size_t>(v)];
        if (inc.size() == 1) {
          const Edge& e = edges_[static_cast<std::size_t>(inc[0])];
          if (e.from == e.to) continue;
          kill_edge(inc[0]);
          vertex_alive_[static_cast<std::size_t>(v)] = false;
          changed = true;
        } else if (inc.empty()) {
          vertex_alive_[static_cast<std::size_t>(v)] = false;
          changed = true;
        }
      }
    }
  }

  int rank_ = 2;
  int gen_count_ = 0;
  bool dependent_ = false;
  std::vector<Edge> edges_;
  std::vector<bool> vertex_alive_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> pending_;
};

}  // namespace cvlab
