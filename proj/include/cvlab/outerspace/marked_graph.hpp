#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvlab/core/rational.hpp"
#include "cvlab/freegroup/automorphism.hpp"

namespace cvlab {

// Directed edges are encoded as 2e (tail -> head) and 2e + 1 (head -> tail).
using EdgePath = std::vector<int>;

inline int edge_of(int d) { return d >> 1; }
inline int flip(int d) { return d ^ 1; }

struct Edge {
  int tail = 0;
  int head = 0;
  Rational length;
};

/// Removes backtracks d, flip(d) in place.
inline void reduce_path(EdgePath& p) {
  std::size_t top = 0;
  for (int d : p) {
    if (top > 0 && p[top - 1] == flip(d)) --top;
    else p[top++] = d;
  }
  p.resize(top);
}

/// Removes backtracks including across the seam of a closed path.
inline void cyclically_reduce_path(EdgePath& p) {
  reduce_path(p);
  std::size_t i = 0, j = p.size();
  while (j - i >= 2 && p[i] == flip(p[j - 1])) {
    ++i;
    --j;
  }
  p = EdgePath(p.begin() + static_cast<std::ptrdiff_t>(i), p.begin() + static_cast<std::ptrdiff_t>(j));
}

inline EdgePath reversed_path(const EdgePath& p) {
  EdgePath r;
  r.reserve(p.size());
  for (auto it = p.rbegin(); it != p.rend(); ++it) r.push_back(flip(*it));
  return r;
}

/// A point of Outer space: a finite metric graph with a marking stored in
/// both directions. `marking[i]` is the based edge loop representing basis
/// letter i + 1, and `edge_words[e]` is the word read along edge e, so that
/// reading the words along marking[i] gives back x_{i+1}.
class MarkedGraph {
 public:
  enum class Check { UnitVolume, AnyVolume };

  MarkedGraph() = default;

  MarkedGraph(int rank, int vertex_count, int basepoint, std::vector<Edge> edges, std::vector<EdgePath> marking,
              std::vector<Word> edge_words, Check check = Check::UnitVolume)
      : rank_(rank),
        vertex_count_(vertex_count),
        basepoint_(basepoint),
        edges_(std::move(edges)),
        marking_(std::move(marking)),
        edge_words_(std::move(edge_words)) {
    validate(check);
  }

  int rank() const { return rank_; }
  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int basepoint() const { return basepoint_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const Rational& length(int e) const { return edge(e).length; }
  std::vector<Rational> lengths() const {
    std::vector<Rational> out;
    for (const auto& e : edges_) out.push_back(e.length);
    return out;
  }
  const std::vector<EdgePath>& marking() const { return marking_; }
  const EdgePath& marking(Letter x) const { return marking_[static_cast<std::size_t>(std::abs(x) - 1)]; }
  const std::vector<Word>& edge_words() const { return edge_words_; }

  int origin(int d) const { return d & 1 ? edge(edge_of(d)).head : edge(edge_of(d)).tail; }
  int terminus(int d) const { return d & 1 ? edge(edge_of(d)).tail : edge(edge_of(d)).head; }

  Word word_of(int d) const {
    const Word& w = edge_words_[static_cast<std::size_t>(edge_of(d))];
    return d & 1 ? w.inverse() : w;
  }
  Word word_of(const EdgePath& p) const {
    Word w(rank_);
    for (int d : p) w *= word_of(d);
    return w;
  }
  ConjClass class_of(const EdgePath& loop) const { return ConjClass(word_of(loop)); }

  Rational volume() const {
    Rational v = 0;
    for (const auto& e : edges_) v += e.length;
    return v;
  }

  Rational path_length(const EdgePath& p) const {
    Rational s = 0;
    for (int d : p) s += length(edge_of(d));
    return s;
  }

  std::vector<int> valences() const {
    std::vector<int> v(static_cast<std::size_t>(vertex_count_), 0);
    for (const auto& e : edges_) {
      ++v[static_cast<std::size_t>(e.tail)];
      ++v[static_cast<std::size_t>(e.head)];
    }
    return v;
  }

  /// Directed edges leaving v, in increasing id order (a loop contributes two).
  std::vector<int> half_edges(int v) const {
    std::vector<int> out;
    for (int d = 0; d < 2 * edge_count(); ++d)
      if (origin(d) == v) out.push_back(d);
    return out;
  }

  /// Reduced based edge loop representing w.
  EdgePath path_of(const Word& w) const {
    EdgePath p;
    for (Letter l : w.letters()) {
      const EdgePath& m = marking(l);
      if (l > 0) p.insert(p.end(), m.begin(), m.end());
      else
        for (auto it = m.rbegin(); it != m.rend(); ++it) p.push_back(flip(*it));
    }
    reduce_path(p);
    return p;
  }

  /// Tight closed edge path representing the class.
  EdgePath loop_of(const ConjClass& c) const {
    check_rank(c.rank());
    EdgePath p = path_of(c.word());
    cyclically_reduce_path(p);
    return p;
  }

  /// Number of traversals of each edge by the tight loop of the class.
  std::vector<long> occupancy(const ConjClass& c) const {
    std::vector<long> occ(edges_.size(), 0);
    for (int d : loop_of(c)) ++occ[static_cast<std::size_t>(edge_of(d))];
    return occ;
  }

  Rational translation_length(const ConjClass& c) const {
    if (c.trivial()) throw InvalidInput("translation length of the trivial class");
    return path_length(loop_of(c));
  }

  /// Same marked graph with new edge lengths.
  MarkedGraph with_lengths(std::vector<Rational> lengths, Check check = Check::UnitVolume) const {
    if (lengths.size() != edges_.size()) throw InvalidInput("length vector does not match edge count");
    MarkedGraph g = *this;
    for (std::size_t e = 0; e < lengths.size(); ++e) g.edges_[e].length = std::move(lengths[e]);
    g.validate(check);
    return g;
  }

  MarkedGraph normalized() const {
    const Rational v = volume();
    std::vector<Rational> ls;
    for (const auto& e : edges_) ls.push_back(e.length / v);
    return with_lengths(std::move(ls));
  }

  /// Precomposes the marking with phi: the result represents a class alpha by
  /// the loop that represented phi(alpha).
  MarkedGraph act(const Automorphism& phi) const {
    check_rank(phi.rank());
    MarkedGraph g = *this;
    for (int i = 1; i <= rank_; ++i) g.marking_[static_cast<std::size_t>(i - 1)] = path_of(phi.image(i));
    const Automorphism inv = phi.inverse();
    for (auto& w : g.edge_words_) w = inv.apply(w);
    g.validate(Check::AnyVolume);
    return g;
  }

  /// Contracts the non-loop edge e. The endpoint holding the basepoint is kept;
  /// the other one is re-gauged first so that e reads the trivial word.
  MarkedGraph collapse(int e) const {
    const Edge& ed = edge(e);
    if (ed.tail == ed.head) throw InvalidInput("cannot collapse a loop");
    const int d = ed.head == basepoint_ ? 2 * e + 1 : 2 * e;
    const int keep = origin(d);
    const int gone = terminus(d);
    const Word g = word_of(d);
    const Word ginv = g.inverse();
    MarkedGraph out;
    out.rank_ = rank_;
    out.vertex_count_ = vertex_count_ - 1;
    auto renum = [&](int v) {
      if (v == gone) v = keep;
      return v > gone ? v - 1 : v;
    };
    out.basepoint_ = renum(basepoint_);
    for (int k = 0; k < edge_count(); ++k) {
      if (k == e) continue;
      const Edge& x = edge(k);
      Word w = edge_words_[static_cast<std::size_t>(k)];
      if (x.tail == gone) w = g * w;
      if (x.head == gone) w = w * ginv;
      out.edges_.push_back({renum(x.tail), renum(x.head), x.length});
      out.edge_words_.push_back(std::move(w));
    }
    for (const auto& p : marking_) {
      EdgePath q;
      for (int dd : p) {
        const int k = edge_of(dd);
        if (k == e) continue;
        q.push_back(k > e ? dd - 2 : dd);
      }
      reduce_path(q);
      out.marking_.push_back(std::move(q));
    }
    out.validate(Check::AnyVolume);
    return out;
  }

  /// Splits vertex v: the half-edges in `moved` are re-attached to a new
  /// vertex joined to v by a new edge of the given length reading the trivial
  /// word. Each side must keep at least two half-edges.
  MarkedGraph blow_up(int v, const std::vector<int>& moved, const Rational& new_length) const {
    std::vector<bool> side(static_cast<std::size_t>(2 * edge_count()), false);
    for (int d : moved) {
      if (d < 0 || d >= 2 * edge_count() || origin(d) != v) throw InvalidInput("blow-up half-edge not at vertex");
      side[static_cast<std::size_t>(d)] = true;
    }
    MarkedGraph out = *this;
    const int w = vertex_count_;
    ++out.vertex_count_;
    for (int k = 0; k < edge_count(); ++k) {
      if (side[static_cast<std::size_t>(2 * k)]) out.edges_[static_cast<std::size_t>(k)].tail = w;
      if (side[static_cast<std::size_t>(2 * k + 1)]) out.edges_[static_cast<std::size_t>(k)].head = w;
    }
    const int f = 2 * edge_count();
    out.edges_.push_back({v, w, new_length});
    out.edge_words_.push_back(Word(rank_));
    auto moved_side = [&](int d) { return origin(d) == v && side[static_cast<std::size_t>(d)]; };
    for (auto& p : out.marking_) {
      EdgePath q;
      if (basepoint_ == v && moved_side(p.front())) q.push_back(f);
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (i > 0 && origin(p[i]) == v) {
          const bool in_w = moved_side(flip(p[i - 1]));
          const bool out_w = moved_side(p[i]);
          if (!in_w && out_w) q.push_back(f);
          if (in_w && !out_w) q.push_back(flip(f));
        }
        q.push_back(p[i]);
      }
      if (basepoint_ == v && moved_side(flip(p.back()))) q.push_back(flip(f));
      p = std::move(q);
    }
    out.validate(Check::AnyVolume);
    return out;
  }

  /// All blow-ups of v with every edge length reset to 1/(edge count).
  std::vector<MarkedGraph> blow_ups(int v) const {
    const auto hs = half_edges(v);
    std::vector<MarkedGraph> out;
    const std::size_t k = hs.size();
    if (k < 4) return out;
    // hs[0] stays at v, which enumerates each unordered split once.
    for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
      std::vector<int> moved;
      for (std::size_t b = 0; b + 1 < k; ++b)
        if (mask & (1u << b)) moved.push_back(hs[b + 1]);
      if (moved.size() < 2 || k - moved.size() < 2) continue;
      MarkedGraph g = blow_up(v, moved, Rational(1));
      out.push_back(g.with_lengths(std::vector<Rational>(g.edges_.size(), Rational(1, g.edge_count()))));
    }
    return out;
  }

  /// Canonical form of the underlying unmarked multigraph (vertex relabeling
  /// invariant).
  std::vector<std::pair<int, int>> topology_key() const {
    std::vector<int> perm(static_cast<std::size_t>(vertex_count_));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<int, int>> best;
    do {
      std::vector<std::pair<int, int>> key;
      for (const auto& e : edges_) {
        const int a = perm[static_cast<std::size_t>(e.tail)];
        const int b = perm[static_cast<std::size_t>(e.head)];
        key.emplace_back(std::min(a, b), std::max(a, b));
      }
      std::sort(key.begin(), key.end());
      if (best.empty() || key < best) best = std::move(key);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  /// Throws InvalidInput describing the first violated invariant.
  void validate(Check check = Check::UnitVolume) const {
    if (rank_ < 2 || rank_ > kMaxRank) throw InvalidInput("marked graph rank must be at least 2");
    if (vertex_count_ < 1) throw InvalidInput("marked graph has no vertices");
    if (basepoint_ < 0 || basepoint_ >= vertex_count_) throw InvalidInput("basepoint out of range");
    if (edge_words_.size() != edges_.size()) throw InvalidInput("edge word count does not match edge count");
    if (static_cast<int>(marking_.size()) != rank_) throw InvalidInput("marking must list one loop per basis letter");
    for (const auto& e : edges_) {
      if (e.tail < 0 || e.tail >= vertex_count_ || e.head < 0 || e.head >= vertex_count_)
        throw InvalidInput("edge endpoint out of range");
      if (sgn(e.length) <= 0) throw InvalidInput("edge lengths must be positive");
    }
    for (const auto& w : edge_words_)
      if (w.rank() != rank_) throw InvalidInput("edge word rank mismatch");
    if (edge_count() - vertex_count_ + 1 != rank_) throw InvalidInput("first Betti number differs from the rank");
    for (int val : valences())
      if (val < 3) throw InvalidInput("every vertex needs valence at least 3");
    std::vector<int> parent(static_cast<std::size_t>(vertex_count_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    };
    for (const auto& e : edges_) parent[static_cast<std::size_t>(find(e.tail))] = find(e.head);
    for (int v = 0; v < vertex_count_; ++v)
      if (find(v) != find(0)) throw InvalidInput("graph is not connected");
    if (check == Check::UnitVolume && volume() != 1) throw InvalidInput("volume must be exactly 1");
    for (int i = 1; i <= rank_; ++i) {
      const EdgePath& p = marking(i);
      if (p.empty()) throw InvalidInput("empty marking loop");
      int at = basepoint_;
      for (int d : p) {
        if (d < 0 || d >= 2 * edge_count()) throw InvalidInput("marking references an unknown edge");
        if (origin(d) != at) throw InvalidInput("marking loop is not an edge path");
        at = terminus(d);
      }
      if (at != basepoint_) throw InvalidInput("marking loop is not closed at the basepoint");
      if (!(word_of(p) == Word::generator(rank_, i)))
        throw InvalidInput("marking is inconsistent at letter " + std::string(1, letter_char(i)));
    }
  }

  friend bool operator==(const MarkedGraph& a, const MarkedGraph& b) {
    if (a.rank_ != b.rank_ || a.vertex_count_ != b.vertex_count_ || a.basepoint_ != b.basepoint_ ||
        a.marking_ != b.marking_ || a.edge_words_ != b.edge_words_ || a.edges_.size() != b.edges_.size())
      return false;
    for (std::size_t e = 0; e < a.edges_.size(); ++e)
      if (a.edges_[e].tail != b.edges_[e].tail || a.edges_[e].head != b.edges_[e].head ||
          a.edges_[e].length != b.edges_[e].length)
        return false;
    return true;
  }

 private:
  void check_rank(int r) const {
    if (r != rank_) throw InvalidInput("rank mismatch: graph of rank " + std::to_string(rank_) + " vs " + std::to_string(r));
  }

  int rank_ = 2;
  int vertex_count_ = 0;
  int basepoint_ = 0;
  std::vector<Edge> edges_;
  std::vector<EdgePath> marking_;
  std::vector<Word> edge_words_;
};

/// Marks a graph through a breadth-first spanning tree from the basepoint:
/// the non-tree edges, in index order, become the basis letters.
inline MarkedGraph tree_marked_graph(int vertex_count, int basepoint, std::vector<Edge> edges,
                                     MarkedGraph::Check check = MarkedGraph::Check::UnitVolume) {
  const int ne = static_cast<int>(edges.size());
  const int rank = ne - vertex_count + 1;
  if (rank < 2) throw InvalidInput("graph rank must be at least 2");
  std::vector<int> via(static_cast<std::size_t>(vertex_count), -1);  // directed edge reaching v from its parent
  std::vector<bool> seen(static_cast<std::size_t>(vertex_count), false);
  std::vector<bool> in_tree(static_cast<std::size_t>(ne), false);
  std::deque<int> q{basepoint};
  seen[static_cast<std::size_t>(basepoint)] = true;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int d = 0; d < 2 * ne; ++d) {
      const Edge& e = edges[static_cast<std::size_t>(edge_of(d))];
      const int o = d & 1 ? e.head : e.tail;
      const int t = d & 1 ? e.tail : e.head;
      if (o != v || seen[static_cast<std::size_t>(t)]) continue;
      seen[static_cast<std::size_t>(t)] = true;
      via[static_cast<std::size_t>(t)] = d;
      in_tree[static_cast<std::size_t>(edge_of(d))] = true;
      q.push_back(t);
    }
  }
  for (int v = 0; v < vertex_count; ++v)
    if (!seen[static_cast<std::size_t>(v)]) throw InvalidInput("graph is not connected");
  auto from_base = [&](int v) {
    EdgePath p;
    while (v != basepoint) {
      const int d = via[static_cast<std::size_t>(v)];
      p.push_back(d);
      const Edge& e = edges[static_cast<std::size_t>(edge_of(d))];
      v = d & 1 ? e.head : e.tail;
    }
    std::reverse(p.begin(), p.end());
    return p;
  };
  std::vector<EdgePath> marking;
  std::vector<Word> words(static_cast<std::size_t>(ne), Word(rank));
  int letter = 0;
  for (int k = 0; k < ne; ++k) {
    if (in_tree[static_cast<std::size_t>(k)]) continue;
    ++letter;
    const Edge& e = edges[static_cast<std::size_t>(k)];
    EdgePath p = from_base(e.tail);
    p.push_back(2 * k);
    const EdgePath back = reversed_path(from_base(e.head));
    p.insert(p.end(), back.begin(), back.end());
    marking.push_back(std::move(p));
    words[static_cast<std::size_t>(k)] = Word::generator(rank, letter);
  }
  return MarkedGraph(rank, vertex_count, basepoint, std::move(edges), std::move(marking), std::move(words), check);
}

/// Rose with one petal per basis letter.
inline MarkedGraph standard_rose(int rank, std::vector<Rational> lengths = {}) {
  if (lengths.empty()) lengths.assign(static_cast<std::size_t>(rank), Rational(1, rank));
  if (static_cast<int>(lengths.size()) != rank) throw InvalidInput("rose needs one length per petal");
  std::vector<Edge> edges;
  for (auto& l : lengths) edges.push_back({0, 0, std::move(l)});
  return tree_marked_graph(1, 0, std::move(edges));
}

/// Two vertices joined by three edges; a = e1 e0^{-1}, b = e2 e0^{-1}.
inline MarkedGraph theta_graph(std::vector<Rational> lengths = {}) {
  if (lengths.empty()) lengths.assign(3, Rational(1, 3));
  if (lengths.size() != 3) throw InvalidInput("theta graph needs three lengths");
  return tree_marked_graph(2, 0, {{0, 1, lengths[0]}, {0, 1, lengths[1]}, {0, 1, lengths[2]}});
}

/// Two loops joined by a separating arc; edges (loop a, arc, loop b).
inline MarkedGraph barbell_graph(std::vector<Rational> lengths = {}) {
  if (lengths.empty()) lengths.assign(3, Rational(1, 3));
  if (lengths.size() != 3) throw InvalidInput("barbell graph needs three lengths");
  return tree_marked_graph(2, 0, {{0, 0, lengths[0]}, {0, 1, lengths[1]}, {1, 1, lengths[2]}});
}

/// One representative per topological type of rank-n graphs with all
/// valences >= 3, each tree-marked with equal edge lengths. Generated by
/// repeated blow-ups of the rose.
inline std::vector<MarkedGraph> topology_catalog(int rank) {
  std::vector<MarkedGraph> out{standard_rose(rank)};
  std::vector<std::vector<std::pair<int, int>>> keys{out.front().topology_key()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MarkedGraph g = out[i];
    for (int v = 0; v < g.vertex_count(); ++v)
      for (const auto& h : g.blow_ups(v)) {
        auto key = h.topology_key();
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        keys.push_back(key);
        std::vector<Edge> edges;
        for (const auto& e : h.edges()) edges.push_back({e.tail, e.head, Rational(1, h.edge_count())});
        out.push_back(tree_marked_graph(h.vertex_count(), 0, std::move(edges)));
      }
  }
  return out;
}

}  // namespace cvlab
