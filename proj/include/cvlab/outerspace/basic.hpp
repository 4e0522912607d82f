#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "cvlab/outerspace/marked_graph.hpp"

namespace cvlab {

struct BasicClass {
  ConjClass cls;
  Rational length;
};

struct BasicClassList {
  std::vector<BasicClass> classes;  // sorted by (length, canonical form)
  std::size_t paths_explored = 0;
  bool truncated = false;
};

inline constexpr std::size_t kBasicPathCap = 10000;

/// Classes of all tight loops of metric length <= bound. Each loop is found
/// from its least directed edge, so rotations are mostly not revisited.
inline BasicClassList basic_classes(const MarkedGraph& g, const Rational& bound = Rational(2),
                                    std::size_t cap = kBasicPathCap) {
  BasicClassList out;
  std::map<ConjClass, Rational> found;
  EdgePath path;
  const int nd = 2 * g.edge_count();
  auto dfs = [&](auto&& self, const Rational& len) -> void {
    if (out.truncated) return;
    if (++out.paths_explored > cap) {
      out.truncated = true;
      return;
    }
    const int first = path.front();
    const int last = path.back();
    if (g.terminus(last) == g.origin(first) && first != flip(last)) found.emplace(g.class_of(path), len);
    for (int d = first; d < nd; ++d) {
      if (g.origin(d) != g.terminus(last) || d == flip(last)) continue;
      Rational next = len + g.length(edge_of(d));
      if (next > bound) continue;
      path.push_back(d);
      self(self, next);
      path.pop_back();
    }
  };
  for (int d0 = 0; d0 < nd && !out.truncated; ++d0) {
    const Rational& l = g.length(edge_of(d0));
    if (l > bound) continue;
    path.assign(1, d0);
    dfs(dfs, l);
  }
  for (auto& [c, l] : found) out.classes.push_back({c, l});
  std::stable_sort(out.classes.begin(), out.classes.end(), [](const BasicClass& a, const BasicClass& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.cls < b.cls;
  });
  return out;
}

}  // namespace cvlab
