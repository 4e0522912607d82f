#pragma once

#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvlab/freegroup/stallings.hpp"
#include "cvlab/freegroup/whitehead.hpp"

namespace cvlab {

inline long gcd_of(std::span<const long> v) {
  long g = 0;
  for (long x : v) g = std::gcd(g, std::labs(x));
  return g;
}

/// The words are a free basis of F_n: n of them and they fold to the rose.
inline bool is_basis(std::span<const Word> basis, int rank) {
  if (static_cast<int>(basis.size()) != rank) return false;
  return StallingsGraph::fold(basis, rank).is_whole_group();
}

struct PrimitivityResult {
  bool primitive = false;
  // On success: a free basis whose first element is the canonical word of the class.
  std::vector<Word> basis;
  WhiteheadReport report;
};

inline PrimitivityResult is_primitive(const ConjClass& alpha) {
  if (alpha.trivial()) throw InvalidInput("primitivity of the trivial class is undefined");
  const int rank = alpha.rank();
  const ConjClass one[] = {alpha};
  PrimitivityResult res;
  res.report = whitehead_minimize(one);
  if (res.report.total_length != 1) return res;
  res.primitive = true;

  // reducer(alpha) ~ x_i^e, so reducer^{-1}(x_i)^e is conjugate to alpha.
  const Letter l = res.report.minimized.front().word()[0];
  const int i = std::abs(l);
  const Automorphism back = res.report.reducer.inverse();
  std::vector<Word> basis;
  for (int j = 1; j <= rank; ++j) basis.push_back(back.image(j));
  Word rep = basis[static_cast<std::size_t>(i - 1)];
  if (l < 0) rep = rep.inverse();
  const auto g = conjugator_to(rep, alpha.word());
  if (!g) throw Error("internal: primitive certificate is not conjugate to the input");
  const Word ginv = g->inverse();
  std::vector<Word> out;
  out.push_back(alpha.word());
  for (int j = 1; j <= rank; ++j)
    if (j != i) out.push_back(*g * basis[static_cast<std::size_t>(j - 1)] * ginv);
  if (!is_basis(out, rank)) throw Error("internal: primitivity certificate failed Stallings validation");
  res.basis = std::move(out);
  return res;
}

enum class FactorVerdict { Contained, Fills, Inconclusive };

inline const char* to_string(FactorVerdict v) {
  switch (v) {
    case FactorVerdict::Contained: return "contained";
    case FactorVerdict::Fills: return "fills";
    case FactorVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct CommonFactorResult {
  FactorVerdict verdict = FactorVerdict::Inconclusive;
  std::vector<Word> factor;  // free basis of a proper free factor containing every input up to conjugacy
  std::vector<Word> complement;  // factor + complement is a free basis of F_n
  WhiteheadReport report;
  std::size_t states_explored = 0;
  std::string reason;
};

/// Every input class is conjugate into <generators>.
inline bool factor_contains_all(std::span<const Word> generators, std::span<const ConjClass> classes, int rank) {
  const auto g = StallingsGraph::fold(generators, rank);
  for (const auto& c : classes)
    if (!g.accepts_conjugate(c)) return false;
  return true;
}

inline constexpr std::size_t kFactorSearchCap = 20000;

/// Decides whether all classes lie (up to individual conjugation) in one
/// proper free factor.
///
/// After Whitehead minimization, a Whitehead graph that is connected without
/// a cut vertex certifies "fills" immediately. Otherwise the finite set of
/// minimal representatives joined by length-preserving Whitehead moves is
/// searched for one that omits a basis letter; such a representative exhibits
/// the factor, and exhausting the set without one certifies "fills".
inline CommonFactorResult common_proper_factor(std::span<const ConjClass> classes,
                                               std::size_t cap = kFactorSearchCap) {
  if (classes.empty()) throw InvalidInput("common_proper_factor needs at least one class");
  for (const auto& c : classes)
    if (c.trivial()) throw InvalidInput("trivial class in common_proper_factor");
  const int rank = classes.front().rank();
  CommonFactorResult res;
  res.report = whitehead_minimize(classes);
  if (res.report.graph.connected() && !res.report.graph.cut_vertex()) {
    res.verdict = FactorVerdict::Fills;
    res.reason = "minimal Whitehead graph is connected without cut vertex";
    return res;
  }

  struct State {
    std::vector<ConjClass> classes;
    Automorphism to_state;  // maps the inputs onto `classes`
  };
  auto missing_letters = [rank](const std::vector<ConjClass>& cs) {
    std::vector<bool> used(static_cast<std::size_t>(rank), false);
    for (const auto& c : cs)
      for (Letter l : c.word().letters()) used[static_cast<std::size_t>(std::abs(l) - 1)] = true;
    return used;
  };
  std::map<std::vector<ConjClass>, bool> seen;
  std::deque<State> queue;
  queue.push_back({res.report.minimized, res.report.reducer});
  seen.emplace(res.report.minimized, true);
  const auto& moves = whitehead_moves(rank);
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    ++res.states_explored;
    const auto used = missing_letters(s.classes);
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      const Automorphism back = s.to_state.inverse();
      for (int j = 1; j <= rank; ++j)
        (used[static_cast<std::size_t>(j - 1)] ? res.factor : res.complement).push_back(back.image(j));
      if (!factor_contains_all(res.factor, classes, rank))
        throw Error("internal: free factor certificate failed membership validation");
      res.verdict = FactorVerdict::Contained;
      res.reason = "a minimal representative omits a basis letter";
      return res;
    }
    if (seen.size() >= cap) {
      res.verdict = FactorVerdict::Inconclusive;
      res.reason = "minimal-representative search exceeded " + std::to_string(cap) + " states";
      return res;
    }
    for (const auto& mv : moves) {
      auto next = apply_all(mv.automorphism, s.classes);
      if (total_length(next) != res.report.total_length) continue;
      if (!seen.emplace(next, true).second) continue;
      queue.push_back({std::move(next), mv.automorphism * s.to_state});
    }
  }
  res.verdict = FactorVerdict::Fills;
  res.reason = "no minimal representative omits a basis letter";
  return res;
}

}  // namespace cvlab
