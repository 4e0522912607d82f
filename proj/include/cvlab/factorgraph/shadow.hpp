#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvlab/freegroup/factor.hpp"
#include "cvlab/minima/line.hpp"
#include "cvlab/outerspace/basic.hpp"
#include "cvlab/outerspace/random.hpp"

namespace cvlab {

/// A proper free factor given by a free basis of it.
struct FFVertex {
  std::vector<Word> generators;

  int factor_rank() const { return static_cast<int>(generators.size()); }

  void validate(int rank) const {
    if (generators.empty() || factor_rank() >= rank) throw InvalidInput("factor rank must lie in [1, n)");
    if (!StallingsGraph::fold(generators, rank).generators_free())
      throw InvalidInput("factor generators are not a free basis of their span");
  }

  std::string str() const {
    std::string s = "<";
    for (std::size_t i = 0; i < generators.size(); ++i) s += (i ? ", " : "") + generators[i].str();
    return s + ">";
  }
};

struct ShadowPoint {
  ConjClass cls;           // winning basic primitive class
  FFVertex vertex;         // <cls>
  Rational length;         // its length on the source graph
  std::size_t position = 0;  // index in the basic class list
  std::size_t skipped = 0;   // non-primitive classes passed over
};

/// The rank-one factor of the first primitive class in basic-class order.
inline ShadowPoint upsilon(const MarkedGraph& t) {
  const auto list = basic_classes(t);
  ShadowPoint p;
  for (std::size_t i = 0; i < list.classes.size(); ++i) {
    const auto& bc = list.classes[i];
    if (!is_primitive(bc.cls).primitive) {
      ++p.skipped;
      continue;
    }
    p.cls = bc.cls;
    p.vertex = FFVertex{{bc.cls.word()}};
    p.length = bc.length;
    p.position = i;
    return p;
  }
  throw NoPrimitiveBasic("no primitive class among " + std::to_string(list.classes.size()) + " basic classes" +
                         (list.truncated ? " (enumeration truncated)" : ""));
}

enum class FFDistance { AtMostTwo, AtLeastThree, Undecided };

inline const char* to_string(FFDistance d) {
  switch (d) {
    case FFDistance::AtMostTwo: return "<=2";
    case FFDistance::AtLeastThree: return ">=3";
    case FFDistance::Undecided: return "undecided";
  }
  return "?";
}

/// Distance decision between two rank-one vertices with its certificate:
/// a middle factor for <= 2, a Whitehead-minimal filling tuple for >= 3.
struct FFDecision {
  ConjClass alpha;
  ConjClass beta;
  FFDistance verdict = FFDistance::Undecided;
  CommonFactorResult detail;
};

inline FFDecision ff_leq2(const ConjClass& alpha, const ConjClass& beta) {
  if (alpha.rank() != beta.rank()) throw InvalidInput("classes of different ranks");
  if (alpha == beta || alpha == beta.inverse()) throw InvalidInput("ff_leq2 needs two distinct vertices");
  for (const auto* c : {&alpha, &beta})
    if (!is_primitive(*c).primitive) throw InvalidInput("class " + c->str() + " is not primitive");
  FFDecision d{alpha, beta, FFDistance::Undecided, {}};
  const ConjClass pair[] = {alpha, beta};
  d.detail = common_proper_factor(pair);
  if (d.detail.verdict == FactorVerdict::Contained) d.verdict = FFDistance::AtMostTwo;
  if (d.detail.verdict == FactorVerdict::Fills) d.verdict = FFDistance::AtLeastThree;
  return d;
}

/// Re-verifies a decision from its certificate. A middle factor is checked
/// by Stallings folds; a filling tuple is checked by applying the recorded
/// reducer and testing its Whitehead graph, falling back to a fresh search
/// when the tuple was certified by exhausting minimal representatives.
inline bool recheck(const FFDecision& d) {
  const int rank = d.alpha.rank();
  const ConjClass pair[] = {d.alpha, d.beta};
  if (d.verdict == FFDistance::AtMostTwo) {
    const auto& f = d.detail.factor;
    const auto& c = d.detail.complement;
    if (f.empty() || c.empty()) return false;
    std::vector<Word> basis = f;
    basis.insert(basis.end(), c.begin(), c.end());
    return is_basis(basis, rank) && factor_contains_all(f, pair, rank);
  }
  if (d.verdict == FFDistance::AtLeastThree) {
    if (apply_all(d.detail.report.reducer, pair) != d.detail.report.minimized) return false;
    const WhiteheadGraph g(rank, d.detail.report.minimized);
    if (g.connected() && !g.cut_vertex()) return true;
    return common_proper_factor(pair).verdict == FactorVerdict::Fills;
  }
  return false;
}

/// 2 (len - 1) when every consecutive pair is within distance 2.
inline long ff_upper_bound(const std::vector<ConjClass>& chain) {
  if (chain.empty()) throw InvalidInput("empty chain");
  long hops = 0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i] == chain[i + 1] || chain[i] == chain[i + 1].inverse()) {
      if (!is_primitive(chain[i]).primitive) throw InvalidInput("class " + chain[i].str() + " is not primitive");
      ++hops;
      continue;
    }
    if (ff_leq2(chain[i], chain[i + 1]).verdict != FFDistance::AtMostTwo)
      throw ChainBroken("chain breaks between " + chain[i].str() + " and " + chain[i + 1].str() + " (index " +
                        std::to_string(i) + ")");
    ++hops;
  }
  return 2 * hops;
}

/// Psi(alpha): the balancing projection of a rose in which alpha is a petal.
inline Projection psi_retraction(const LineOfMinima& line, const ConjClass& alpha) {
  return balancing_projection(line, rose_adapted_to(alpha));
}

/// Rose on the basis {alpha, beta alpha^shift, ...} from the certified basis of alpha.
inline MarkedGraph sheared_adapted_rose(const ConjClass& alpha, long shift) {
  const auto cert = is_primitive(alpha);
  if (!cert.primitive) throw InvalidInput("class " + alpha.str() + " is not primitive");
  auto b = cert.basis;
  b[1] = b[1] * b[0].power(shift);
  return rose_on_basis(b);
}

struct RetractionSpread {
  std::size_t pairs = 0;
  double r_emp = 0;  // max d(Pi(T), Pi(T')) over the tested pairs
  ConjClass worst;
};

/// Projection spread over pairs of adapted roses for the same class: each
/// class is taken from a line point's shadow or a random primitive, and the
/// two roses differ by a random shear of the complementary petal.
template <class Rng>
RetractionSpread retraction_spread(const LineOfMinima& line, std::size_t pairs, Rng& rng) {
  RetractionSpread r;
  const int rank = line.mu.rank();
  std::uniform_int_distribution<long> shear(-3, 3);
  std::uniform_int_distribution<std::size_t> pick(0, line.points.size() - 1);
  std::uniform_int_distribution<int> twist(1, 4);
  for (std::size_t k = 0; k < pairs; ++k) {
    ConjClass alpha;
    if (k % 2 == 0) {
      alpha = upsilon(line.points[pick(rng)].graph).cls;
    } else {
      const auto phi = random_whitehead_product(rng, rank, twist(rng));
      alpha = ConjClass(phi.image(1));
    }
    long s1 = shear(rng), s2 = shear(rng);
    if (s1 == s2) s2 = s1 + 1;
    const auto p1 = balancing_projection(line, sheared_adapted_rose(alpha, s1));
    const auto p2 = balancing_projection(line, sheared_adapted_rose(alpha, s2));
    const double d = line.distance[p1.index][p2.index];
    ++r.pairs;
    if (d > r.r_emp || r.pairs == 1) {
      r.r_emp = std::max(r.r_emp, d);
      r.worst = alpha;
    }
  }
  return r;
}

struct ShadowRow {
  Rational t;
  ShadowPoint point;
  std::optional<FFDistance> to_previous;  // unset at the first row; AtMostTwo when the class repeats
};

struct ShadowReport {
  std::vector<ShadowRow> rows;
  std::optional<long> upper_bound;  // unset when the chain breaks
  std::string broken;
};

inline ShadowReport shadow_of_line(const LineOfMinima& line) {
  ShadowReport r;
  std::vector<ConjClass> chain;
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    ShadowRow row{line.grid[i], upsilon(line.points[i].graph), std::nullopt};
    if (i > 0) {
      const auto& prev = r.rows.back().point.cls;
      row.to_previous = prev == row.point.cls || prev == row.point.cls.inverse()
                            ? FFDistance::AtMostTwo
                            : ff_leq2(prev, row.point.cls).verdict;
    }
    chain.push_back(row.point.cls);
    r.rows.push_back(std::move(row));
  }
  try {
    r.upper_bound = ff_upper_bound(chain);
  } catch (const ChainBroken& e) {
    r.broken = e.what();
  }
  return r;
}

inline std::string shadow_csv(const ShadowReport& r) {
  std::ostringstream out;
  out << "t,class,factor,verdict_to_previous\n";
  for (const auto& row : r.rows)
    out << to_string(row.t) << ',' << row.point.cls.str() << ",\"" << row.point.vertex.str() << "\","
        << (row.to_previous ? to_string(*row.to_previous) : "") << '\n';
  return out.str();
}

}  // namespace cvlab
