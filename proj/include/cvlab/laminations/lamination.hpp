#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cvlab/freegroup/factor.hpp"
#include "cvlab/freegroup/iwip.hpp"
#include "cvlab/outerspace/io.hpp"
#include "cvlab/outerspace/marked_graph.hpp"

namespace cvlab {

struct WeightedClass {
  ConjClass cls;
  Rational weight;
};

/// Finitely supported measured lamination: a positive combination of
/// distinct conjugacy classes.
class RationalLamination {
 public:
  RationalLamination() = default;

  /// Merges repeated classes by adding their weights.
  RationalLamination(int rank, const std::vector<WeightedClass>& support) : rank_(rank) {
    std::map<ConjClass, std::size_t> index;
    for (const auto& wc : support) {
      if (wc.cls.rank() != rank) throw InvalidInput("lamination class has the wrong rank");
      if (wc.cls.trivial()) throw InvalidInput("lamination support contains the trivial class");
      if (sgn(wc.weight) <= 0) throw InvalidInput("lamination weights must be positive");
      auto [it, fresh] = index.emplace(wc.cls, support_.size());
      if (fresh) support_.push_back(wc);
      else support_[it->second].weight += wc.weight;
    }
    if (support_.empty()) throw InvalidInput("lamination support is empty");
  }

  static RationalLamination dirac(const ConjClass& c, Rational weight = 1) {
    return RationalLamination(c.rank(), {{c, std::move(weight)}});
  }

  int rank() const { return rank_; }
  const std::vector<WeightedClass>& support() const { return support_; }

  RationalLamination scaled(const Rational& c) const {
    if (sgn(c) <= 0) throw InvalidInput("lamination scale must be positive");
    RationalLamination out = *this;
    for (auto& wc : out.support_) wc.weight *= c;
    return out;
  }

  friend RationalLamination operator+(const RationalLamination& a, const RationalLamination& b) {
    if (a.rank_ != b.rank_) throw InvalidInput("lamination rank mismatch");
    std::vector<WeightedClass> all = a.support_;
    all.insert(all.end(), b.support_.begin(), b.support_.end());
    return RationalLamination(a.rank_, all);
  }

  /// Pushes every support class through phi.
  RationalLamination pushed(const Automorphism& phi) const {
    std::vector<WeightedClass> out;
    for (const auto& wc : support_) out.push_back({phi.apply(wc.cls), wc.weight});
    return RationalLamination(rank_, out);
  }

  std::vector<ConjClass> classes() const {
    std::vector<ConjClass> out;
    for (const auto& wc : support_) out.push_back(wc.cls);
    return out;
  }

  friend bool operator==(const RationalLamination& a, const RationalLamination& b) {
    if (a.rank_ != b.rank_ || a.support_.size() != b.support_.size()) return false;
    for (std::size_t i = 0; i < a.support_.size(); ++i)
      if (!(a.support_[i].cls == b.support_[i].cls) || a.support_[i].weight != b.support_[i].weight) return false;
    return true;
  }

 private:
  int rank_ = 2;
  std::vector<WeightedClass> support_;
};

/// <T, mu> = sum of weight * translation length.
inline Rational pairing(const MarkedGraph& t, const RationalLamination& mu) {
  if (t.rank() != mu.rank()) throw InvalidInput("pairing of different ranks");
  Rational s = 0;
  for (const auto& wc : mu.support()) s += wc.weight * t.translation_length(wc.cls);
  return s;
}

/// Edge coefficients of the linear form lengths -> <T, mu>.
inline std::vector<Rational> pairing_coefficients(const MarkedGraph& t, const RationalLamination& mu) {
  std::vector<Rational> c(static_cast<std::size_t>(t.edge_count()), Rational(0));
  for (const auto& wc : mu.support()) {
    const auto occ = t.occupancy(wc.cls);
    for (std::size_t e = 0; e < c.size(); ++e)
      if (occ[e]) c[e] += wc.weight * occ[e];
  }
  return c;
}

/// mu rescaled to pairing 1 with T.
inline RationalLamination normalized_at(const MarkedGraph& t, const RationalLamination& mu) {
  return mu.scaled(1 / pairing(t, mu));
}

/// Finite-depth stand-in for the fixed laminations of an iwip.
struct IwipAxisSpec {
  Automorphism phi;
  ConjClass seed;
  int depth = 8;
  Rational lambda_estimate;

  /// Validates the heuristic and computes the growth estimate at the standard rose.
  static IwipAxisSpec make(const Automorphism& phi, const ConjClass& seed, int depth) {
    if (depth < 0) throw InvalidInput("depth must be nonnegative");
    if (seed.trivial() || seed.rank() != phi.rank()) throw InvalidInput("seed must be a nontrivial class of the same rank");
    const auto v = iwip_heuristic(phi);
    if (!v.pass) throw InvalidInput("automorphism fails the iwip heuristic: " + v.reason);
    IwipAxisSpec s{phi, seed, depth, Rational(0)};
    const int m = std::max(depth, 1);
    const Rational hi(static_cast<long>(phi.power(m).apply(seed).size()));
    const Rational lo(static_cast<long>(phi.power(m - 1).apply(seed).size()));
    s.lambda_estimate = hi / lo;
    if (s.lambda_estimate <= 1) throw InvalidInput("seed does not grow under the automorphism");
    return s;
  }
};

struct LaminationPair {
  RationalLamination mu;
  RationalLamination nu;
};

/// mu = delta of phi^m(seed), nu = delta of phi^{-m}(seed), each normalized to
/// pairing 1 with the standard rose.
inline LaminationPair iwip_laminations(const IwipAxisSpec& spec) {
  const int rank = spec.phi.rank();
  const auto rose = standard_rose(rank);
  const auto fwd = RationalLamination::dirac(spec.phi.power(spec.depth).apply(spec.seed));
  const auto bwd = RationalLamination::dirac(spec.phi.inverse().power(spec.depth).apply(spec.seed));
  return {normalized_at(rose, fwd), normalized_at(rose, bwd)};
}

struct FillsCertificate {
  bool certified = false;
  CommonFactorResult detail;  // the containing factor when not certified
};

/// Certified when the combined supports fill (lie in no common proper free factor).
inline FillsCertificate fills_certificate(const RationalLamination& mu, const RationalLamination& nu) {
  if (mu.rank() != nu.rank()) throw InvalidInput("lamination rank mismatch");
  std::vector<ConjClass> all = mu.classes();
  for (const auto& c : nu.classes())
    if (std::find(all.begin(), all.end(), c) == all.end()) all.push_back(c);
  FillsCertificate f;
  f.detail = common_proper_factor(all);
  f.certified = f.detail.verdict == FactorVerdict::Fills;
  return f;
}

/// exp(t) = <T, nu> / <T, mu> balances <T, e^{t/2} mu> = <T, e^{-t/2} nu>.
struct BalanceParam {
  Rational exp_t;
  double t() const { return log_of(exp_t); }
};

inline BalanceParam balance_param(const MarkedGraph& t, const RationalLamination& mu, const RationalLamination& nu) {
  return {pairing(t, nu) / pairing(t, mu)};
}

inline Json to_json(const RationalLamination& mu) {
  Json j = Json::array();
  for (const auto& wc : mu.support()) j.push_back({{"word", wc.cls.str()}, {"weight", to_string(wc.weight)}});
  return j;
}

inline RationalLamination lamination_from_json(const Json& j, int rank) {
  try {
    std::vector<WeightedClass> s;
    for (const auto& r : j) s.push_back({ConjClass::parse(r.at("word").get<std::string>(), rank),
                                         parse_rational(r.at("weight").get<std::string>())});
    return RationalLamination(rank, s);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("malformed lamination: ") + ex.what());
  }
}

}  // namespace cvlab
