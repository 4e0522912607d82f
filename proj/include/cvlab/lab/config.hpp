#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvlab/core/rational.hpp"
#include "cvlab/freegroup/automorphism.hpp"
#include "cvlab/outerspace/io.hpp"

namespace cvlab {

struct GridConfig {
  Rational lo{-4};
  Rational hi{4};
  Rational step{1, 2};
};

struct SchottkyConfig {
  std::vector<std::string> phi{"ab", "a"};
  std::vector<std::string> tau{"a", "ab"};  // psi = tau phi tau^-1
  int k = 4;
  int free_bound = 6;
  int orbit_length = 4;
};

/// Pass/fail thresholds for the empirical verdicts.
struct Thresholds {
  double kappa_drift = 0.10;
  double morse_drift = 0.10;
  double fills_fraction = 0.90;
  std::size_t max_violations = 0;
  double retraction_slack = 4;  // R_emp <= 2 kappa_emp + slack
};

struct ExperimentConfig {
  std::string catalog = "golden";
  int rank = 2;
  std::vector<std::string> phi{"ab", "a"};
  std::string seed_class = "a";
  int depth = 8;
  Rational epsilon{1, 20};
  GridConfig grid;
  Rational bound{20};  // B
  std::size_t samples = 200;
  std::size_t retraction_pairs = 50;
  std::uint64_t seed = 1;
  double morse_k = 2;
  std::size_t morse_budget = 100;
  SchottkyConfig schottky;
  Thresholds thresholds;

  Automorphism automorphism() const { return Automorphism::parse(phi, rank); }
};

inline std::vector<std::string> catalog_names() { return {"golden", "golden-schottky", "rank3"}; }

inline ExperimentConfig catalog_entry(const std::string& name) {
  ExperimentConfig c;
  c.catalog = name;
  if (name == "golden" || name == "golden-schottky") return c;
  if (name == "rank3") {
    c.rank = 3;
    c.phi = {"ab", "c", "a"};
    c.samples = 50;
    c.schottky.phi = {"ab", "c", "a"};
    c.schottky.tau = {"a", "ab", "c"};
    c.schottky.free_bound = 4;
    c.schottky.orbit_length = 3;
    return c;
  }
  throw InvalidInput("unknown catalog entry '" + name + "'");
}

inline Json to_json(const ExperimentConfig& c) {
  return {
      {"catalog", c.catalog},
      {"rank", c.rank},
      {"phi", c.phi},
      {"seed_class", c.seed_class},
      {"depth", c.depth},
      {"epsilon", to_string(c.epsilon)},
      {"grid", {{"lo", to_string(c.grid.lo)}, {"hi", to_string(c.grid.hi)}, {"step", to_string(c.grid.step)}}},
      {"B", to_string(c.bound)},
      {"samples", c.samples},
      {"retraction_pairs", c.retraction_pairs},
      {"seed", c.seed},
      {"morse", {{"K", c.morse_k}, {"budget", c.morse_budget}}},
      {"schottky",
       {{"phi", c.schottky.phi},
        {"tau", c.schottky.tau},
        {"k", c.schottky.k},
        {"free_bound", c.schottky.free_bound},
        {"orbit_length", c.schottky.orbit_length}}},
      {"thresholds",
       {{"kappa_drift", c.thresholds.kappa_drift},
        {"morse_drift", c.thresholds.morse_drift},
        {"fills_fraction", c.thresholds.fills_fraction},
        {"max_violations", c.thresholds.max_violations},
        {"retraction_slack", c.thresholds.retraction_slack}}},
  };
}

namespace detail {

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_rational(const Json& j, const char* key, Rational& out) {
  if (j.contains(key)) out = parse_rational(j.at(key).get<std::string>());
}

}  // namespace detail

/// Starts from the named catalog entry (default "golden") and overrides every
/// field present in j. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const Json& j) {
  static const std::vector<std::string> known = {"catalog", "rank", "phi", "seed_class", "depth", "epsilon",
                                                 "grid", "B", "samples", "retraction_pairs", "seed", "morse",
                                                 "schottky", "thresholds"};
  try {
    if (!j.is_object()) throw InvalidInput("config must be an object");
    for (const auto& [k, v] : j.items())
      if (std::find(known.begin(), known.end(), k) == known.end()) throw InvalidInput("unknown config key '" + k + "'");
    ExperimentConfig c = catalog_entry(j.value("catalog", std::string("golden")));
    detail::read_field(j, "rank", c.rank);
    detail::read_field(j, "phi", c.phi);
    detail::read_field(j, "seed_class", c.seed_class);
    detail::read_field(j, "depth", c.depth);
    detail::read_rational(j, "epsilon", c.epsilon);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      detail::read_rational(g, "lo", c.grid.lo);
      detail::read_rational(g, "hi", c.grid.hi);
      detail::read_rational(g, "step", c.grid.step);
    }
    detail::read_rational(j, "B", c.bound);
    detail::read_field(j, "samples", c.samples);
    detail::read_field(j, "retraction_pairs", c.retraction_pairs);
    detail::read_field(j, "seed", c.seed);
    if (j.contains("morse")) {
      detail::read_field(j.at("morse"), "K", c.morse_k);
      detail::read_field(j.at("morse"), "budget", c.morse_budget);
    }
    if (j.contains("schottky")) {
      const auto& s = j.at("schottky");
      detail::read_field(s, "phi", c.schottky.phi);
      detail::read_field(s, "tau", c.schottky.tau);
      detail::read_field(s, "k", c.schottky.k);
      detail::read_field(s, "free_bound", c.schottky.free_bound);
      detail::read_field(s, "orbit_length", c.schottky.orbit_length);
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      detail::read_field(t, "kappa_drift", c.thresholds.kappa_drift);
      detail::read_field(t, "morse_drift", c.thresholds.morse_drift);
      detail::read_field(t, "fills_fraction", c.thresholds.fills_fraction);
      detail::read_field(t, "max_violations", c.thresholds.max_violations);
      detail::read_field(t, "retraction_slack", c.thresholds.retraction_slack);
    }
    if (c.rank < 2 || c.rank > 3) throw InvalidInput("rank must be 2 or 3");
    if (static_cast<int>(c.phi.size()) != c.rank) throw InvalidInput("phi needs one image per generator");
    if (sgn(c.epsilon) <= 0) throw InvalidInput("epsilon must be positive");
    if (c.bound <= 1) throw InvalidInput("B must exceed 1");
    if (c.morse_k < 1) throw InvalidInput("morse K must be at least 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
}

/// 64-bit FNV-1a of the canonical config text.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cvlab
