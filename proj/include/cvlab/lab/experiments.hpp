#pragma once

#include <random>
#include <sstream>
#include <string>

#include "cvlab/factorgraph/shadow.hpp"
#include "cvlab/lab/config.hpp"
#include "cvlab/lab/schottky.hpp"
#include "cvlab/minima/morse.hpp"

namespace cvlab {

inline constexpr const char* kVersion = "1.0.0";

/// Exit statuses shared by the CLI and the experiment runners.
enum Status : int { kOk = 0, kInvalid = 2, kVerdictFailed = 3, kInconclusive = 4 };

struct RunOutput {
  Json report;
  std::string csv;  // empty when the command has no table
  int status = kOk;
};

inline Json envelope(const std::string& command, const ExperimentConfig& cfg, Json result) {
  return {{"tool", "cvlab"},
          {"version", kVersion},
          {"command", command},
          {"config", to_json(cfg)},
          {"config_hash", config_hash(cfg)},
          {"result", std::move(result)}};
}

/// The axis of the configured automorphism with its approximate laminations.
struct AxisRun {
  IwipAxisSpec spec;
  LaminationPair pair;
  FillsCertificate fills;
  LineOfMinima line;
};

inline AxisRun build_axis(const ExperimentConfig& cfg, int depth, const Rational& step) {
  const auto phi = cfg.automorphism();
  auto spec = IwipAxisSpec::make(phi, ConjClass::parse(cfg.seed_class, cfg.rank), depth);
  auto pair = iwip_laminations(spec);
  auto fills = fills_certificate(pair.mu, pair.nu);
  auto line = line_of_minima(pair.mu, pair.nu, cfg.epsilon, make_grid(cfg.grid.lo, cfg.grid.hi, step));
  return {std::move(spec), std::move(pair), std::move(fills), std::move(line)};
}

inline AxisRun build_axis(const ExperimentConfig& cfg) { return build_axis(cfg, cfg.depth, cfg.grid.step); }

inline double relative_change(double from, double to) {
  if (from == 0) return to == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(to - from) / std::abs(from);
}

struct KappaStability {
  double base = 0;
  double half_step = 0;
  double deeper = 0;  // depth + 2
  double drift_step() const { return relative_change(base, half_step); }
  double drift_depth() const { return relative_change(base, deeper); }
};

inline KappaStability kappa_stability(const ExperimentConfig& cfg, const LineOfMinima& base) {
  KappaStability k;
  k.base = base.kappa_emp;
  k.half_step = build_axis(cfg, cfg.depth, cfg.grid.step / 2).line.kappa_emp;
  k.deeper = build_axis(cfg, cfg.depth + 2, cfg.grid.step).line.kappa_emp;
  return k;
}

inline std::string line_csv(const LineOfMinima& line) {
  std::ostringstream out;
  out << "t,value,systole,d_to_previous\n";
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    out << to_string(line.grid[i]) << ',' << to_string(line.values[i]) << ','
        << to_string(systole_thick(line.points[i].graph, line.eps).systole) << ',';
    if (i > 0) out << line.distance[i - 1][i];
    out << '\n';
  }
  return out.str();
}

inline Json line_json(const AxisRun& a) {
  Json points = Json::array();
  for (std::size_t i = 0; i < a.line.points.size(); ++i)
    points.push_back({{"t", to_string(a.line.grid[i])},
                      {"value", to_string(a.line.values[i])},
                      {"mu_weight", to_string(a.line.weights[i].mu_weight)},
                      {"nu_weight", to_string(a.line.weights[i].nu_weight)},
                      {"graph", to_json(a.line.points[i].graph)}});
  return {{"mu", to_json(a.pair.mu)},
          {"nu", to_json(a.pair.nu)},
          {"lambda_estimate", to_string(a.spec.lambda_estimate)},
          {"fills_certified", a.fills.certified},
          {"epsilon", to_string(a.line.eps)},
          {"kappa_emp", a.line.kappa_emp},
          {"points", std::move(points)}};
}

inline RunOutput run_axis(const ExperimentConfig& cfg) {
  const auto a = build_axis(cfg);
  const auto ks = kappa_stability(cfg, a.line);
  const auto shift = translation_offsets(a.line, a.spec.phi, a.spec.lambda_estimate);
  Json r = line_json(a);
  r["kappa_stability"] = {{"kappa_emp", ks.base},
                          {"kappa_half_step", ks.half_step},
                          {"kappa_depth_plus_2", ks.deeper},
                          {"drift_step", ks.drift_step()},
                          {"drift_depth", ks.drift_depth()}};
  r["translation"] = {{"shift", shift.shift},
                      {"grid_shift", to_string(shift.grid_shift)},
                      {"max_offset", shift.max_offset},
                      {"compared", shift.compared}};
  const bool stable = std::isfinite(ks.base) && ks.drift_step() < cfg.thresholds.kappa_drift &&
                      ks.drift_depth() < cfg.thresholds.kappa_drift;
  r["verdict"] = stable ? "stable" : "unstable";
  return {envelope("axis", cfg, std::move(r)), line_csv(a.line), stable ? kOk : kVerdictFailed};
}

inline RunOutput run_min(const ExperimentConfig& cfg, const Rational& t) {
  const auto phi = cfg.automorphism();
  const auto spec = IwipAxisSpec::make(phi, ConjClass::parse(cfg.seed_class, cfg.rank), cfg.depth);
  const auto pair = iwip_laminations(spec);
  const auto w = axis_weights(t);
  const auto res = min_search(pair.mu.scaled(w.mu_weight) + pair.nu.scaled(w.nu_weight), cfg.epsilon,
                              standard_rose(cfg.rank));
  const auto sys = systole_thick(res.graph, cfg.epsilon);
  Json r = {{"t", to_string(t)},
            {"mu_weight", to_string(w.mu_weight)},
            {"nu_weight", to_string(w.nu_weight)},
            {"value", to_string(res.value)},
            {"steps", res.steps},
            {"programs_solved", res.programs_solved},
            {"systole", to_string(sys.systole)},
            {"in_thick", sys.in_thick},
            {"graph", to_json(res.graph)}};
  return {envelope("min", cfg, std::move(r)), {}, kOk};
}

inline Json item_json(const ContractingItem& it) {
  Json j = {{"verdict", it.passed ? "passed-at-sample" : "violated"},
            {"checked", it.checked},
            {"violations", it.violations},
            {"min_value", it.min_value ? to_string(*it.min_value) : "none"}};
  if (!it.passed) j["witness"] = it.witness;
  return j;
}

inline Json axis_quality_json(const AxisQualityReport& q) {
  return {{"kappa_emp", q.kappa},
          {"samples", q.samples},
          {"clamped_excluded", q.clamped},
          {"pairs_tested", q.pairs_tested},
          {"item1_violations", q.item1_violations},
          {"item2_violations", q.item2_violations},
          {"item3_checked", q.item3_checked},
          {"item3_violations", q.item3_violations},
          {"worst_item1_slack", q.worst_item1_slack},
          {"worst_item2_slack", q.worst_item2_slack},
          {"worst_item3_distance", q.worst_item3_distance},
          {"kappa_sufficient", q.kappa_sufficient()}};
}

inline RunOutput run_contract(const ExperimentConfig& cfg) {
  const auto a = build_axis(cfg);
  std::mt19937_64 rng(task_seed(cfg.seed, 1));
  const auto c = contracting_certify(a.line, cfg.bound, cfg.samples, rng);
  std::mt19937_64 rng2(task_seed(cfg.seed, 2));
  const auto q = axis_quality(a.line, cfg.samples, rng2);
  Json r = {{"B", to_string(c.bound)},
            {"distinguished_t", to_string(a.line.grid[c.distinguished])},
            {"distinguished", to_json(a.line.points[c.distinguished].graph)},
            {"item1", {{"ratio", to_string(c.item1_ratio)}, {"verdict", c.item1 ? "passed" : "violated"}}},
            {"item2", item_json(c.item2)},
            {"item3", item_json(c.item3)},
            {"item2_samples", c.item2_samples},
            {"balanced_trees", c.balanced_trees},
            {"basic_laminations", c.basic_laminations},
            {"far_trees", c.far_trees},
            {"axis_quality", axis_quality_json(q)}};
  const bool ok = c.item1 && c.item2.passed && c.item3.passed && q.violations() <= cfg.thresholds.max_violations;
  r["verdict"] = ok ? "passed-at-sample" : "violated";
  return {envelope("contract-test", cfg, std::move(r)), {}, ok ? kOk : kVerdictFailed};
}

inline Json morse_json(const MorseReport& m) {
  return {{"K", m.k},
          {"budget", m.budget},
          {"attempted", m.attempted},
          {"certified", m.certified},
          {"certification_rate", m.certification_rate()},
          {"M_emp", m.m_emp}};
}

struct MorseStability {
  MorseReport base;
  MorseReport doubled;
  double drift() const { return relative_change(base.m_emp, doubled.m_emp); }
};

inline MorseStability morse_stability(const ExperimentConfig& cfg, const LineOfMinima& line) {
  const auto seed = task_seed(cfg.seed, 3);
  return {morse_test(line, cfg.morse_k, cfg.morse_budget, seed), morse_test(line, cfg.morse_k, 2 * cfg.morse_budget, seed)};
}

inline RunOutput run_morse(const ExperimentConfig& cfg) {
  const auto a = build_axis(cfg);
  const auto ms = morse_stability(cfg, a.line);
  Json r = {{"base", morse_json(ms.base)}, {"doubled", morse_json(ms.doubled)}, {"drift", ms.drift()}};
  int status = kOk;
  if (ms.base.inconclusive() || ms.doubled.inconclusive()) {
    status = kInconclusive;
    r["verdict"] = "inconclusive";
  } else if (!(ms.drift() < cfg.thresholds.morse_drift)) {
    status = kVerdictFailed;
    r["verdict"] = "unstable";
  } else {
    r["verdict"] = "stable";
  }
  return {envelope("morse-test", cfg, std::move(r)), {}, status};
}

inline RunOutput run_shadow(const ExperimentConfig& cfg) {
  const auto a = build_axis(cfg);
  const auto sh = shadow_of_line(a.line);
  std::mt19937_64 rng(task_seed(cfg.seed, 4));
  const auto rs = retraction_spread(a.line, cfg.retraction_pairs, rng);
  Json rows = Json::array();
  for (const auto& row : sh.rows)
    rows.push_back({{"t", to_string(row.t)},
                    {"class", row.point.cls.str()},
                    {"factor", row.point.vertex.str()},
                    {"basic_position", row.point.position},
                    {"skipped_non_primitive", row.point.skipped},
                    {"to_previous", row.to_previous ? to_string(*row.to_previous) : ""}});
  const double budget = 2 * a.line.kappa_emp + cfg.thresholds.retraction_slack;
  Json r = {{"rows", std::move(rows)},
            {"ff_upper_bound", sh.upper_bound ? Json(*sh.upper_bound) : Json(nullptr)},
            {"chain_broken", sh.broken},
            {"kappa_emp", a.line.kappa_emp},
            {"R_emp", rs.r_emp},
            {"R_pairs", rs.pairs},
            {"R_budget", budget}};
  const bool ok = rs.r_emp <= budget;
  r["verdict"] = ok ? "within-budget" : "over-budget";
  return {envelope("shadow", cfg, std::move(r)), shadow_csv(sh), ok ? kOk : kVerdictFailed};
}

inline SchottkySpec build_schottky(const ExperimentConfig& cfg, int bound) {
  const auto phi = Automorphism::parse(cfg.schottky.phi, cfg.rank);
  const auto tau = Automorphism::parse(cfg.schottky.tau, cfg.rank);
  return schottky_build(phi, tau * phi * tau.inverse(), cfg.schottky.k, bound, cfg.depth);
}

inline Json freeness_json(const FreenessCheck& f) {
  Json j = {{"bound", f.bound}, {"free", f.free}, {"words", f.words}, {"collisions_checked", f.collisions}};
  if (f.witness)
    j["witness"] = {generator_word_string(f.witness->first), generator_word_string(f.witness->second)};
  return j;
}

inline Json schottky_json(const SchottkySpec& s) {
  return {{"phi", s.phi.str()},
          {"psi", s.psi.str()},
          {"k", s.k},
          {"phi_charpoly", polynomial_string(s.phi_iwip.charpoly)},
          {"psi_charpoly", polynomial_string(s.psi_iwip.charpoly)},
          {"laminations_fill", s.independence.certified},
          {"freeness", freeness_json(s.freeness)}};
}

inline RunOutput run_schottky(const ExperimentConfig& cfg) {
  const auto s = build_schottky(cfg, cfg.schottky.free_bound);
  Json r = schottky_json(s);
  return {envelope("schottky", cfg, std::move(r)), {}, s.freeness.free ? kOk : kVerdictFailed};
}

inline RunOutput run_orbit(const ExperimentConfig& cfg) {
  const auto s = build_schottky(cfg, std::max(cfg.schottky.free_bound, cfg.schottky.orbit_length));
  Json r = schottky_json(s);
  if (!s.freeness.free) {
    r["verdict"] = "not-free";
    return {envelope("orbit", cfg, std::move(r)), {}, kVerdictFailed};
  }
  const auto fit = orbit_qi_experiment(s, standard_rose(cfg.rank), cfg.schottky.orbit_length);
  std::ostringstream csv;
  csv << "word,length,distance,shadow_verdict\n";
  for (const auto& p : fit.points)
    csv << generator_word_string(p.word) << ',' << p.word.size() << ',' << p.distance << ','
        << (p.shadow ? to_string(p.shadow->verdict) : "") << '\n';
  r["fit"] = {{"c", fit.c},
              {"c_prime", fit.c_prime},
              {"residual", fit.residual},
              {"upper_slope", fit.upper_slope},
              {"points", fit.points.size()}};
  r["shadow"] = {{"tested", fit.shadow_tested},
                 {"fills", fit.shadow_fills},
                 {"rechecked", fit.shadow_rechecked},
                 {"fills_fraction", fit.fills_fraction()}};
  const bool ok = fit.c > 0 && fit.fills_fraction() >= cfg.thresholds.fills_fraction &&
                  fit.shadow_rechecked == fit.shadow_fills;
  r["verdict"] = ok ? "passed" : "failed";
  return {envelope("orbit", cfg, std::move(r)), csv.str(), ok ? kOk : kVerdictFailed};
}

}  // namespace cvlab
