#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvlab/lab/experiments.hpp"

using namespace cvlab;

namespace {

struct Common {
  std::string config_file;
  std::string catalog;
  std::string out;
  long long seed = -1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "experiment config (JSON)");
  app->add_option("--catalog", c.catalog, "catalog entry: golden, golden-schottky, rank3");
  app->add_option("--seed", c.seed, "root RNG seed, overrides the config");
  app->add_option("--out", c.out, "write <out>.json, <out>.csv and <out>.meta.json instead of printing");
}

ExperimentConfig load_config(const Common& c) {
  Json j = Json::object();
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) throw InvalidInput("cannot read config file " + c.config_file);
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!c.catalog.empty()) j["catalog"] = c.catalog;
  if (c.seed >= 0) j["seed"] = c.seed;
  return config_from_json(j);
}

MarkedGraph load_graph(const std::string& path, int rank_hint = 0) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read graph file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("graph file is not valid JSON: ") + e.what());
  }
  auto g = marked_graph_from_json(j);
  if (rank_hint && g.rank() != rank_hint) throw InvalidInput("graph has the wrong rank");
  return g;
}

MarkedGraph fixture(const std::string& name) {
  if (name == "rose") return standard_rose(2);
  if (name == "theta") return theta_graph({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  if (name == "barbell") return barbell_graph({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  throw InvalidInput("unknown graph fixture '" + name + "'");
}

void emit(const RunOutput& out, const std::string& prefix) {
  if (prefix.empty()) {
    std::cout << out.report.dump(2) << '\n';
    if (!out.csv.empty()) std::cout << out.csv;
    return;
  }
  std::ofstream(prefix + ".json") << out.report.dump(2) << '\n';
  if (!out.csv.empty()) std::ofstream(prefix + ".csv") << out.csv;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream(prefix + ".meta.json") << Json{{"written_at", stamp}}.dump(2) << '\n';
  std::cerr << "wrote " << prefix << ".json\n";
}

Json stretch_json(const Stretch& s) {
  return {{"factor", to_string(s.value)}, {"witness", s.witness.str()}, {"log", s.log_value()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outer space lab: Lipschitz metrics, lines of minima, contraction and shadow experiments"};
  app.require_subcommand(1);

  Common common;
  std::string s_file, t_file, dist_fixture;
  auto* dist = app.add_subcommand("dist", "exact Lipschitz stretch factors and symmetrized distance");
  dist->add_option("--s", s_file, "source marked graph (JSON)");
  dist->add_option("--t", t_file, "target marked graph (JSON)");
  dist->add_option("--fixture", dist_fixture, "built-in pair: two-roses");
  dist->add_option("--out", common.out);

  std::string graph_file, graph_fixture;
  auto* cands = app.add_subcommand("candidates", "candidate loops of a marked graph");
  cands->add_option("--graph", graph_file, "marked graph (JSON)");
  cands->add_option("--fixture", graph_fixture, "rose, theta or barbell");
  cands->add_option("--out", common.out);

  std::string t_value = "0";
  auto* min = app.add_subcommand("min", "minimizer of the axis objective at one parameter");
  add_common(min, common);
  min->add_option("--t", t_value, "parameter t (rational)");

  auto* axis = app.add_subcommand("axis", "line of minima, kappa_emp and its stability");
  add_common(axis, common);
  auto* contract = app.add_subcommand("contract-test", "contraction certificate and axis-quality test");
  add_common(contract, common);
  auto* morse = app.add_subcommand("morse-test", "Morse test with certified quasi-geodesic chains");
  add_common(morse, common);
  auto* shadow = app.add_subcommand("shadow", "free-factor shadow of the axis and retraction spread");
  add_common(shadow, common);
  auto* schottky = app.add_subcommand("schottky", "Schottky subgroup construction and freeness check");
  add_common(schottky, common);
  auto* orbit = app.add_subcommand("orbit", "orbit quasi-isometry fit and shadow separation");
  add_common(orbit, common);

  std::string word;
  int rank = 2;
  auto* primitive = app.add_subcommand("primitive", "primitivity test with a basis certificate");
  primitive->add_option("word", word, "cyclic word, e.g. aab")->required();
  primitive->add_option("--rank", rank, "rank of the free group");

  std::vector<std::string> words;
  auto* factor = app.add_subcommand("common-factor", "common proper free factor of classes");
  factor->add_option("words", words, "cyclic words")->required();
  factor->add_option("--rank", rank, "rank of the free group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  try {
    RunOutput out;
    if (*dist) {
      MarkedGraph s = standard_rose(2), t = standard_rose(2);
      if (!dist_fixture.empty()) {
        if (dist_fixture != "two-roses") throw InvalidInput("unknown fixture '" + dist_fixture + "'");
        s = standard_rose(2, {Rational(1, 2), Rational(1, 2)});
        t = standard_rose(2, {Rational(1, 3), Rational(2, 3)});
      } else {
        if (s_file.empty() || t_file.empty()) throw InvalidInput("dist needs --s and --t or --fixture");
        s = load_graph(s_file);
        t = load_graph(t_file);
      }
      const auto d = sym_distance(s, t);
      out.report = {{"tool", "cvlab"},
                    {"version", kVersion},
                    {"command", "dist"},
                    {"S", to_json(s)},
                    {"T", to_json(t)},
                    {"result",
                     {{"forward", stretch_json(d.forward)},
                      {"backward", stretch_json(d.backward)},
                      {"pair", {to_string(d.forward.value), to_string(d.backward.value)}},
                      {"product", to_string(d.product())},
                      {"d", d.value()},
                      {"marked_isometric", d.zero()}}}};
    } else if (*cands) {
      const MarkedGraph g = graph_fixture.empty() ? load_graph(graph_file) : fixture(graph_fixture);
      Json list = Json::array();
      for (const auto& c : candidates(g).loops)
        list.push_back({{"class", c.cls.str()},
                        {"kind", to_string(c.kind)},
                        {"loop", path_to_string(c.loop)},
                        {"length", to_string(c.length)}});
      out.report = {{"tool", "cvlab"}, {"version", kVersion}, {"command", "candidates"}, {"graph", to_json(g)},
                    {"result", {{"candidates", std::move(list)}}}};
    } else if (*primitive) {
      const auto c = ConjClass::parse(word, rank);
      const auto res = is_primitive(c);
      Json basis = Json::array();
      for (const auto& w : res.basis) basis.push_back(w.str());
      out.report = {{"tool", "cvlab"}, {"version", kVersion}, {"command", "primitive"},
                    {"result", {{"class", c.str()}, {"primitive", res.primitive}, {"basis", basis},
                                {"whitehead_minimal_length", res.report.total_length}}}};
    } else if (*factor) {
      std::vector<ConjClass> cs;
      for (const auto& w : words) cs.push_back(ConjClass::parse(w, rank));
      const auto res = common_proper_factor(cs);
      Json f = Json::array();
      for (const auto& w : res.factor) f.push_back(w.str());
      out.report = {{"tool", "cvlab"}, {"version", kVersion}, {"command", "common-factor"},
                    {"result", {{"verdict", to_string(res.verdict)}, {"factor", f}, {"reason", res.reason},
                                {"states_explored", res.states_explored}}}};
      if (res.verdict == FactorVerdict::Inconclusive) out.status = kInconclusive;
    } else {
      const auto cfg = load_config(common);
      if (*min) out = run_min(cfg, parse_rational(t_value));
      if (*axis) out = run_axis(cfg);
      if (*contract) out = run_contract(cfg);
      if (*morse) out = run_morse(cfg);
      if (*shadow) out = run_shadow(cfg);
      if (*schottky) out = run_schottky(cfg);
      if (*orbit) out = run_orbit(cfg);
    }
    emit(out, common.out);
    return out.status;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const InvalidAutomorphism& e) {
    std::cerr << "invalid automorphism: " << e.what() << '\n';
    return kInvalid;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInvalid;
  } catch (const NoPrimitiveBasic& e) {
    std::cerr << "verdict failed: " << e.what() << '\n';
    return kVerdictFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
