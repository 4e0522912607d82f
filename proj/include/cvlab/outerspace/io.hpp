#pragma once

#include "json.hpp"

#include <sstream>
#include <string>

#include "cvlab/outerspace/marked_graph.hpp"

namespace cvlab {

using Json = nlohmann::ordered_json;

/// Edge paths are written as space-separated tokens "e3" (forward) and
/// "E3" (reversed).
inline std::string path_to_string(const EdgePath& p) {
  std::string s;
  for (int d : p) {
    if (!s.empty()) s += ' ';
    s += (d & 1 ? "E" : "e") + std::to_string(edge_of(d));
  }
  return s;
}

inline EdgePath parse_path(const std::string& text) {
  EdgePath p;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 2 || (tok[0] != 'e' && tok[0] != 'E'))
      throw InvalidInput("malformed edge token '" + tok + "'");
    for (std::size_t i = 1; i < tok.size(); ++i)
      if (tok[i] < '0' || tok[i] > '9') throw InvalidInput("malformed edge token '" + tok + "'");
    const int e = std::stoi(tok.substr(1));
    p.push_back(2 * e + (tok[0] == 'E' ? 1 : 0));
  }
  return p;
}

inline std::string word_to_string(const Word& w) { return w.empty() ? "1" : w.str(); }

inline Json to_json(const MarkedGraph& g) {
  Json j;
  j["rank"] = g.rank();
  j["vertices"] = g.vertex_count();
  j["basepoint"] = g.basepoint();
  Json edges = Json::array();
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    edges.push_back({{"tail", ed.tail},
                     {"head", ed.head},
                     {"length", to_string(ed.length)},
                     {"word", word_to_string(g.edge_words()[static_cast<std::size_t>(e)])}});
  }
  j["edges"] = std::move(edges);
  Json m = Json::object();
  for (int i = 1; i <= g.rank(); ++i) m[std::string(1, letter_char(i))] = path_to_string(g.marking(i));
  j["marking"] = std::move(m);
  return j;
}

inline MarkedGraph marked_graph_from_json(const Json& j) {
  try {
    const int rank = j.at("rank").get<int>();
    if (rank < 2 || rank > kMaxRank) throw InvalidInput("rank out of range");
    const int nv = j.at("vertices").get<int>();
    const int base = j.value("basepoint", 0);
    std::vector<Edge> edges;
    std::vector<Word> words;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("tail").get<int>(), e.at("head").get<int>(),
                       parse_rational(e.at("length").get<std::string>())});
      words.push_back(Word::parse(e.at("word").get<std::string>(), rank));
    }
    std::vector<EdgePath> marking;
    const auto& m = j.at("marking");
    for (int i = 1; i <= rank; ++i) marking.push_back(parse_path(m.at(std::string(1, letter_char(i))).get<std::string>()));
    return MarkedGraph(rank, nv, base, std::move(edges), std::move(marking), std::move(words));
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("malformed marked graph: ") + ex.what());
  }
}

}  // namespace cvlab
