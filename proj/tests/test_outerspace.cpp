#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "cvlab/outerspace/io.hpp"
#include "cvlab/outerspace/lipschitz.hpp"
#include "cvlab/outerspace/random.hpp"
#include "test_support.hpp"

using namespace cvlab;

namespace {

Rational Q(const char* s) { return parse_rational(s); }
ConjClass C(const char* s, int rank = 2) { return ConjClass::parse(s, rank); }
MarkedGraph rose(const char* a, const char* b) { return standard_rose(2, {Q(a), Q(b)}); }

// Minimum length over all closed non-backtracking edge cycles with at most
// `max_edges` edges, found by plain enumeration of edge sequences.
Rational brute_force_systole(const MarkedGraph& g, int max_edges) {
  Rational best = -1;
  std::vector<int> path;
  auto rec = [&](auto&& self) -> void {
    if (!path.empty() && g.terminus(path.back()) == g.origin(path.front()) &&
        path.front() != flip(path.back())) {
      const Rational l = g.path_length(path);
      if (best < 0 || l < best) best = l;
    }
    if (static_cast<int>(path.size()) == max_edges) return;
    for (int d = 0; d < 2 * g.edge_count(); ++d) {
      if (!path.empty() && (g.origin(d) != g.terminus(path.back()) || d == flip(path.back()))) continue;
      path.push_back(d);
      self(self);
      path.pop_back();
    }
  };
  rec(rec);
  return best;
}

// All conjugacy classes of F_2 of word length 1..max_len, one canonical word each.
std::vector<ConjClass> all_classes_up_to(int rank, int max_len) {
  std::vector<ConjClass> out;
  std::vector<Letter> w;
  auto rec = [&](auto&& self) -> void {
    if (!w.empty()) {
      const Word word(rank, w);
      if (word.size() == w.size() && w.front() != -w.back() && ConjClass(word).word() == word)
        out.emplace_back(word);
    }
    if (static_cast<int>(w.size()) == max_len) return;
    for (int i = 1; i <= rank; ++i)
      for (Letter l : {i, -i}) {
        if (!w.empty() && w.back() == -l) continue;
        w.push_back(l);
        self(self);
        w.pop_back();
      }
  };
  rec(rec);
  return out;
}

Rational exhaustive_stretch(const MarkedGraph& s, const MarkedGraph& t, const std::vector<ConjClass>& classes) {
  Rational best = 0;
  for (const auto& c : classes) {
    const Rational r = t.translation_length(c) / s.translation_length(c);
    if (r > best) best = r;
  }
  return best;
}

}  // namespace

TEST(TranslationLength, Examples) {
  EXPECT_EQ(rose("1/2", "1/2").translation_length(C("abab")), Q("2"));
  EXPECT_EQ(rose("1/3", "2/3").translation_length(C("b")), Q("2/3"));
  EXPECT_EQ(rose("1/2", "1/2").translation_length(C("abAB")), Q("2"));
  EXPECT_THROW(rose("1/2", "1/2").translation_length(ConjClass(Word(2))), InvalidInput);
}

TEST(TranslationLength, LinearInEdgeLengths) {
  std::mt19937_64 rng(41);
  const auto cat = topology_catalog(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_marked_graph(rng, cat);
    const ConjClass c(testing_support::random_word(rng, 2, 1 + trial % 10));
    if (c.trivial()) continue;
    const auto occ = g.occupancy(c);
    Rational dot = 0;
    for (int e = 0; e < g.edge_count(); ++e) dot += occ[static_cast<std::size_t>(e)] * g.length(e);
    EXPECT_EQ(dot, g.translation_length(c));
    // Inverse classes have the same length.
    EXPECT_EQ(g.translation_length(c.inverse()), g.translation_length(c));
  }
}

TEST(MarkedGraph, RejectsInvalidGraphs) {
  const auto r = rose("1/2", "1/2");
  EXPECT_THROW(r.with_lengths({Q("1/2"), Q("1/3")}), InvalidInput);
  EXPECT_THROW(r.with_lengths({Q("1"), Q("0")}), InvalidInput);
  std::vector<Edge> edges = {{0, 0, Q("1/2")}, {0, 0, Q("1/2")}};
  std::vector<Word> words = {Word::parse("a", 2), Word::parse("a", 2)};
  EXPECT_THROW(MarkedGraph(2, 1, 0, edges, {{0}, {2}}, words), InvalidInput);
  // A valence-two vertex.
  EXPECT_THROW(tree_marked_graph(2, 0, {{0, 0, Q("1/4")}, {0, 1, Q("1/4")}, {1, 0, Q("1/4")}, {0, 0, Q("1/4")}}),
               InvalidInput);
}

TEST(Systole, Examples) {
  auto s1 = systole_thick(rose("1/2", "1/2"), Q("1/10"));
  EXPECT_EQ(s1.systole, Q("1/2"));
  EXPECT_TRUE(s1.in_thick);
  auto s2 = systole_thick(rose("1/100", "99/100"), Q("1/20"));
  EXPECT_EQ(s2.systole, Q("1/100"));
  EXPECT_FALSE(s2.in_thick);
  EXPECT_EQ(systole_thick(theta_graph(), Q("1/10")).systole, Q("2/3"));
  EXPECT_THROW(systole_thick(theta_graph(), Q("0")), InvalidInput);
}

TEST(Systole, MatchesBruteForceLoopEnumeration) {
  std::mt19937_64 rng(43);
  for (int rank : {2, 3}) {
    const auto cat = topology_catalog(rank);
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = random_marked_graph(rng, cat, 1);
      EXPECT_EQ(systole_thick(g, Q("1/100")).systole, brute_force_systole(g, g.vertex_count() + 1));
    }
  }
}

TEST(Candidates, RoseTwo) {
  const auto cs = candidates(standard_rose(2));
  std::vector<std::string> got;
  for (const auto& c : cs.loops) got.push_back(c.cls.str());
  EXPECT_EQ(got, (std::vector<std::string>{"a", "b", "ab", "aB"}));
  // Enumeration oracle: tight loops of at most two edges, each edge at most once.
  std::set<ConjClass> oracle;
  const auto g = standard_rose(2);
  for (int d1 = 0; d1 < 4; ++d1) {
    oracle.insert(g.class_of({d1}));
    for (int d2 = 0; d2 < 4; ++d2)
      if (edge_of(d1) != edge_of(d2)) oracle.insert(g.class_of({d1, d2}));
  }
  std::set<ConjClass> ours;
  for (const auto& c : cs.loops) {
    ours.insert(c.cls);
    ours.insert(c.cls.inverse());
  }
  EXPECT_EQ(ours, oracle);
}

TEST(Candidates, ThetaAndBarbell) {
  const auto th = candidates(theta_graph());
  ASSERT_EQ(th.loops.size(), 3u);
  for (const auto& c : th.loops) EXPECT_EQ(c.kind, CandidateKind::EmbeddedCircle);

  const auto bb = candidates(barbell_graph());
  int circles = 0, barbells = 0;
  for (const auto& c : bb.loops) {
    circles += c.kind == CandidateKind::EmbeddedCircle;
    barbells += c.kind == CandidateKind::Barbell;
    EXPECT_NE(c.kind, CandidateKind::FigureEight);
  }
  EXPECT_EQ(circles, 2);
  EXPECT_EQ(barbells, 2);  // both orientations of the second loop
  EXPECT_EQ(bb.loops[2].cls.str(), "ab");
  EXPECT_EQ(bb.loops[3].cls.str(), "aB");
}

TEST(Candidates, LoopsAreTightAndMatchLengths) {
  std::mt19937_64 rng(47);
  for (int rank : {2, 3}) {
    const auto cat = topology_catalog(rank);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = random_marked_graph(rng, cat);
      const auto cs = candidates(g);
      ASSERT_FALSE(cs.loops.empty());
      for (const auto& c : cs.loops) {
        EdgePath p = c.loop;
        cyclically_reduce_path(p);
        EXPECT_EQ(p.size(), c.loop.size());
        EXPECT_EQ(g.translation_length(c.cls), c.length);
      }
    }
  }
}

TEST(TopologyCatalog, MatchesDirectEnumeration) {
  EXPECT_EQ(topology_catalog(2).size(), 3u);
  // Independent oracle: all connected multigraphs with V vertices, V + 2 edges,
  // every valence >= 3, up to relabeling.
  std::set<std::vector<std::pair<int, int>>> oracle;
  for (int nv = 1; nv <= 4; ++nv) {
    const int ne = nv + 2;
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < nv; ++a)
      for (int b = a; b < nv; ++b) slots.emplace_back(a, b);
    std::vector<int> pick(static_cast<std::size_t>(ne), 0);
    auto rec = [&](auto&& self, int i, int from) -> void {
      if (i == ne) {
        std::vector<Edge> edges;
        std::vector<int> val(static_cast<std::size_t>(nv), 0);
        for (int k : pick) {
          const auto [a, b] = slots[static_cast<std::size_t>(k)];
          edges.push_back({a, b, Rational(1, ne)});
          ++val[static_cast<std::size_t>(a)];
          ++val[static_cast<std::size_t>(b)];
        }
        for (int v : val)
          if (v < 3) return;
        try {
          oracle.insert(tree_marked_graph(nv, 0, edges).topology_key());
        } catch (const InvalidInput&) {
        }
        return;
      }
      for (int k = from; k < static_cast<int>(slots.size()); ++k) {
        pick[static_cast<std::size_t>(i)] = k;
        self(self, i + 1, k);
      }
    };
    rec(rec, 0, 0);
  }
  std::set<std::vector<std::pair<int, int>>> ours;
  for (const auto& g : topology_catalog(3)) ours.insert(g.topology_key());
  EXPECT_EQ(ours, oracle);
}

TEST(Lipschitz, RoseExamples) {
  const auto s = rose("1/2", "1/2");
  const auto t = rose("1/3", "2/3");
  const auto st = lipschitz_stretch(s, t);
  EXPECT_EQ(st.value, Q("4/3"));
  EXPECT_EQ(st.witness.str(), "b");
  const auto ts = lipschitz_stretch(t, s);
  EXPECT_EQ(ts.value, Q("3/2"));
  EXPECT_EQ(ts.witness.str(), "a");
  EXPECT_EQ(lipschitz_stretch(s, s).value, 1);

  const auto d = sym_distance(s, t);
  EXPECT_EQ(d.product(), 2);
  EXPECT_NEAR(d.value(), std::log(2.0), 1e-15);
  EXPECT_EQ(sym_distance(t, s).product(), d.product());
  EXPECT_TRUE(sym_distance(s, s).zero());

  EXPECT_EQ(exhaustive_stretch(s, t, all_classes_up_to(2, 8)), Q("4/3"));
  EXPECT_THROW(lipschitz_stretch(s, standard_rose(3)), InvalidInput);
}

TEST(Lipschitz, CandidateOracleEquivalenceSmall) {
  std::mt19937_64 rng(53);
  const auto cat = topology_catalog(2);
  const auto classes = all_classes_up_to(2, 6);
  int checked = 0;
  while (checked < 15) {
    const auto s = random_marked_graph(rng, cat, 1);
    const auto t = random_marked_graph(rng, cat, 2);
    bool short_candidates = true;
    for (const auto& c : candidates(s).loops) short_candidates = short_candidates && c.cls.size() <= 6;
    if (!short_candidates) continue;
    EXPECT_EQ(lipschitz_stretch(s, t).value, exhaustive_stretch(s, t, classes));
    ++checked;
  }
}

TEST(Lipschitz, MetricProperties) {
  std::mt19937_64 rng(59);
  for (int rank : {2, 3}) {
    const auto cat = topology_catalog(rank);
    for (int trial = 0; trial < 40; ++trial) {
      const auto s = random_marked_graph(rng, cat);
      const auto t = random_marked_graph(rng, cat);
      const auto u = random_marked_graph(rng, cat);
      const auto st = lipschitz_stretch(s, t).value;
      const auto tu = lipschitz_stretch(t, u).value;
      const auto su = lipschitz_stretch(s, u).value;
      EXPECT_GE(st, 1);
      EXPECT_LE(su, st * tu);
      EXPECT_EQ(sym_distance(s, t).zero(), marked_isometric(s, t));
    }
  }
}

TEST(Isometry, RelabelingAndSymmetries) {
  // Theta with equal lengths: swapping two edges is an isometry realizing an
  // outer automorphism, so the acted graph is the same point.
  const auto th = theta_graph();
  const auto a = th.act(Automorphism::parse(std::vector<std::string>{"b", "a"}, 2));
  EXPECT_TRUE(marked_isometric(th, a));
  EXPECT_TRUE(sym_distance(th, a).zero());
  const auto inner = th.act(Automorphism::inner(Word::parse("ab", 2)));
  EXPECT_TRUE(marked_isometric(th, inner));
  const auto golden = th.act(Automorphism::parse(std::vector<std::string>{"ab", "a"}, 2));
  EXPECT_FALSE(marked_isometric(th, golden));
  EXPECT_FALSE(sym_distance(th, golden).zero());
  // Unequal lengths break the symmetry.
  const auto th2 = theta_graph({Q("1/6"), Q("1/3"), Q("1/2")});
  const auto b = th2.act(Automorphism::parse(std::vector<std::string>{"b", "a"}, 2));
  EXPECT_FALSE(marked_isometric(th2, b));
  EXPECT_FALSE(sym_distance(th2, b).zero());
}

TEST(Act, ExamplesAndEquivariance) {
  const auto r = rose("1/2", "1/2");
  const auto phi = Automorphism::parse(std::vector<std::string>{"ab", "a"}, 2);
  EXPECT_EQ(r.act(Automorphism::identity(2)), r);
  EXPECT_EQ(r.act(phi).translation_length(C("a")), Q("1"));

  std::mt19937_64 rng(61);
  for (int rank : {2, 3}) {
    const auto cat = topology_catalog(rank);
    for (int trial = 0; trial < 25; ++trial) {
      const auto s = random_marked_graph(rng, cat);
      const auto t = random_marked_graph(rng, cat);
      const auto f = random_whitehead_product(rng, rank, 3);
      const auto d1 = sym_distance(s, t);
      const auto d2 = sym_distance(s.act(f), t.act(f));
      EXPECT_EQ(d1.forward.value, d2.forward.value);
      EXPECT_EQ(d1.backward.value, d2.backward.value);
      const ConjClass c(testing_support::random_word(rng, rank, 6));
      if (!c.trivial()) EXPECT_EQ(s.act(f).translation_length(c), s.translation_length(f.apply(c)));
      // Action composes on the right.
      const auto g = random_whitehead_product(rng, rank, 2);
      EXPECT_TRUE(marked_isometric(s.act(f).act(g), s.act(f * g)));
    }
  }
}

TEST(CollapseAndBlowUp, PreserveMarkingAndLengths) {
  std::mt19937_64 rng(67);
  const auto cat = topology_catalog(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_marked_graph(rng, cat, 2);
    for (int e = 0; e < g.edge_count(); ++e) {
      if (g.edge(e).tail == g.edge(e).head) continue;
      const auto h = g.collapse(e);
      h.validate(MarkedGraph::Check::AnyVolume);
      // Lengths of classes drop by the collapsed edge's share only.
      const ConjClass c(testing_support::random_word(rng, 3, 5));
      if (c.trivial()) continue;
      const auto occ = g.occupancy(c);
      EXPECT_EQ(h.translation_length(c), g.translation_length(c) - occ[static_cast<std::size_t>(e)] * g.length(e));
    }
    for (int v = 0; v < g.vertex_count(); ++v)
      for (const auto& h : g.blow_ups(v)) {
        // Collapsing the new edge gives back the original marked graph.
        const auto back = h.collapse(h.edge_count() - 1).with_lengths(g.lengths());
        EXPECT_TRUE(marked_isometric(back, g));
      }
  }
}

TEST(RoseAdapted, Examples) {
  EXPECT_TRUE(marked_isometric(rose_adapted_to(C("a")), standard_rose(2)));
  const auto r = rose_adapted_to(C("aab"));
  EXPECT_EQ(r.translation_length(C("aab")), Q("1/2"));
  EXPECT_EQ(r.translation_length(C("a")), Q("1/2"));
  EXPECT_EQ(systole_thick(r, Q("1/2")).systole, Q("1/2"));
  EXPECT_TRUE(systole_thick(r, Q("1/2")).in_thick);
  EXPECT_THROW(rose_adapted_to(C("abab")), InvalidInput);
  const auto r3 = rose_adapted_to(C("abc", 3));
  EXPECT_EQ(r3.translation_length(C("abc", 3)), Q("1/3"));
}

TEST(Json, ExactRoundTrip) {
  std::mt19937_64 rng(71);
  for (int rank : {2, 3}) {
    const auto cat = topology_catalog(rank);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = random_marked_graph(rng, cat);
      const auto j = to_json(g);
      const auto back = marked_graph_from_json(Json::parse(j.dump()));
      EXPECT_EQ(back, g);
      EXPECT_EQ(to_json(back).dump(), j.dump());
    }
  }
  EXPECT_THROW(marked_graph_from_json(Json::parse(R"({"rank":2})")), InvalidInput);
}
