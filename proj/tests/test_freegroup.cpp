#include <gtest/gtest.h>

#include <random>

#include "cvlab/freegroup/factor.hpp"
#include "cvlab/freegroup/iwip.hpp"
#include "test_support.hpp"

using namespace cvlab;

namespace {

Word W(const char* s, int rank = 2) { return Word::parse(s, rank); }
ConjClass C(const char* s, int rank = 2) { return ConjClass::parse(s, rank); }
Automorphism A(std::vector<std::string> ims) {
  return Automorphism::parse(ims, static_cast<int>(ims.size()));
}

}  // namespace

TEST(Word, ParsesAndReduces) {
  EXPECT_EQ(W("abBa").str(), "aa");
  EXPECT_EQ(W("aA").size(), 0u);
  EXPECT_EQ((W("ab") * W("Ba")).str(), "aa");
  EXPECT_THROW(W("abc"), InvalidInput);
  EXPECT_THROW(W("a-b"), InvalidInput);
}

TEST(ConjClass, CanonicalizeExamples) {
  EXPECT_EQ(canonicalize(W("abBa")).str(), "aa");
  EXPECT_EQ(canonicalize(W("baB")).str(), "a");
  EXPECT_EQ(canonicalize(W("ba")).str(), "ab");
  // Inverses stay distinct; the alphabet order puts a before A.
  EXPECT_NE(C("ab"), C("BA"));
  EXPECT_EQ(C("Ba").str(), "aB");
}

TEST(ConjClass, IdempotentAndConjugationInvariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rank = 2 + trial % 2;
    const Word w = testing_support::random_word(rng, rank, 1 + trial % 12);
    const Word g = testing_support::random_word(rng, rank, trial % 9);
    const ConjClass c(w);
    EXPECT_EQ(ConjClass(c.word()), c);
    EXPECT_EQ(ConjClass(g * w * g.inverse()), c);
  }
}

TEST(Word, ProductLengthSubadditive) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Word u = testing_support::random_word(rng, 3, trial % 15);
    const Word v = testing_support::random_word(rng, 3, (trial * 7) % 15);
    EXPECT_LE((u * v).size(), u.size() + v.size());
  }
}

TEST(Automorphism, InverseAndComposition) {
  const auto phi = A({"ab", "a"});
  EXPECT_EQ(phi.inverse().image(1).str(), "b");
  EXPECT_EQ(phi.inverse().image(2).str(), "Ba");
  const auto id = phi * phi.inverse();
  EXPECT_EQ(id, Automorphism::identity(2));
  EXPECT_THROW(A({"ab", "ab"}), InvalidAutomorphism);
  EXPECT_THROW(Automorphism({W("ab"), W("a")}, {W("a"), W("b")}), InvalidAutomorphism);
}

TEST(Automorphism, AssociativityOnRandomTriples) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const int rank = 2 + i % 2;
    const auto f = testing_support::random_automorphism(rng, rank, 3);
    const auto g = testing_support::random_automorphism(rng, rank, 3);
    const auto h = testing_support::random_automorphism(rng, rank, 3);
    EXPECT_EQ((f * g) * h, f * (g * h));
    const auto trivial = (f.inverse() * f).is_inner();
    ASSERT_TRUE(trivial.has_value());
    EXPECT_TRUE(trivial->empty());
  }
}

TEST(Automorphism, IsInner) {
  const auto conj = Automorphism::inner(W("a"));
  auto g = conj.is_inner();
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->str(), "a");
  EXPECT_FALSE(A({"ab", "a"}).is_inner().has_value());

  // Conjugators ending in a power of the first letter are recovered exactly.
  const Word h = W("bAAbaa", 3);
  auto gh = Automorphism::inner(h).is_inner();
  ASSERT_TRUE(gh.has_value());
  EXPECT_EQ(*gh, h);
}

TEST(Automorphism, FromImagesRoundTripsRandomAutomorphisms) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto f = testing_support::random_automorphism(rng, 3, 4);
    const auto g = Automorphism::from_images(f.images());
    EXPECT_EQ(g.inverse_images(), f.inverse_images());
  }
}

TEST(Stallings, MembershipAndBasis) {
  const std::vector<Word> gens = {W("aab"), W("ab")};
  const auto g = StallingsGraph::fold(gens, 2);
  EXPECT_TRUE(g.is_whole_group());
  const std::vector<Word> sub = {W("aa"), W("b")};
  const auto h = StallingsGraph::fold(sub, 2);
  EXPECT_FALSE(h.is_whole_group());
  EXPECT_TRUE(h.accepts(W("aabaa")));
  EXPECT_FALSE(h.accepts(W("ab")));
  EXPECT_TRUE(h.accepts_conjugate(C("aaaa")));
  EXPECT_FALSE(h.accepts_conjugate(C("a")));
  // Dependent generators fold with a collapse.
  const std::vector<Word> dep = {W("a"), W("aa")};
  EXPECT_FALSE(StallingsGraph::fold(dep, 2).generators_free());
}

TEST(Whitehead, MinimizeExamples) {
  {
    const ConjClass in[] = {C("a")};
    const auto r = whitehead_minimize(in);
    EXPECT_EQ(r.total_length, 1u);
    EXPECT_EQ(r.reducer, Automorphism::identity(2));
  }
  {
    const ConjClass in[] = {C("aab")};
    EXPECT_EQ(whitehead_minimize(in).total_length, 1u);
  }
  {
    // (ab)^2 is a proper power of a primitive element, so its orbit reaches a^2.
    const ConjClass in[] = {C("abab")};
    const auto r = whitehead_minimize(in);
    EXPECT_EQ(r.total_length, 2u);
    const auto witness = A({"aB", "b"});
    EXPECT_EQ(witness.apply(C("abab")).str(), "aa");
  }
}

TEST(Whitehead, ReportInvariants) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int rank = 2 + trial % 2;
    std::vector<ConjClass> in;
    for (int k = 0; k < 1 + trial % 3; ++k) {
      Word w = testing_support::random_word(rng, rank, 2 + (trial + k) % 7);
      if (ConjClass(w).trivial()) w = Word::generator(rank, 1);
      in.emplace_back(w);
    }
    const auto r = whitehead_minimize(in);
    EXPECT_LE(r.total_length, total_length(in));
    EXPECT_EQ(apply_all(r.reducer, in), r.minimized);
    EXPECT_EQ(r.total_length, total_length(r.minimized));
    for (const auto& mv : whitehead_moves(rank))
      EXPECT_GE(total_length(apply_all(mv.automorphism, r.minimized)), r.total_length);
    // Pre-conjugating the inputs does not change the minimum.
    const Word g = testing_support::random_word(rng, rank, 4);
    std::vector<ConjClass> conj;
    for (const auto& c : in) conj.emplace_back(g * c.word() * g.inverse());
    EXPECT_EQ(whitehead_minimize(conj).total_length, r.total_length);
  }
}

TEST(WhiteheadGraph, CommutatorIsFourCycle) {
  const ConjClass in[] = {C("abAB")};
  const WhiteheadGraph g(2, in);
  EXPECT_EQ(g.edges().size(), 4u);
  EXPECT_TRUE(g.connected());
  EXPECT_FALSE(g.cut_vertex().has_value());
}

TEST(Primitive, Examples) {
  EXPECT_TRUE(is_primitive(C("a")).primitive);
  EXPECT_FALSE(is_primitive(C("abab")).primitive);
  const auto r = is_primitive(C("aab"));
  ASSERT_TRUE(r.primitive);
  ASSERT_EQ(r.basis.size(), 2u);
  EXPECT_EQ(r.basis[0].str(), "aab");
  EXPECT_EQ(r.basis[1].str(), "a");
  EXPECT_TRUE(is_basis(r.basis, 2));
  EXPECT_THROW(is_primitive(ConjClass(Word(2))), InvalidInput);
}

TEST(Primitive, AbelianizationGcdIsNecessary) {
  std::mt19937_64 rng(23);
  int primitive_seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int rank = 2 + trial % 2;
    const Word w = trial % 3 == 0 ? testing_support::random_automorphism(rng, rank, 1 + trial % 5).image(1)
                                  : testing_support::random_word(rng, rank, 1 + trial % 9);
    const ConjClass c(w);
    if (c.trivial()) continue;
    const auto r = is_primitive(c);
    if (r.primitive) {
      ++primitive_seen;
      const auto ab = abelianization(c.word());
      EXPECT_EQ(gcd_of(ab), 1) << c.str();
      EXPECT_TRUE(is_basis(r.basis, rank)) << c.str();
      EXPECT_EQ(r.basis[0], c.word());
    }
  }
  EXPECT_GT(primitive_seen, 100);
}

TEST(CommonFactor, Examples) {
  {
    const ConjClass in[] = {C("a", 3), C("b", 3)};
    const auto r = common_proper_factor(in);
    ASSERT_EQ(r.verdict, FactorVerdict::Contained);
    ASSERT_EQ(r.factor.size(), 2u);
    EXPECT_TRUE(factor_contains_all(r.factor, in, 3));
  }
  {
    const ConjClass in[] = {C("abAB")};
    EXPECT_EQ(common_proper_factor(in).verdict, FactorVerdict::Fills);
  }
  {
    const ConjClass in[] = {C("ab"), C("a")};
    EXPECT_EQ(common_proper_factor(in).verdict, FactorVerdict::Fills);
  }
  {
    // Separable but not in one proper factor.
    const ConjClass in[] = {C("abAB", 3), C("c", 3)};
    EXPECT_EQ(common_proper_factor(in).verdict, FactorVerdict::Fills);
  }
  {
    const ConjClass in[] = {C("aa"), C("aaa")};
    const auto r = common_proper_factor(in);
    ASSERT_EQ(r.verdict, FactorVerdict::Contained);
    EXPECT_EQ(r.factor.size(), 1u);
  }
  EXPECT_THROW(common_proper_factor(std::vector<ConjClass>{ConjClass(Word(2))}), InvalidInput);
}

TEST(CommonFactor, CertificatesAndSingleClassFills) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    const int rank = 2 + trial % 2;
    std::vector<ConjClass> in;
    for (int k = 0; k < 1 + trial % 2; ++k) {
      const auto phi = testing_support::random_automorphism(rng, rank, 2);
      Word w = trial % 4 == 0 ? phi.apply(W("ab", rank)) : testing_support::random_word(rng, rank, 1 + trial % 6);
      if (ConjClass(w).trivial()) w = Word::generator(rank, 2);
      in.emplace_back(w);
    }
    const auto r = common_proper_factor(in);
    if (r.verdict == FactorVerdict::Contained) {
      EXPECT_LT(static_cast<int>(r.factor.size()), rank);
      EXPECT_TRUE(factor_contains_all(r.factor, in, rank));
      // The generators form a basis of the factor they generate.
      EXPECT_TRUE(StallingsGraph::fold(r.factor, rank).generators_free());
    }
    if (r.verdict == FactorVerdict::Fills && in.size() == 1 && in[0].size() > 1)
      EXPECT_FALSE(is_primitive(in[0]).primitive);
    EXPECT_NE(r.verdict, FactorVerdict::Inconclusive);
  }
}

TEST(Iwip, Examples) {
  const auto golden = iwip_heuristic(A({"ab", "a"}));
  EXPECT_TRUE(golden.pass);
  EXPECT_EQ(polynomial_string(golden.charpoly), "x^2 - x - 1");
  EXPECT_NEAR(golden.spectral_radius, (1 + std::sqrt(5.0)) / 2, 1e-12);

  const auto id = iwip_heuristic(Automorphism::identity(2));
  EXPECT_FALSE(id.pass);
  EXPECT_EQ(id.failure, IwipFailure::Cyclotomic);

  const auto swap = iwip_heuristic(A({"b", "a"}));
  EXPECT_FALSE(swap.pass);
  EXPECT_EQ(swap.failure, IwipFailure::Cyclotomic);
  EXPECT_EQ(polynomial_string(swap.charpoly), "x^2 - 1");

  const auto tri = iwip_heuristic(A({"ab", "c", "a"}));
  EXPECT_TRUE(tri.pass);
  EXPECT_EQ(polynomial_string(tri.charpoly), "x^3 - x^2 - 1");

  // x -> x a-type transvection: unipotent.
  EXPECT_FALSE(iwip_heuristic(A({"a", "ba"})).pass);
  // Block-diagonal rank 3: reducible.
  const auto red = iwip_heuristic(A({"ab", "a", "c"}));
  EXPECT_EQ(red.failure, IwipFailure::Reducible);
}
