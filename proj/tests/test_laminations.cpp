#include <gtest/gtest.h>

#include <random>

#include "cvlab/laminations/lamination.hpp"
#include "cvlab/outerspace/random.hpp"
#include "test_support.hpp"

using namespace cvlab;

namespace {

Rational Q(const char* s) { return parse_rational(s); }
ConjClass C(const char* s, int rank = 2) { return ConjClass::parse(s, rank); }
const Automorphism& golden() {
  static const auto phi = Automorphism::parse(std::vector<std::string>{"ab", "a"}, 2);
  return phi;
}

}  // namespace

TEST(Lamination, RejectsBadSupport) {
  EXPECT_THROW(RationalLamination(2, {}), InvalidInput);
  EXPECT_THROW(RationalLamination(2, {{C("a"), Q("0")}}), InvalidInput);
  EXPECT_THROW(RationalLamination(2, {{C("a"), Q("-1")}}), InvalidInput);
  EXPECT_THROW(RationalLamination(2, {{ConjClass(Word(2)), Q("1")}}), InvalidInput);
  EXPECT_THROW(RationalLamination(2, {{C("a", 3), Q("1")}}), InvalidInput);
}

TEST(Lamination, MergesRepeatedClasses) {
  const RationalLamination mu(2, {{C("ab"), Q("1")}, {C("ba"), Q("1/2")}});
  ASSERT_EQ(mu.support().size(), 1u);
  EXPECT_EQ(mu.support()[0].weight, Q("3/2"));
  EXPECT_EQ(RationalLamination::dirac(C("a")) + RationalLamination::dirac(C("a")), RationalLamination::dirac(C("a"), 2));
}

TEST(Pairing, Examples) {
  const auto t = standard_rose(2, {Q("1/2"), Q("1/2")});
  const RationalLamination mu(2, {{C("a"), Q("1")}, {C("b"), Q("2")}});
  EXPECT_EQ(pairing(t, mu), Q("3/2"));
  EXPECT_EQ(pairing(t, mu.scaled(Q("7/3"))), Q("7/3") * Q("3/2"));
  EXPECT_EQ(pairing(t, normalized_at(t, mu)), 1);
  EXPECT_THROW(pairing(standard_rose(3), mu), InvalidInput);
}

TEST(Pairing, BilinearInWeightsAndLengths) {
  std::mt19937_64 rng(3);
  const auto cat = topology_catalog(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_marked_graph(rng, cat);
    const RationalLamination mu(2, {{ConjClass(testing_support::random_word(rng, 2, 5)), Q("2/3")},
                                    {ConjClass(testing_support::random_word(rng, 2, 7)), Q("5")}});
    const auto nu = RationalLamination::dirac(ConjClass(testing_support::random_word(rng, 2, 4)), Q("1/7"));
    EXPECT_EQ(pairing(g, mu + nu), pairing(g, mu) + pairing(g, nu));
    // Recompute as the linear form in the edge lengths.
    const auto coef = pairing_coefficients(g, mu);
    Rational s = 0;
    for (int e = 0; e < g.edge_count(); ++e) s += coef[static_cast<std::size_t>(e)] * g.length(e);
    EXPECT_EQ(s, pairing(g, mu));
    auto doubled = g.lengths();
    for (auto& l : doubled) l *= 2;
    EXPECT_EQ(pairing(g.with_lengths(doubled, MarkedGraph::Check::AnyVolume), mu), 2 * pairing(g, mu));
  }
}

TEST(Pairing, ActionConvention) {
  std::mt19937_64 rng(5);
  const auto cat = topology_catalog(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_marked_graph(rng, cat);
    const auto phi = testing_support::random_automorphism(rng, 2, 3);
    const auto mu = RationalLamination::dirac(ConjClass(testing_support::random_word(rng, 2, 6)), Q("3/4"));
    EXPECT_EQ(pairing(g.act(phi), mu), pairing(g, mu.pushed(phi)));
  }
}

TEST(IwipLaminations, GoldenDepthOne) {
  const auto spec = IwipAxisSpec::make(golden(), C("a"), 1);
  const auto [mu, nu] = iwip_laminations(spec);
  EXPECT_EQ(mu.classes(), std::vector<ConjClass>{C("ab")});
  EXPECT_EQ(nu.classes(), std::vector<ConjClass>{C("b")});
  const auto rose = standard_rose(2);
  EXPECT_EQ(pairing(rose, mu), 1);
  EXPECT_EQ(pairing(rose, nu), 1);
  EXPECT_EQ(golden().inverse().image(1).str(), "b");
  EXPECT_EQ(golden().inverse().image(2).str(), "Ba");
}

TEST(IwipLaminations, DepthZeroIsDegenerate) {
  const auto [mu, nu] = iwip_laminations(IwipAxisSpec::make(golden(), C("a"), 0));
  EXPECT_EQ(mu, nu);
  EXPECT_EQ(mu.classes(), std::vector<ConjClass>{C("a")});
}

TEST(IwipLaminations, FibonacciGrowth) {
  const long fib[] = {1, 2, 3, 5, 8};
  for (int m = 0; m <= 4; ++m) EXPECT_EQ(static_cast<long>(golden().power(m).apply(Word::parse("a", 2)).size()), fib[m]);
  EXPECT_EQ(IwipAxisSpec::make(golden(), C("a"), 8).lambda_estimate, Q("55/34"));
}

TEST(IwipLaminations, RejectsNonIwip) {
  const auto swap = Automorphism::parse(std::vector<std::string>{"b", "a"}, 2);
  EXPECT_THROW(IwipAxisSpec::make(swap, C("a"), 4), InvalidInput);
  EXPECT_THROW(IwipAxisSpec::make(golden(), C("a"), -1), InvalidInput);
}

TEST(FillsCertificate, Examples) {
  const auto a = RationalLamination::dirac(C("a"));
  const auto f = fills_certificate(a, a);
  EXPECT_FALSE(f.certified);
  ASSERT_EQ(f.detail.factor.size(), 1u);
  EXPECT_EQ(ConjClass(f.detail.factor[0]), C("a"));
  EXPECT_TRUE(fills_certificate(RationalLamination::dirac(C("abAB")), RationalLamination::dirac(C("ab"))).certified);
  for (int m : {3, 8}) {
    const auto [mu, nu] = iwip_laminations(IwipAxisSpec::make(golden(), C("a"), m));
    EXPECT_TRUE(fills_certificate(mu, nu).certified) << "depth " << m;
  }
}

TEST(BalanceParam, Examples) {
  const auto t = standard_rose(2);
  const auto mu = RationalLamination::dirac(C("a"), 2);
  EXPECT_EQ(balance_param(t, mu, RationalLamination::dirac(C("b"), 2)).exp_t, 1);
  EXPECT_DOUBLE_EQ(balance_param(t, mu, RationalLamination::dirac(C("b"), 2)).t(), 0.0);
  const auto b = balance_param(t, mu, RationalLamination::dirac(C("b"), 8));
  EXPECT_EQ(b.exp_t, 4);
  EXPECT_NEAR(b.t(), std::log(4.0), 1e-15);
}

TEST(BalanceParam, AntisymmetryAndScaling) {
  std::mt19937_64 rng(9);
  const auto cat = topology_catalog(2);
  const auto [mu, nu] = iwip_laminations(IwipAxisSpec::make(golden(), C("a"), 5));
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_marked_graph(rng, cat);
    const auto p = balance_param(g, mu, nu);
    EXPECT_EQ(balance_param(g, nu, mu).exp_t, 1 / p.exp_t);
    // mu -> c mu adds -log c, nu -> c' nu adds log c'.
    EXPECT_EQ(balance_param(g, mu.scaled(Q("3")), nu).exp_t, p.exp_t / 3);
    EXPECT_EQ(balance_param(g, mu, nu.scaled(Q("5/2"))).exp_t, p.exp_t * Q("5/2"));
  }
}

TEST(BalanceParam, GoldenDepthStability) {
  const auto rose = standard_rose(2);
  std::optional<Rational> prev;
  for (int m = 2; m <= 10; ++m) {
    const auto spec = IwipAxisSpec::make(golden(), C("a"), m);
    const auto [mu, nu] = iwip_laminations(spec);
    const Rational e = balance_param(rose, mu, nu).exp_t;
    if (prev) {
      const Rational ratio = e / *prev;
      const Rational l2 = spec.lambda_estimate * spec.lambda_estimate;
      EXPECT_LE(ratio, l2);
      EXPECT_GE(ratio, 1 / l2);
    }
    prev = e;
  }
}

TEST(Lamination, JsonRoundTrip) {
  const RationalLamination mu(2, {{C("aab"), Q("2/5")}, {C("bA"), Q("3")}});
  EXPECT_EQ(lamination_from_json(to_json(mu), 2), mu);
  EXPECT_THROW(lamination_from_json(Json::parse(R"([{"word":"a"}])"), 2), InvalidInput);
}
