#include <gtest/gtest.h>

#include <map>

#include "entropx/explicit_distribution.hpp"
#include "entropx/families.hpp"
#include "entropx/io.hpp"
#include "oracles.hpp"

using namespace entropx;

namespace {

ExplicitDistribution abc() {
  return ExplicitDistribution::from_table({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}, 2);
}

std::map<std::uint64_t, std::uint64_t> histogram(ExplicitOracle& o, const ExclusionSet& ex, std::uint64_t n,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::uint64_t, std::uint64_t> h;
  for (std::uint64_t i = 0; i < n; ++i) ++h[o.query(ex, rng).outcome.value];
  return h;
}

}  // namespace

TEST(ExplicitDistribution, Validation) {
  EXPECT_THROW(ExplicitDistribution::from_table({{"a", 0.5}, {"a", 0.5}}, 1), ValidationError);
  EXPECT_THROW(ExplicitDistribution::from_table({{"a", -0.5}, {"b", 1.5}}, 1), ValidationError);
  EXPECT_THROW(ExplicitDistribution::from_table({{"a", 0.5}, {"b", 0.4}}, 1), ValidationError);
  EXPECT_THROW(ExplicitDistribution::from_table({{"a", 0.5}, {"b", 0.25}, {"c", 0.25}}, 1), ValidationError);
  EXPECT_THROW(ExplicitDistribution::from_table({}, 1), ValidationError);
  const auto d = ExplicitDistribution::from_table({{"a", 0.5}, {"z", 0.0}, {"b", 0.5}}, 3);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.universe_bits(), 3);
  EXPECT_EQ(d.id(1), "b");
}

TEST(ExplicitOracle, RevealsUnconditionalProbability) {
  ExplicitOracle o(abc());
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto q = o.query({Outcome{0}}, rng);
    ASSERT_NE(q.outcome.value, 0u);
    EXPECT_EQ(q.probability, q.outcome.value == 1 ? 0.3 : 0.2);
  }
  for (int i = 0; i < 20; ++i) {
    const auto q = o.query({Outcome{0}, Outcome{1}}, rng);
    EXPECT_EQ(q.outcome.value, 2u);
    EXPECT_EQ(q.probability, 0.2);
  }
  EXPECT_THROW(o.query({Outcome{0}, Outcome{1}, Outcome{2}}, rng), EmptySupportError);
}

TEST(ExplicitOracle, FrequenciesMatchLaw) {
  for (const char* spec : {"geometric:half_life=1.5,m=6", "dominated:r=0.8,m=5", "dirichlet:m=6,seed=4"}) {
    const auto d = make_family(spec);
    ExplicitOracle o(d);
    const std::uint64_t n = 1000000;
    std::map<std::uint64_t, long double> law;
    std::size_t heaviest = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      law[i] = d.probability(i);
      if (d.probability(i) > d.probability(heaviest)) heaviest = i;
    }
    const double bound = 4 * std::sqrt(static_cast<double>(d.size()) / n);
    EXPECT_LT(oracle::tv_distance(histogram(o, {}, n, 3), n, law), bound) << spec;

    std::map<std::uint64_t, long double> cond;
    const long double rest = 1.0L - d.probability(heaviest);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (i != heaviest) cond[i] = d.probability(i) / rest;
    const auto h = histogram(o, {Outcome{heaviest}}, n, 4);
    EXPECT_EQ(h.count(heaviest), 0u);
    EXPECT_LT(oracle::tv_distance(h, n, cond), bound) << spec;
  }
}

TEST(ExplicitOracle, NeverReturnsExcluded) {
  const auto d = make_family("dirichlet:m=4,seed=1");
  ExplicitOracle o(d);
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    ExclusionSet ex;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (rng.below(std::uint64_t{3}) == 0) ex.insert(Outcome{i});
    if (ex.size() == d.size()) ex.erase(ex.begin());
    for (int k = 0; k < 10; ++k) ASSERT_FALSE(ex.contains(o.query(ex, rng).outcome));
  }
}

TEST(ExplicitOracle, ClonesShareTablesNotLedgers) {
  ExplicitOracle o(abc());
  Rng r1(5), r2(5);
  auto c = o.clone();
  EXPECT_EQ(o.query({Outcome{2}}, r1).outcome, c->query({Outcome{2}}, r2).outcome);
  EXPECT_EQ(o.ledger().proc_queries, 1u);
  EXPECT_EQ(c->ledger().proc_queries, 1u);
}

TEST(ExactEntropy, Values) {
  for (int m = 0; m <= 20; ++m) EXPECT_EQ(exact_entropy(make_family("uniform:m=" + std::to_string(m))), m);
  EXPECT_EQ(exact_entropy(make_family("point_mass")), 0.0);
  EXPECT_NEAR(exact_entropy(make_family("dominated:r=0.75,m=10")), 3.310925731895465, 1e-12);
  EXPECT_NEAR(exact_entropy(make_family("geometric:half_life=1,m=10")), 2.0, 1e-12);
  const auto d = make_family("dirichlet:m=8,seed=9");
  const std::vector<double> p(d.probabilities().begin(), d.probabilities().end());
  EXPECT_NEAR(exact_entropy(d), static_cast<double>(oracle::entropy(p)), 1e-12);
}

TEST(Families, ParseAndBuild) {
  const auto spec = parse_family_spec("dominated:r=0.6,m=3");
  EXPECT_EQ(spec.family, "dominated");
  EXPECT_EQ(spec.get("r"), 0.6);
  const auto d = make_family(spec);
  EXPECT_EQ(d.size(), 8u);
  EXPECT_EQ(d.probability(0), 0.6);
  EXPECT_EQ(make_family("uniform:m=4").size(), 16u);
  EXPECT_EQ(make_family("uniform:m=4").probability(3), 1.0 / 16);
  EXPECT_EQ(make_family("dirichlet:m=5,seed=3").probabilities()[7], make_family("dirichlet:m=5,seed=3").probabilities()[7]);
  EXPECT_THROW(make_family("zipf:m=3"), ValidationError);
  EXPECT_THROW(make_family("uniform:m=2.5"), ValidationError);
  EXPECT_THROW(make_family("dominated:r=1.5,m=3"), ValidationError);
  EXPECT_THROW(parse_family_spec("uniform:m"), ParseError);
}

TEST(DistributionJson, RoundTrip) {
  const auto d = abc();
  const auto back = parse_distribution_json(to_json(d).dump());
  EXPECT_EQ(back.universe_bits(), 2);
  EXPECT_EQ(back.id(2), "c");
  EXPECT_EQ(back.probability(1), 0.3);
}

TEST(DistributionJson, Rejections) {
  EXPECT_THROW(parse_distribution_json("{"), ParseError);
  EXPECT_THROW(parse_distribution_json("[]"), ParseError);
  EXPECT_THROW(parse_distribution_json(R"({"m": 1})"), ParseError);
  EXPECT_THROW(parse_distribution_json(R"({"m": 1, "probs": [{"id": 3, "p": 1}]})"), ParseError);
  EXPECT_THROW(parse_distribution_json(R"({"m": 1, "probs": [{"id": "a", "p": 0.5}, {"id": "b", "p": 0.49}]})"),
               ValidationError);
  // Within the file tolerance of 1e-9.
  EXPECT_NO_THROW(parse_distribution_json(R"({"m": 1, "probs": [{"id": "a", "p": 0.5}, {"id": "b", "p": 0.5000000001}]})"));
}
