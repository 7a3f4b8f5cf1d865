#include <gtest/gtest.h>

#include "entropx/bounds.hpp"
#include "entropx/families.hpp"
#include "oracles.hpp"

using namespace entropx;

TEST(Moments, SmallCases) {
  const std::vector<double> u4(4, 0.25);
  auto mo = moments(u4);
  EXPECT_EQ(mo.entropy, 2.0);
  EXPECT_EQ(mo.second_moment, 4.0);
  mo = moments(std::vector<double>{1.0});
  EXPECT_EQ(mo.entropy, 0.0);
  EXPECT_EQ(mo.second_moment, 0.0);
  const auto rep = check_moment_bound(std::vector<double>{0.5, 0.5});
  EXPECT_EQ(rep.H, 1.0);
  EXPECT_EQ(rep.second_moment, 1.0);
  EXPECT_EQ(*rep.ratio, 1.0);
}

TEST(Moments, RejectsOverfullTables) {
  EXPECT_THROW(moments(std::vector<double>{0.7, 0.7}), DomainError);
  EXPECT_THROW(moments(std::vector<double>{-0.1, 1.1}), DomainError);
  EXPECT_NO_THROW(moments(std::vector<double>{0.2, 0.3}));
}

TEST(Moments, MatchOracle) {
  DistributionFuzzer fuzz(21);
  for (int i = 0; i < 200; ++i) {
    const auto c = fuzz.next_distribution();
    const auto mo = moments(c.probs);
    EXPECT_NEAR(mo.entropy, static_cast<double>(oracle::entropy(c.probs)), 1e-10);
    EXPECT_NEAR(mo.second_moment, static_cast<double>(oracle::second_moment(c.probs)), 1e-9);
    EXPECT_GE(mo.second_moment * (1 + 1e-12) + 1e-12, mo.entropy * mo.entropy);
  }
}

TEST(BoundFormulas, Values) {
  EXPECT_NEAR(high_entropy_ratio_bound(10), 10.0 + std::log2(10.0 + std::log2(10.0) + 1.1), 1e-12);
  EXPECT_NEAR(low_entropy_moment_bound(10), 10.0 + std::log2(10.0 + std::log2(10.0) + 2.5), 1e-12);
}

TEST(MomentBound, UniformIsSatisfied) {
  const auto d = make_family("uniform:m=10");
  const auto rep = check_moment_bound(d.probabilities(), 10);
  EXPECT_EQ(*rep.ratio, 1.0);
  ASSERT_TRUE(rep.satisfied);
  EXPECT_TRUE(*rep.satisfied);
  EXPECT_EQ(rep.kind, "moment");
}

TEST(MomentBound, OutOfScopeLowWidth) {
  const auto rep = check_moment_bound(std::vector<double>{0.9, 0.1}, 1);
  EXPECT_FALSE(rep.satisfied.has_value());
  EXPECT_FALSE(rep.note.empty());
  EXPECT_THROW(check_moment_bound(std::vector<double>{0.25, 0.25, 0.5}, 1), DomainError);
}

TEST(MomentBound, BothChecksAtUnitEntropy) {
  const auto rep = check_moment_bound(std::vector<double>{0.5, 0.5}, 4);
  ASSERT_TRUE(rep.satisfied);
  EXPECT_TRUE(*rep.satisfied);
}

TEST(MomentBound, SubDistributionFromDominator) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const double r = 0.5 + 0.5 * rng.uniform01();
    const int m = 2 + static_cast<int>(rng.below(std::uint64_t{8}));
    std::vector<double> rest((std::size_t{1} << m) - 1);
    double total = 0.0;
    for (double& x : rest) total += (x = rng.uniform01() + 1e-9);
    for (double& x : rest) x *= (1.0 - r) / total;
    const auto rep = check_moment_bound(rest, m);
    if (rep.H > 1.0) continue;
    ASSERT_TRUE(rep.satisfied);
    EXPECT_TRUE(*rep.satisfied);
  }
}

TEST(InputWidthBound, Cases) {
  const int n = 6;
  const std::vector<double> flat(64, 1.0 / 64);
  auto rep = check_input_width_bound(flat, n);
  EXPECT_DOUBLE_EQ(rep.second_moment, 36.0);
  EXPECT_DOUBLE_EQ(*rep.qif_bound, 36.0);
  EXPECT_TRUE(rep.satisfied && *rep.satisfied);

  rep = check_input_width_bound(std::vector<double>{0.5, 0.5}, 1);
  EXPECT_TRUE(rep.satisfied && *rep.satisfied);

  rep = check_input_width_bound(std::vector<double>{0.99, 0.01}, 3);
  EXPECT_FALSE(rep.satisfied.has_value());
  EXPECT_NE(rep.note.find("precondition"), std::string::npos);
}

TEST(BatchHypothesis, HoldsOnFamilies) {
  for (const char* spec : {"uniform:m=6", "geometric:half_life=2,m=10", "dominated:r=0.9,m=8", "dirichlet:m=7,seed=2",
                           "two_heavy:m=12,gamma=0.5"}) {
    const auto d = make_family(spec);
    for (double eps : {0.1, 0.3, 0.8}) {
      const auto h = check_batch_hypothesis(d.probabilities(), d.universe_bits(), eps);
      EXPECT_TRUE(h.holds) << spec << " eps=" << eps << " lhs=" << h.lhs;
      EXPECT_LE(h.lhs, 1.0 / 6.0);
    }
  }
}

TEST(Tightness, ConstructionHitsTargetEntropy) {
  for (int m : {8, 12, 16, 20}) {
    const auto t = tightness_construction(m, 0.5);
    const double delta = 1.0 / std::pow(std::log2(std::ldexp(1.0, m) - 2.0), 0.5);
    EXPECT_NEAR(t.entropy, 1.0 + delta, 1e-9) << m;
    EXPECT_NEAR(2 * t.heavy + t.light * t.light_count, 1.0, 1e-12);
    const auto d = t.materialize();
    const auto mo = moments(d.probabilities());
    EXPECT_NEAR(mo.entropy, 1.0 + delta, 1e-9);
    EXPECT_NEAR(mo.second_moment / (mo.entropy * mo.entropy), t.ratio, 1e-9);
  }
}

TEST(Tightness, RatioGrowsWithWidth) {
  double prev = 0.0;
  for (int m = 8; m <= 20; ++m) {
    const auto t = tightness_construction(m, 0.5);
    EXPECT_GT(t.ratio, prev) << m;
    prev = t.ratio;
  }
  // Regression value from an independent 40-digit root solve.
  EXPECT_NEAR(tightness_construction(16, 0.5).ratio, 4.1882557549691044, 1e-9);
  EXPECT_GT(tightness_construction(16, 0.5).ratio, 0.5 * std::sqrt(16.0));
  // Symbolic summary past the materialization limit.
  EXPECT_GT(tightness_construction(40, 0.5).ratio, tightness_construction(20, 0.5).ratio);
  EXPECT_THROW(tightness_construction(24, 0.5).materialize(), ResourceCapError);
  EXPECT_THROW(tightness_construction(2, 0.5), DomainError);
  EXPECT_THROW(tightness_construction(8, 1.0), DomainError);
}

TEST(Fuzz, SmallRunIsClean) {
  const auto s = verify_bounds_fuzz(3000, 11, 0.8);
  EXPECT_TRUE(fuzz_clean(s));
  EXPECT_EQ(s.high_entropy_cases, 3000u);
  EXPECT_EQ(s.low_entropy_cases, 3000u);
  EXPECT_EQ(s.input_width_cases, 3000u);
  EXPECT_LE(s.max_high_ratio_fraction, 1.0);
  EXPECT_LE(s.max_low_moment_fraction, 1.0);
  EXPECT_LE(s.max_input_width_fraction, 1.0 + 1e-12);
}

TEST(Fuzz, ReproducibleFromSeed) {
  DistributionFuzzer a(5), b(5);
  for (int i = 0; i < 50; ++i) {
    const auto x = a.next_distribution();
    const auto y = b.next_distribution();
    EXPECT_EQ(x.probs, y.probs);
    EXPECT_EQ(x.m, y.m);
  }
  std::uint64_t seen = 0;
  verify_bounds_fuzz(100, 2, 0.8, [&seen](const BoundReport&) { ++seen; });
  EXPECT_GE(seen, 300u);
}

TEST(Fuzz, RationalTablesSumToOne) {
  DistributionFuzzer f(8);
  for (int i = 0; i < 500; ++i) {
    const auto c = f.next_rational();
    double total = 0.0;
    for (double p : c.probs) {
      EXPECT_GE(p, std::ldexp(1.0, -c.n) * (1 - 1e-12));
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}
