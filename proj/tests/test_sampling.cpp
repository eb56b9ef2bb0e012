#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "herdsim/sampling.hpp"
#include "oracles.hpp"

using namespace herdsim;

namespace {

constexpr int kMillion = 1'000'000;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <typename Draw>
Moments moments(Draw draw, int n) {
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  return {mean, (sum_sq - n * mean * mean) / (n - 1)};
}

}  // namespace

TEST(DeriveStream, ReplayIsIdentical) {
  RngStream a = derive_stream(42, 0);
  RngStream b = derive_stream(42, 0);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(DeriveStream, DistinctRunIndicesDiffer) {
  RngStream a = derive_stream(42, 0);
  RngStream b = derive_stream(42, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
  RngStream c = derive_stream(43, 0);
  RngStream d = derive_stream(42, 0);
  EXPECT_NE(c.next_u64(), d.next_u64());
}

TEST(DeriveStream, IndependentOfCreationOrder) {
  RngStream direct = derive_stream(42, 5);
  std::vector<RngStream> others;
  for (int i = 0; i < 5; ++i) {
    others.push_back(derive_stream(42, i));
    others.back().uniform();
  }
  RngStream late = derive_stream(42, 5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(direct.next_u64(), late.next_u64());
}

TEST(DeriveStream, RejectsNegativeRunIndex) {
  EXPECT_THROW(derive_stream(1, -1), ConfigError);
}

TEST(DeriveStream, FirstDrawsAreUncorrelatedAcrossRuns) {
  // Adjacent run indices must not produce correlated first uniforms.
  const int n = 200000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream a = derive_stream(7, i);
    RngStream b = derive_stream(7, i + 1);
    const double x = a.uniform(), y = b.uniform();
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(n));
}

TEST(Uniform, InHalfOpenUnitInterval) {
  RngStream rng = derive_stream(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(ObjectiveSignal, MeanAndVariance) {
  const ModelParams params;
  RngStream rng = derive_stream(42, 0);
  const auto m = moments([&] { return draw_objective_signal(rng, params, {Hypothesis::MuA}); },
                         kMillion);
  EXPECT_NEAR(m.mean, 1.0, 0.004);
  EXPECT_NEAR(m.variance, 1.0, 0.005);
}

TEST(ObjectiveSignal, DegenerateSigmaRejectedAtConstruction) {
  EXPECT_THROW(ModelParams::make(1, 0, 0.0, 1, 0.5, 1), ConfigError);
}

TEST(ObjectiveSignal, KolmogorovSmirnovAgainstTargetNormal) {
  const ModelParams params;
  RngStream rng = derive_stream(2024, 3);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = draw_objective_signal(rng, params, {Hypothesis::MuA});
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = oracle::phi_cdf(xs[static_cast<std::size_t>(i)] - 1.0);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double critical_1pct = 1.62762 / std::sqrt(static_cast<double>(n));
  EXPECT_LT(d, critical_1pct);
}

TEST(PrincipalChoice, Boundaries) {
  RngStream rng = derive_stream(9, 0);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_EQ(draw_principal_choice(rng, 1.0), Hypothesis::MuA);
    ASSERT_EQ(draw_principal_choice(rng, 0.0), Hypothesis::MuB);
  }
}

TEST(PrincipalChoice, Frequency) {
  RngStream rng = derive_stream(42, 1);
  int hits = 0;
  for (int i = 0; i < kMillion; ++i) hits += draw_principal_choice(rng, 0.3) == Hypothesis::MuA;
  EXPECT_NEAR(hits / double(kMillion), 0.3, 0.0014);
}

TEST(PrincipalSignal, MeansAndVariance) {
  const ModelParams params;
  RngStream rng = derive_stream(42, 2);
  EXPECT_NEAR(moments([&] { return draw_principal_signal(rng, params, Hypothesis::MuA); },
                      kMillion).mean,
              1.0, 0.004);
  EXPECT_NEAR(moments([&] { return draw_principal_signal(rng, params, Hypothesis::MuB); },
                      kMillion).mean,
              0.0, 0.004);
  const auto narrow = ModelParams::make(1, 0, 1, 0.5, 0.5, 1);
  const auto m = moments([&] { return draw_principal_signal(rng, narrow, Hypothesis::MuA); },
                         kMillion);
  EXPECT_NEAR(m.variance, 0.25, 0.0015);
}

TEST(Trust, BoundariesAndFrequency) {
  RngStream rng = derive_stream(42, 3);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_TRUE(draw_trust(rng, 1.0));
    ASSERT_FALSE(draw_trust(rng, 0.0));
  }
  int hits = 0;
  for (int i = 0; i < kMillion; ++i) hits += draw_trust(rng, 0.1);
  EXPECT_NEAR(hits / double(kMillion), 0.1, 0.0009);
}

TEST(DecisionInputs, ObjectiveSignalIndependentOfTrustProbability) {
  // Same stream, different p_trust and p_bias: the objective signal sequence
  // must not move because every draw is consumed regardless.
  const ModelParams params;
  PrincipalConfig lo{true, 0.2, 0.0, BiasMode::PerDecisionMaker};
  PrincipalConfig hi{true, 0.9, 1.0, BiasMode::PerDecisionMaker};
  PrincipalConfig off{};
  RngStream a = derive_stream(5, 0), b = derive_stream(5, 0), c = derive_stream(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto da = draw_decision_inputs(a, params, lo, {});
    const auto db = draw_decision_inputs(b, params, hi, {});
    const auto dc = draw_decision_inputs(c, params, off, {});
    ASSERT_EQ(da.s_o, db.s_o);
    ASSERT_EQ(da.s_o, dc.s_o);
    ASSERT_EQ(da.principal_noise, db.principal_noise);
  }
}
