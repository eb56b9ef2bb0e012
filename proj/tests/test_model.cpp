#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "herdsim/model.hpp"
#include "oracles.hpp"

using namespace herdsim;

namespace {

const ModelParams kDefaults{};

// ln Phi values frozen from a 40-digit mpmath evaluation.
constexpr double kLnPhiHalf = -0.36894641528865639307;
constexpr double kLnPhiMinus8 = -35.013437159914549896;
constexpr double kLnPhiMinus40 = -804.60844201375378817;
constexpr double kPhiHalf = 0.69146246127401310364;
constexpr double kPhiMinusHalf = 0.30853753872598689636;
// ln(Phi(-0.5) / Phi(0.5))
constexpr double kLlrMidA = -0.80696534630496221581;
// ln Phi(-6) - ln Phi(-5)
constexpr double kLlrR6A = -5.6717705559859799189;

}  // namespace

TEST(ModelParams, RejectsInvalid) {
  EXPECT_THROW(ModelParams::make(0, 1, 1, 1, 0.5, 1), ConfigError);
  EXPECT_THROW(ModelParams::make(1, 1, 1, 1, 0.5, 1), ConfigError);
  EXPECT_THROW(ModelParams::make(1, 0, 0, 1, 0.5, 1), ConfigError);
  EXPECT_THROW(ModelParams::make(1, 0, 1, -1, 0.5, 1), ConfigError);
  EXPECT_THROW(ModelParams::make(1, 0, 1, 1, 0.0, 1), ConfigError);
  EXPECT_THROW(ModelParams::make(1, 0, 1, 1, 0.5, 0), ConfigError);
  ModelParams p;
  p.prior_b = 0.4;
  EXPECT_THROW(p.validate(), ConfigError);
  try {
    ModelParams::make(0, 1, 1, 1, 0.5, 1);
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "mu-a");
  }
  EXPECT_NO_THROW(kDefaults.validate());
}

TEST(SignalSeparation, Examples) {
  EXPECT_DOUBLE_EQ(signal_separation(kDefaults), 1.0);
  EXPECT_DOUBLE_EQ(signal_separation(ModelParams::make(2, 0, 2, 1, 0.5, 1)), 1.0);
  EXPECT_DOUBLE_EQ(signal_separation(ModelParams::make(1, 0, 0.5, 1, 0.5, 1)), 2.0);
}

TEST(RelativeBenefit, Examples) {
  EXPECT_DOUBLE_EQ(relative_benefit_k(2, 1, 1, 2), 1.0);
  EXPECT_DOUBLE_EQ(relative_benefit_k(2, 1, 1, 3), 2.0);
  EXPECT_THROW(relative_benefit_k(2, 2, 1, 3), ConfigError);
  EXPECT_THROW(relative_benefit_k(2, 1, 3, 3), ConfigError);
}

TEST(OptimalInitialBeta, Examples) {
  EXPECT_EQ(optimal_initial_beta(kDefaults).log_beta, 0.0);
  const auto skewed = ModelParams::make(1, 0, 1, 1, 0.75, 1);
  EXPECT_NEAR(optimal_initial_beta(skewed).log_beta, std::log(1.0 / 3.0), 1e-15);
  EXPECT_NEAR(optimal_initial_beta(ModelParams::make(1, 0, 1, 1, 0.5, 2)).beta(), 2.0, 1e-15);
}

TEST(OptimalInitialBeta, PosteriorOddsMapping) {
  const auto p = ModelParams::make(1, 0, 1, 1, 0.75, 2.0);
  EXPECT_NEAR(posterior_odds_b_over_a(p, optimal_initial_beta(p)), 0.25 / 0.75, 1e-15);
}

TEST(Threshold, Examples) {
  EXPECT_EQ(threshold(kDefaults, {0.0}), 0.5);
  EXPECT_DOUBLE_EQ(threshold(kDefaults, {1.0}), 1.5);
  EXPECT_DOUBLE_EQ(threshold(kDefaults, {-2.0}), -1.5);
}

TEST(Threshold, MidpointIdentityIsExact) {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {3.25, -1.5}, {0.1, -0.1}, {7.0, 6.0}}) {
    const auto p = ModelParams::make(a, b, 1.7, 1, 0.5, 1);
    EXPECT_EQ(threshold(p, {0.0}), 0.5 * (a + b));
  }
}

TEST(Threshold, StrictlyIncreasingInBelief) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    double x = u(gen), y = u(gen);
    if (x == y) continue;
    if (x > y) std::swap(x, y);
    EXPECT_LT(threshold(kDefaults, {x}), threshold(kDefaults, {y}));
  }
}

TEST(Decide, TieGoesToA) {
  EXPECT_EQ(decide(0.7, 0.5), Decision::A);
  EXPECT_EQ(decide(0.5, 0.5), Decision::A);
  EXPECT_EQ(decide(0.3, 0.5), Decision::B);
  EXPECT_EQ(decide(std::nextafter(0.5, 0.0), 0.5), Decision::B);
}

TEST(LogNormalCdf, FrozenValues) {
  EXPECT_DOUBLE_EQ(log_normal_cdf(0.0), std::log(0.5));
  EXPECT_NEAR(log_normal_cdf(0.5), kLnPhiHalf, 1e-15);
  EXPECT_NEAR(log_normal_cdf(-8.0), kLnPhiMinus8, 1e-12);
  EXPECT_NEAR(log_normal_cdf(-40.0), kLnPhiMinus40, 1e-11);
  EXPECT_TRUE(std::isfinite(log_normal_cdf(-8.0)));
  EXPECT_TRUE(std::isfinite(log_normal_cdf(-1e3)));
  EXPECT_NEAR(log_normal_cdf(8.0), -6.2209605742717860585e-16, 1e-28);
}

TEST(LogNormalCdf, QuadratureOracleAtHalf) {
  EXPECT_NEAR(std::exp(log_normal_cdf(0.5)), oracle::phi_by_quadrature(0.5), 1e-12);
}

TEST(LogNormalCdf, RelativeErrorAgainstBoostOnGrid) {
  for (double z = -8.0; z <= 8.0; z += 0.03125) {
    const double ref = oracle::phi_cdf(z);
    EXPECT_NEAR(std::exp(log_normal_cdf(z)) / ref, 1.0, 1e-10) << "z=" << z;
  }
}

TEST(LogNormalCdf, StrictlyIncreasingAcrossBranchSwitch) {
  double prev = log_normal_cdf(-60.0);
  for (double z = -60.0 + 0.01; z < 10.0; z += 0.01) {
    const double cur = log_normal_cdf(z);
    ASSERT_LT(prev, cur) << "z=" << z;
    prev = cur;
  }
  EXPECT_LT(log_normal_cdf(-35.0 - 1e-9), log_normal_cdf(-35.0));
}

TEST(ChoiceProb, Examples) {
  EXPECT_NEAR(choice_prob(kDefaults, 0.5, Hypothesis::MuA, Decision::A), kPhiHalf, 1e-15);
  EXPECT_NEAR(choice_prob(kDefaults, 0.5, Hypothesis::MuB, Decision::A), kPhiMinusHalf, 1e-15);
  EXPECT_EQ(choice_prob(kDefaults, 0.5, Hypothesis::MuA, Decision::A),
            choice_prob(kDefaults, 0.5, Hypothesis::MuB, Decision::B));
}

TEST(ChoiceProb, ComplementConsistency) {
  for (double r = -7.0; r <= 8.0; r += 0.05)
    for (Hypothesis h : {Hypothesis::MuA, Hypothesis::MuB})
      EXPECT_NEAR(choice_prob(kDefaults, r, h, Decision::A) +
                      choice_prob(kDefaults, r, h, Decision::B),
                  1.0, 1e-12);
}

TEST(DecisionLlr, Examples) {
  EXPECT_NEAR(decision_log_likelihood_ratio(kDefaults, 0.5, Decision::A), kLlrMidA, 1e-14);
  EXPECT_NEAR(decision_log_likelihood_ratio(kDefaults, 0.5, Decision::B), -kLlrMidA, 1e-14);
  const double far = decision_log_likelihood_ratio(kDefaults, 6.0, Decision::A);
  EXPECT_TRUE(std::isfinite(far));
  EXPECT_NEAR(far, kLlrR6A, 1e-12);
}

TEST(DecisionLlr, DeepTailStaysFinite) {
  for (double r : {-45.0, -30.0, 30.0, 45.0, 200.0})
    for (Decision d : {Decision::A, Decision::B})
      EXPECT_TRUE(std::isfinite(decision_log_likelihood_ratio(kDefaults, r, d))) << r;
}

TEST(DecisionLlr, MidpointAntisymmetry) {
  for (auto [a, b, s] : {std::tuple{1.0, 0.0, 1.0}, {2.0, -1.0, 0.7}, {5.0, 4.5, 3.0}}) {
    const auto p = ModelParams::make(a, b, s, 1, 0.5, 1);
    const double mid = 0.5 * (a + b);
    EXPECT_NEAR(decision_log_likelihood_ratio(p, mid, Decision::A),
                -decision_log_likelihood_ratio(p, mid, Decision::B), 1e-12);
  }
}

TEST(DecisionLlr, MartingaleIdentityBothWeightings) {
  for (double r = -6.0; r <= 6.0; r += 0.25) {
    double under_a = 0.0, under_b = 0.0;
    for (Decision d : {Decision::A, Decision::B}) {
      const double llr = decision_log_likelihood_ratio(kDefaults, r, d);
      under_a += choice_prob(kDefaults, r, Hypothesis::MuA, d) * std::exp(llr);
      under_b += choice_prob(kDefaults, r, Hypothesis::MuB, d) * std::exp(-llr);
    }
    EXPECT_NEAR(under_a, 1.0, 1e-12) << r;
    EXPECT_NEAR(under_b, 1.0, 1e-12) << r;
  }
}

TEST(PrincipalLlr, Examples) {
  EXPECT_EQ(principal_log_likelihood_ratio(kDefaults, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(principal_log_likelihood_ratio(kDefaults, 1.5), -1.0);
  EXPECT_DOUBLE_EQ(principal_log_likelihood_ratio(kDefaults, -0.5), 1.0);
}

TEST(PrincipalLlr, AffineWithExpectedSlope) {
  const auto p = ModelParams::make(2.0, -0.5, 1.0, 0.8, 0.5, 1);
  const double slope = (p.mu_b - p.mu_a) / (p.sigma_p * p.sigma_p);
  const double x0 = -1.0, x1 = 0.75, x2 = 2.5;
  const double y0 = principal_log_likelihood_ratio(p, x0);
  const double y1 = principal_log_likelihood_ratio(p, x1);
  const double y2 = principal_log_likelihood_ratio(p, x2);
  EXPECT_NEAR((y1 - y0) / (x1 - x0), slope, 1e-12);
  EXPECT_NEAR((y2 - y1) / (x2 - x1), slope, 1e-12);
}

TEST(PrincipalLlr, MatchesDensityRatio) {
  const auto p = ModelParams::make(1.0, 0.0, 1.0, 0.6, 0.5, 1);
  auto log_density = [&](double x, double mu) {
    const double z = (x - mu) / p.sigma_p;
    return -0.5 * z * z;
  };
  for (double s : {-2.0, 0.1, 0.5, 1.3, 4.0})
    EXPECT_NEAR(principal_log_likelihood_ratio(p, s), log_density(s, 0.0) - log_density(s, 1.0),
                1e-12);
}

TEST(ApplyPrincipal, AdditiveAndChecked) {
  EXPECT_EQ(apply_principal({0.0}, 0.0).log_beta, 0.0);
  EXPECT_EQ(apply_principal({0.0}, -1.0).log_beta, -1.0);
  EXPECT_EQ(apply_principal({0.5}, 1.0).log_beta, 1.5);
  EXPECT_THROW(apply_principal({0.0}, std::numeric_limits<double>::infinity()), NumericFault);
  EXPECT_THROW(apply_principal({0.0}, std::nan("")), NumericFault);
}

TEST(ApplyPrincipal, OrderIndependent) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen), y = u(gen);
    // Starting from zero, x+y and y+x are the same IEEE operation.
    EXPECT_EQ(apply_principal(apply_principal({0.0}, x), y),
              apply_principal(apply_principal({0.0}, y), x));
  }
}

TEST(ApplyObservation, Examples) {
  const auto after_a = apply_observation(kDefaults, {0.0}, 0.5, Decision::A);
  EXPECT_NEAR(after_a.log_beta, kLlrMidA, 1e-14);
  EXPECT_NEAR(threshold(kDefaults, after_a), kLlrMidA + 0.5, 1e-14);
  const auto after_b = apply_observation(kDefaults, {0.0}, 0.5, Decision::B);
  EXPECT_NEAR(after_b.log_beta, -kLlrMidA, 1e-14);
  const auto back = apply_observation(kDefaults, after_a, 0.5, Decision::B);
  EXPECT_NEAR(back.log_beta, 0.0, 1e-15);
}
