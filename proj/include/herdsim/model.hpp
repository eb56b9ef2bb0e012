#pragma once

// Deterministic mathematics of the sequential binary-choice model with an
// optional principal signal. Beliefs live in log space throughout.

#include <cmath>
#include <stdexcept>
#include <string>

namespace herdsim {

// Raised when an input violates a model invariant. `field` names the
// offending parameter so callers can report it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A belief update produced a non-finite value.
class NumericFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Hypothesis { MuA, MuB };
enum class Decision { A, B };

inline const char* to_string(Hypothesis h) { return h == Hypothesis::MuA ? "a" : "b"; }
inline const char* to_string(Decision d) { return d == Decision::A ? "A" : "B"; }

/// The Gaussian world both signal sources are drawn from.
///
/// Construct through `ModelParams::make` (or call `validate()` after
/// aggregate initialization) to enforce mu_a > mu_b, positive scales, and
/// complementary priors.
struct ModelParams {
  double mu_a = 1.0;
  double mu_b = 0.0;
  double sigma = 1.0;
  double sigma_p = 1.0;
  double prior_a = 0.5;
  double prior_b = 0.5;
  double k = 1.0;

  void validate() const {
    auto finite = [](const char* name, double v) {
      if (!std::isfinite(v)) throw ConfigError(name, "must be finite");
    };
    finite("mu-a", mu_a);
    finite("mu-b", mu_b);
    finite("sigma", sigma);
    finite("sigma-p", sigma_p);
    finite("prior-a", prior_a);
    finite("prior-b", prior_b);
    finite("k", k);
    if (!(mu_a > mu_b)) throw ConfigError("mu-a", "mu-a must exceed mu-b");
    if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
    if (!(sigma_p > 0.0)) throw ConfigError("sigma-p", "must be positive");
    if (!(k > 0.0)) throw ConfigError("k", "must be positive");
    if (!(prior_a > 0.0 && prior_a < 1.0)) throw ConfigError("prior-a", "must lie in (0,1)");
    if (!(prior_b > 0.0 && prior_b < 1.0)) throw ConfigError("prior-b", "must lie in (0,1)");
    if (std::abs(prior_a + prior_b - 1.0) > 1e-12)
      throw ConfigError("prior-a", "priors must sum to 1");
  }

  static ModelParams make(double mu_a, double mu_b, double sigma, double sigma_p,
                          double prior_a, double k) {
    ModelParams p{mu_a, mu_b, sigma, sigma_p, prior_a, 1.0 - prior_a, k};
    p.validate();
    return p;
  }

  double mean_of(Hypothesis h) const { return h == Hypothesis::MuA ? mu_a : mu_b; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Natural log of the threshold parameter beta.
struct BeliefState {
  double log_beta = 0.0;

  double beta() const { return std::exp(log_beta); }
  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

inline double signal_separation(const ModelParams& params) {
  return (params.mu_a - params.mu_b) / params.sigma;
}

// Relative benefit ratio k from the four state-conditional benefits.
// `benefit_x_Y` is the benefit of choosing x when state Y holds.
inline double relative_benefit_k(double benefit_a_A, double benefit_b_A, double benefit_a_B,
                                 double benefit_b_B) {
  const double gain_in_a = benefit_a_A - benefit_b_A;
  const double gain_in_b = benefit_b_B - benefit_a_B;
  if (!(gain_in_a > 0.0))
    throw ConfigError("benefit", "A must strictly outperform B when A is the better state");
  if (!(gain_in_b > 0.0))
    throw ConfigError("benefit", "B must strictly outperform A when B is the better state");
  return gain_in_b / gain_in_a;
}

inline BeliefState optimal_initial_beta(const ModelParams& params) {
  return {std::log(params.prior_b / params.prior_a) + std::log(params.k)};
}

// Posterior odds p(B)/p(A) implied by a belief; beta divided by k.
inline double posterior_odds_b_over_a(const ModelParams& params, BeliefState belief) {
  return std::exp(belief.log_beta - std::log(params.k));
}

/// Signal threshold r(beta): choose A iff the objective signal is >= r.
inline double threshold(const ModelParams& params, BeliefState belief) {
  const double scale = params.sigma * params.sigma / (params.mu_a - params.mu_b);
  return scale * belief.log_beta + 0.5 * (params.mu_a + params.mu_b);
}

inline Decision decide(double s_o, double r) { return s_o >= r ? Decision::A : Decision::B; }

/// ln Phi(z) for the standard normal CDF.
///
/// Uses erfc on both sides of zero so neither tail loses precision. Below
/// z = -35 erfc approaches the subnormal range and the asymptotic Mills-ratio
/// series takes over; its truncation error there is under 1e-15 relative.
inline double log_normal_cdf(double z) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z * kInvSqrt2));
  if (z > -35.0) return std::log(0.5 * std::erfc(-z * kInvSqrt2));
  // ln phi(z) - ln(-z) + ln(1 - 1/z^2 + 3/z^4 - 15/z^6 + ...)
  const double w = 1.0 / (z * z);
  const double series =
      1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 + w * (-945.0 + w * 10395.0)))));
  constexpr double kLogSqrt2Pi = 0.91893853320467274178;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(-z) + std::log(series);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

// ln P(choice | hyp, r): the decision-maker chooses A with probability
// P(s_o >= r) under the hypothesised mean.
inline double log_choice_prob(const ModelParams& params, double r, Hypothesis hyp,
                              Decision choice) {
  const double z = (params.mean_of(hyp) - r) / params.sigma;
  return log_normal_cdf(choice == Decision::A ? z : -z);
}

inline double choice_prob(const ModelParams& params, double r, Hypothesis hyp, Decision choice) {
  const double z = (params.mean_of(hyp) - r) / params.sigma;
  return normal_cdf(choice == Decision::A ? z : -z);
}

/// ln p(observed | mu_B, r) - ln p(observed | mu_A, r).
inline double decision_log_likelihood_ratio(const ModelParams& params, double r,
                                            Decision observed) {
  return log_choice_prob(params, r, Hypothesis::MuB, observed) -
         log_choice_prob(params, r, Hypothesis::MuA, observed);
}

/// ln N(s_p; mu_B, sigma_p^2) - ln N(s_p; mu_A, sigma_p^2).
inline double principal_log_likelihood_ratio(const ModelParams& params, double s_p) {
  return (params.mu_b - params.mu_a) * (2.0 * s_p - params.mu_a - params.mu_b) /
         (2.0 * params.sigma_p * params.sigma_p);
}

inline BeliefState apply_principal(BeliefState belief, double log_ratio) {
  const double next = belief.log_beta + log_ratio;
  if (!std::isfinite(next)) throw NumericFault("belief became non-finite after principal update");
  return {next};
}

// `r_used` must be the threshold the observed decision-maker actually used.
inline BeliefState apply_observation(const ModelParams& params, BeliefState belief,
                                     double r_used, Decision observed) {
  const double next = belief.log_beta + decision_log_likelihood_ratio(params, r_used, observed);
  if (!std::isfinite(next))
    throw NumericFault("belief became non-finite after observation update");
  return {next};
}

}  // namespace herdsim
