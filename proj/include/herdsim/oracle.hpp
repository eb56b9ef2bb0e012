#pragma once

// Ground-truth computations used to cross-check the simulator: exhaustive
// decision-tree enumeration, the likelihood-ratio martingale identity, and
// quadrature of the principal likelihood ratio.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "herdsim/chain.hpp"
#include "herdsim/model.hpp"

namespace herdsim {

inline constexpr int kMaxEnumerationDepth = 20;

struct EnumerationResult {
  int T = 0;
  std::vector<double> exact_positional;  // P(correct at t), t = 1..T
  std::vector<double> depth_mass;        // total path weight at each depth
  std::uint64_t path_count = 0;          // 2^T
};

namespace detail {

inline void expand(const ModelParams& params, BeliefState belief, double weight, int depth,
                   int T, EnumerationResult& out) {
  if (depth == T) return;
  const double r = threshold(params, belief);
  const double p_a = choice_prob(params, r, Hypothesis::MuA, Decision::A);
  const double p_b = choice_prob(params, r, Hypothesis::MuA, Decision::B);
  const auto i = static_cast<std::size_t>(depth);
  out.exact_positional[i] += weight * p_a;
  out.depth_mass[i] += weight * (p_a + p_b);
  expand(params, apply_observation(params, belief, r, Decision::A), weight * p_a, depth + 1, T,
         out);
  expand(params, apply_observation(params, belief, r, Decision::B), weight * p_b, depth + 1, T,
         out);
}

}  // namespace detail

/// Exact positional accuracy of the principal-free chain under true state MuA.
///
/// Without a principal the belief is a deterministic function of the decision
/// prefix, so summing over all 2^T prefixes gives the exact law.
inline EnumerationResult enumerate_no_principal(const ModelParams& params, int T) {
  params.validate();
  if (T < 1 || T > kMaxEnumerationDepth)
    throw ConfigError("enum-t", "enumeration depth must lie in [1, " +
                                    std::to_string(kMaxEnumerationDepth) + "]");
  EnumerationResult out;
  out.T = T;
  out.exact_positional.assign(static_cast<std::size_t>(T), 0.0);
  out.depth_mass.assign(static_cast<std::size_t>(T), 0.0);
  out.path_count = std::uint64_t{1} << T;
  detail::expand(params, optimal_initial_beta(params), 1.0, 0, T, out);
  return out;
}

/// |P(A|mu_A,r) e^{LLR(A)} + P(B|mu_A,r) e^{LLR(B)} - 1|.
///
/// The sum telescopes to P(A|mu_B,r) + P(B|mu_B,r). `log_cdf_offset` shifts
/// the mu_A choice probabilities in log space; it exists only so the verify
/// suite can demonstrate that a corrupted CDF is caught.
inline double martingale_residual(const ModelParams& params, double r,
                                  double log_cdf_offset = 0.0) {
  double sum = 0.0;
  for (Decision d : {Decision::A, Decision::B}) {
    const double log_p = log_choice_prob(params, r, Hypothesis::MuA, d) + log_cdf_offset;
    sum += std::exp(log_p + decision_log_likelihood_ratio(params, r, d));
  }
  return std::abs(sum - 1.0);
}

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double estimate, double error_estimate)
      : std::runtime_error("quadrature did not converge; estimate " + std::to_string(estimate) +
                           ", error estimate " + std::to_string(error_estimate)),
        estimate_(estimate),
        error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
  bool exhausted = false;
  double error = 0.0;
};

inline double simpson_refine(SimpsonState& st, double a, double b, double fa, double fm,
                             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (depth >= st.max_depth) {
    st.exhausted = true;
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_refine(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_refine(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction. The interval is
/// pre-split into `panels` pieces so narrow peaks are not missed by the
/// first five samples. Throws QuadratureError if the depth budget runs out.
inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                           double b, double abs_tol, int panels = 16,
                                           int max_depth = 40) {
  detail::SimpsonState st{f, max_depth};
  double total = 0.0;
  const double width = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + width * i;
    const double hi = i + 1 == panels ? b : lo + width;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_refine(st, lo, hi, flo, fmid, fhi, whole, abs_tol / panels, 0);
  }
  if (st.exhausted) throw QuadratureError(total, st.error);
  return {total, st.error};
}

/// E[exp(principal LLR(s))] with s ~ N(mean of `generating`, sigma_p^2),
/// integrated over mean +- 10 sigma_p.
inline QuadratureResult principal_ratio_mean(const ModelParams& params, Hypothesis generating) {
  params.validate();
  const double mean = params.mean_of(generating);
  const double sp = params.sigma_p;
  constexpr double kLogSqrt2Pi = 0.91893853320467274178;
  const std::function<double(double)> integrand = [&](double s) {
    const double z = (s - mean) / sp;
    return std::exp(principal_log_likelihood_ratio(params, s) - 0.5 * z * z - kLogSqrt2Pi -
                    std::log(sp));
  };
  return integrate_adaptive(integrand, mean - 10.0 * sp, mean + 10.0 * sp, 1e-10);
}

// Closed forms the quadrature is checked against.
inline double principal_ratio_mean_closed_form(const ModelParams& params, Hypothesis generating) {
  if (generating == Hypothesis::MuA) return 1.0;
  const double dp = (params.mu_a - params.mu_b) / params.sigma_p;
  return std::exp(dp * dp);
}

struct McComparison {
  std::vector<double> exact;
  std::vector<double> monte_carlo;
  double max_deviation = 0.0;
  double bound = 0.0;  // 3 * sqrt(0.25 / M), the worst-case binomial band
  bool underpowered = false;

  bool within_bound() const { return max_deviation <= bound; }
};

/// Principal-free ensemble versus exact enumeration at every position.
inline McComparison mc_vs_enumeration(const ModelParams& params, int T, std::int64_t M,
                                      std::uint64_t master_seed = 42, unsigned workers = 0) {
  const EnumerationResult exact = enumerate_no_principal(params, T);
  Scenario s;
  s.params = params;
  s.principal.enabled = false;
  s.true_state = {Hypothesis::MuA};
  s.T = T;
  s.M = M;
  s.master_seed = master_seed;
  const EnsembleStats mc = run_ensemble(s, workers);

  McComparison cmp;
  cmp.exact = exact.exact_positional;
  cmp.monte_carlo = mc.positional_correct;
  for (std::size_t i = 0; i < cmp.exact.size(); ++i)
    cmp.max_deviation = std::max(cmp.max_deviation, std::abs(cmp.exact[i] - cmp.monte_carlo[i]));
  cmp.bound = 3.0 * std::sqrt(0.25 / static_cast<double>(M));
  // A band wider than 0.05 cannot distinguish a broken simulator.
  cmp.underpowered = cmp.bound > 0.05;
  return cmp;
}

}  // namespace herdsim
