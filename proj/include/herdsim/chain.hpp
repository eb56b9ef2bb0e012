#pragma once

// Single decision chains and Monte Carlo ensembles over them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "herdsim/model.hpp"
#include "herdsim/sampling.hpp"

namespace herdsim {

enum class Metric { Positional, Cumulative, Both };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::Positional: return "positional";
    case Metric::Cumulative: return "cumulative";
    case Metric::Both: return "both";
  }
  return "positional";
}

struct DecisionRecord {
  int t = 0;  // 1-based position
  double log_beta_before = 0.0;
  bool trusted = false;
  std::optional<Hypothesis> principal_choice;
  std::optional<double> s_p;
  double log_beta_at_decision = 0.0;
  double threshold_r = 0.0;
  double s_o = 0.0;
  Decision decision = Decision::A;
  double log_beta_after = 0.0;
  bool correct = false;
};

// Everything a chain needs except the run count.
struct ChainSpec {
  ModelParams params;
  PrincipalConfig principal;
  TrueState true_state;
  int T = 100;
};

struct ChainResult {
  ModelParams params;
  PrincipalConfig principal;
  TrueState true_state;
  std::vector<DecisionRecord> records;
};

struct Scenario {
  ModelParams params;
  PrincipalConfig principal;
  TrueState true_state;
  int T = 100;
  std::int64_t M = 10000;
  std::uint64_t master_seed = 42;
  Metric metric = Metric::Positional;

  ChainSpec chain() const { return {params, principal, true_state, T}; }

  void validate() const {
    params.validate();
    principal.validate();
    if (T < 1) throw ConfigError("t", "must be at least 1");
    if (M < 1) throw ConfigError("runs", "must be at least 1");
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct EnsembleStats {
  int T = 0;
  std::int64_t M = 0;
  std::vector<double> positional_correct;
  std::vector<double> cumulative_correct;
  std::vector<double> positional_stderr;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

// A chain fault tagged with the run that produced it.
class ChainFault : public NumericFault {
 public:
  ChainFault(std::int64_t run_index, const std::string& what)
      : NumericFault("run " + std::to_string(run_index) + ": " + what), run_index_(run_index) {}
  std::int64_t run_index() const noexcept { return run_index_; }

 private:
  std::int64_t run_index_;
};

namespace detail {

// Runs one chain, handing each record to `sink` as it is produced.
template <typename Sink>
void run_chain(const ChainSpec& spec, RngStream& rng, Sink&& sink) {
  const ModelParams& params = spec.params;
  const PrincipalConfig& principal = spec.principal;
  const Hypothesis truth = spec.true_state.hypothesis;
  const Decision correct_choice = truth == Hypothesis::MuA ? Decision::A : Decision::B;

  BeliefState belief = optimal_initial_beta(params);
  std::optional<Hypothesis> chain_choice;

  for (int t = 1; t <= spec.T; ++t) {
    const DecisionDraws draws = draw_decision_inputs(rng, params, principal, spec.true_state);

    DecisionRecord rec;
    rec.t = t;
    rec.log_beta_before = belief.log_beta;

    if (principal.enabled) {
      // The drawn choice says whether the principal is right; map it onto
      // the hypothesis so p_bias means "correct" for either true state.
      Hypothesis choice = draws.principal_choice == Hypothesis::MuA ? truth : opposite(truth);
      if (principal.bias_mode == BiasMode::PerChain) {
        if (!chain_choice) chain_choice = choice;
        choice = *chain_choice;
      }
      const double s_p = params.mean_of(choice) + params.sigma_p * draws.principal_noise;
      rec.principal_choice = choice;
      rec.s_p = s_p;
      rec.trusted = draws.trusted;
      if (draws.trusted)
        belief = apply_principal(belief, principal_log_likelihood_ratio(params, s_p));
    }

    rec.log_beta_at_decision = belief.log_beta;
    rec.threshold_r = threshold(params, belief);
    rec.s_o = draws.s_o;
    rec.decision = decide(draws.s_o, rec.threshold_r);
    belief = apply_observation(params, belief, rec.threshold_r, rec.decision);
    rec.log_beta_after = belief.log_beta;
    rec.correct = rec.decision == correct_choice;
    sink(rec);
  }
}

}  // namespace detail

inline ChainResult simulate_chain(const ChainSpec& spec, RngStream& rng) {
  ChainResult result{spec.params, spec.principal, spec.true_state, {}};
  result.records.reserve(static_cast<std::size_t>(spec.T));
  detail::run_chain(spec, rng, [&](const DecisionRecord& r) { result.records.push_back(r); });
  return result;
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs M chains on streams derive_stream(master_seed, 0..M-1).
///
/// Per-position tallies are integer counts, so the result is bit-identical
/// for any worker count. The first fault (lowest run index) is rethrown as a
/// ChainFault.
inline EnsembleStats run_ensemble(const Scenario& scenario, unsigned workers = 0) {
  scenario.validate();
  const ChainSpec spec = scenario.chain();
  const auto T = static_cast<std::size_t>(scenario.T);
  const std::int64_t M = scenario.M;
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, M));

  struct Tally {
    std::vector<std::int64_t> correct_at;      // runs correct at position t
    std::vector<std::int64_t> correct_through;  // sum over runs of correct count through t
    std::optional<std::int64_t> fault_run;
    std::string fault_what;
  };
  std::vector<Tally> tallies(workers, Tally{std::vector<std::int64_t>(T, 0),
                                            std::vector<std::int64_t>(T, 0), std::nullopt, {}});

  auto work = [&](unsigned w) {
    Tally& tally = tallies[w];
    const std::int64_t begin = M * w / workers;
    const std::int64_t end = M * (w + 1) / workers;
    for (std::int64_t run = begin; run < end; ++run) {
      RngStream rng = derive_stream(scenario.master_seed, run);
      std::int64_t running = 0;
      try {
        detail::run_chain(spec, rng, [&](const DecisionRecord& r) {
          const auto i = static_cast<std::size_t>(r.t - 1);
          if (r.correct) {
            ++tally.correct_at[i];
            ++running;
          }
          tally.correct_through[i] += running;
        });
      } catch (const NumericFault& e) {
        tally.fault_run = run;
        tally.fault_what = e.what();
        return;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  for (const Tally& tally : tallies)
    if (tally.fault_run) throw ChainFault(*tally.fault_run, tally.fault_what);

  EnsembleStats stats;
  stats.T = scenario.T;
  stats.M = M;
  stats.positional_correct.resize(T);
  stats.cumulative_correct.resize(T);
  stats.positional_stderr.resize(T);
  const auto m = static_cast<double>(M);
  for (std::size_t i = 0; i < T; ++i) {
    std::int64_t at = 0;
    std::int64_t through = 0;
    for (const Tally& tally : tallies) {
      at += tally.correct_at[i];
      through += tally.correct_through[i];
    }
    const double p = static_cast<double>(at) / m;
    stats.positional_correct[i] = p;
    stats.positional_stderr[i] = std::sqrt(p * (1.0 - p) / m);
    stats.cumulative_correct[i] = static_cast<double>(through) / (m * static_cast<double>(i + 1));
  }
  return stats;
}

struct SweepCell {
  double p_bias;
  double p_trust;
  EnsembleStats stats;
};

/// Cartesian product of p_bias x p_trust with the principal enabled. Every
/// cell reuses the base master seed, so cells share common random numbers.
inline std::vector<SweepCell> sweep(const Scenario& base, const std::vector<double>& p_bias_values,
                                    const std::vector<double>& p_trust_values,
                                    unsigned workers = 0) {
  std::vector<SweepCell> cells;
  cells.reserve(p_bias_values.size() * p_trust_values.size());
  for (double pb : p_bias_values) {
    for (double pt : p_trust_values) {
      Scenario s = base;
      s.principal.enabled = true;
      s.principal.p_bias = pb;
      s.principal.p_trust = pt;
      cells.push_back({pb, pt, run_ensemble(s, workers)});
    }
  }
  return cells;
}

}  // namespace herdsim
