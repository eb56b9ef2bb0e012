#pragma once

// Seeded random streams and the four per-decision-maker draws.
//
// Generator: xoshiro256** whose four state words come from a SplitMix64
// sequence started at a mix of (master_seed, run_index). Uniforms take the
// top 53 bits; normals use the Marsaglia polar method without caching the
// paired variate, so every draw is a pure function of the stream position.
// Changing any of this requires bumping kRngAlgorithm.

#include <cmath>
#include <cstdint>

#include "herdsim/model.hpp"

namespace herdsim {

inline constexpr const char* kRngAlgorithm = "xoshiro256**+splitmix64-seed+polar-normal/v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class BiasMode { PerDecisionMaker, PerChain };

inline const char* to_string(BiasMode m) {
  return m == BiasMode::PerDecisionMaker ? "per-dm" : "per-chain";
}

struct PrincipalConfig {
  bool enabled = false;
  double p_bias = 0.5;   // probability the principal's signal comes from the true distribution
  double p_trust = 1.0;  // probability a decision-maker folds the principal signal in
  BiasMode bias_mode = BiasMode::PerDecisionMaker;

  void validate() const {
    if (!(p_bias >= 0.0 && p_bias <= 1.0)) throw ConfigError("p-bias", "must lie in [0,1]");
    if (!(p_trust >= 0.0 && p_trust <= 1.0)) throw ConfigError("p-trust", "must lie in [0,1]");
  }

  friend bool operator==(const PrincipalConfig&, const PrincipalConfig&) = default;
};

struct TrueState {
  Hypothesis hypothesis = Hypothesis::MuA;
  friend bool operator==(const TrueState&, const TrueState&) = default;
};

// xoshiro256** (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    for (auto& word : s_) {
      word = splitmix64(seed);
      seed += 0x9E3779B97F4A7C15ULL;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Single-owner generator. Not safe to share between threads.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t run_index)
      : engine_(splitmix64(splitmix64(master_seed) ^ (run_index * 0xD1B54A32D192ED03ULL))) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double standard_normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  Xoshiro256StarStar engine_;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::int64_t run_index) {
  if (run_index < 0) throw ConfigError("run_index", "must be non-negative");
  return RngStream(master_seed, static_cast<std::uint64_t>(run_index));
}

inline double draw_objective_signal(RngStream& rng, const ModelParams& params, TrueState state) {
  return params.mean_of(state.hypothesis) + params.sigma * rng.standard_normal();
}

inline Hypothesis draw_principal_choice(RngStream& rng, double p_bias) {
  return rng.uniform() < p_bias ? Hypothesis::MuA : Hypothesis::MuB;
}

inline double draw_principal_signal(RngStream& rng, const ModelParams& params, Hypothesis choice) {
  return params.mean_of(choice) + params.sigma_p * rng.standard_normal();
}

inline bool draw_trust(RngStream& rng, double p_trust) { return rng.uniform() < p_trust; }

inline Hypothesis opposite(Hypothesis h) {
  return h == Hypothesis::MuA ? Hypothesis::MuB : Hypothesis::MuA;
}

// Everything one decision-maker draws. The four draws are always consumed in
// the order trust, principal choice, principal signal, objective signal,
// whether or not the principal is enabled or trusted, so toggling trust never
// shifts the objective signals of later decision-makers.
struct DecisionDraws {
  bool trusted;
  Hypothesis principal_choice;  // as drawn, before any per-chain override
  double principal_noise;       // standard normal behind s_p
  double s_o;
};

inline DecisionDraws draw_decision_inputs(RngStream& rng, const ModelParams& params,
                                          const PrincipalConfig& principal, TrueState state) {
  DecisionDraws d{};
  d.trusted = draw_trust(rng, principal.p_trust);
  d.principal_choice = draw_principal_choice(rng, principal.p_bias);
  d.principal_noise = rng.standard_normal();
  d.s_o = draw_objective_signal(rng, params, state);
  return d;
}

}  // namespace herdsim
