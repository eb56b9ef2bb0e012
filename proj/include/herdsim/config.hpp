#pragma once

// Run configuration: flat key=value files, flag overrides, and validation
// into a Scenario. Keys match the CLI flag names without the leading dashes.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "herdsim/chain.hpp"

namespace herdsim {

enum class OutputFormat { Csv, Json };

struct RunConfig {
  Scenario scenario;
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Csv;
  std::vector<double> p_bias_values{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> p_trust_values{1.0};
  unsigned workers = 0;  // 0: hardware concurrency
};

using ConfigMap = std::map<std::string, std::string, std::less<>>;

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "mu-a",    "mu-b",       "sigma",      "sigma-p", "k",    "prior-a", "p-bias",
      "p-trust", "principal",  "bias-mode",  "true-state", "t", "runs",    "seed",
      "metric",  "out",        "format",     "p-bias-values", "p-trust-values", "workers"};
  return keys;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view text) {
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

}  // namespace detail

/// Parses `key=value` lines; `#` starts a comment. Unknown keys are rejected.
inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config", "line " + std::to_string(line_no) + " is not key=value");
    std::string key(detail::trim(line.substr(0, eq)));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key, "unknown configuration key");
    out[key] = std::string(detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Builds a validated RunConfig from defaults, then `file`, then `flags`.
/// Errors name the first offending key, in the fixed key order.
inline RunConfig resolve_config(const ConfigMap& file, const ConfigMap& flags) {
  ConfigMap merged = file;
  for (const auto& [k, v] : flags) merged[k] = v;

  RunConfig cfg;
  Scenario& s = cfg.scenario;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = merged.find(key); it != merged.end()) return it->second;
    return std::nullopt;
  };
  auto num = [&](const std::string& key, double& dst) {
    if (auto v = get(key)) dst = detail::parse_double(key, *v);
  };

  num("mu-a", s.params.mu_a);
  num("mu-b", s.params.mu_b);
  num("sigma", s.params.sigma);
  num("sigma-p", s.params.sigma_p);
  num("k", s.params.k);
  if (auto v = get("prior-a")) {
    s.params.prior_a = detail::parse_double("prior-a", *v);
    s.params.prior_b = 1.0 - s.params.prior_a;
  }
  num("p-bias", s.principal.p_bias);
  num("p-trust", s.principal.p_trust);
  if (auto v = get("principal")) {
    if (*v == "on") s.principal.enabled = true;
    else if (*v == "off") s.principal.enabled = false;
    else throw ConfigError("principal", "expected on|off");
  }
  if (auto v = get("bias-mode")) {
    if (*v == "per-dm") s.principal.bias_mode = BiasMode::PerDecisionMaker;
    else if (*v == "per-chain") s.principal.bias_mode = BiasMode::PerChain;
    else throw ConfigError("bias-mode", "expected per-dm|per-chain");
  }
  if (auto v = get("true-state")) {
    if (*v == "a") s.true_state.hypothesis = Hypothesis::MuA;
    else if (*v == "b") s.true_state.hypothesis = Hypothesis::MuB;
    else throw ConfigError("true-state", "expected a|b");
  }
  if (auto v = get("t")) s.T = detail::parse_int<int>("t", *v);
  if (auto v = get("runs")) s.M = detail::parse_int<std::int64_t>("runs", *v);
  if (auto v = get("seed")) s.master_seed = detail::parse_int<std::uint64_t>("seed", *v);
  if (auto v = get("metric")) {
    if (*v == "positional") s.metric = Metric::Positional;
    else if (*v == "cumulative") s.metric = Metric::Cumulative;
    else if (*v == "both") s.metric = Metric::Both;
    else throw ConfigError("metric", "expected positional|cumulative|both");
  }
  if (auto v = get("out")) cfg.out_dir = *v;
  if (auto v = get("format")) {
    if (*v == "csv") cfg.format = OutputFormat::Csv;
    else if (*v == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("format", "expected csv|json");
  }
  if (auto v = get("p-bias-values")) cfg.p_bias_values = detail::parse_list("p-bias-values", *v);
  if (auto v = get("p-trust-values"))
    cfg.p_trust_values = detail::parse_list("p-trust-values", *v);
  if (auto v = get("workers")) cfg.workers = detail::parse_int<unsigned>("workers", *v);

  s.validate();
  for (double x : cfg.p_bias_values)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("p-bias-values", "values must lie in [0,1]");
  for (double x : cfg.p_trust_values)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("p-trust-values", "values must lie in [0,1]");
  return cfg;
}

}  // namespace herdsim
