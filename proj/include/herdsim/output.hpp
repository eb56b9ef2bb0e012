#pragma once

// Result tables (CSV / JSON) and run manifests.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "herdsim/chain.hpp"
#include "herdsim/version.hpp"

namespace herdsim {

inline constexpr const char* kManifestSchemaVersion = "1";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

inline const std::vector<std::string>& stats_columns() {
  static const std::vector<std::string> cols{"t", "positional_correct", "positional_stderr",
                                             "cumulative_correct"};
  return cols;
}

// Appends one row per position; `keys` are prepended to every row.
inline void append_stats(Table& table, const EnsembleStats& stats, const std::vector<Cell>& keys) {
  for (int i = 0; i < stats.T; ++i) {
    const auto u = static_cast<std::size_t>(i);
    std::vector<Cell> row = keys;
    row.emplace_back(std::int64_t{i + 1});
    row.emplace_back(stats.positional_correct[u]);
    row.emplace_back(stats.positional_stderr[u]);
    row.emplace_back(stats.cumulative_correct[u]);
    table.rows.push_back(std::move(row));
  }
}

inline Table stats_table(const EnsembleStats& stats) {
  Table t{stats_columns(), {}};
  append_stats(t, stats, {});
  return t;
}

// 17 significant digits round-trip any double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table& table) {
  std::string out;
  auto put_cell = [&](const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) out += std::to_string(*i);
    else if (const auto* d = std::get_if<double>(&c)) out += format_double(*d);
    else if (const auto* s = std::get_if<std::string>(&c)) out += *s;
  };
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      put_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& key = table.header[i];
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) obj[key] = nullptr;
            else obj[key] = v;
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return {{"columns", table.header}, {"rows", std::move(rows)}};
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  return {
      {"mu_a", s.params.mu_a},
      {"mu_b", s.params.mu_b},
      {"sigma", s.params.sigma},
      {"sigma_p", s.params.sigma_p},
      {"prior_a", s.params.prior_a},
      {"prior_b", s.params.prior_b},
      {"k", s.params.k},
      {"principal", s.principal.enabled},
      {"p_bias", s.principal.p_bias},
      {"p_trust", s.principal.p_trust},
      {"bias_mode", to_string(s.principal.bias_mode)},
      {"true_state", to_string(s.true_state.hypothesis)},
      {"T", s.T},
      {"M", s.M},
      {"master_seed", s.master_seed},
      {"metric", to_string(s.metric)},
  };
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.params.mu_a = j.at("mu_a").get<double>();
    s.params.mu_b = j.at("mu_b").get<double>();
    s.params.sigma = j.at("sigma").get<double>();
    s.params.sigma_p = j.at("sigma_p").get<double>();
    s.params.prior_a = j.at("prior_a").get<double>();
    s.params.prior_b = j.at("prior_b").get<double>();
    s.params.k = j.at("k").get<double>();
    s.principal.enabled = j.at("principal").get<bool>();
    s.principal.p_bias = j.at("p_bias").get<double>();
    s.principal.p_trust = j.at("p_trust").get<double>();
    const auto mode = j.at("bias_mode").get<std::string>();
    if (mode == "per-dm") s.principal.bias_mode = BiasMode::PerDecisionMaker;
    else if (mode == "per-chain") s.principal.bias_mode = BiasMode::PerChain;
    else throw ConfigError("bias_mode", "unknown bias mode '" + mode + "'");
    const auto state = j.at("true_state").get<std::string>();
    if (state == "a") s.true_state.hypothesis = Hypothesis::MuA;
    else if (state == "b") s.true_state.hypothesis = Hypothesis::MuB;
    else throw ConfigError("true_state", "unknown true state '" + state + "'");
    s.T = j.at("T").get<int>();
    s.M = j.at("M").get<std::int64_t>();
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    const auto metric = j.at("metric").get<std::string>();
    if (metric == "positional") s.metric = Metric::Positional;
    else if (metric == "cumulative") s.metric = Metric::Cumulative;
    else if (metric == "both") s.metric = Metric::Both;
    else throw ConfigError("metric", "unknown metric '" + metric + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
  s.validate();
  return s;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string schema_version = kManifestSchemaVersion;
  std::string timestamp;
  std::uint64_t master_seed = 0;
  std::string rng_algorithm = kRngAlgorithm;
  Scenario scenario;
  std::string artifact_version = kVersion;
  nlohmann::json extra = nlohmann::json::object();  // command-specific details
};

inline RunManifest make_manifest(const Scenario& s, nlohmann::json extra = nlohmann::json::object()) {
  RunManifest m;
  m.timestamp = utc_timestamp();
  m.master_seed = s.master_seed;
  m.scenario = s;
  m.extra = std::move(extra);
  return m;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j{{"schema_version", m.schema_version},
                   {"timestamp", m.timestamp},
                   {"master_seed", m.master_seed},
                   {"rng_algorithm", m.rng_algorithm},
                   {"scenario", scenario_to_json(m.scenario)},
                   {"artifact_version", m.artifact_version}};
  if (!m.extra.empty()) j["details"] = m.extra;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.schema_version = j.at("schema_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    m.artifact_version = j.at("artifact_version").get<std::string>();
    if (j.contains("details")) m.extra = j.at("details");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
  if (m.schema_version != kManifestSchemaVersion)
    throw ConfigError("schema_version", "unsupported manifest schema " + m.schema_version);
  m.scenario = scenario_from_json(j.at("scenario"));
  return m;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace herdsim
