#pragma once

// The four CLI subcommands. Each returns a process exit code and reports on
// the given stream; none of them parse arguments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "herdsim/chain.hpp"
#include "herdsim/config.hpp"
#include "herdsim/oracle.hpp"
#include "herdsim/output.hpp"
#include "herdsim/presets.hpp"

namespace herdsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumeric = 4,
  kExitVerify = 5,
};

namespace detail {

inline void write_table(const std::filesystem::path& dir, const std::string& name,
                        const Table& table, OutputFormat format, const RunManifest& manifest) {
  if (format == OutputFormat::Csv) write_text(dir / (name + ".csv"), to_csv(table));
  else write_text(dir / (name + ".json"), to_json(table).dump(2) + "\n");
  write_text(dir / (name + ".manifest.json"), manifest_to_json(manifest).dump(2) + "\n");
}

inline std::string summary_line(const EnsembleStats& stats, Metric metric) {
  const auto last = static_cast<std::size_t>(stats.T - 1);
  char buf[160];
  std::string out;
  if (metric != Metric::Cumulative) {
    std::snprintf(buf, sizeof buf, "t=%d positional accuracy %.5f +/- %.5f", stats.T,
                  stats.positional_correct[last], stats.positional_stderr[last]);
    out += buf;
  }
  if (metric != Metric::Positional) {
    std::snprintf(buf, sizeof buf, "%st=%d cumulative accuracy %.5f", out.empty() ? "" : "; ",
                  stats.T, stats.cumulative_correct[last]);
    out += buf;
  }
  return out + " (M=" + std::to_string(stats.M) + ")";
}

// Maps the library's exception types onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericFault& e) {
    err << "numeric fault: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const EnsembleStats stats = run_ensemble(cfg.scenario, cfg.workers);
    detail::write_table(cfg.out_dir, "simulate", stats_table(stats), cfg.format,
                        make_manifest(cfg.scenario));
    out << detail::summary_line(stats, cfg.scenario.metric) << "\n";
    return int{kExitOk};
  });
}

inline Table sweep_table(const std::vector<SweepCell>& cells) {
  Table table;
  table.header = {"p_bias", "p_trust"};
  for (const auto& c : stats_columns()) table.header.push_back(c);
  for (const auto& cell : cells) append_stats(table, cell.stats, {cell.p_bias, cell.p_trust});
  return table;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto cells = sweep(cfg.scenario, cfg.p_bias_values, cfg.p_trust_values, cfg.workers);
    Scenario echoed = cfg.scenario;
    echoed.principal.enabled = true;
    const nlohmann::json details{{"command", "sweep"},
                                 {"p_bias_values", cfg.p_bias_values},
                                 {"p_trust_values", cfg.p_trust_values}};
    detail::write_table(cfg.out_dir, "sweep", sweep_table(cells), cfg.format,
                        make_manifest(echoed, details));
    for (const auto& cell : cells) {
      char key[64];
      std::snprintf(key, sizeof key, "p_bias=%g p_trust=%g: ", cell.p_bias, cell.p_trust);
      out << key << detail::summary_line(cell.stats, cfg.scenario.metric) << "\n";
    }
    return int{kExitOk};
  });
}

/// Runs every curve of a preset. `t_override` replaces the preset's horizon.
inline int cmd_replicate(const std::string& preset_name, const RunConfig& cfg,
                         std::optional<int> t_override, std::ostream& out, std::ostream& err) {
  auto preset = find_preset(preset_name, cfg.scenario);
  if (!preset) {
    err << "config error: unknown preset '" << preset_name << "' (known:";
    for (const auto& n : preset_names()) err << " " << n;
    err << ")\n";
    return kExitConfig;
  }
  if (t_override) preset->base.T = *t_override;

  return detail::guarded(err, [&] {
    Table combined;
    combined.header = {"curve", "p_bias", "p_trust"};
    for (const auto& c : stats_columns()) combined.header.push_back(c);
    nlohmann::json curves = nlohmann::json::array();

    for (const Curve& curve : preset->curves) {
      const Scenario s = curve_scenario(*preset, curve);
      const EnsembleStats stats = run_ensemble(s, cfg.workers);
      const std::string name = preset->name + "_" + curve.label;
      detail::write_table(cfg.out_dir, name, stats_table(stats), cfg.format,
                          make_manifest(s, {{"command", "replicate"},
                                            {"preset", preset->name},
                                            {"curve", curve.label}}));
      const Cell pb = curve.p_bias ? Cell{*curve.p_bias} : Cell{};
      const Cell pt = curve.p_trust ? Cell{*curve.p_trust} : Cell{};
      append_stats(combined, stats, {curve.label, pb, pt});
      curves.push_back(curve.label);
      out << name << (curve.label == preset->narrated ? " [narrated]" : "") << ": "
          << detail::summary_line(stats, Metric::Both) << "\n";
    }
    detail::write_table(cfg.out_dir, preset->name, combined, cfg.format,
                        make_manifest(preset->base, {{"command", "replicate"},
                                                     {"preset", preset->name},
                                                     {"curves", curves},
                                                     {"narrated", preset->narrated}}));
    return int{kExitOk};
  });
}

struct VerifyOptions {
  ModelParams params;
  int enum_t = 10;
  std::int64_t runs = 200000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  double cdf_fault = 0.0;  // test hook: log-space offset applied inside the martingale check
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> checks;
  char buf[256];
  const ModelParams& params = opt.params;
  params.validate();

  for (double r : {-3.0, -1.0, 0.5, 2.0, 4.0}) {
    const double res = martingale_residual(params, r, opt.cdf_fault);
    std::snprintf(buf, sizeof buf, "residual %.3e <= 1e-12", res);
    checks.push_back({"martingale r=" + format_double(r), res <= 1e-12, buf});
  }
  for (double r : {-6.0, 6.0}) {
    const double res = martingale_residual(params, r, opt.cdf_fault);
    std::snprintf(buf, sizeof buf, "residual %.3e <= 1e-10", res);
    checks.push_back({"martingale tail r=" + format_double(r), res <= 1e-10, buf});
  }

  const double mid = 0.5 * (params.mu_a + params.mu_b);
  const double anti = std::abs(decision_log_likelihood_ratio(params, mid, Decision::A) +
                               decision_log_likelihood_ratio(params, mid, Decision::B));
  std::snprintf(buf, sizeof buf, "|LLR(A)+LLR(B)| = %.3e <= 1e-12", anti);
  checks.push_back({"midpoint antisymmetry", anti <= 1e-12, buf});

  for (double sp : {0.5, 1.0, 2.0}) {
    ModelParams p = params;
    p.sigma_p = sp;
    for (Hypothesis h : {Hypothesis::MuA, Hypothesis::MuB}) {
      const double tol = h == Hypothesis::MuA ? 1e-8 : 1e-7;
      const double target = principal_ratio_mean_closed_form(p, h);
      std::string name = std::string("principal ratio mean ") +
                         (h == Hypothesis::MuA ? "MuA" : "MuB") + " sigma_p=" + format_double(sp);
      try {
        const QuadratureResult q = principal_ratio_mean(p, h);
        const double dev = std::abs(q.value - target);
        std::snprintf(buf, sizeof buf, "quadrature %.12g vs %.12g, |diff| %.3e <= %.0e", q.value,
                      target, dev, tol);
        checks.push_back({name, dev <= tol, buf});
      } catch (const QuadratureError& e) {
        checks.push_back({name, false, e.what()});
      }
    }
  }

  const EnumerationResult en = enumerate_no_principal(params, opt.enum_t);
  double worst_mass = 0.0;
  for (double m : en.depth_mass) worst_mass = std::max(worst_mass, std::abs(m - 1.0));
  std::snprintf(buf, sizeof buf, "max |mass-1| %.3e <= 1e-10 over %llu paths", worst_mass,
                static_cast<unsigned long long>(en.path_count));
  checks.push_back({"enumeration probability conservation", worst_mass <= 1e-10, buf});

  bool rising = true;
  for (std::size_t i = 1; i < en.exact_positional.size(); ++i)
    rising = rising && en.exact_positional[i] >= en.exact_positional[i - 1];
  std::snprintf(buf, sizeof buf, "P1=%.7f -> P%d=%.7f", en.exact_positional.front(), opt.enum_t,
                en.exact_positional.back());
  checks.push_back({"enumeration accuracy non-decreasing", rising, buf});

  const McComparison cmp = mc_vs_enumeration(params, opt.enum_t, opt.runs, opt.seed, opt.workers);
  std::snprintf(buf, sizeof buf, "max deviation %.5f <= %.5f%s", cmp.max_deviation, cmp.bound,
                cmp.underpowered ? " (underpowered: M too small to be informative)" : "");
  checks.push_back({"monte carlo vs enumeration T=" + std::to_string(opt.enum_t) +
                        " M=" + std::to_string(opt.runs),
                    cmp.within_bound(), buf});
  return checks;
}

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    bool all = true;
    for (const CheckResult& c : run_verify_suite(opt)) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      all = all && c.passed;
    }
    out << (all ? "all checks passed" : "verification FAILED") << "\n";
    return all ? int{kExitOk} : int{kExitVerify};
  });
}

}  // namespace herdsim
