// herdsim: command-line front end for the herd-behavior chain simulator.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "herdsim/commands.hpp"
#include "herdsim/config.hpp"
#include "herdsim/version.hpp"

namespace {

using herdsim::ConfigMap;

const std::map<std::string, std::string> kHelp{
    {"mu-a", "mean of the signal under A (default 1)"},
    {"mu-b", "mean of the signal under B, must be < mu-a (default 0)"},
    {"sigma", "objective signal std dev (default 1)"},
    {"sigma-p", "principal signal std dev (default 1)"},
    {"k", "relative benefit of choosing B (default 1)"},
    {"prior-a", "prior probability of A (default 0.5)"},
    {"p-bias", "probability the principal signals the true state (default 0.5)"},
    {"p-trust", "probability a decision-maker uses the principal (default 1)"},
    {"principal", "on|off (default off)"},
    {"bias-mode", "per-dm|per-chain (default per-dm)"},
    {"true-state", "a|b (default a)"},
    {"t", "chain length (default 100)"},
    {"runs", "Monte Carlo runs (default 10000)"},
    {"seed", "master seed (default 42)"},
    {"metric", "positional|cumulative|both, for the summary line"},
    {"out", "output directory (default .)"},
    {"format", "csv|json (default csv)"},
    {"p-bias-values", "comma-separated sweep grid for p-bias"},
    {"p-trust-values", "comma-separated sweep grid for p-trust"},
    {"workers", "worker threads, 0 = hardware concurrency"},
};

// Registers every config key as a `--key` string option on `cmd`.
void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& values,
                      std::string& config_path) {
  for (const auto& key : herdsim::config_keys())
    cmd->add_option("--" + key, values[key], kHelp.at(key));
  cmd->add_option("--config", config_path, "key=value configuration file");
}

ConfigMap given_flags(CLI::App* cmd, const std::map<std::string, std::string>& values) {
  ConfigMap flags;
  for (const auto& [key, value] : values)
    if (cmd->count("--" + key) > 0) flags[key] = value;
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential decision chains with herd behavior and an unreliable principal"};
  app.set_version_flag("--version", herdsim::kVersion);
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::string config_path;

  auto* simulate = app.add_subcommand("simulate", "Run one Monte Carlo ensemble");
  auto* sweep = app.add_subcommand("sweep", "Run a p-bias x p-trust grid");
  auto* replicate = app.add_subcommand("replicate", "Run a figure preset");
  auto* verify = app.add_subcommand("verify", "Check the model against independent oracles");

  for (auto* cmd : {simulate, sweep, replicate}) add_config_flags(cmd, values, config_path);

  std::string preset;
  replicate->add_option("preset", preset, "fig1|fig2|fig3|fig4|long-horizon")->required();

  herdsim::VerifyOptions vopt;
  std::map<std::string, std::string> vvalues;
  for (const char* key : {"mu-a", "mu-b", "sigma", "sigma-p", "k", "prior-a"})
    verify->add_option(std::string("--") + key, vvalues[key], kHelp.at(key));
  verify->add_option("--enum-t", vopt.enum_t, "enumeration depth (<= 20)");
  verify->add_option("--runs", vopt.runs, "Monte Carlo runs for the enumeration comparison");
  verify->add_option("--seed", vopt.seed);
  verify->add_option("--workers", vopt.workers);
  verify->add_option("--inject-cdf-fault", vopt.cdf_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : herdsim::kExitConfig;
  }

  CLI::App* active = app.get_subcommands().front();

  if (active == verify) {
    try {
      const auto cfg = herdsim::resolve_config({}, given_flags(verify, vvalues));
      vopt.params = cfg.scenario.params;
    } catch (const herdsim::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return herdsim::kExitConfig;
    }
    return herdsim::cmd_verify(vopt, std::cout, std::cerr);
  }

  herdsim::RunConfig cfg;
  const ConfigMap flags = given_flags(active, values);
  try {
    const ConfigMap file =
        config_path.empty() ? ConfigMap{} : herdsim::read_config_file(config_path);
    cfg = herdsim::resolve_config(file, flags);
  } catch (const herdsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return herdsim::kExitConfig;
  }

  if (active == simulate) return herdsim::cmd_simulate(cfg, std::cout, std::cerr);
  if (active == sweep) return herdsim::cmd_sweep(cfg, std::cout, std::cerr);

  std::optional<int> t_override;
  if (flags.count("t")) t_override = cfg.scenario.T;
  return herdsim::cmd_replicate(preset, cfg, t_override, std::cout, std::cerr);
}
