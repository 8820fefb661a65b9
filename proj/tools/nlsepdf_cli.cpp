// Batch front-end: run, sweep, demo-qpsk, validate-config.

#include <CLI11.hpp>
#include <omp.h>

#include <fstream>
#include <iostream>
#include <optional>

#include "nlsepdf/runner.hpp"

using namespace nlsepdf;

namespace {

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GuardViolation("config.file", "cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw GuardViolation("config.parse", e.what());
  }
  return config_from_json(j);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw GuardViolation("cli.output", "cannot write " + output);
  out << text;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw GuardViolation("sweep.values", "cannot parse '" + item + "'");
    }
  }
  if (v.empty()) throw GuardViolation("sweep.values", "no values given");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional PDF of the noisy NLSE channel"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string output;
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
  app.add_option("-o,--output", output, "Write the result here instead of stdout");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Execute one experiment, print a JSON document");
  run_cmd->add_option("config", config_path, "Config file")->required();

  std::string axis, values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per axis value, print CSV");
  sweep_cmd->add_option("config", config_path, "Config file")->required();
  sweep_cmd->add_option("--axis", axis, "Numeric config field")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();

  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config against all guards");
  validate_cmd->add_option("config", config_path, "Config file")->required();

  ConstellationSpec spec;
  int M = 96, n_z = 16;
  long runs = 100000;
  double gamma_tilde = 0.05, epsilon = 0.01, beta2 = 0.002, L = 1.0;
  std::vector<double> phases;
  auto* demo_cmd = app.add_subcommand("demo-qpsk", "QPSK per-symbol statistics vs prediction");
  demo_cmd->add_option("--n-side", spec.n_side, "Symbols on each side of the center")
      ->capture_default_str();
  demo_cmd->add_option("--T", spec.T, "Symbol period")->capture_default_str();
  demo_cmd->add_option("--tau", spec.tau, "Pulse width")->capture_default_str();
  demo_cmd->add_option("--M", M, "Frequency modes")->capture_default_str();
  demo_cmd->add_option("--Nz", n_z, "z steps")->capture_default_str();
  demo_cmd->add_option("--runs", runs, "Forward runs")->capture_default_str();
  demo_cmd->add_option("--gamma-tilde", gamma_tilde, "gamma P_ave L")->capture_default_str();
  demo_cmd->add_option("--epsilon", epsilon, "Inverse SNR")->capture_default_str();
  demo_cmd->add_option("--beta2", beta2, "Dispersion")->capture_default_str();
  demo_cmd->add_option("--L", L, "Distance")->capture_default_str();
  demo_cmd->add_option("--phases", phases, "Symbol phases (default all 0)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);

    if (*demo_cmd) {
      RunConfig cfg;
      cfg.grid = constellation_grid(spec, M, n_z, L);
      cfg.channel = constellation_params(spec, cfg.grid, gamma_tilde, epsilon, beta2);
      cfg.method = RunMethod::Demo;
      ConstellationInput ci;
      ci.spec = spec;
      ci.phases = phases.empty() ? std::vector<double>(spec.count(), 0.0) : phases;
      ci.perturbation = {std::vector<double>(spec.count(), 0.0),
                         std::vector<double>(spec.count(), 0.0)};
      cfg.constellation = ci;
      cfg.samples = runs;
      if (seed) cfg.seed = *seed;
      emit(run(cfg).dump(2) + "\n", output);
      return 0;
    }

    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (*validate_cmd) {
      validate(cfg);
      emit("ok\n", output);
    } else if (*run_cmd) {
      emit(run(cfg).dump(2) + "\n", output);
    } else if (*sweep_cmd) {
      emit(sweep(cfg, axis, parse_values(values)), output);
    }
  } catch (const GuardViolation& e) {
    std::cerr << "guard violated: " << e.guard() << "\n" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
