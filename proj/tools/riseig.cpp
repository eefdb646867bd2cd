// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo driver for the RIS-aided downlink eigenvalue and sum-rate
// experiments. Runs a named preset or a config file and writes CSV datasets
// plus a JSON sidecar with the resolved configuration.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riseig/experiment.hpp"
#include "riseig/scenario.hpp"
#include "riseig/version.hpp"

namespace {

int total_failures(const riseig::EigenvalueExperimentResult& result) {
  int count = 0;
  for (const auto& cell : result.cells) count += static_cast<int>(cell.failures.size());
  return count;
}

int total_failures(const riseig::SnrSweepResult& result) {
  return static_cast<int>(result.failures.size());
}

int total_failures(const riseig::ElementSweepResult& result) {
  int count = 0;
  for (const auto& cell : result.cells) count += static_cast<int>(cell.failures.size());
  return count;
}

template <typename Result>
void report(const Result& result, const std::vector<std::string>& files, double seconds) {
  for (const auto& file : files) std::cout << "wrote " << file << "\n";
  const int failures = total_failures(result);
  if (failures > 0) {
    std::cout << failures << " trial(s) failed and were excluded (see metadata)\n";
  }
  std::cout << "done in " << seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided MIMO downlink eigenvalue and sum-rate simulator"};
  app.set_version_flag("--version", std::string("riseig ") + riseig::kVersion);

  std::string preset_name;
  std::string config_path;
  bool list_presets = false;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = -1;
  std::string out_dir;

  app.add_option("preset", preset_name, "Preset name (see --list-presets)");
  app.add_option("--config", config_path, "Config file (TOML-style key/value text)")
      ->check(CLI::ExistingFile);
  app.add_flag("--list-presets", list_presets, "List preset names and exit");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* trials_opt = app.add_option("--trials", trials, "Trial count")
                         ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const auto& name : riseig::preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (preset_name.empty() == config_path.empty()) {
      std::cerr << "error: pass exactly one of <preset> or --config FILE\n";
      return 1;
    }

    riseig::ScenarioConfig config = preset_name.empty()
                                        ? riseig::load_config_file(config_path)
                                        : riseig::preset(preset_name);
    if (seed_opt->count() > 0) config.seed = seed;
    if (trials_opt->count() > 0) config.n_trials = trials;
    if (threads >= 0) config.n_threads = threads;
    if (!out_dir.empty()) config.output_dir = out_dir;
    config.validate();

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&]() {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    switch (config.experiment) {
      case riseig::ExperimentKind::Eigenvalue: {
        const auto result = riseig::run_eigenvalue_experiment(config);
        report(result, riseig::write_outputs(result, config.output_dir), elapsed());
        break;
      }
      case riseig::ExperimentKind::SnrSweep: {
        const auto result = riseig::run_snr_sweep(config);
        report(result, riseig::write_outputs(result, config.output_dir), elapsed());
        break;
      }
      case riseig::ExperimentKind::ElementSweep: {
        const auto result = riseig::run_element_sweep(config);
        report(result, riseig::write_outputs(result, config.output_dir), elapsed());
        break;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
