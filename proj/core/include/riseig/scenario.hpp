// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riseig/types.hpp"

namespace riseig {

enum class ExperimentKind { Eigenvalue, SnrSweep, ElementSweep };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct LinkPathLoss {
  PathLossParams direct{30.0, 3.76};
  PathLossParams reflect{30.0, 3.76};
  PathLossParams bs_ris{30.0, 2.2};
};

struct LinkFading {
  FadingSpec direct{FadingKind::Rayleigh};
  FadingSpec reflect{FadingKind::Rayleigh};
  FadingSpec bs_ris{FadingKind::Rayleigh};
};

/// Full description of one Monte-Carlo experiment: geometry, per-link path
/// loss and fading, power/element/rank grids, trial count and seed.
///
/// Units: path-loss intercepts in dB, powers in dBm, positions in meters.
/// User positions are drawn per trial, area-uniform in the configured disk.
struct ScenarioConfig {
  ExperimentKind experiment = ExperimentKind::Eigenvalue;
  std::string name = "custom";

  SystemDimensions dimensions{16, 1, 6, {256}};

  Point2 bs_position{0.0, 0.0};
  std::vector<Point2> ris_positions{{200.0, 0.0}};
  Point2 user_disk_center{200.0, 30.0};
  double user_disk_radius = 10.0;

  LinkPathLoss pathloss;
  LinkFading fading;

  /// Extra penalty applied to the direct channel of the listed users
  /// (0-based indices).
  double extra_loss_db = 0.0;
  std::vector<int> extra_loss_users;

  double noise_dbm = -100.0;
  int n_trials = 1000;
  std::uint64_t seed = 1;

  std::vector<double> power_grid_dbm;      // SNR sweep x-axis
  double element_sweep_power_dbm = 40.0;   // element sweep operating point
  std::vector<int> ris_element_grid;       // element sweep x-axis
  std::vector<int> rank_grid;              // eigenvalue experiment feeder ranks

  std::string output_dir = "out";
  int n_threads = 0;  // 0 = hardware concurrency

  void validate() const;  // throws DomainError
};

/// Named presets fig1a..fig1d, fig3a, fig3b, fig4a, fig4b. Trials default to
/// 100 in presets; pass --trials 1000 for full-scale runs.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Loads a config from TOML-style key/value text. See the README for the
/// schema.
ScenarioConfig load_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace riseig
