// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "riseig/scenario.hpp"
#include "riseig/types.hpp"

namespace riseig {

/// Phase-selection methods of the eigenvalue experiment.
enum class EigMethod { GeoMean, HarMean, Random, Off };

/// Curves of the rate experiments: finite-power rates for the three phase
/// choices under both transmission schemes, plus the high-SNR approximation
/// lines (geometric and harmonic offsets for the off / random / geo-optimized
/// channels, and the harmonic offset of the har-optimized channel).
enum class RateMethod {
  DpcOpt,
  ZfOpt,
  DpcRandom,
  ZfRandom,
  DpcOff,
  ZfOff,
  ApproxGeoOpt,
  ApproxHarOpt,
  ApproxGeoRandom,
  ApproxHarRandom,
  ApproxGeoOff,
  ApproxHarOff,
  ApproxHarHarOpt,
};

std::string to_string(EigMethod method);
std::string to_string(RateMethod method);
const std::vector<EigMethod>& eig_methods();
const std::vector<RateMethod>& rate_methods();

/// Per-trial result for one method.
struct TrialRecord {
  int trial_index = 0;
  std::string method;
  RVector eigenvalues;        // eigenvalue experiment: descending spectrum
  std::vector<double> rates;  // rate experiments: one entry per grid point
  int optimizer_sweeps = 0;
};

struct TrialFailure {
  int trial_index = 0;
  std::string message;
};

struct EigenvalueCell {
  int rank = 0;
  std::vector<TrialRecord> records;
  std::vector<TrialFailure> failures;
};

struct EigenvalueExperimentResult {
  ScenarioConfig config;
  std::vector<EigenvalueCell> cells;
};

struct SnrSweepResult {
  ScenarioConfig config;
  std::vector<TrialRecord> records;
  std::vector<TrialFailure> failures;
};

struct ElementSweepCell {
  int n_ris = 0;
  std::vector<TrialRecord> records;
  std::vector<TrialFailure> failures;
};

struct ElementSweepResult {
  ScenarioConfig config;
  std::vector<ElementSweepCell> cells;
};

/// Mean eigenvalue per index over all trials, for the feeder ranks of
/// config.rank_grid and all four methods. Requires KroneckerRank feeder
/// fading. Failed trials are excluded and counted.
EigenvalueExperimentResult run_eigenvalue_experiment(const ScenarioConfig& config);

/// Mean sum rate per power point for all methods of rate_methods() except
/// ApproxHarHarOpt.
SnrSweepResult run_snr_sweep(const ScenarioConfig& config);

/// Mean sum rate per RIS element count at the configured power for all
/// methods of rate_methods(). Requires a single reflecting surface.
ElementSweepResult run_element_sweep(const ScenarioConfig& config);

// --- aggregation -----------------------------------------------------------

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

RVector mean_eigenvalues(const EigenvalueCell& cell, EigMethod method);
MeanStderr rate_statistics(const std::vector<TrialRecord>& records,
                           RateMethod method, int x_index);
std::vector<double> per_trial_rates(const std::vector<TrialRecord>& records,
                                    RateMethod method, int x_index);
double median(std::vector<double> values);

// --- output ----------------------------------------------------------------

/// Writes the CSV dataset plus a JSON sidecar with the resolved config and
/// failure log into `dir`; returns the paths written. Output is
/// byte-deterministic for a fixed (config, seed) regardless of thread count.
std::vector<std::string> write_outputs(const EigenvalueExperimentResult& result,
                                       const std::string& dir);
std::vector<std::string> write_outputs(const SnrSweepResult& result,
                                       const std::string& dir);
std::vector<std::string> write_outputs(const ElementSweepResult& result,
                                       const std::string& dir);

}  // namespace riseig
