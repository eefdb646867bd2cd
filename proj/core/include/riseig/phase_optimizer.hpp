// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/rng.hpp"
#include "riseig/types.hpp"

namespace riseig {

enum class PhaseInit { RandomUniform, Given };

struct OptimizerConfig {
  int max_sweeps = 100;
  double rel_tolerance = 1e-9;
  /// Diagonal loading applied when a factorization fails; 0 selects the
  /// automatic scale 1e-12 * tr(H H^H) / r.
  double regularization = 0.0;
  PhaseInit init = PhaseInit::RandomUniform;
  CVector initial_phases;  // used when init == Given
  bool randomized_order = false;
};

struct OptimizerTrace {
  /// Exact objective after each sweep; the first entry is the value at the
  /// initial phases. Nondecreasing for the log-det objective, nonincreasing
  /// for the trace-inverse objective.
  std::vector<double> objective_per_sweep;
  int sweeps_run = 0;
  bool converged = false;
  CVector final_theta;
  int regularization_events = 0;
};

struct OptimizeResult {
  CVector theta;  // concatenated over surfaces, unimodular
  OptimizerTrace trace;
};

/// Unimodular vector with i.i.d. uniform phases on [0, 2pi).
CVector random_phases(Rng& rng, int n);

/// Maximizes log2 det(H(theta) H(theta)^H) over unimodular theta by
/// element-wise coordinate ascent. Writing H = A_n + theta_n b_n c_n^H, the
/// determinant is det(M_n) * (|1 + theta_n beta_n|^2 - gamma_n delta_n) with
/// beta_n = d_n^H M_n^-1 b_n, so each element has the closed-form maximizer
/// theta_n = exp(-j arg beta_n). Every update is exact and monotone.
OptimizeResult optimize_geo_mean(const ChannelSet& channels,
                                 const OptimizerConfig& config, Rng& rng);

/// Minimizes tr((H(theta) H(theta)^H)^-1) over unimodular theta. The scalar
/// objective of each element on the unit circle is evaluated through the
/// rank-2 Woodbury identity and minimized by a coarse scan plus
/// golden-section refinement to 1e-8 radians; only improving moves are
/// accepted.
OptimizeResult optimize_har_mean(const ChannelSet& channels,
                                 const OptimizerConfig& config, Rng& rng);

/// Splits a concatenated phase vector back into one unimodular vector per
/// surface of `channels`.
PhaseConfig to_phase_config(const ChannelSet& channels, const CVector& theta);

}  // namespace riseig
