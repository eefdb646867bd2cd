// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/types.hpp"

namespace riseig {

struct PowerPoint {
  double power_watts;
  double noise_variance_watts;

  void validate() const;  // both must be > 0
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct DpcSolve {
  double rate_bpcu = 0.0;
  int iterations = 0;
  bool converged = false;
  RVector user_powers;
  std::vector<double> objective_history;  // nondecreasing
};

/// Sum capacity of the broadcast channel with single-antenna users (rows of
/// h_eff), via the dual multiple-access problem
///   max_{p >= 0, sum p <= P} log2 det(I + (1/sigma^2) sum_k p_k h_k h_k^H),
/// solved by sum-power iterative waterfilling with (K-1)/K damping. All
/// linear algebra runs in the r-dimensional Gram domain.
DpcSolve solve_dpc_sum_capacity(const CMatrix& h_eff, const PowerPoint& pp,
                                double tol = 1e-10, int max_iter = 5000);

/// Convenience wrapper; throws ConvergenceError (carrying the last value)
/// when the iteration budget is exhausted.
double dpc_sum_capacity(const CMatrix& h_eff, const PowerPoint& pp,
                        double tol = 1e-10, int max_iter = 5000);

/// Zero-forcing sum rate with per-stream waterfilling: unit-norm
/// pseudo-inverse columns give effective gains g_k = 1 / [(H H^H)^-1]_kk and
/// the rate is sum_k log2(1 + p_k g_k / sigma^2) with waterfilled powers.
double zf_sum_rate(const CMatrix& h_eff, const PowerPoint& pp);

/// dpc_sum_capacity at theta_geo minus zf_sum_rate at theta_har.
double rate_gap(const ChannelSet& channels, const PhaseConfig& theta_geo,
                const PhaseConfig& theta_har, const PowerPoint& pp);

}  // namespace riseig
