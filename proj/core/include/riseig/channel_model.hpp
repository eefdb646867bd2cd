// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/rng.hpp"
#include "riseig/scenario.hpp"
#include "riseig/types.hpp"

namespace riseig {

/// Linear power gain of the log-distance model
/// L_dB = alpha_db + beta * 10 * log10(d), i.e. 10^(-L_dB / 10).
/// Throws DomainError for distance <= 0.
double path_loss_linear(const PathLossParams& params, double distance_m);

/// Half-wavelength ULA steering vector: entry k = exp(j pi k sin(angle)).
CVector steering_vector(int n, double angle_rad);

/// i.i.d. CN(0, gain) entries; E ||H||_F^2 = rows * cols * gain.
CMatrix gen_rayleigh(Rng& rng, int rows, int cols, double gain);

/// Rician fading with factor kappa = 10^(kappa_db/10):
///   sqrt(gain) * ( sqrt(kappa/(1+kappa)) a_rx(aoa) a_tx(aod)^H
///                + sqrt(1/(1+kappa)) W ),  W i.i.d. CN(0,1).
/// The power split keeps E ||H||_F^2 = rows * cols * gain for every kappa.
CMatrix gen_rician(Rng& rng, int rows, int cols, double gain, double kappa_db,
                   double aoa_rad, double aod_rad);

/// Kronecker-structured channel with exact rank and rank-independent total
/// gain: sqrt(gain) * sqrt(n_bs / rank) * M * blockdiag(I_rank, 0) * S^H with
/// M i.i.d. CN(0,1) and S a random unitary (QR of an i.i.d. Gaussian matrix).
/// Throws DomainError unless 1 <= rank <= min(n_ris, n_bs).
CMatrix gen_kronecker_rank(Rng& rng, int n_ris, int n_bs, int rank, double gain);

/// Effective downlink channel. Off returns h_direct; an active config returns
///   h_direct + sum_n h_reflect[n] * diag(theta_n) * h_bs_ris[n].
/// Throws DomainError on dimension mismatch or non-unimodular phases.
CMatrix compose_effective(const ChannelSet& channels, const PhaseConfig& phases);

namespace detail {
/// Composition without the unimodularity check: the map theta -> H is affine
/// in every single entry, and this linear extension is what gets exercised by
/// the optimizer internals and the property tests.
CMatrix compose_linear(const ChannelSet& channels, const std::vector<CVector>& phases);

/// Reflect matrices concatenated horizontally and feeder matrices stacked
/// vertically; with a concatenated phase vector this is equivalent to the
/// per-surface sum.
void concatenate_surfaces(const ChannelSet& channels, CMatrix& h_reflect_cat,
                          CMatrix& h_bs_ris_cat);
}  // namespace detail

/// Draws one realization of the configured scenario: area-uniform user
/// positions in the disk, per-link path loss, the optional extra direct-link
/// penalty, and per-link fading. If `realized` is non-null the sampled
/// geometry is written there.
ChannelSet build_scenario_channels(Rng& rng, const ScenarioConfig& config,
                                   Geometry* realized = nullptr);

}  // namespace riseig
