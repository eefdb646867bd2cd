// SPDX-License-Identifier: Apache-2.0
#include "riseig/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace riseig {

double path_loss_linear(const PathLossParams& params, double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("path_loss_linear: distance must be > 0");
  }
  const double loss_db = params.alpha_db + params.beta * 10.0 * std::log10(distance_m);
  return std::pow(10.0, -loss_db / 10.0);
}

CVector steering_vector(int n, double angle_rad) {
  if (n < 1) throw DomainError("steering_vector: n must be >= 1");
  CVector a(n);
  const double phase_step = std::numbers::pi * std::sin(angle_rad);
  for (int k = 0; k < n; ++k) {
    a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
  }
  return a;
}

CMatrix gen_rayleigh(Rng& rng, int rows, int cols, double gain) {
  if (gain < 0.0) throw DomainError("gen_rayleigh: gain must be >= 0");
  CMatrix h(rows, cols);
  const double amp = std::sqrt(gain);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      h(i, j) = amp * rng.complex_normal();
    }
  }
  return h;
}

CMatrix gen_rician(Rng& rng, int rows, int cols, double gain, double kappa_db,
                   double aoa_rad, double aod_rad) {
  if (gain < 0.0) throw DomainError("gen_rician: gain must be >= 0");
  const double kappa = std::pow(10.0, kappa_db / 10.0);
  const double los_amp = std::sqrt(kappa / (1.0 + kappa));
  const double nlos_amp = std::sqrt(1.0 / (1.0 + kappa));
  const CVector a_rx = steering_vector(rows, aoa_rad);
  const CVector a_tx = steering_vector(cols, aod_rad);

  CMatrix h(rows, cols);
  const double amp = std::sqrt(gain);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      h(i, j) = amp * (los_amp * a_rx(i) * std::conj(a_tx(j)) +
                       nlos_amp * rng.complex_normal());
    }
  }
  return h;
}

CMatrix gen_kronecker_rank(Rng& rng, int n_ris, int n_bs, int rank, double gain) {
  if (gain < 0.0) throw DomainError("gen_kronecker_rank: gain must be >= 0");
  if (rank < 1 || rank > std::min(n_ris, n_bs)) {
    throw DomainError("gen_kronecker_rank: rank must be in [1, min(n_ris, n_bs)]");
  }
  CMatrix m(n_ris, n_bs);
  for (int i = 0; i < n_ris; ++i) {
    for (int j = 0; j < n_bs; ++j) m(i, j) = rng.complex_normal();
  }
  CMatrix g(n_bs, n_bs);
  for (int i = 0; i < n_bs; ++i) {
    for (int j = 0; j < n_bs; ++j) g(i, j) = rng.complex_normal();
  }
  const CMatrix s = Eigen::HouseholderQR<CMatrix>(g).householderQ();

  // M * blockdiag(I_rank, 0) * S^H reduces to the first `rank` columns.
  const double scale = std::sqrt(gain) * std::sqrt(static_cast<double>(n_bs) / rank);
  return scale * m.leftCols(rank) * s.leftCols(rank).adjoint();
}

namespace detail {

CMatrix compose_linear(const ChannelSet& channels, const std::vector<CVector>& phases) {
  channels.validate();
  if (phases.size() != channels.h_reflect.size()) {
    throw DomainError("compose: phase vector count differs from surface count");
  }
  CMatrix h = channels.h_direct;
  for (std::size_t n = 0; n < phases.size(); ++n) {
    if (phases[n].size() != channels.h_reflect[n].cols()) {
      throw DomainError("compose: phase length mismatch for surface " + std::to_string(n));
    }
    h.noalias() += channels.h_reflect[n] * phases[n].asDiagonal() * channels.h_bs_ris[n];
  }
  return h;
}

void concatenate_surfaces(const ChannelSet& channels, CMatrix& h_reflect_cat,
                          CMatrix& h_bs_ris_cat) {
  const int r = channels.receive_dim();
  const int n_bs = channels.n_bs();
  const int total = channels.total_ris_elements();
  h_reflect_cat.resize(r, total);
  h_bs_ris_cat.resize(total, n_bs);
  Eigen::Index pos = 0;
  for (int n = 0; n < channels.n_surfaces(); ++n) {
    const auto cols = channels.h_reflect[n].cols();
    h_reflect_cat.middleCols(pos, cols) = channels.h_reflect[n];
    h_bs_ris_cat.middleRows(pos, cols) = channels.h_bs_ris[n];
    pos += cols;
  }
}

}  // namespace detail

CMatrix compose_effective(const ChannelSet& channels, const PhaseConfig& phases) {
  if (phases.is_off()) {
    channels.validate();
    return channels.h_direct;
  }
  phases.validate_unimodular();
  return detail::compose_linear(channels, phases.phases());
}

namespace {

CMatrix draw_fading(Rng& rng, int rows, int cols, double gain, const FadingSpec& spec) {
  switch (spec.kind) {
    case FadingKind::Rayleigh:
      return gen_rayleigh(rng, rows, cols, gain);
    case FadingKind::Rician: {
      const double aoa = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double aod = rng.uniform(0.0, 2.0 * std::numbers::pi);
      return gen_rician(rng, rows, cols, gain, spec.rician_factor_db, aoa, aod);
    }
    case FadingKind::KroneckerRank:
      return gen_kronecker_rank(rng, rows, cols, spec.rank, gain);
  }
  throw DomainError("draw_fading: unknown fading kind");
}

}  // namespace

ChannelSet build_scenario_channels(Rng& rng, const ScenarioConfig& config,
                                   Geometry* realized) {
  config.validate();
  const auto& dims = config.dimensions;
  const int k_users = dims.n_users;
  const int n_ms = dims.n_ms;
  const int n_bs = dims.n_bs;

  Geometry geo;
  geo.bs_position = config.bs_position;
  geo.ris_positions = config.ris_positions;
  geo.user_positions.reserve(k_users);
  for (int k = 0; k < k_users; ++k) {
    // Area-uniform draw in the disk.
    const double radius = config.user_disk_radius * std::sqrt(rng.uniform());
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    geo.user_positions.push_back({config.user_disk_center.x + radius * std::cos(angle),
                                  config.user_disk_center.y + radius * std::sin(angle)});
  }

  std::vector<bool> penalized(k_users, false);
  for (int k : config.extra_loss_users) penalized[k] = true;
  const double extra_gain = std::pow(10.0, -config.extra_loss_db / 10.0);

  // Draw order is part of the determinism contract: user positions, the
  // direct blocks in user order, then per surface the reflect blocks in user
  // order followed by the feeder matrix.
  ChannelSet channels;
  channels.h_direct.resize(k_users * n_ms, n_bs);
  for (int k = 0; k < k_users; ++k) {
    const double d = distance(geo.user_positions[k], geo.bs_position);
    double gain = path_loss_linear(config.pathloss.direct, d);
    if (penalized[k]) gain *= extra_gain;
    channels.h_direct.middleRows(k * n_ms, n_ms) =
        draw_fading(rng, n_ms, n_bs, gain, config.fading.direct);
  }

  const int n_surfaces = static_cast<int>(dims.n_ris_elements.size());
  channels.h_reflect.resize(n_surfaces);
  channels.h_bs_ris.resize(n_surfaces);
  for (int n = 0; n < n_surfaces; ++n) {
    const int n_ris = dims.n_ris_elements[n];
    CMatrix h_re(k_users * n_ms, n_ris);
    for (int k = 0; k < k_users; ++k) {
      const double d = distance(geo.user_positions[k], geo.ris_positions[n]);
      const double gain = path_loss_linear(config.pathloss.reflect, d);
      h_re.middleRows(k * n_ms, n_ms) =
          draw_fading(rng, n_ms, n_ris, gain, config.fading.reflect);
    }
    channels.h_reflect[n] = std::move(h_re);

    const double d_feeder = distance(config.ris_positions[n], geo.bs_position);
    const double gain_feeder = path_loss_linear(config.pathloss.bs_ris, d_feeder);
    channels.h_bs_ris[n] =
        draw_fading(rng, n_ris, n_bs, gain_feeder, config.fading.bs_ris);
  }

  if (realized != nullptr) *realized = std::move(geo);
  return channels;
}

}  // namespace riseig
