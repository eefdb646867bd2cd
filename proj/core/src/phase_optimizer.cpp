// SPDX-License-Identifier: Apache-2.0
#include "riseig/phase_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "riseig/channel_model.hpp"

namespace riseig {

CVector random_phases(Rng& rng, int n) {
  if (n < 0) throw DomainError("random_phases: n must be >= 0");
  CVector theta(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  return theta;
}

PhaseConfig to_phase_config(const ChannelSet& channels, const CVector& theta) {
  if (theta.size() != channels.total_ris_elements()) {
    throw DomainError("to_phase_config: phase length does not match channel set");
  }
  std::vector<CVector> per_surface;
  Eigen::Index pos = 0;
  for (int n = 0; n < channels.n_surfaces(); ++n) {
    const auto len = channels.h_reflect[n].cols();
    per_surface.push_back(theta.segment(pos, len));
    pos += len;
  }
  return PhaseConfig::active(std::move(per_surface));
}

namespace {

constexpr double kMonotoneTol = 1e-9;
constexpr int kCoarseScanPoints = 64;
constexpr double kGoldenTolRad = 1e-8;

enum class Objective { LogDet, TraceInv };

/// Coordinate state over the concatenated single-surface system.
struct Sweeper {
  const CMatrix& h_d;
  CMatrix h_re;  // r x n
  CMatrix h_s;   // n x n_bs
  CMatrix h;     // current effective channel
  CVector theta;
  double eps = 0.0;  // diagonal loading in effect
  double configured_eps;
  int regularization_events = 0;

  Sweeper(const ChannelSet& channels, CVector theta0, double configured)
      : h_d(channels.h_direct), theta(std::move(theta0)), configured_eps(configured) {
    detail::concatenate_surfaces(channels, h_re, h_s);
    recompose();
  }

  void recompose() {
    h = h_d;
    if (theta.size() > 0) h.noalias() += h_re * theta.asDiagonal() * h_s;
  }

  CMatrix gram() const {
    CMatrix g = h * h.adjoint();
    g = 0.5 * (g + g.adjoint()).eval();
    if (eps > 0.0) g.diagonal().array() += eps;
    return g;
  }

  double auto_eps() const {
    const double scale = (h * h.adjoint()).trace().real() / std::max<int>(1, h.rows());
    return 1e-12 * scale;
  }

  void escalate_eps() {
    const double base = configured_eps > 0.0 ? configured_eps : auto_eps();
    eps = (eps == 0.0) ? base : eps * 1e3;
    ++regularization_events;
  }

  /// Exact objective on the current channel.
  double evaluate(Objective objective) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      const CMatrix g = gram();
      Eigen::LLT<CMatrix> llt(g);
      if (llt.info() == Eigen::Success) {
        if (objective == Objective::LogDet) {
          double bits = 0.0;
          const auto& l = llt.matrixLLT();
          for (Eigen::Index i = 0; i < l.rows(); ++i) {
            bits += 2.0 * std::log2(l(i, i).real());
          }
          if (!std::isfinite(bits)) {
            throw OptimizerError("optimizer: non-finite log-det objective");
          }
          return bits;
        }
        const double trace =
            llt.solve(CMatrix::Identity(g.rows(), g.cols())).trace().real();
        if (!std::isfinite(trace)) {
          throw OptimizerError("optimizer: non-finite trace-inverse objective");
        }
        return trace;
      }
      escalate_eps();
    }
    throw OptimizerError("optimizer: Gram matrix singular despite loading");
  }
};

struct ElementContext {
  CVector b;          // reflect column
  Eigen::RowVectorXcd c_row;  // feeder row (= c^H)
  CVector d;
  Eigen::LLT<CMatrix> llt;    // of M_n
  Complex beta;
  double gamma = 0.0;
  double delta = 0.0;
  CVector minv_b;
  CVector minv_d;
  bool active = false;  // false when the element has no effect
};

ElementContext element_context(Sweeper& sweeper, int n) {
  ElementContext ctx;
  ctx.b = sweeper.h_re.col(n);
  if (ctx.b.squaredNorm() == 0.0) return ctx;
  ctx.c_row = sweeper.h_s.row(n);
  const double cn2 = ctx.c_row.squaredNorm();

  CMatrix a = sweeper.h;
  a.noalias() -= sweeper.theta(n) * (ctx.b * ctx.c_row);
  ctx.d = a * ctx.c_row.adjoint();

  for (int attempt = 0; attempt < 3; ++attempt) {
    CMatrix m = a * a.adjoint();
    m.noalias() += cn2 * (ctx.b * ctx.b.adjoint());
    m = 0.5 * (m + m.adjoint()).eval();
    if (sweeper.eps > 0.0) m.diagonal().array() += sweeper.eps;
    ctx.llt.compute(m);
    if (ctx.llt.info() == Eigen::Success) break;
    sweeper.escalate_eps();
    if (attempt == 2) {
      throw OptimizerError("optimizer: singular element subproblem despite loading");
    }
  }

  ctx.minv_b = ctx.llt.solve(ctx.b);
  ctx.minv_d = ctx.llt.solve(ctx.d);
  ctx.beta = ctx.d.dot(ctx.minv_b);
  ctx.gamma = ctx.d.dot(ctx.minv_d).real();
  ctx.delta = ctx.b.dot(ctx.minv_b).real();
  ctx.active = true;
  return ctx;
}

void apply_phase(Sweeper& sweeper, int n, const ElementContext& ctx, Complex theta_new) {
  const Complex delta_theta = theta_new - sweeper.theta(n);
  sweeper.h.noalias() += delta_theta * (ctx.b * ctx.c_row);
  sweeper.theta(n) = theta_new;
}

/// One log-det coordinate update; returns the new exact objective.
double update_geo(Sweeper& sweeper, int n, double objective_now) {
  ElementContext ctx = element_context(sweeper, n);
  if (!ctx.active) return objective_now;
  const double mag = std::abs(ctx.beta);
  if (mag == 0.0) return objective_now;  // objective is flat in this element

  const Complex theta_new = std::conj(ctx.beta) / mag;
  const Complex theta_old = sweeper.theta(n);
  apply_phase(sweeper, n, ctx, theta_new);
  const double objective_new = sweeper.evaluate(Objective::LogDet);
  if (objective_new < objective_now - kMonotoneTol * std::max(1.0, std::abs(objective_now))) {
    apply_phase(sweeper, n, ctx, theta_old);
    throw OptimizerError("optimize_geo_mean: coordinate update decreased the objective");
  }
  return objective_new;
}

/// Scalar trace-inverse objective of element n on the unit circle, through
/// the rank-2 Woodbury identity. Cheap enough for dense scans.
struct TraceInvProfile {
  double tr_minv;
  Complex beta;
  double gamma, delta;
  double delta2, gamma2;
  Complex eps2;

  double operator()(double phi) const {
    const Complex theta = std::polar(1.0, phi);
    const Complex one_plus = 1.0 + theta * beta;
    const double den = delta * gamma - std::norm(one_plus);
    const double num =
        gamma * delta2 + delta * gamma2 - 2.0 * ((theta + std::conj(beta)) * eps2).real();
    return tr_minv - num / den;
  }
};

double update_har(Sweeper& sweeper, int n, double objective_now) {
  ElementContext ctx = element_context(sweeper, n);
  if (!ctx.active) return objective_now;

  TraceInvProfile profile;
  profile.beta = ctx.beta;
  profile.gamma = ctx.gamma;
  profile.delta = ctx.delta;
  profile.delta2 = ctx.minv_b.squaredNorm();
  profile.gamma2 = ctx.minv_d.squaredNorm();
  profile.eps2 = ctx.minv_d.dot(ctx.minv_b);
  const auto r = sweeper.h.rows();
  profile.tr_minv = ctx.llt.solve(CMatrix::Identity(r, r)).trace().real();

  // Coarse scan, then golden-section refinement around the best bracket.
  const double step = 2.0 * std::numbers::pi / kCoarseScanPoints;
  double best_phi = std::arg(sweeper.theta(n));
  double best_val = profile(best_phi);
  for (int i = 0; i < kCoarseScanPoints; ++i) {
    const double phi = i * step;
    const double val = profile(phi);
    if (val < best_val) {
      best_val = val;
      best_phi = phi;
    }
  }
  double a = best_phi - step;
  double b = best_phi + step;
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_golden * (b - a);
  double x2 = a + inv_golden * (b - a);
  double f1 = profile(x1);
  double f2 = profile(x2);
  while (b - a > kGoldenTolRad) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_golden * (b - a);
      f1 = profile(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_golden * (b - a);
      f2 = profile(x2);
    }
  }
  const double phi_star = 0.5 * (a + b);

  // Accept on the exact objective only if the move improves it.
  const Complex theta_old = sweeper.theta(n);
  const Complex theta_new = std::polar(1.0, phi_star);
  apply_phase(sweeper, n, ctx, theta_new);
  const double objective_new = sweeper.evaluate(Objective::TraceInv);
  if (objective_new < objective_now) return objective_new;
  apply_phase(sweeper, n, ctx, theta_old);
  return objective_now;
}

OptimizeResult run_sweeps(const ChannelSet& channels, const OptimizerConfig& config,
                          Rng& rng, Objective objective) {
  channels.validate();
  if (config.max_sweeps < 1) throw DomainError("optimizer: max_sweeps must be >= 1");
  if (!(config.rel_tolerance > 0.0)) {
    throw DomainError("optimizer: rel_tolerance must be > 0");
  }
  if (config.regularization < 0.0) {
    throw DomainError("optimizer: regularization must be >= 0");
  }

  const int n_total = channels.total_ris_elements();
  CVector theta0;
  if (config.init == PhaseInit::Given) {
    if (config.initial_phases.size() != n_total) {
      throw DomainError("optimizer: initial phase length does not match channel set");
    }
    theta0 = config.initial_phases;
  } else {
    theta0 = random_phases(rng, n_total);
  }

  Sweeper sweeper(channels, std::move(theta0), config.regularization);
  OptimizerTrace trace;
  double objective_now = sweeper.evaluate(objective);
  trace.objective_per_sweep.push_back(objective_now);

  std::vector<int> order(n_total);
  std::iota(order.begin(), order.end(), 0);

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    if (config.randomized_order) {
      for (int i = n_total - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
      }
    }
    for (int n : order) {
      objective_now = (objective == Objective::LogDet)
                          ? update_geo(sweeper, n, objective_now)
                          : update_har(sweeper, n, objective_now);
    }
    // Recomposing from theta once per sweep washes out incremental drift.
    sweeper.recompose();
    objective_now = sweeper.evaluate(objective);

    const double previous = trace.objective_per_sweep.back();
    trace.objective_per_sweep.push_back(objective_now);
    ++trace.sweeps_run;
    if (std::abs(objective_now - previous) <=
        config.rel_tolerance * std::max(1.0, std::abs(previous))) {
      trace.converged = true;
      break;
    }
  }

  trace.final_theta = sweeper.theta;
  trace.regularization_events = sweeper.regularization_events;
  return OptimizeResult{sweeper.theta, std::move(trace)};
}

}  // namespace

OptimizeResult optimize_geo_mean(const ChannelSet& channels,
                                 const OptimizerConfig& config, Rng& rng) {
  return run_sweeps(channels, config, rng, Objective::LogDet);
}

OptimizeResult optimize_har_mean(const ChannelSet& channels,
                                 const OptimizerConfig& config, Rng& rng) {
  return run_sweeps(channels, config, rng, Objective::TraceInv);
}

}  // namespace riseig
