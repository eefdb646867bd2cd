// SPDX-License-Identifier: Apache-2.0
#include "riseig/rate_evaluation.hpp"

#include <cmath>

#include "riseig/channel_model.hpp"
#include "riseig/spectral_metrics.hpp"
#include "riseig/waterfilling.hpp"

namespace riseig {

void PowerPoint::validate() const {
  if (!(power_watts > 0.0)) throw DomainError("PowerPoint: power must be > 0");
  if (!(noise_variance_watts > 0.0)) {
    throw DomainError("PowerPoint: noise variance must be > 0");
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) throw DomainError("watts_to_dbm: power must be > 0");
  return 30.0 + 10.0 * std::log10(watts);
}

namespace {

/// log2 det(I + diag(p) G') evaluated through the Hermitian similarity
/// det(I + sqrt(p) G' sqrt(p)).
double dual_objective_bits(const CMatrix& g_normalized, const RVector& powers) {
  const auto r = g_normalized.rows();
  RVector root = powers.cwiseMax(0.0).cwiseSqrt();
  CMatrix inner = root.asDiagonal() * g_normalized * root.asDiagonal();
  inner = (0.5 * (inner + inner.adjoint())).eval();
  inner.diagonal().array() += 1.0;
  Eigen::LLT<CMatrix> llt(inner);
  if (llt.info() != Eigen::Success) {
    throw SingularChannelError("dpc: dual objective factorization failed");
  }
  double bits = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < r; ++i) bits += 2.0 * std::log2(l(i, i).real());
  return bits;
}

}  // namespace

DpcSolve solve_dpc_sum_capacity(const CMatrix& h_eff, const PowerPoint& pp,
                                double tol, int max_iter) {
  pp.validate();
  if (!(tol > 0.0)) throw DomainError("dpc: tol must be > 0");
  if (max_iter < 1) throw DomainError("dpc: max_iter must be >= 1");

  const CMatrix gram = detail::make_gram(h_eff);
  detail::check_gram_nonsingular(gram);
  const CMatrix g_norm = gram / pp.noise_variance_watts;
  const int k_users = static_cast<int>(gram.rows());
  const double budget = pp.power_watts;

  DpcSolve solve;
  solve.user_powers = RVector::Constant(k_users, budget / k_users);
  double objective = dual_objective_bits(g_norm, solve.user_powers);
  solve.objective_history.push_back(objective);

  const CMatrix identity = CMatrix::Identity(k_users, k_users);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Effective gain of user k against the interference of the others:
    // g_k = [G'(I + D^(k) G')^-1]_kk via one solve per user.
    RVector bases(k_users);
    for (int k = 0; k < k_users; ++k) {
      RVector others = solve.user_powers;
      others(k) = 0.0;
      const CMatrix lhs = identity + others.asDiagonal().toDenseMatrix() * g_norm;
      const CVector col = lhs.partialPivLu().solve(CVector(identity.col(k)));
      const double gain = (g_norm.row(k) * col)(0).real();
      if (!(gain > 0.0)) {
        throw SingularChannelError("dpc: nonpositive effective gain");
      }
      bases(k) = 1.0 / gain;
    }
    const WaterfillAllocation wf = waterfill(bases, budget);

    // Damped update; provably convergent for the sum-power problem.
    RVector candidate =
        (static_cast<double>(k_users - 1) * solve.user_powers + wf.levels) / k_users;
    double objective_new = dual_objective_bits(g_norm, candidate);

    // Safety net: fall back to a shorter step if roundoff breaks monotonicity.
    double step = 1.0;
    while (objective_new < objective && step > 1e-6) {
      step *= 0.5;
      candidate = solve.user_powers + step * (candidate - solve.user_powers).eval();
      objective_new = dual_objective_bits(g_norm, candidate);
    }
    if (objective_new < objective) {
      candidate = solve.user_powers;
      objective_new = objective;
    }

    solve.user_powers = candidate;
    solve.objective_history.push_back(objective_new);
    ++solve.iterations;
    const double change = objective_new - objective;
    objective = objective_new;
    if (std::abs(change) <= tol * std::max(1.0, std::abs(objective))) {
      solve.converged = true;
      break;
    }
  }
  solve.rate_bpcu = objective;
  return solve;
}

double dpc_sum_capacity(const CMatrix& h_eff, const PowerPoint& pp, double tol,
                        int max_iter) {
  const DpcSolve solve = solve_dpc_sum_capacity(h_eff, pp, tol, max_iter);
  if (!solve.converged) {
    throw ConvergenceError("dpc_sum_capacity: iteration budget exhausted",
                           solve.rate_bpcu);
  }
  return solve.rate_bpcu;
}

double zf_sum_rate(const CMatrix& h_eff, const PowerPoint& pp) {
  pp.validate();
  const CMatrix gram = detail::make_gram(h_eff);
  detail::check_gram_nonsingular(gram);
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularChannelError("zf_sum_rate: Cholesky factorization failed");
  }
  const CMatrix inverse = llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));

  const int k_users = static_cast<int>(gram.rows());
  RVector bases(k_users);
  for (int k = 0; k < k_users; ++k) {
    bases(k) = pp.noise_variance_watts * inverse(k, k).real();
  }
  const WaterfillAllocation wf = waterfill(bases, pp.power_watts);

  double rate = 0.0;
  for (int k : wf.support) {
    rate += std::log2((bases(k) + wf.levels(k)) / bases(k));
  }
  return rate;
}

double rate_gap(const ChannelSet& channels, const PhaseConfig& theta_geo,
                const PhaseConfig& theta_har, const PowerPoint& pp) {
  const CMatrix h_geo = compose_effective(channels, theta_geo);
  const CMatrix h_har = compose_effective(channels, theta_har);
  return dpc_sum_capacity(h_geo, pp) - zf_sum_rate(h_har, pp);
}

}  // namespace riseig
