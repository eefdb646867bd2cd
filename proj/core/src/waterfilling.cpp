// SPDX-License-Identifier: Apache-2.0
#include "riseig/waterfilling.hpp"

#include <algorithm>
#include <cmath>

namespace riseig {

WaterfillAllocation waterfill(const RVector& inverse_gains, double budget) {
  if (!inverse_gains.allFinite()) {
    throw DomainError("waterfill: base heights must be finite");
  }
  if (!(budget >= 0.0)) throw DomainError("waterfill: budget must be >= 0");

  const Eigen::Index n = inverse_gains.size();
  WaterfillAllocation alloc;
  alloc.levels = RVector::Zero(n);
  if (n == 0) {
    alloc.water_level = 0.0;
    return alloc;
  }

  const double base_min = inverse_gains.minCoeff();
  if (budget == 0.0) {
    alloc.water_level = base_min;
    return alloc;
  }

  const auto spent = [&](double level) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      total += std::max(0.0, level - inverse_gains(i));
    }
    return total;
  };

  double lo = base_min;
  double hi = base_min + budget;
  const double tol = 1e-12 * std::max(1.0, budget);
  double level = hi;
  for (int iter = 0; iter < 200; ++iter) {
    level = 0.5 * (lo + hi);
    const double used = spent(level);
    if (std::abs(used - budget) <= tol) break;
    if (used < budget) {
      lo = level;
    } else {
      hi = level;
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    alloc.levels(i) = std::max(0.0, level - inverse_gains(i));
    if (alloc.levels(i) > 0.0) alloc.support.push_back(static_cast<int>(i));
  }
  // Spread the bisection residual over the active set: the budget is then an
  // exact identity instead of a tolerance.
  if (!alloc.support.empty()) {
    const double residual = budget - alloc.levels.sum();
    const double share = residual / static_cast<double>(alloc.support.size());
    for (int i : alloc.support) alloc.levels(i) += share;
  }
  alloc.water_level = level;
  return alloc;
}

RankConstrainedFill rank_constrained_waterfill(const CMatrix& c_matrix,
                                               double budget, int rank_limit) {
  const Eigen::Index r = c_matrix.rows();
  if (c_matrix.cols() != r) {
    throw DomainError("rank_constrained_waterfill: C must be square");
  }
  if (rank_limit < 1 || rank_limit > r) {
    throw DomainError("rank_constrained_waterfill: rank_limit out of range");
  }
  if (!(budget >= 0.0)) {
    throw DomainError("rank_constrained_waterfill: budget must be >= 0");
  }

  const CMatrix c = 0.5 * (c_matrix + c_matrix.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(c);
  if (solver.info() != Eigen::Success) {
    throw DomainError("rank_constrained_waterfill: eigendecomposition failed");
  }
  // Eigen returns ascending order, so the rank_limit smallest come first.
  const RVector phi_asc = solver.eigenvalues();
  const CMatrix w = solver.eigenvectors();

  RankConstrainedFill fill;
  fill.c_spectrum = phi_asc.reverse();
  fill.allocation = waterfill(phi_asc.head(rank_limit), budget);

  CMatrix q = CMatrix::Zero(r, r);
  for (int i = 0; i < rank_limit; ++i) {
    const double qi = fill.allocation.levels(i);
    if (qi > 0.0) q.noalias() += qi * (w.col(i) * w.col(i).adjoint());
  }
  fill.q_star = 0.5 * (q + q.adjoint()).eval();

  RVector filled = phi_asc;
  for (int i = 0; i < rank_limit; ++i) filled(i) += fill.allocation.levels(i);
  std::sort(filled.data(), filled.data() + filled.size(), std::greater<double>());
  fill.filled_spectrum = std::move(filled);
  return fill;
}

}  // namespace riseig
