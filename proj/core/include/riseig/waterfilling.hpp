// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/types.hpp"

namespace riseig {

/// Result of level-filling a power budget over base heights: levels are the
/// allocated amounts q_i = max(0, water_level - base_i) with
/// sum(levels) == budget, and support lists the indices with q_i > 0.
struct WaterfillAllocation {
  RVector levels;
  double water_level;
  std::vector<int> support;
};

/// Classic waterfilling: maximizes sum log(base_i + q_i) subject to q >= 0
/// and sum q = budget. The common level is found by bisection to
/// |sum q - budget| <= 1e-12 * max(1, budget) and the residual is spread over
/// the active set so the budget is met exactly.
WaterfillAllocation waterfill(const RVector& inverse_gains, double budget);

/// Solution of the rank-constrained problem
///   max det(C + Q)  s.t.  Q PSD, tr(Q) <= budget, rank(Q) <= rank_limit:
/// waterfilling over the rank_limit smallest eigenvalues of C, placed along
/// the corresponding eigenvectors. The same Q also minimizes
/// tr((C + Q)^-1) over the feasible set.
struct RankConstrainedFill {
  CMatrix q_star;                  // r x r PSD
  WaterfillAllocation allocation;  // over the smallest eigenvalues, ascending
  RVector filled_spectrum;         // descending eigenvalues of C + Q
  RVector c_spectrum;              // descending eigenvalues of C
};

/// Throws DomainError unless 1 <= rank_limit <= dim(C) and budget >= 0.
RankConstrainedFill rank_constrained_waterfill(const CMatrix& c_matrix,
                                               double budget, int rank_limit);

}  // namespace riseig
