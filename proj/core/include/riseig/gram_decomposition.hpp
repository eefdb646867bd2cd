// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/types.hpp"

namespace riseig {

struct SvdTriplet {
  double sigma;
  CVector u;  // length n_ris
  CVector v;  // length n_bs
};

/// Phase vector augmented with a trailing constant one: [theta; 1].
struct AugmentedPhase {
  CVector theta_bar;
  static AugmentedPhase from_phases(const CVector& theta);
};

/// Exact split of the effective Gram matrix into a phase-independent part and
/// a bounded-rank phase-dependent part:
///
///   H(theta) H(theta)^H = C + sum_l D_l theta_bar theta_bar^H D_l^H
///
/// with C = H_d P H_d^H, P = I - sum_l v_l v_l^H, and
/// D_l = [H_re diag(u_l) sigma_l, H_d v_l] built from the feeder SVD
/// H_s = sum_l sigma_l u_l v_l^H. The identity holds for every theta.
struct GramDecomposition {
  CMatrix c_matrix;                    // r x r, PSD
  std::vector<CMatrix> d_factors;      // rank_s entries, each r x (n_ris + 1)
  std::vector<SvdTriplet> svd_triplets;
  CMatrix projector;                   // n_bs x n_bs, idempotent
  int rank_s = 0;
  int n_ris = 0;
};

/// Builds the decomposition. Singular values are kept while
/// sigma_l > rank_tolerance * sigma_1. Throws DomainError on dimension
/// mismatch or rank_tolerance outside (0, 1).
GramDecomposition decompose(const CMatrix& h_d, const CMatrix& h_re,
                            const CMatrix& h_s, double rank_tolerance = 1e-10);

/// Multi-surface convenience: decomposes the concatenated system, which is
/// equivalent to the per-surface sum under the concatenated phase vector.
GramDecomposition decompose(const ChannelSet& channels, double rank_tolerance = 1e-10);

/// Q(theta) = sum_l (D_l theta_bar)(D_l theta_bar)^H; PSD with
/// rank <= rank_s and tr(Q) = theta_bar^H (sum_l D_l^H D_l) theta_bar.
/// Throws DomainError if theta length != n_ris.
CMatrix assemble_q(const GramDecomposition& decomp, const CVector& theta);

enum class BudgetRule {
  /// (n_ris + 1) * lambda_max(sum_l D_l^H D_l); dominates tr(Q(theta)) for
  /// every unimodular theta.
  SpectralBound,
  /// tr(sum_l D_l^H D_l); a cheaper heuristic budget, not certified to
  /// dominate.
  MatrixTrace,
};

/// Trace budget G_max used by the relaxed rank-constrained waterfilling
/// problem.
double trace_budget_bound(const GramDecomposition& decomp,
                          BudgetRule rule = BudgetRule::SpectralBound);

/// Maximum number of controllable eigenvalues: sum of per-surface feeder
/// ranks.
int controllable_ev_count(const std::vector<int>& ranks);

/// Number of singular values above rel_tolerance times the largest.
int numerical_rank(const CMatrix& m, double rel_tolerance = 1e-10);

}  // namespace riseig
