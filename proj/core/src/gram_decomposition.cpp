// SPDX-License-Identifier: Apache-2.0
#include "riseig/gram_decomposition.hpp"

#include <Eigen/SVD>

#include "riseig/channel_model.hpp"

namespace riseig {

AugmentedPhase AugmentedPhase::from_phases(const CVector& theta) {
  AugmentedPhase aug;
  aug.theta_bar.resize(theta.size() + 1);
  aug.theta_bar.head(theta.size()) = theta;
  aug.theta_bar(theta.size()) = Complex(1.0, 0.0);
  return aug;
}

GramDecomposition decompose(const CMatrix& h_d, const CMatrix& h_re,
                            const CMatrix& h_s, double rank_tolerance) {
  if (!(rank_tolerance > 0.0 && rank_tolerance < 1.0)) {
    throw DomainError("decompose: rank_tolerance must be in (0, 1)");
  }
  const auto r = h_d.rows();
  const auto n_bs = h_d.cols();
  const auto n_ris = h_re.cols();
  if (h_re.rows() != r || h_s.rows() != n_ris || h_s.cols() != n_bs) {
    throw DomainError("decompose: inconsistent channel dimensions");
  }

  Eigen::JacobiSVD<CMatrix> svd(h_s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigmas = svd.singularValues();
  const double sigma_max = sigmas.size() > 0 ? sigmas(0) : 0.0;

  GramDecomposition decomp;
  decomp.n_ris = static_cast<int>(n_ris);
  int rank_s = 0;
  for (Eigen::Index l = 0; l < sigmas.size(); ++l) {
    if (sigmas(l) > rank_tolerance * sigma_max && sigmas(l) > 0.0) ++rank_s;
  }
  decomp.rank_s = rank_s;

  CMatrix projector = CMatrix::Identity(n_bs, n_bs);
  decomp.svd_triplets.reserve(rank_s);
  decomp.d_factors.reserve(rank_s);
  for (int l = 0; l < rank_s; ++l) {
    const double sigma = sigmas(l);
    const CVector u = svd.matrixU().col(l);
    const CVector v = svd.matrixV().col(l);
    projector.noalias() -= v * v.adjoint();

    CMatrix d(r, n_ris + 1);
    d.leftCols(n_ris) = sigma * (h_re * u.asDiagonal());
    d.col(n_ris) = h_d * v;
    decomp.d_factors.push_back(std::move(d));
    decomp.svd_triplets.push_back(SvdTriplet{sigma, u, v});
  }
  decomp.projector = 0.5 * (projector + projector.adjoint()).eval();

  CMatrix c = h_d * decomp.projector * h_d.adjoint();
  decomp.c_matrix = 0.5 * (c + c.adjoint()).eval();
  return decomp;
}

GramDecomposition decompose(const ChannelSet& channels, double rank_tolerance) {
  channels.validate();
  CMatrix h_re_cat;
  CMatrix h_s_cat;
  detail::concatenate_surfaces(channels, h_re_cat, h_s_cat);
  return decompose(channels.h_direct, h_re_cat, h_s_cat, rank_tolerance);
}

CMatrix assemble_q(const GramDecomposition& decomp, const CVector& theta) {
  if (theta.size() != decomp.n_ris) {
    throw DomainError("assemble_q: theta length does not match n_ris");
  }
  const auto r = decomp.c_matrix.rows();
  CMatrix q = CMatrix::Zero(r, r);
  if (decomp.rank_s == 0) return q;
  const AugmentedPhase aug = AugmentedPhase::from_phases(theta);
  for (const auto& d : decomp.d_factors) {
    const CVector col = d * aug.theta_bar;
    q.noalias() += col * col.adjoint();
  }
  return 0.5 * (q + q.adjoint()).eval();
}

double trace_budget_bound(const GramDecomposition& decomp, BudgetRule rule) {
  if (decomp.rank_s == 0) return 0.0;
  const auto m_dim = decomp.n_ris + 1;
  CMatrix m = CMatrix::Zero(m_dim, m_dim);
  for (const auto& d : decomp.d_factors) m.noalias() += d.adjoint() * d;
  m = 0.5 * (m + m.adjoint()).eval();
  switch (rule) {
    case BudgetRule::SpectralBound: {
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
      return static_cast<double>(m_dim) * solver.eigenvalues().maxCoeff();
    }
    case BudgetRule::MatrixTrace:
      return m.trace().real();
  }
  throw DomainError("trace_budget_bound: unknown budget rule");
}

int controllable_ev_count(const std::vector<int>& ranks) {
  int total = 0;
  for (int rank : ranks) {
    if (rank < 0) throw DomainError("controllable_ev_count: ranks must be >= 0");
    total += rank;
  }
  return total;
}

int numerical_rank(const CMatrix& m, double rel_tolerance) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sigmas = svd.singularValues();
  if (sigmas.size() == 0 || !(sigmas(0) > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index l = 0; l < sigmas.size(); ++l) {
    if (sigmas(l) > rel_tolerance * sigmas(0)) ++rank;
  }
  return rank;
}

}  // namespace riseig
