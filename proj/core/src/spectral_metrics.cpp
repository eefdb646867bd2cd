// SPDX-License-Identifier: Apache-2.0
#include "riseig/spectral_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace riseig {

namespace detail {

CMatrix make_gram(const CMatrix& h_eff) {
  CMatrix gram = h_eff * h_eff.adjoint();
  gram = 0.5 * (gram + gram.adjoint()).eval();
  return gram;
}

void check_gram_nonsingular(const CMatrix& gram, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  const double max_ev = solver.eigenvalues().maxCoeff();
  const double min_ev = solver.eigenvalues().minCoeff();
  if (!(max_ev > 0.0) || min_ev < rel_tol * max_ev) {
    throw SingularChannelError("Gram matrix is numerically singular");
  }
}

}  // namespace detail

UserPartition UserPartition::contiguous(int n_users, int n_ms) {
  UserPartition partition;
  partition.blocks.resize(n_users);
  for (int k = 0; k < n_users; ++k) {
    for (int m = 0; m < n_ms; ++m) partition.blocks[k].push_back(k * n_ms + m);
  }
  return partition;
}

void UserPartition::validate(int r) const {
  std::vector<bool> seen(r, false);
  std::size_t count = 0;
  for (const auto& block : blocks) {
    for (int i : block) {
      if (i < 0 || i >= r) throw DomainError("UserPartition: index out of range");
      if (seen[i]) throw DomainError("UserPartition: blocks are not disjoint");
      seen[i] = true;
      ++count;
    }
  }
  if (count != static_cast<std::size_t>(r)) {
    throw DomainError("UserPartition: blocks do not cover {0..r-1}");
  }
}

EigenSpectrum gram_spectrum(const CMatrix& h_eff) {
  const CMatrix gram = detail::make_gram(h_eff);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  RVector values = solver.eigenvalues().reverse();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) values(i) = 0.0;
  }
  return EigenSpectrum{std::move(values)};
}

SpectrumMeans spectrum_means(const EigenSpectrum& spectrum) {
  double log_sum = 0.0;
  double inv_sum = 0.0;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    const double v = spectrum.values(i);
    if (!(v > 0.0)) {
      throw SingularChannelError("spectrum_means: nonpositive eigenvalue");
    }
    log_sum += std::log(v);
    inv_sum += 1.0 / v;
  }
  const double r = static_cast<double>(spectrum.r());
  return SpectrumMeans{std::exp(log_sum / r), r / inv_sum};
}

double dpc_offset(const CMatrix& h_eff) {
  const CMatrix gram = detail::make_gram(h_eff);
  detail::check_gram_nonsingular(gram);
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularChannelError("dpc_offset: Cholesky factorization failed");
  }
  // log2 det(G) = 2 * sum log2 L_ii.
  double offset = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    offset += 2.0 * std::log2(l(i, i).real());
  }
  return offset;
}

double lin_offset(const CMatrix& h_eff, const UserPartition& partition) {
  const CMatrix gram = detail::make_gram(h_eff);
  partition.validate(static_cast<int>(gram.rows()));
  detail::check_gram_nonsingular(gram);
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularChannelError("lin_offset: Cholesky factorization failed");
  }
  const CMatrix inverse = llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));

  double offset = 0.0;
  for (const auto& block : partition.blocks) {
    const int m = static_cast<int>(block.size());
    CMatrix sub(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) sub(i, j) = inverse(block[i], block[j]);
    }
    const double det = sub.determinant().real();
    if (!(det > 0.0)) {
      throw SingularChannelError("lin_offset: nonpositive principal minor");
    }
    offset -= std::log2(det);
  }
  return offset;
}

double high_snr_rate(double power, int r, double offset_bits) {
  if (!(power > 0.0)) throw DomainError("high_snr_rate: power must be > 0");
  const double rd = static_cast<double>(r);
  return rd * std::log2(power) - rd * std::log2(rd) + offset_bits;
}

double gap_bound(const EigenSpectrum& spectrum) {
  const SpectrumMeans means = spectrum_means(spectrum);
  return static_cast<double>(spectrum.r()) * std::log2(means.geometric / means.harmonic);
}

OffsetReport make_offset_report(const CMatrix& h_eff, const UserPartition& partition) {
  const EigenSpectrum spectrum = gram_spectrum(h_eff);
  const SpectrumMeans means = spectrum_means(spectrum);
  const OffsetReport report{dpc_offset(h_eff), lin_offset(h_eff, partition),
                            means.geometric, means.harmonic};
  const double r = static_cast<double>(spectrum.r());
  const bool sandwich =
      r * std::log2(report.har_mean) <= report.lin_offset_bits + 1e-9 &&
      report.lin_offset_bits <= report.dpc_offset_bits + 1e-9 &&
      std::abs(report.dpc_offset_bits - r * std::log2(report.geo_mean)) <= 1e-9;
  if (!sandwich) {
    throw SingularChannelError("make_offset_report: offset sandwich violated");
  }
  return report;
}

}  // namespace riseig
