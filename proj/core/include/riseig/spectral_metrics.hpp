// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "riseig/types.hpp"

namespace riseig {

/// Descending, zero-clamped eigenvalues of a Gram matrix H H^H.
struct EigenSpectrum {
  RVector values;
  int r() const noexcept { return static_cast<int>(values.size()); }
};

/// K disjoint row-index blocks of size n_ms partitioning {0..r-1}; block k
/// selects user k's rows of the stacked channel.
struct UserPartition {
  std::vector<std::vector<int>> blocks;

  static UserPartition contiguous(int n_users, int n_ms);
  void validate(int r) const;  // throws DomainError
};

struct SpectrumMeans {
  double geometric;
  double harmonic;
};

/// High-SNR offsets and the eigenvalue means that generate them. Satisfies
/// r*log2(harmonic) <= lin_offset <= dpc_offset = r*log2(geometric).
struct OffsetReport {
  double dpc_offset_bits;
  double lin_offset_bits;
  double geo_mean;
  double har_mean;
};

/// Eigenvalues of h_eff * h_eff^H, descending, clamped at zero.
EigenSpectrum gram_spectrum(const CMatrix& h_eff);

/// Geometric and harmonic means; throws SingularChannelError on a
/// nonpositive eigenvalue.
SpectrumMeans spectrum_means(const EigenSpectrum& spectrum);

/// DPC high-SNR offset -log2 det((H H^H)^-1) in bits, computed through a
/// Cholesky log-determinant so that products of tiny eigenvalues cannot
/// underflow. Throws SingularChannelError when the Gram matrix is singular
/// (smallest eigenvalue below 1e-14 of the largest).
double dpc_offset(const CMatrix& h_eff);

/// Linear-precoding high-SNR offset
/// -sum_k log2 det(E_k^T (H H^H)^-1 E_k) in bits. Equals dpc_offset for a
/// block-diagonal Gram matrix.
double lin_offset(const CMatrix& h_eff, const UserPartition& partition);

/// Affine high-SNR rate r*log2(P) - r*log2(r) + offset in bits per channel
/// use. Throws DomainError for power <= 0.
double high_snr_rate(double power, int r, double offset_bits);

/// Upper bound r*log2(geo/har) >= dpc_offset - lin_offset on the DPC vs
/// linear gap, in bits.
double gap_bound(const EigenSpectrum& spectrum);

OffsetReport make_offset_report(const CMatrix& h_eff, const UserPartition& partition);

namespace detail {
/// Hermitized h * h^H.
CMatrix make_gram(const CMatrix& h_eff);
/// Throws SingularChannelError if lambda_min < rel_tol * lambda_max.
void check_gram_nonsingular(const CMatrix& gram, double rel_tol = 1e-14);
}  // namespace detail

}  // namespace riseig
