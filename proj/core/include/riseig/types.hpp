// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace riseig {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: dimension mismatch, out-of-range parameter, malformed config.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A Gram matrix is numerically singular where a full-rank channel is required.
class SingularChannelError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its budget. Carries the last objective value.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_value)
      : Error(what), last_value_(last_value) {}
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

/// The phase optimizer hit a persistent singular subproblem or a non-finite
/// objective.
class OptimizerError : public Error {
 public:
  using Error::Error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

/// Antenna counts of the downlink system. The receive dimension is the
/// stacked per-user dimension r = n_users * n_ms and the base station must
/// have at least that many antennas.
struct SystemDimensions {
  int n_bs = 1;
  int n_ms = 1;
  int n_users = 1;
  std::vector<int> n_ris_elements;

  int receive_dim() const noexcept { return n_ms * n_users; }
  int total_ris_elements() const noexcept;
  void validate() const;  // throws DomainError
};

/// Log-distance path loss L_dB = alpha_db + beta * 10 * log10(d).
struct PathLossParams {
  double alpha_db = 30.0;
  double beta = 3.76;
};

struct Geometry {
  Point2 bs_position{};
  std::vector<Point2> ris_positions;
  std::vector<Point2> user_positions;
};

enum class FadingKind { Rayleigh, Rician, KroneckerRank };

struct FadingSpec {
  FadingKind kind = FadingKind::Rayleigh;
  double rician_factor_db = 6.0;  // Rician only
  int rank = 1;                   // KroneckerRank only
};

/// One realization of the propagation environment: the direct channel plus
/// one (reflect, feeder) matrix pair per reflecting surface.
struct ChannelSet {
  CMatrix h_direct;                // r x n_bs
  std::vector<CMatrix> h_reflect;  // per surface, r x n_ris[n]
  std::vector<CMatrix> h_bs_ris;   // per surface, n_ris[n] x n_bs

  int receive_dim() const noexcept { return static_cast<int>(h_direct.rows()); }
  int n_bs() const noexcept { return static_cast<int>(h_direct.cols()); }
  int n_surfaces() const noexcept { return static_cast<int>(h_reflect.size()); }
  int total_ris_elements() const noexcept;
  void validate() const;  // dimension consistency and finiteness
};

/// Unimodular reflection coefficients, one vector per surface, or the
/// distinguished Off state in which the reflected term is omitted entirely.
class PhaseConfig {
 public:
  static constexpr double kUnimodularTol = 1e-12;

  static PhaseConfig off() { return PhaseConfig(); }
  static PhaseConfig active(std::vector<CVector> phases);
  static PhaseConfig single(CVector phases);

  bool is_off() const noexcept { return off_; }
  const std::vector<CVector>& phases() const;
  CVector concatenated() const;
  void validate_unimodular(double tol = kUnimodularTol) const;

 private:
  PhaseConfig() : off_(true) {}
  explicit PhaseConfig(std::vector<CVector> phases)
      : off_(false), phases_(std::move(phases)) {}

  bool off_;
  std::vector<CVector> phases_;
};

}  // namespace riseig
