// SPDX-License-Identifier: Apache-2.0
#include "riseig/types.hpp"

#include <cmath>

namespace riseig {

double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

int SystemDimensions::total_ris_elements() const noexcept {
  int total = 0;
  for (int n : n_ris_elements) total += n;
  return total;
}

void SystemDimensions::validate() const {
  if (n_bs < 1 || n_ms < 1 || n_users < 1) {
    throw DomainError("SystemDimensions: all antenna and user counts must be >= 1");
  }
  for (int n : n_ris_elements) {
    if (n < 1) throw DomainError("SystemDimensions: every RIS element count must be >= 1");
  }
  if (n_bs < receive_dim()) {
    throw DomainError("SystemDimensions: n_bs must be >= n_users * n_ms");
  }
}

int ChannelSet::total_ris_elements() const noexcept {
  int total = 0;
  for (const auto& h : h_bs_ris) total += static_cast<int>(h.rows());
  return total;
}

void ChannelSet::validate() const {
  if (h_reflect.size() != h_bs_ris.size()) {
    throw DomainError("ChannelSet: reflect/bs_ris surface counts differ");
  }
  const auto r = h_direct.rows();
  const auto n_bs = h_direct.cols();
  for (std::size_t n = 0; n < h_reflect.size(); ++n) {
    if (h_reflect[n].rows() != r || h_bs_ris[n].cols() != n_bs ||
        h_reflect[n].cols() != h_bs_ris[n].rows()) {
      throw DomainError("ChannelSet: inconsistent dimensions for surface " + std::to_string(n));
    }
  }
  if (!h_direct.allFinite()) throw DomainError("ChannelSet: non-finite entries in h_direct");
  for (const auto& h : h_reflect) {
    if (!h.allFinite()) throw DomainError("ChannelSet: non-finite entries in h_reflect");
  }
  for (const auto& h : h_bs_ris) {
    if (!h.allFinite()) throw DomainError("ChannelSet: non-finite entries in h_bs_ris");
  }
}

PhaseConfig PhaseConfig::active(std::vector<CVector> phases) {
  PhaseConfig config(std::move(phases));
  config.validate_unimodular();
  return config;
}

PhaseConfig PhaseConfig::single(CVector phases) {
  std::vector<CVector> list;
  list.push_back(std::move(phases));
  return active(std::move(list));
}

const std::vector<CVector>& PhaseConfig::phases() const {
  if (off_) throw DomainError("PhaseConfig: Off state has no phase vectors");
  return phases_;
}

CVector PhaseConfig::concatenated() const {
  const auto& list = phases();
  Eigen::Index total = 0;
  for (const auto& v : list) total += v.size();
  CVector out(total);
  Eigen::Index pos = 0;
  for (const auto& v : list) {
    out.segment(pos, v.size()) = v;
    pos += v.size();
  }
  return out;
}

void PhaseConfig::validate_unimodular(double tol) const {
  if (off_) return;
  for (const auto& v : phases_) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(std::abs(v(i)) - 1.0) > tol) {
        throw DomainError("PhaseConfig: entry " + std::to_string(i) +
                          " is not unimodular within tolerance");
      }
    }
  }
}

}  // namespace riseig
