#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "ilps/linalg.hpp"

namespace ilps {

/// J particles in R^d, stored as the columns of a d x J matrix.
class Ensemble {
 public:
  explicit Ensemble(PointCloud particles) : u_(std::move(particles)) {
    if (u_.rows() < 1) throw Error(ErrorCode::BadDimension, "particle dimension must be >= 1");
    if (u_.cols() < 2) throw Error(ErrorCode::TooFewParticles, "an ensemble needs at least 2 particles");
  }

  Eigen::Index dim() const noexcept { return u_.rows(); }
  Eigen::Index size() const noexcept { return u_.cols(); }

  const PointCloud& particles() const noexcept { return u_; }
  PointCloud& particles() noexcept { return u_; }
  auto particle(Eigen::Index j) const { return u_.col(j); }

  Vector mean() const { return sample_mean(u_); }

  /// Stacked view U in R^{dJ}, particle-major.
  Vector stacked() const { return Eigen::Map<const Vector>(u_.data(), u_.size()); }

  bool operator==(const Ensemble& o) const {
    return u_.rows() == o.u_.rows() && u_.cols() == o.u_.cols() && u_ == o.u_;
  }

 private:
  PointCloud u_;
};

namespace scheme {

struct Full {};

/// C_alpha = alpha * c0 + (1 - alpha) * C(U).
struct Regularized {
  Regularized(double alpha_, SymMatrix c0_) : alpha(alpha_), c0(std::move(c0_)) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw Error(ErrorCode::ConfigError, "alpha must lie strictly inside (0,1), got " + std::to_string(alpha));
    }
    if (!is_positive_definite(c0)) {
      throw Error(ErrorCode::ConfigError, "c0 must be strictly positive definite");
    }
  }
  double alpha;
  SymMatrix c0;
};

struct LeaveOneOut {};

}  // namespace scheme

using CovarianceScheme = std::variant<scheme::Full, scheme::Regularized, scheme::LeaveOneOut>;

inline std::string scheme_name(const CovarianceScheme& s) {
  switch (s.index()) {
    case 0: return "full";
    case 1: return "regularized";
    default: return "leave_one_out";
  }
}

inline bool is_leave_one_out(const CovarianceScheme& s) {
  return std::holds_alternative<scheme::LeaveOneOut>(s);
}

/// Covariance of all particles except `j`, normalized by 1/(J-1).
inline SymMatrix leave_one_out_covariance(const Ensemble& e, Eigen::Index j) {
  const Eigen::Index n = e.size();
  if (n < 3) throw Error(ErrorCode::TooFewParticles, "leave-one-out covariance needs J >= 3");
  if (j < 0 || j >= n) throw Error(ErrorCode::BadIndex, "particle index " + std::to_string(j));
  PointCloud rest(e.dim(), n - 1);
  for (Eigen::Index k = 0, c = 0; k < n; ++k) {
    if (k != j) rest.col(c++) = e.particle(k);
  }
  return empirical_covariance(rest);
}

/// The j-th diagonal block of the preconditioner S(U).
inline SymMatrix preconditioner(const Ensemble& e, const CovarianceScheme& s, Eigen::Index j) {
  if (j < 0 || j >= e.size()) throw Error(ErrorCode::BadIndex, "particle index " + std::to_string(j));
  if (const auto* reg = std::get_if<scheme::Regularized>(&s)) {
    if (reg->c0.dim() != e.dim()) throw Error(ErrorCode::BadDimension, "c0 dimension mismatch");
    return SymMatrix::combine(reg->alpha, reg->c0, 1.0 - reg->alpha, empirical_covariance(e.particles()));
  }
  if (is_leave_one_out(s)) return leave_one_out_covariance(e, j);
  return empirical_covariance(e.particles());
}

/// Preconditioner blocks for every particle; Full and Regularized share one matrix.
inline std::vector<SymMatrix> preconditioners(const Ensemble& e, const CovarianceScheme& s) {
  if (is_leave_one_out(s)) {
    std::vector<SymMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(e.size()));
    for (Eigen::Index j = 0; j < e.size(); ++j) blocks.push_back(leave_one_out_covariance(e, j));
    return blocks;
  }
  return std::vector<SymMatrix>(static_cast<std::size_t>(e.size()), preconditioner(e, s, 0));
}

/// Closed-form divergence of S(U): column j is c * (u_j - mean) with
/// c = (d+1)/J for Full, (1-alpha)(d+1)/J for Regularized and 0 for LeaveOneOut.
inline PointCloud divergence_correction(const Ensemble& e, const CovarianceScheme& s) {
  if (is_leave_one_out(s)) return PointCloud::Zero(e.dim(), e.size());
  double coeff = static_cast<double>(e.dim() + 1) / static_cast<double>(e.size());
  if (const auto* reg = std::get_if<scheme::Regularized>(&s)) coeff *= (1.0 - reg->alpha);
  return coeff * (e.particles().colwise() - e.mean());
}

inline double default_fd_step(const Ensemble& e) {
  return 1e-5 * (1.0 + e.particles().cwiseAbs().maxCoeff());
}

/// Central-difference divergence (div S)_i = sum_k d/dU_k S_{ik}.
///
/// S is block diagonal, so column (j, m) of S is nonzero only in block j and
/// only the j-th block needs to be re-evaluated when coordinate m of
/// particle j is perturbed.  Shares no code with divergence_correction.
inline PointCloud divergence_fd_oracle(const Ensemble& e, const CovarianceScheme& s, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::NumericalFailure, "finite-difference step must be > 0");
  PointCloud div = PointCloud::Zero(e.dim(), e.size());
  Ensemble probe = e;
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    for (Eigen::Index m = 0; m < e.dim(); ++m) {
      const double orig = e.particles()(m, j);
      probe.particles()(m, j) = orig + h;
      const SymMatrix plus = preconditioner(probe, s, j);
      probe.particles()(m, j) = orig - h;
      const SymMatrix minus = preconditioner(probe, s, j);
      probe.particles()(m, j) = orig;
      div.col(j) += (plus.matrix().col(m) - minus.matrix().col(m)) / (2.0 * h);
    }
  }
  return div;
}

/// Largest |d S_jj / d u_j| entry over all blocks j and coordinates of u_j.
/// Zero (up to round-off) exactly when each block ignores its own particle.
inline double block_self_derivative_max(const Ensemble& e, const CovarianceScheme& s, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::NumericalFailure, "finite-difference step must be > 0");
  double worst = 0.0;
  Ensemble probe = e;
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    for (Eigen::Index m = 0; m < e.dim(); ++m) {
      const double orig = e.particles()(m, j);
      probe.particles()(m, j) = orig + h;
      const SymMatrix plus = preconditioner(probe, s, j);
      probe.particles()(m, j) = orig - h;
      const SymMatrix minus = preconditioner(probe, s, j);
      probe.particles()(m, j) = orig;
      worst = std::max(worst, ((plus.matrix() - minus.matrix()) / (2.0 * h)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace ilps
