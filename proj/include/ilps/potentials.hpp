#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "ilps/csv.hpp"
#include "ilps/linalg.hpp"

namespace ilps {

struct GaussianMoments {
  Vector mean;
  SymMatrix covariance;
};

/// Negative log-density Psi of the target pi* ~ exp(-Psi).
///
/// The dynamics only consume grad(); value() exists for gradient checks and
/// target_moments() for potentials whose target law is known in closed form.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual Eigen::Index dim() const = 0;
  virtual Vector grad(const Vector& u) const = 0;
  virtual std::optional<double> value(const Vector& /*u*/) const { return std::nullopt; }
  virtual std::optional<GaussianMoments> target_moments() const { return std::nullopt; }
  virtual std::string name() const = 0;

 protected:
  void check_dim(const Vector& u) const {
    if (u.size() != dim()) {
      throw Error(ErrorCode::BadDimension, name() + ": expected dimension " + std::to_string(dim()) +
                                               ", got " + std::to_string(u.size()));
    }
  }
};

inline Vector grad_psi(const Potential& p, const Vector& u) { return p.grad(u); }

/// Psi(u) = 1/2 (u - m)^T Sigma^{-1} (u - m).
class GaussianPotential final : public Potential {
 public:
  GaussianPotential(Vector mean, SymMatrix covariance)
      : mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (cov_.dim() != mean_.size()) throw Error(ErrorCode::BadDimension, "gaussian mean/covariance mismatch");
    Eigen::LLT<Matrix> llt(cov_.matrix());
    if (llt.info() != Eigen::Success || !is_positive_definite(cov_)) {
      throw Error(ErrorCode::ConfigError, "gaussian covariance must be positive definite");
    }
    precision_ = SymMatrix::symmetrize(llt.solve(Matrix::Identity(dim(), dim())));
  }

  /// One-dimensional target with variance b^2 centered at 0.
  static GaussianPotential scalar(double b) {
    if (!(b > 0.0)) throw Error(ErrorCode::ConfigError, "b must be > 0");
    return GaussianPotential(Vector::Zero(1), SymMatrix::identity(1).scaled(b * b));
  }

  Eigen::Index dim() const override { return mean_.size(); }

  Vector grad(const Vector& u) const override {
    check_dim(u);
    return precision_.matrix() * (u - mean_);
  }

  std::optional<double> value(const Vector& u) const override {
    check_dim(u);
    const Vector r = u - mean_;
    return 0.5 * r.dot(precision_.matrix() * r);
  }

  std::optional<GaussianMoments> target_moments() const override { return GaussianMoments{mean_, cov_}; }
  std::string name() const override { return "gaussian"; }

  const SymMatrix& precision() const noexcept { return precision_; }

 private:
  Vector mean_;
  SymMatrix cov_;
  SymMatrix precision_;
};

/// Psi(u) = (u^2 - 1)^2 in one dimension; non-convex, two modes at +-1.
class DoubleWellPotential final : public Potential {
 public:
  Eigen::Index dim() const override { return 1; }

  Vector grad(const Vector& u) const override {
    check_dim(u);
    const double x = u(0);
    return Vector::Constant(1, 4.0 * x * (x * x - 1.0));
  }

  std::optional<double> value(const Vector& u) const override {
    check_dim(u);
    const double s = u(0) * u(0) - 1.0;
    return s * s;
  }

  std::string name() const override { return "double_well"; }
};

/// Bayesian linear regression y = A u + N(0, gamma^2 I) with prior N(0, sigma0^2 I):
/// Psi(u) = |y - A u|^2 / (2 gamma^2) + |u|^2 / (2 sigma0^2).
class LinearRegressionPotential final : public Potential {
 public:
  LinearRegressionPotential(Matrix design, Vector obs, double gamma, double sigma0)
      : a_(std::move(design)), y_(std::move(obs)), gamma_(gamma), sigma0_(sigma0) {
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw Error(ErrorCode::ConfigError, "gamma must be > 0");
    if (!(sigma0_ > 0.0) || !std::isfinite(sigma0_)) throw Error(ErrorCode::ConfigError, "sigma0 must be > 0");
    if (a_.rows() == 0 || a_.cols() == 0) throw Error(ErrorCode::DataError, "regression needs n >= 1 and d >= 1");
    if (a_.rows() != y_.size()) throw Error(ErrorCode::BadDimension, "design/observation row mismatch");

    const Eigen::Index d = a_.cols();
    const Matrix prec = a_.transpose() * a_ / (gamma_ * gamma_) +
                        Matrix::Identity(d, d) / (sigma0_ * sigma0_);
    precision_ = SymMatrix::symmetrize(prec);
    Eigen::LLT<Matrix> llt(precision_.matrix());
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "posterior precision not PD");
    cov_ = SymMatrix::symmetrize(llt.solve(Matrix::Identity(d, d)));
    mean_ = llt.solve(a_.transpose() * y_ / (gamma_ * gamma_));
  }

  Eigen::Index dim() const override { return a_.cols(); }

  Vector grad(const Vector& u) const override {
    check_dim(u);
    return -a_.transpose() * (y_ - a_ * u) / (gamma_ * gamma_) + u / (sigma0_ * sigma0_);
  }

  std::optional<double> value(const Vector& u) const override {
    check_dim(u);
    return (y_ - a_ * u).squaredNorm() / (2.0 * gamma_ * gamma_) + u.squaredNorm() / (2.0 * sigma0_ * sigma0_);
  }

  std::optional<GaussianMoments> target_moments() const override { return GaussianMoments{mean_, cov_}; }
  std::string name() const override { return "regression"; }

  const SymMatrix& precision() const noexcept { return precision_; }
  const Matrix& design() const noexcept { return a_; }
  const Vector& observations() const noexcept { return y_; }
  Eigen::Index n_obs() const noexcept { return a_.rows(); }

 private:
  Matrix a_;
  Vector y_;
  double gamma_;
  double sigma0_;
  SymMatrix precision_;
  SymMatrix cov_;
  Vector mean_;
};

/// Reads a regression CSV with header `x_0,...,x_{d-1},y`.
inline LinearRegressionPotential load_regression(const std::string& csv_path, double gamma, double sigma0) {
  const csv::Table t = csv::read_numeric(csv_path);
  if (t.header.size() < 2) throw Error(ErrorCode::DataError, csv_path + ": header needs x_0..x_{d-1},y");
  const std::size_t d = t.header.size() - 1;
  for (std::size_t c = 0; c < d; ++c) {
    if (t.header[c] != "x_" + std::to_string(c)) {
      throw Error(ErrorCode::DataError, csv::location(csv_path, 1, c + 1) + ": expected header 'x_" +
                                            std::to_string(c) + "', got '" + t.header[c] + "'");
    }
  }
  if (t.header[d] != "y") {
    throw Error(ErrorCode::DataError, csv::location(csv_path, 1, d + 1) + ": expected header 'y'");
  }
  if (t.rows.empty()) throw Error(ErrorCode::DataError, csv_path + ": no data rows (n = 0)");

  const auto n = static_cast<Eigen::Index>(t.rows.size());
  Matrix a(n, static_cast<Eigen::Index>(d));
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < d; ++c) a(i, static_cast<Eigen::Index>(c)) = row[c];
    y(i) = row[d];
  }
  return LinearRegressionPotential(std::move(a), std::move(y), gamma, sigma0);
}

}  // namespace ilps
