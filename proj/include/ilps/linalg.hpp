#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ilps/error.hpp"

namespace ilps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point clouds are stored column-wise: a d x J matrix holds J points in R^d.
using PointCloud = Eigen::MatrixXd;

/// A dense symmetric matrix whose stored entries are exactly symmetric.
///
/// Construction from an arbitrary matrix either rejects asymmetric input
/// (`from_exact`) or mirrors the upper triangle (`from_upper`).  Results of
/// arithmetic that is symmetric in exact arithmetic but not bitwise symmetric
/// in floating point go through `symmetrize`.
class SymMatrix {
 public:
  SymMatrix() : m_(Matrix::Zero(1, 1)) {}

  static SymMatrix zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(checked_dim(dim), dim)); }
  static SymMatrix identity(Eigen::Index dim) {
    return SymMatrix(Matrix::Identity(checked_dim(dim), dim));
  }
  static SymMatrix diagonal(const Vector& diag) {
    return SymMatrix(Matrix(diag.asDiagonal()));
  }

  static SymMatrix from_exact(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(ErrorCode::BadDimension, "symmetric matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
        if (m(i, j) != m(j, i)) {
          throw Error(ErrorCode::BadDimension, "matrix is not symmetric at (" + std::to_string(i) +
                                                   "," + std::to_string(j) + ")");
        }
      }
    }
    return SymMatrix(m);
  }

  static SymMatrix from_upper(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(ErrorCode::BadDimension, "symmetric matrix must be square and non-empty");
    }
    Matrix out = m.triangularView<Eigen::Upper>();
    out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
    return SymMatrix(std::move(out));
  }

  static SymMatrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(ErrorCode::BadDimension, "symmetric matrix must be square and non-empty");
    }
    Matrix out = 0.5 * (m + m.transpose());
    return from_upper(out);
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix scaled(double s) const { return SymMatrix(s * m_); }

  /// alpha * a + beta * b, entrywise; symmetric inputs give exactly symmetric output.
  static SymMatrix combine(double alpha, const SymMatrix& a, double beta, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::BadDimension, "dimension mismatch in combine");
    return SymMatrix(alpha * a.m_ + beta * b.m_);
  }

  bool operator==(const SymMatrix& o) const { return m_.rows() == o.m_.rows() && m_ == o.m_; }

 private:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {}

  static Eigen::Index checked_dim(Eigen::Index dim) {
    if (dim < 1) throw Error(ErrorCode::BadDimension, "dimension must be >= 1");
    return dim;
  }

  Matrix m_;
};

inline Vector sample_mean(const PointCloud& points) {
  if (points.cols() == 0) throw Error(ErrorCode::EmptyEnsemble, "sample mean of no points");
  return points.rowwise().mean();
}

/// (1/J) sum_k (u_k - mean)(u_k - mean)^T, computed from centered residuals.
inline SymMatrix empirical_covariance(const PointCloud& points) {
  if (points.cols() == 0) throw Error(ErrorCode::EmptyEnsemble, "covariance of no points");
  const Matrix centered = points.colwise() - sample_mean(points);
  Matrix cov = Matrix::Zero(points.rows(), points.rows());
  cov.selfadjointView<Eigen::Upper>().rankUpdate(centered, 1.0 / static_cast<double>(points.cols()));
  return SymMatrix::from_upper(cov);
}

/// Symmetric PSD square root via eigendecomposition.  Eigenvalues within
/// round-off of zero (|lambda| <= d * eps * max|lambda|) count as exact zeros,
/// otherwise their O(1e-8) roots leak noise out of the range of a singular
/// covariance.  Eigenvalues below `eigen_floor` are then raised to the floor.
inline SymMatrix psd_sqrt(const SymMatrix& m, double eigen_floor = 0.0) {
  if (!(eigen_floor >= 0.0)) throw Error(ErrorCode::NumericalFailure, "eigen_floor must be >= 0");
  if (m.dim() == 1) {
    return SymMatrix::from_exact(Matrix::Constant(1, 1, std::sqrt(std::max(m(0, 0), eigen_floor))));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "eigendecomposition did not converge");
  }
  const Vector& lambda = es.eigenvalues();
  const double cutoff =
      static_cast<double>(m.dim()) * std::numeric_limits<double>::epsilon() * lambda.cwiseAbs().maxCoeff();
  const Vector roots =
      lambda.unaryExpr([cutoff](double l) { return l <= cutoff ? 0.0 : l; }).cwiseMax(eigen_floor).cwiseSqrt();
  const Matrix& q = es.eigenvectors();
  return SymMatrix::symmetrize(q * roots.asDiagonal() * q.transpose());
}

inline Vector eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "eigendecomposition did not converge");
  }
  return es.eigenvalues();
}

inline bool is_positive_definite(const SymMatrix& m) { return eigenvalues(m).minCoeff() > 0.0; }

}  // namespace ilps
