#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "ilps/potentials.hpp"

using namespace ilps;

namespace {

std::string write_temp(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("ilps_potentials_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

void expect_data_error(const std::string& path, const std::string& fragment) {
  try {
    load_regression(path, 1.0, 1.0);
    FAIL() << "expected DataError for " << path;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DataError);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

void check_gradient(const Potential& p, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> g(0.0, spread);
  for (int trial = 0; trial < 100; ++trial) {
    Vector u(p.dim());
    for (auto& v : u) v = g(rng);
    const Vector grad = p.grad(u);
    Vector fd(p.dim());
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(u(i)));
      Vector up = u, dn = u;
      up(i) += h;
      dn(i) -= h;
      fd(i) = (*p.value(up) - *p.value(dn)) / (2.0 * h);
    }
    const double scale = std::max(grad.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LE((fd - grad).cwiseAbs().maxCoeff() / scale, 1e-6) << p.name();
  }
}

}  // namespace

TEST(GradPsi, GaussianExamples) {
  const GaussianPotential unit = GaussianPotential::scalar(1.0);
  EXPECT_EQ(grad_psi(unit, Vector::Zero(1))(0), 0.0);
  const GaussianPotential wide = GaussianPotential::scalar(2.0);
  EXPECT_DOUBLE_EQ(grad_psi(wide, Vector::Constant(1, 2.0))(0), 0.5);
}

TEST(GradPsi, DoubleWellExamples) {
  const DoubleWellPotential dw;
  EXPECT_EQ(grad_psi(dw, Vector::Constant(1, 1.0))(0), 0.0);
  EXPECT_DOUBLE_EQ(grad_psi(dw, Vector::Constant(1, 0.5))(0), -1.5);
  EXPECT_GE(*dw.value(Vector::Constant(1, 0.3)), 0.0);
}

TEST(GradPsi, DimensionMismatch) {
  const GaussianPotential p(Vector::Zero(2), SymMatrix::identity(2));
  try {
    p.grad(Vector::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadDimension);
  }
}

TEST(GradPsi, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(31);
  const GaussianPotential g(Vector{{1.0, -2.0, 0.5}},
                            SymMatrix::from_exact(Matrix{{2.0, 0.3, 0.0}, {0.3, 1.0, -0.2}, {0.0, -0.2, 0.5}}));
  check_gradient(g, rng, 2.0);
  check_gradient(DoubleWellPotential{}, rng, 1.5);
  const LinearRegressionPotential reg(Matrix{{1.0, 0.5}, {-0.3, 2.0}, {0.7, 0.1}}, Vector{{1.0, 2.0, -1.0}}, 0.5, 3.0);
  check_gradient(reg, rng, 2.0);
}

TEST(GaussianPotentialType, TargetMomentsExact) {
  const Vector m{{1.0, 2.0}};
  const SymMatrix c = SymMatrix::from_exact(Matrix{{2.0, 0.5}, {0.5, 1.0}});
  const GaussianPotential p(m, c);
  const auto t = p.target_moments();
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->mean, m);
  EXPECT_EQ(t->covariance, c);
}

TEST(GaussianPotentialType, RejectsIndefiniteCovariance) {
  EXPECT_THROW(GaussianPotential(Vector::Zero(2), SymMatrix::diagonal(Vector{{1.0, -1.0}})), Error);
  EXPECT_THROW(GaussianPotential::scalar(0.0), Error);
}

TEST(RegressionPotential, PrecisionTimesCovarianceIsIdentity) {
  const LinearRegressionPotential reg(Matrix{{1.0, 0.5}, {-0.3, 2.0}, {0.7, 0.1}}, Vector{{1.0, 2.0, -1.0}}, 0.5, 3.0);
  const Matrix prod = reg.precision().matrix() * reg.target_moments()->covariance.matrix();
  EXPECT_LE((prod - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RegressionPotential, RejectsBadScales) {
  EXPECT_THROW(LinearRegressionPotential(Matrix::Ones(2, 1), Vector::Ones(2), 0.0, 1.0), Error);
  EXPECT_THROW(LinearRegressionPotential(Matrix::Ones(2, 1), Vector::Ones(2), 1.0, -1.0), Error);
}

TEST(LoadRegression, FlatPriorLimit) {
  const auto path = write_temp("flat.csv", "x_0,y\n1,1\n1,1\n");
  const auto reg = load_regression(path, 1.0, 1e6);
  const auto t = *reg.target_moments();
  EXPECT_NEAR(t.mean(0), 1.0, 1e-9);
  EXPECT_NEAR(t.covariance(0, 0), 0.5, 1e-9);
}

TEST(LoadRegression, EmptyFile) { expect_data_error(write_temp("empty.csv", ""), "empty"); }

TEST(LoadRegression, HeaderOnly) { expect_data_error(write_temp("header.csv", "x_0,y\n"), "n = 0"); }

TEST(LoadRegression, NanEntryReportsLocation) {
  expect_data_error(write_temp("nan.csv", "x_0,x_1,y\n1,2,3\n4,nan,6\n"), "row 3, column 2");
}

TEST(LoadRegression, MissingField) {
  expect_data_error(write_temp("short.csv", "x_0,x_1,y\n1,2,3\n4,6\n"), "row 3");
}

TEST(LoadRegression, BadHeader) {
  expect_data_error(write_temp("badheader.csv", "a,b,y\n1,2,3\n"), "x_0");
  expect_data_error(write_temp("nofile.csv", "x_0,target\n1,2\n"), "'y'");
}

TEST(LoadRegression, MissingFile) {
  expect_data_error("/nonexistent/ilps/data.csv", "cannot open");
}

TEST(LoadRegression, PosteriorMeanNearTruth) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g;
  const Vector truth{{0.8, -1.2}};
  const double gamma = 0.1;
  std::string csv = "x_0,x_1,y\n";
  for (int i = 0; i < 3; ++i) {
    const double a0 = g(rng), a1 = g(rng);
    const double y = a0 * truth(0) + a1 * truth(1) + gamma * g(rng);
    csv += std::to_string(a0) + "," + std::to_string(a1) + "," + std::to_string(y) + "\n";
  }
  const auto reg = load_regression(write_temp("synthetic.csv", csv), gamma, 10.0);
  const auto t = *reg.target_moments();
  EXPECT_EQ(reg.n_obs(), 3);
  for (Eigen::Index i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(t.mean(i) - truth(i)), 3.0 * std::sqrt(t.covariance(i, i)));
  }
}
