#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ilps/dynamics.hpp"

using namespace ilps;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

/// Push-forward of a potential through v = A u + b.
class AffinePotential final : public Potential {
 public:
  AffinePotential(const Potential& base, Matrix a, Vector b)
      : base_(base), a_(std::move(a)), b_(std::move(b)), a_inv_(a_.inverse()) {}
  Eigen::Index dim() const override { return base_.dim(); }
  Vector grad(const Vector& v) const override {
    return a_inv_.transpose() * base_.grad(a_inv_ * (v - b_));
  }
  std::string name() const override { return "affine"; }

 private:
  const Potential& base_;
  Matrix a_;
  Vector b_;
  Matrix a_inv_;
};

/// Relabels particles before delegating, so particle i draws the noise of perm[i].
struct PermutedNoise {
  const NoiseStream& inner;
  std::vector<std::uint64_t> perm;
  double normal(std::uint64_t step, std::uint64_t particle, std::uint64_t comp) const {
    return inner.normal(step, perm[particle], comp);
  }
};

GaussianPotential correlated_gaussian(Eigen::Index d) {
  std::mt19937_64 rng(400 + static_cast<unsigned>(d));
  const Matrix m = random_matrix(rng, d, d);
  return GaussianPotential(random_matrix(rng, d, 1).col(0),
                           SymMatrix::symmetrize(m * m.transpose() + Matrix::Identity(d, d)));
}

StepConfig step_config(double dt, std::uint64_t n, std::uint64_t seed) {
  StepConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = n;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Variant, LeaveOneOutSchemeNeedsLeaveOneOutVariant) {
  EXPECT_THROW(DynamicsVariant::corrected(scheme::LeaveOneOut{}), Error);
  EXPECT_THROW(DynamicsVariant::uncorrected(scheme::LeaveOneOut{}), Error);
  EXPECT_TRUE(is_leave_one_out(DynamicsVariant::leave_one_out().scheme()));
  EXPECT_FALSE(DynamicsVariant::leave_one_out().applies_correction());
}

TEST(Drift, UncorrectedHandValue) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const PointCloud f = drift(Ensemble(PointCloud{{-1.0, 1.0}}), p, DynamicsVariant::uncorrected());
  EXPECT_DOUBLE_EQ(f(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f(0, 1), -1.0);
}

TEST(Drift, CorrectedBalancesExactly) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const PointCloud f = drift(Ensemble(PointCloud{{-1.0, 1.0}}), p, DynamicsVariant::corrected());
  EXPECT_EQ(f(0, 0), 0.0);
  EXPECT_EQ(f(0, 1), 0.0);
}

TEST(Drift, CollapsedAtMeanIsZero) {
  const GaussianPotential p = correlated_gaussian(3);
  const Ensemble e(p.target_moments()->mean.replicate(1, 5));
  EXPECT_EQ(drift(e, p, DynamicsVariant::uncorrected()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Drift, DimensionMismatch) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  EXPECT_THROW(drift(Ensemble(PointCloud::Zero(2, 3)), p, DynamicsVariant::uncorrected()), Error);
}

TEST(Drift, CorrectionDoesNotMoveTheMean) {
  std::mt19937_64 rng(41);
  for (Eigen::Index d : {1, 2, 4}) {
    const GaussianPotential p = correlated_gaussian(d);
    const Ensemble e(random_matrix(rng, d, 7));
    for (const CovarianceScheme& s : {CovarianceScheme{scheme::Full{}},
                                      CovarianceScheme{scheme::Regularized(0.3, SymMatrix::identity(d))}}) {
      const Vector a = drift(e, p, DynamicsVariant::uncorrected(s)).rowwise().mean();
      const Vector b = drift(e, p, DynamicsVariant::corrected(s)).rowwise().mean();
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Drift, AffineEquivariance) {
  std::mt19937_64 rng(42);
  for (Eigen::Index d : {1, 2, 3, 5}) {
    const GaussianPotential base = correlated_gaussian(d);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix a = random_matrix(rng, d, d) + 2.0 * Matrix::Identity(d, d);
      const Vector shift = random_matrix(rng, d, 1).col(0);
      const AffinePotential pushed(base, a, shift);
      const Ensemble e(random_matrix(rng, d, 2 * d + 2));
      const Ensemble mapped((a * e.particles()).colwise() + shift);
      for (const auto& v : {DynamicsVariant::uncorrected(), DynamicsVariant::corrected()}) {
        const PointCloud lhs = drift(mapped, pushed, v);
        const PointCloud rhs = a * drift(e, base, v);
        EXPECT_LE((lhs - rhs).norm() / rhs.norm(), 1e-10) << v.name() << " d=" << d;
      }
    }
  }
}

TEST(EmStep, ZeroNoiseIsExplicitEuler) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const Ensemble next = em_step(Ensemble(PointCloud{{-1.0, 1.0}}), p, DynamicsVariant::uncorrected(),
                                step_config(0.1, 1, 0), 0, ZeroNoise{});
  EXPECT_DOUBLE_EQ(next.particles()(0, 0), -0.9);
  EXPECT_DOUBLE_EQ(next.particles()(0, 1), 0.9);
}

TEST(EmStep, ContinuousInDt) {
  const GaussianPotential p(Vector::Zero(3), SymMatrix::identity(3));
  const Ensemble e = gaussian_ensemble(Vector::Zero(3), 1.0, 6, 5);
  for (const auto& v : {DynamicsVariant::uncorrected(), DynamicsVariant::corrected(), DynamicsVariant::leave_one_out()}) {
    const Ensemble next = em_step(e, p, v, step_config(1e-12, 1, 9), 0);
    EXPECT_LE((next.particles() - e.particles()).cwiseAbs().maxCoeff(), 1e-5) << v.name();
  }
}

TEST(EmStep, DeterministicGivenSeed) {
  const GaussianPotential p = correlated_gaussian(2);
  const Ensemble e = gaussian_ensemble(Vector::Zero(2), 1.0, 5, 3);
  const auto cfg = step_config(0.01, 1, 77);
  EXPECT_EQ(em_step(e, p, DynamicsVariant::corrected(), cfg, 12), em_step(e, p, DynamicsVariant::corrected(), cfg, 12));
  EXPECT_FALSE(em_step(e, p, DynamicsVariant::corrected(), cfg, 12) == em_step(e, p, DynamicsVariant::corrected(), cfg, 13));
}

TEST(EmStep, CollapsedUncorrectedEnsembleFreezes) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const Ensemble e(PointCloud::Constant(1, 4, 2.5));
  const Ensemble next = em_step(e, p, DynamicsVariant::uncorrected(), step_config(0.1, 1, 1), 0);
  EXPECT_EQ(next, e);
}

TEST(EmStep, LeaveOneOutNeedsThreeParticles) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  EXPECT_THROW(em_step(Ensemble(PointCloud{{0.0, 1.0}}), p, DynamicsVariant::leave_one_out(), step_config(0.1, 1, 1), 0),
               Error);
}

TEST(Simulate, Bookkeeping) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const Ensemble e0(PointCloud{{-1.0, 0.0, 1.0}});
  const Trajectory t = simulate(e0, p, DynamicsVariant::corrected(), step_config(0.01, 1, 1), 1);
  ASSERT_EQ(t.snapshots.size(), 2u);
  EXPECT_EQ(t.snapshots[0].ensemble, e0);
  EXPECT_EQ(t.snapshots[1].step, 1u);
  EXPECT_DOUBLE_EQ(t.snapshots[1].time, 0.01);

  const Trajectory t2 = simulate(e0, p, DynamicsVariant::corrected(), step_config(0.01, 25, 1), 10);
  ASSERT_EQ(t2.snapshots.size(), 3u);
  EXPECT_EQ(t2.snapshots[2].step, 20u);
  const Trajectory t3 = simulate(e0, p, DynamicsVariant::corrected(), step_config(0.01, 20, 1), 20);
  EXPECT_EQ(t2.snapshots[2].ensemble, t3.snapshots[1].ensemble);
}

TEST(Simulate, RejectsBadConfig) {
  const GaussianPotential p = GaussianPotential::scalar(1.0);
  const Ensemble e0(PointCloud{{-1.0, 1.0}});
  EXPECT_THROW(simulate(e0, p, DynamicsVariant::corrected(), step_config(0.01, 0, 1), 1), Error);
  EXPECT_THROW(simulate(e0, p, DynamicsVariant::corrected(), step_config(-0.01, 5, 1), 1), Error);
  EXPECT_THROW(simulate(e0, p, DynamicsVariant::corrected(), step_config(0.01, 5, 1), 0), Error);
}

TEST(Simulate, BitwiseDeterministic) {
  const GaussianPotential p = correlated_gaussian(3);
  const Ensemble e0 = gaussian_ensemble(Vector::Zero(3), 1.0, 8, 4);
  for (const auto& v : {DynamicsVariant::uncorrected(), DynamicsVariant::corrected(), DynamicsVariant::leave_one_out()}) {
    const Trajectory a = simulate(e0, p, v, step_config(0.01, 200, 99), 7);
    const Trajectory b = simulate(e0, p, v, step_config(0.01, 200, 99), 7);
    ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) EXPECT_EQ(a.snapshots[i].ensemble, b.snapshots[i].ensemble);
  }
}

TEST(Simulate, NonFiniteAbortReportsStep) {
  const GaussianPotential stiff = GaussianPotential::scalar(0.01);
  const Ensemble e0 = gaussian_ensemble(Vector::Zero(1), 1.0, 4, 2);
  try {
    simulate(e0, stiff, DynamicsVariant::uncorrected(), step_config(1.0, 100000, 1), 1);
    FAIL() << "expected blow-up";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    EXPECT_LT(e.step(), 100000u);
  }
}

TEST(Simulate, SubspaceConfinementForSmallEnsembles) {
  const Eigen::Index d = 5;
  const GaussianPotential p = correlated_gaussian(d);
  for (Eigen::Index n : {2, 3, 5}) {
    const Ensemble e0 = gaussian_ensemble(Vector::Constant(d, 0.5), 1.0, n, 10 + static_cast<unsigned>(n));
    const Vector origin = e0.mean();
    const Matrix spread = e0.particles().colwise() - origin;
    Eigen::JacobiSVD<Matrix> svd(spread, Eigen::ComputeFullU);
    const auto rank = (svd.singularValues().array() > 1e-12 * svd.singularValues()(0)).count();
    const Matrix basis = svd.matrixU().leftCols(rank);
    const Matrix proj_out = Matrix::Identity(d, d) - basis * basis.transpose();
    for (const auto& v : {DynamicsVariant::uncorrected(), DynamicsVariant::corrected()}) {
      const Trajectory t = simulate(e0, p, v, step_config(0.001, 1000, 5), 10);
      for (const auto& snap : t.snapshots) {
        const Matrix off = proj_out * (snap.ensemble.particles().colwise() - origin);
        const double scale = 1.0 + snap.ensemble.particles().cwiseAbs().maxCoeff();
        ASSERT_LE(off.colwise().norm().maxCoeff(), 1e-8 * scale) << v.name() << " J=" << n << " step " << snap.step;
      }
    }
  }
}

TEST(Simulate, ExchangeableUnderRelabeling) {
  const GaussianPotential p = correlated_gaussian(2);
  const Ensemble e0 = gaussian_ensemble(Vector::Zero(2), 1.0, 6, 8);
  const std::vector<std::uint64_t> perm{3, 0, 5, 1, 4, 2};
  PointCloud permuted(2, 6);
  for (Eigen::Index i = 0; i < 6; ++i) permuted.col(i) = e0.particles().col(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
  const NoiseStream noise(31);
  const PermutedNoise relabeled{noise, perm};
  const auto cfg = step_config(0.01, 100, 31);
  for (const auto& v : {DynamicsVariant::uncorrected(), DynamicsVariant::corrected(), DynamicsVariant::leave_one_out()}) {
    const Trajectory a = simulate(e0, p, v, cfg, 10, noise);
    const Trajectory b = simulate(Ensemble(permuted), p, v, cfg, 10, relabeled);
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
      for (Eigen::Index i = 0; i < 6; ++i) {
        const auto src = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]);
        EXPECT_LE((b.snapshots[s].ensemble.particle(i) - a.snapshots[s].ensemble.particle(src)).cwiseAbs().maxCoeff(),
                  1e-10)
            << v.name();
      }
    }
  }
}

TEST(GaussianEnsemble, ReproducibleAndShaped) {
  const Ensemble a = gaussian_ensemble(Vector{{1.0, 2.0}}, 0.5, 4, 3);
  EXPECT_EQ(a, gaussian_ensemble(Vector{{1.0, 2.0}}, 0.5, 4, 3));
  EXPECT_EQ(a.dim(), 2);
  EXPECT_EQ(a.size(), 4);
  EXPECT_THROW(gaussian_ensemble(Vector::Zero(1), 1.0, 1, 3), Error);
}
