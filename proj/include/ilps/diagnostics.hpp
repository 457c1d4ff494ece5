#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ilps/dynamics.hpp"

namespace ilps {

struct MomentEstimate {
  Vector mean;
  SymMatrix covariance;
  std::uint64_t n_samples_raw = 0;
  double ess = 0.0;
  Vector stderr_mean;  ///< sqrt(var_c / ess)
  Vector stderr_var;   ///< sqrt(2 var_c^2 / ess), the Gaussian asymptotic formula
};

/// Biased (1/T) autocovariance of a centered series at lags 0..T-1, via zero-padded FFT.
inline std::vector<double> autocovariance(const std::vector<double>& centered) {
  const std::size_t n = centered.size();
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  std::vector<double> padded(len, 0.0);
  std::copy(centered.begin(), centered.end(), padded.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (auto& z : spec) z = std::norm(z);
  std::vector<double> acf;
  fft.inv(acf, spec);
  acf.resize(n);
  for (auto& v : acf) v /= static_cast<double>(n);
  return acf;
}

/// Integrated autocorrelation time of exchangeable chains (equal lengths).
///
/// The autocovariance is averaged over chains, each centered at the pooled
/// mean, and the sum is truncated with Geyer's initial positive sequence
/// rule.  Returns nullopt when the pooled series has zero variance.
inline std::optional<double> integrated_autocorr_time(const std::vector<std::vector<double>>& chains) {
  if (chains.empty() || chains.front().size() < 2) {
    throw Error(ErrorCode::InsufficientData, "autocorrelation needs at least 2 samples");
  }
  const std::size_t t_len = chains.front().size();
  double mu = 0.0;
  for (const auto& c : chains) {
    if (c.size() != t_len) throw Error(ErrorCode::BadDimension, "chains must have equal length");
    for (double x : c) mu += x;
  }
  mu /= static_cast<double>(t_len * chains.size());

  std::vector<double> gamma(t_len, 0.0);
  std::vector<double> centered(t_len);
  for (const auto& c : chains) {
    for (std::size_t t = 0; t < t_len; ++t) centered[t] = c[t] - mu;
    const auto acf = autocovariance(centered);
    for (std::size_t k = 0; k < t_len; ++k) gamma[k] += acf[k];
  }
  if (!(gamma[0] > 0.0)) return std::nullopt;

  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < t_len; ++k) {
    const double pair = (gamma[2 * k] + gamma[2 * k + 1]) / gamma[0];
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  return std::max(tau, 1.0 / static_cast<double>(t_len));
}

/// Moments pooled over particles and post-burn-in snapshots.
///
/// ESS = J * min_c (T / tau_c), clamped to [1, J*T]; components with zero
/// variance are skipped and a fully constant trajectory gets ESS = 1.
inline MomentEstimate pooled_moments(const Trajectory& traj, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw Error(ErrorCode::ConfigError, "burn_in_fraction must lie in [0,1)");
  }
  const std::size_t n_snap = traj.snapshots.size();
  const auto skip = static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(n_snap)));
  const std::size_t t_len = n_snap - skip;
  if (t_len < 10) {
    throw Error(ErrorCode::InsufficientData, "need >= 10 snapshots after burn-in, have " + std::to_string(t_len));
  }
  const Eigen::Index d = traj.dim();
  const Eigen::Index n_part = traj.n_particles();

  PointCloud pooled(d, static_cast<Eigen::Index>(t_len) * n_part);
  for (std::size_t t = 0; t < t_len; ++t) {
    pooled.middleCols(static_cast<Eigen::Index>(t) * n_part, n_part) = traj.snapshots[skip + t].ensemble.particles();
  }
  const double n_raw = static_cast<double>(pooled.cols());

  MomentEstimate est;
  est.n_samples_raw = static_cast<std::uint64_t>(pooled.cols());
  est.mean = pooled.rowwise().mean();
  const Matrix centered = pooled.colwise() - est.mean;
  Matrix cov = Matrix::Zero(d, d);
  cov.selfadjointView<Eigen::Upper>().rankUpdate(centered, 1.0 / (n_raw - 1.0));
  est.covariance = SymMatrix::from_upper(cov);

  double ess = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> chains(static_cast<std::size_t>(n_part), std::vector<double>(t_len));
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index j = 0; j < n_part; ++j) {
      for (std::size_t t = 0; t < t_len; ++t) {
        chains[static_cast<std::size_t>(j)][t] = traj.snapshots[skip + t].ensemble.particles()(c, j);
      }
    }
    if (const auto tau = integrated_autocorr_time(chains)) {
      ess = std::min(ess, static_cast<double>(n_part) * static_cast<double>(t_len) / *tau);
    }
  }
  if (!std::isfinite(ess)) ess = 1.0;
  est.ess = std::clamp(ess, 1.0, n_raw);

  const Vector var = est.covariance.matrix().diagonal();
  est.stderr_mean = (var / est.ess).cwiseSqrt();
  est.stderr_var = (2.0 * var.cwiseAbs2() / est.ess).cwiseSqrt();
  return est;
}

/// KL(N(m1, c1) || N(m2, c2)), clamped at 0 against round-off.
inline double gaussian_kl(const Vector& m1, const SymMatrix& c1, const Vector& m2, const SymMatrix& c2) {
  const Eigen::Index d = m1.size();
  if (m2.size() != d || c1.dim() != d || c2.dim() != d) {
    throw Error(ErrorCode::BadDimension, "gaussian_kl dimension mismatch");
  }
  Eigen::LLT<Matrix> l2(c2.matrix());
  if (l2.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "c2 is not positive definite");
  Eigen::LLT<Matrix> l1(c1.matrix());
  if (l1.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "c1 is not positive definite");

  const Vector diff = m2 - m1;
  const double trace_term = l2.solve(c1.matrix()).trace();
  const double quad = diff.dot(l2.solve(diff));
  const double logdet2 = 2.0 * l2.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet1 = 2.0 * l1.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double kl = 0.5 * (trace_term + quad - static_cast<double>(d) + logdet2 - logdet1);
  return std::max(kl, 0.0);
}

struct KlPoint {
  double time;
  double kl;  ///< +infinity when the window covariance is degenerate
};

/// Gaussian-fit KL against the target over consecutive non-overlapping windows
/// of `window` snapshots; each point is stamped with the window's last time.
inline std::vector<KlPoint> kl_trace(const Trajectory& traj, const GaussianMoments& target, std::size_t window) {
  if (window < 10) throw Error(ErrorCode::ConfigError, "kl window must be >= 10 snapshots");
  const Eigen::Index n_part = traj.n_particles();
  std::vector<KlPoint> out;
  for (std::size_t start = 0; start + window <= traj.snapshots.size(); start += window) {
    PointCloud pooled(traj.dim(), static_cast<Eigen::Index>(window) * n_part);
    for (std::size_t t = 0; t < window; ++t) {
      pooled.middleCols(static_cast<Eigen::Index>(t) * n_part, n_part) =
          traj.snapshots[start + t].ensemble.particles();
    }
    const Vector mean = pooled.rowwise().mean();
    const Matrix centered = pooled.colwise() - mean;
    Matrix cov = Matrix::Zero(traj.dim(), traj.dim());
    cov.selfadjointView<Eigen::Upper>().rankUpdate(centered, 1.0 / static_cast<double>(pooled.cols() - 1));
    const SymMatrix fitted = SymMatrix::from_upper(cov);

    double kl = std::numeric_limits<double>::infinity();
    if (is_positive_definite(fitted)) {
      try {
        kl = gaussian_kl(mean, fitted, target.mean, target.covariance);
      } catch (const Error&) {
        kl = std::numeric_limits<double>::infinity();
      }
    }
    out.push_back({traj.snapshots[start + window - 1].time, kl});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variance-bias study

struct BiasStudyConfig {
  double dt = 0.005;
  std::uint64_t n_steps = 400000;
  std::uint64_t seed = 1;
  std::uint64_t record_every = 10;
  double burn_in_fraction = 0.25;
};

struct BiasStudyRow {
  std::int64_t n_particles;
  double sigma2_hat;
  double sigma2_pred;  ///< (J - 2) / J * b^2
  double stderr;
};

inline double predicted_uncorrected_variance(std::int64_t n_particles, double b) {
  const auto j = static_cast<double>(n_particles);
  return (j - 2.0) / j * b * b;
}

/// Runs the uncorrected dynamics on the 1D Gaussian target N(0, b^2) once per
/// ensemble size and compares the pooled variance with (J - 2)/J * b^2.
inline std::vector<BiasStudyRow> bias_study(const std::vector<std::int64_t>& sizes, double b,
                                            const BiasStudyConfig& cfg) {
  for (auto j : sizes) {
    if (j < 3) throw Error(ErrorCode::ConfigError, "bias study needs J >= 3, got " + std::to_string(j));
  }
  const GaussianPotential target = GaussianPotential::scalar(b);
  std::vector<BiasStudyRow> rows;
  for (auto j : sizes) {
    const std::uint64_t run_seed = mix_seed(cfg.seed ^ mix_seed(static_cast<std::uint64_t>(j)));
    const Ensemble e0 = gaussian_ensemble(Vector::Zero(1), b, j, run_seed);
    StepConfig step;
    step.dt = cfg.dt;
    step.n_steps = cfg.n_steps;
    step.seed = run_seed;
    const Trajectory traj = simulate(e0, target, DynamicsVariant::uncorrected(), step, cfg.record_every);
    const MomentEstimate est = pooled_moments(traj, cfg.burn_in_fraction);
    rows.push_back({j, est.covariance(0, 0), predicted_uncorrected_variance(j, b), est.stderr_var(0)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Finite-difference check of the closed-form divergence of S(U)

struct DivergenceCase {
  Eigen::Index dim;
  Eigen::Index n_particles;
};

struct DivergenceRow {
  Eigen::Index dim;
  Eigen::Index n_particles;
  std::string scheme;
  /// Full/Regularized: max over trials of |fd - closed form|_inf / |closed form|_inf.
  /// LeaveOneOut: max |d C_[j] / d u_j| over trials (absolute).
  double max_rel_err;
  bool pass;
  /// First trial's ensemble and closed-form correction (Full rows only).
  std::optional<PointCloud> sample_particles;
  std::optional<PointCloud> sample_correction;
};

struct DivergenceCheckConfig {
  std::size_t trials = 50;
  std::optional<double> h;  ///< default: 1e-5 * (1 + |U|_inf) per ensemble
  double tol = 1e-6;
  double loo_tol = 1e-8;
  double alpha = 0.5;
  std::uint64_t seed = 1;
};

inline double relative_inf_error(const PointCloud& approx, const PointCloud& exact) {
  const double err = (approx - exact).cwiseAbs().maxCoeff();
  const double scale = exact.cwiseAbs().maxCoeff();
  return scale > 0.0 ? err / scale : err;
}

/// For d=1, J=2 the first trial uses the hand-checkable ensemble {0, 2}.
inline std::vector<DivergenceRow> divergence_report(const std::vector<DivergenceCase>& cases, const DivergenceCheckConfig& cfg) {
  std::vector<DivergenceRow> rows;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto [d, n] = cases[ci];
    if (d < 1 || n < 2) {
      throw Error(ErrorCode::ConfigError, "divergence case needs d >= 1 and J >= 2");
    }
    const CovarianceScheme full = scheme::Full{};
    const CovarianceScheme reg = scheme::Regularized(cfg.alpha, SymMatrix::identity(d));
    DivergenceRow full_row{d, n, "full", 0.0, true, std::nullopt, std::nullopt};
    DivergenceRow reg_row{d, n, "regularized", 0.0, true, std::nullopt, std::nullopt};
    DivergenceRow loo_row{d, n, "leave_one_out", 0.0, true, std::nullopt, std::nullopt};

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t s = mix_seed(cfg.seed ^ mix_seed((ci << 32) | trial));
      Ensemble e = (d == 1 && n == 2 && trial == 0)
                       ? Ensemble(PointCloud{{0.0, 2.0}})
                       : gaussian_ensemble(Vector::Zero(d), 1.0, n, s);
      const double h = cfg.h.value_or(default_fd_step(e));

      const PointCloud exact_full = divergence_correction(e, full);
      full_row.max_rel_err =
          std::max(full_row.max_rel_err, relative_inf_error(divergence_fd_oracle(e, full, h), exact_full));
      reg_row.max_rel_err = std::max(
          reg_row.max_rel_err, relative_inf_error(divergence_fd_oracle(e, reg, h), divergence_correction(e, reg)));
      if (n >= 3) {
        loo_row.max_rel_err = std::max(loo_row.max_rel_err, block_self_derivative_max(e, scheme::LeaveOneOut{}, h));
      }
      if (trial == 0) {
        full_row.sample_particles = e.particles();
        full_row.sample_correction = exact_full;
      }
    }
    full_row.pass = full_row.max_rel_err <= cfg.tol;
    reg_row.pass = reg_row.max_rel_err <= cfg.tol;
    loo_row.pass = loo_row.max_rel_err <= cfg.loo_tol;
    rows.push_back(std::move(full_row));
    rows.push_back(std::move(reg_row));
    if (n >= 3) rows.push_back(std::move(loo_row));
  }
  return rows;
}

}  // namespace ilps
