#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ilps/ensemble.hpp"
#include "ilps/noise.hpp"
#include "ilps/potentials.hpp"

namespace ilps {

/// Which interacting Langevin SDE to integrate.
///
///   Uncorrected:  du_j = -C grad Psi(u_j) dt + sqrt(2C) dW_j
///   Corrected:    adds the divergence term div S(U) to the drift, which makes
///                 the product of posteriors invariant
///   LeaveOneOut:  block j uses C_[j], which ignores u_j; no correction needed
class DynamicsVariant {
 public:
  enum class Kind { Uncorrected, Corrected, LeaveOneOut };

  static DynamicsVariant uncorrected(CovarianceScheme s = scheme::Full{}) {
    return DynamicsVariant(Kind::Uncorrected, std::move(s));
  }
  static DynamicsVariant corrected(CovarianceScheme s = scheme::Full{}) {
    return DynamicsVariant(Kind::Corrected, std::move(s));
  }
  static DynamicsVariant leave_one_out() { return DynamicsVariant(Kind::LeaveOneOut, scheme::LeaveOneOut{}); }

  Kind kind() const noexcept { return kind_; }
  const CovarianceScheme& scheme() const noexcept { return scheme_; }
  bool applies_correction() const noexcept { return kind_ == Kind::Corrected; }

  std::string name() const {
    switch (kind_) {
      case Kind::Uncorrected: return "uncorrected";
      case Kind::Corrected: return "corrected";
      case Kind::LeaveOneOut: return "leave_one_out";
    }
    return "unknown";
  }

 private:
  DynamicsVariant(Kind k, CovarianceScheme s) : kind_(k), scheme_(std::move(s)) {
    if (kind_ != Kind::LeaveOneOut && is_leave_one_out(scheme_)) {
      throw Error(ErrorCode::ConfigError, "the leave-one-out scheme requires the leave_one_out variant");
    }
  }

  Kind kind_;
  CovarianceScheme scheme_;
};

struct StepConfig {
  double dt = 0.01;
  std::uint64_t n_steps = 1000;
  std::uint64_t seed = 0;
  double eigen_floor = 0.0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::ConfigError, "dt must be > 0");
    if (n_steps < 1) throw Error(ErrorCode::ConfigError, "n_steps must be >= 1");
    if (!(eigen_floor >= 0.0)) throw Error(ErrorCode::ConfigError, "eigen_floor must be >= 0");
  }
};

struct Snapshot {
  std::uint64_t step;
  double time;
  Ensemble ensemble;
};

struct Trajectory {
  double dt = 0.0;
  std::uint64_t record_every = 1;
  std::vector<Snapshot> snapshots;

  Eigen::Index dim() const { return snapshots.empty() ? 0 : snapshots.front().ensemble.dim(); }
  Eigen::Index n_particles() const { return snapshots.empty() ? 0 : snapshots.front().ensemble.size(); }
};

namespace detail {

inline void check_compatible(const Ensemble& e, const Potential& p, const DynamicsVariant& v) {
  if (e.dim() != p.dim()) {
    throw Error(ErrorCode::BadDimension, "ensemble dimension " + std::to_string(e.dim()) +
                                             " != potential dimension " + std::to_string(p.dim()));
  }
  if (v.kind() == DynamicsVariant::Kind::LeaveOneOut && e.size() < 3) {
    throw Error(ErrorCode::TooFewParticles, "leave-one-out dynamics needs J >= 3");
  }
}

inline PointCloud drift_with(const Ensemble& e, const Potential& p, const DynamicsVariant& v,
                             const std::vector<SymMatrix>& blocks) {
  PointCloud out(e.dim(), e.size());
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    out.col(j) = -(blocks[static_cast<std::size_t>(j)].matrix() * p.grad(e.particle(j)));
  }
  if (v.applies_correction()) out += divergence_correction(e, v.scheme());
  return out;
}

}  // namespace detail

/// Deterministic part of the particle velocities.
inline PointCloud drift(const Ensemble& e, const Potential& p, const DynamicsVariant& v) {
  detail::check_compatible(e, p, v);
  return detail::drift_with(e, p, v, preconditioners(e, v.scheme()));
}

/// One explicit Euler-Maruyama step with covariance and correction frozen at
/// the pre-step ensemble:
///   u_j <- u_j + drift_j dt + sqrt(2 C_j) xi_j sqrt(dt),
/// where xi_j(m) = noise.normal(step_index, j, m).
template <typename Noise = NoiseStream>
Ensemble em_step(const Ensemble& e, const Potential& p, const DynamicsVariant& v, const StepConfig& cfg,
                 std::uint64_t step_index, const Noise& noise) {
  detail::check_compatible(e, p, v);
  const std::vector<SymMatrix> blocks = preconditioners(e, v.scheme());
  const PointCloud drift_now = detail::drift_with(e, p, v, blocks);

  const bool shared_block = !is_leave_one_out(v.scheme());
  SymMatrix root;
  if (shared_block) root = psd_sqrt(blocks.front().scaled(2.0), cfg.eigen_floor);

  const double sqrt_dt = std::sqrt(cfg.dt);
  PointCloud next = e.particles() + cfg.dt * drift_now;
  Vector xi(e.dim());
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    for (Eigen::Index m = 0; m < e.dim(); ++m) {
      xi(m) = noise.normal(step_index, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(m));
    }
    if (shared_block) {
      next.col(j) += sqrt_dt * (root.matrix() * xi);
    } else {
      const SymMatrix own = psd_sqrt(blocks[static_cast<std::size_t>(j)].scaled(2.0), cfg.eigen_floor);
      next.col(j) += sqrt_dt * (own.matrix() * xi);
    }
  }
  if (!next.allFinite()) {
    throw NonFiniteError(step_index, "non-finite particle coordinate; reduce dt");
  }
  return Ensemble(std::move(next));
}

inline Ensemble em_step(const Ensemble& e, const Potential& p, const DynamicsVariant& v, const StepConfig& cfg,
                        std::uint64_t step_index) {
  return em_step(e, p, v, cfg, step_index, NoiseStream(cfg.seed));
}

/// Runs cfg.n_steps Euler-Maruyama steps, keeping the initial ensemble and
/// every state whose step index is a multiple of `record_every`.
template <typename Noise = NoiseStream>
Trajectory simulate(const Ensemble& e0, const Potential& p, const DynamicsVariant& v, const StepConfig& cfg,
                    std::uint64_t record_every, const Noise& noise) {
  cfg.validate();
  if (record_every < 1) throw Error(ErrorCode::ConfigError, "record_every must be >= 1");
  detail::check_compatible(e0, p, v);

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.record_every = record_every;
  traj.snapshots.reserve(static_cast<std::size_t>(cfg.n_steps / record_every + 1));
  traj.snapshots.push_back({0, 0.0, e0});

  Ensemble current = e0;
  for (std::uint64_t k = 0; k < cfg.n_steps; ++k) {
    current = em_step(current, p, v, cfg, k, noise);
    const std::uint64_t step = k + 1;
    if (step % record_every == 0) {
      traj.snapshots.push_back({step, static_cast<double>(step) * cfg.dt, current});
    }
  }
  return traj;
}

inline Trajectory simulate(const Ensemble& e0, const Potential& p, const DynamicsVariant& v,
                           const StepConfig& cfg, std::uint64_t record_every) {
  return simulate(e0, p, v, cfg, record_every, NoiseStream(cfg.seed));
}

/// J particles drawn i.i.d. from N(mean, scale^2 I) using the reserved init stream.
inline Ensemble gaussian_ensemble(const Vector& mean, double scale, Eigen::Index n_particles, std::uint64_t seed) {
  if (n_particles < 2) throw Error(ErrorCode::TooFewParticles, "an ensemble needs at least 2 particles");
  const NoiseStream noise(seed);
  PointCloud u(mean.size(), n_particles);
  for (Eigen::Index j = 0; j < n_particles; ++j) {
    for (Eigen::Index m = 0; m < mean.size(); ++m) {
      u(m, j) = mean(m) + scale * noise.normal(NoiseStream::kInitStep, static_cast<std::uint64_t>(j),
                                               static_cast<std::uint64_t>(m));
    }
  }
  return Ensemble(std::move(u));
}

}  // namespace ilps
