#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ilps/io.hpp"

namespace ilps::app {

using io::json;

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsageError = 2, kNumericalAbort = 3 };

// ---------------------------------------------------------------------------
// Config access with field-path error messages and unknown-key rejection.

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail(k, "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "missing required field");
    return convert<T>(key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    return j_.contains(key) ? convert<T>(key) : fallback;
  }

  Section sub(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "missing required section");
    return Section(j_.at(key), field(key));
  }

  const json& raw(const std::string& key) const { return j_.at(key); }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw Error(ErrorCode::ConfigError, field(key) + ": " + why);
  }

 private:
  template <typename T>
  T convert(const std::string& key) const {
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(key, "expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected a non-negative integer");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string path_;
};

struct TargetSpec {
  std::string type;  // gaussian | double_well | regression
  std::optional<double> b;
  std::optional<Vector> mean;
  std::optional<SymMatrix> covariance;
  std::string csv_path;
  double gamma = 1.0;
  double sigma0 = 1.0;
};

struct InitSpec {
  std::string type = "gaussian";  // gaussian | file
  std::optional<Vector> mean;
  double scale = 1.0;
  std::string path;
};

struct RunConfig {
  TargetSpec target;
  std::string variant;
  std::string scheme = "full";
  double alpha = 0.1;
  double c0_scale = 1.0;
  Eigen::Index n_particles = 0;
  Eigen::Index dim = 0;
  InitSpec init;
  StepConfig step;
  std::uint64_t record_every = 1;
  double burn_in_fraction = 0.25;
  std::optional<std::size_t> kl_window;
  std::string trajectory_path;
  std::string summary_path;
};

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

/// Parses and validates a JSON run configuration.  Relative paths inside the
/// config resolve against the config file's directory.
inline RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  Section root(doc, "");
  root.allow_only({"target", "variant", "scheme", "ensemble", "step", "kl_window", "output"});
  RunConfig cfg;

  const Section target = root.sub("target");
  cfg.target.type = target.get<std::string>("type");
  if (cfg.target.type == "gaussian") {
    target.allow_only({"type", "b", "mean", "covariance"});
    if (target.has("b")) {
      if (target.has("covariance")) target.fail("b", "give either b or covariance, not both");
      cfg.target.b = target.get<double>("b");
      if (!(*cfg.target.b > 0.0)) target.fail("b", "must be > 0");
    }
    try {
      if (target.has("mean")) cfg.target.mean = io::vector_from_json(target.raw("mean"));
      if (target.has("covariance")) cfg.target.covariance = io::sym_from_json(target.raw("covariance"));
    } catch (const std::exception& ex) {
      target.fail("mean/covariance", ex.what());
    }
  } else if (cfg.target.type == "double_well") {
    target.allow_only({"type"});
  } else if (cfg.target.type == "regression") {
    target.allow_only({"type", "csv_path", "gamma", "sigma0"});
    cfg.target.csv_path = resolve(base_dir, target.get<std::string>("csv_path"));
    cfg.target.gamma = target.get<double>("gamma");
    cfg.target.sigma0 = target.get<double>("sigma0");
    if (!(cfg.target.gamma > 0.0)) target.fail("gamma", "must be > 0");
    if (!(cfg.target.sigma0 > 0.0)) target.fail("sigma0", "must be > 0");
  } else {
    target.fail("type", "must be gaussian, double_well or regression");
  }

  cfg.variant = root.get<std::string>("variant");
  if (cfg.variant != "uncorrected" && cfg.variant != "corrected" && cfg.variant != "leave_one_out") {
    root.fail("variant", "must be uncorrected, corrected or leave_one_out");
  }

  if (root.has("scheme")) {
    const Section sch = root.sub("scheme");
    sch.allow_only({"type", "alpha", "c0_scale"});
    cfg.scheme = sch.get<std::string>("type");
    if (cfg.scheme != "full" && cfg.scheme != "regularized") sch.fail("type", "must be full or regularized");
    cfg.alpha = sch.get_or<double>("alpha", cfg.alpha);
    cfg.c0_scale = sch.get_or<double>("c0_scale", cfg.c0_scale);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) sch.fail("alpha", "must lie strictly inside (0,1)");
    if (!(cfg.c0_scale > 0.0)) sch.fail("c0_scale", "must be > 0");
  }
  if (cfg.variant == "leave_one_out" && cfg.scheme != "full") {
    root.fail("scheme", "leave_one_out uses its own covariance; omit the scheme section");
  }

  const Section ens = root.sub("ensemble");
  ens.allow_only({"J", "d", "init"});
  const auto n = ens.get<std::int64_t>("J");
  const auto d = ens.get<std::int64_t>("d");
  if (n < 2) ens.fail("J", "must be >= 2");
  if (d < 1) ens.fail("d", "must be >= 1");
  if (cfg.variant == "leave_one_out" && n < 3) ens.fail("J", "leave_one_out needs J >= 3");
  cfg.n_particles = n;
  cfg.dim = d;
  if (ens.has("init")) {
    const Section init = ens.sub("init");
    cfg.init.type = init.get<std::string>("type");
    if (cfg.init.type == "gaussian") {
      init.allow_only({"type", "mean", "scale"});
      if (init.has("mean")) {
        const json& m = init.raw("mean");
        if (m.is_number()) {
          cfg.init.mean = Vector::Constant(d, m.get<double>());
        } else {
          try {
            cfg.init.mean = io::vector_from_json(m);
          } catch (const std::exception& ex) {
            init.fail("mean", ex.what());
          }
          if (cfg.init.mean->size() != d) init.fail("mean", "length must equal d");
        }
      }
      cfg.init.scale = init.get_or<double>("scale", 1.0);
      if (!(cfg.init.scale >= 0.0)) init.fail("scale", "must be >= 0");
    } else if (cfg.init.type == "file") {
      init.allow_only({"type", "path"});
      cfg.init.path = resolve(base_dir, init.get<std::string>("path"));
    } else {
      init.fail("type", "must be gaussian or file");
    }
  }

  const Section step = root.sub("step");
  step.allow_only({"dt", "n_steps", "seed", "record_every", "burn_in_fraction", "eigen_floor"});
  cfg.step.dt = step.get<double>("dt");
  cfg.step.n_steps = step.get<std::uint64_t>("n_steps");
  cfg.step.seed = step.get<std::uint64_t>("seed");
  cfg.step.eigen_floor = step.get_or<double>("eigen_floor", 0.0);
  cfg.record_every = step.get_or<std::uint64_t>("record_every", 1);
  cfg.burn_in_fraction = step.get_or<double>("burn_in_fraction", 0.25);
  if (!(cfg.step.dt > 0.0)) step.fail("dt", "must be > 0");
  if (cfg.step.n_steps < 1) step.fail("n_steps", "must be >= 1");
  if (cfg.record_every < 1) step.fail("record_every", "must be >= 1");
  if (!(cfg.burn_in_fraction >= 0.0 && cfg.burn_in_fraction < 1.0)) step.fail("burn_in_fraction", "must lie in [0,1)");
  if (!(cfg.step.eigen_floor >= 0.0)) step.fail("eigen_floor", "must be >= 0");

  if (root.has("kl_window")) {
    const auto w = root.get<std::int64_t>("kl_window");
    if (w < 10) root.fail("kl_window", "must be >= 10");
    cfg.kl_window = static_cast<std::size_t>(w);
  }

  const Section out = root.sub("output");
  out.allow_only({"trajectory", "summary"});
  cfg.trajectory_path = resolve(base_dir, out.get<std::string>("trajectory"));
  cfg.summary_path = resolve(base_dir, out.get<std::string>("summary"));

  if (cfg.target.type == "double_well" && d != 1) ens.fail("d", "double_well is one-dimensional");
  if (cfg.target.type == "gaussian") {
    if (cfg.target.mean && cfg.target.mean->size() != d) target.fail("mean", "length must equal ensemble.d");
    if (cfg.target.covariance && cfg.target.covariance->dim() != d) target.fail("covariance", "size must equal ensemble.d");
  }
  return cfg;
}

inline std::unique_ptr<Potential> build_potential(const RunConfig& cfg) {
  if (cfg.target.type == "double_well") return std::make_unique<DoubleWellPotential>();
  if (cfg.target.type == "regression") {
    auto p = std::make_unique<LinearRegressionPotential>(
        load_regression(cfg.target.csv_path, cfg.target.gamma, cfg.target.sigma0));
    if (p->dim() != cfg.dim) {
      throw Error(ErrorCode::ConfigError, "ensemble.d: must equal the regression dimension " + std::to_string(p->dim()));
    }
    return p;
  }
  const Vector mean = cfg.target.mean.value_or(Vector::Zero(cfg.dim));
  SymMatrix cov = SymMatrix::identity(cfg.dim);
  if (cfg.target.covariance) cov = *cfg.target.covariance;
  if (cfg.target.b) cov = cov.scaled(*cfg.target.b * *cfg.target.b);
  return std::make_unique<GaussianPotential>(mean, cov);
}

inline DynamicsVariant build_variant(const std::string& variant, const std::string& scheme_type, double alpha,
                                     double c0_scale, Eigen::Index dim) {
  if (variant == "leave_one_out") return DynamicsVariant::leave_one_out();
  CovarianceScheme s = scheme::Full{};
  if (scheme_type == "regularized") s = scheme::Regularized(alpha, SymMatrix::identity(dim).scaled(c0_scale));
  return variant == "corrected" ? DynamicsVariant::corrected(s) : DynamicsVariant::uncorrected(s);
}

inline Ensemble build_initial(const RunConfig& cfg) {
  if (cfg.init.type == "file") {
    Ensemble e = io::read_ensemble(cfg.init.path);
    if (e.dim() != cfg.dim || e.size() != cfg.n_particles) {
      throw Error(ErrorCode::ConfigError, "ensemble.init.path: file has J=" + std::to_string(e.size()) +
                                              ", d=" + std::to_string(e.dim()) + " which disagrees with ensemble.J/d");
    }
    return e;
  }
  return gaussian_ensemble(cfg.init.mean.value_or(Vector::Zero(cfg.dim)), cfg.init.scale, cfg.n_particles,
                           mix_seed(cfg.step.seed));
}

/// Converts library exceptions to the stable exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const NonFiniteError& ex) {
    err << "error: " << ex.what() << '\n';
    return kNumericalAbort;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return ex.code() == ErrorCode::NumericalFailure ? kNumericalAbort : kUsageError;
  } catch (const json::exception& ex) {
    err << "error: config: " << ex.what() << '\n';
    return kUsageError;
  }
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// sample

inline json sample_summary(const RunConfig& cfg, const DynamicsVariant& v, const Potential& p,
                           const Trajectory& traj, double wall_time) {
  const MomentEstimate est = pooled_moments(traj, cfg.burn_in_fraction);
  json s;
  s["variant"] = v.name();
  s["scheme"] = scheme_name(v.scheme());
  s["J"] = cfg.n_particles;
  s["d"] = cfg.dim;
  s["dt"] = cfg.step.dt;
  s["n_steps"] = cfg.step.n_steps;
  s["burn_in_fraction"] = cfg.burn_in_fraction;
  s["seed"] = cfg.step.seed;
  s["pooled_mean"] = io::to_json(est.mean);
  s["pooled_cov"] = io::to_json(est.covariance);
  s["ess"] = est.ess;
  s["kl_trace"] = json::array();
  if (const auto target = p.target_moments()) {
    s["target_mean"] = io::to_json(target->mean);
    s["target_cov"] = io::to_json(target->covariance);
    const std::size_t window = cfg.kl_window.value_or(std::max<std::size_t>(10, traj.snapshots.size() / 10));
    if (traj.snapshots.size() >= window) s["kl_trace"] = io::to_json(kl_trace(traj, *target, window));
  }
  s["wall_time_s"] = wall_time;
  return s;
}

inline int cmd_sample(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& ex) {
      throw Error(ErrorCode::ConfigError, config_path + ": " + ex.what());
    }
    const RunConfig cfg = parse_run_config(doc, std::filesystem::path(config_path).parent_path());
    const auto potential = build_potential(cfg);
    const DynamicsVariant variant = build_variant(cfg.variant, cfg.scheme, cfg.alpha, cfg.c0_scale, cfg.dim);
    const Ensemble e0 = build_initial(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = simulate(e0, *potential, variant, cfg.step, cfg.record_every);
    const double wall = seconds_since(t0);

    {
      std::ofstream tf = io::open_output(cfg.trajectory_path);
      io::write_trajectory(tf, traj);
    }
    const json summary = sample_summary(cfg, variant, *potential, traj, wall);
    io::write_json(cfg.summary_path, summary);
    out << "wrote " << cfg.trajectory_path << " and " << cfg.summary_path << '\n';
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// bias-study

struct BiasStudyOptions {
  std::vector<std::int64_t> sizes{4};
  double b = 1.0;
  BiasStudyConfig run;
  std::string out_path;
};

inline int cmd_bias_study(const BiasStudyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.sizes.empty()) throw Error(ErrorCode::ConfigError, "--J-list: must not be empty");
    for (auto j : opt.sizes) {
      if (j < 3) throw Error(ErrorCode::ConfigError, "--J-list: every J must be >= 3, got " + std::to_string(j));
    }
    if (!(opt.b > 0.0)) throw Error(ErrorCode::ConfigError, "--b: must be > 0");
    if (!(opt.run.dt > 0.0)) throw Error(ErrorCode::ConfigError, "--dt: must be > 0");
    if (opt.run.n_steps < 1) throw Error(ErrorCode::ConfigError, "--n-steps: must be >= 1");

    const auto rows = bias_study(opt.sizes, opt.b, opt.run);
    out << std::setw(6) << "J" << std::setw(14) << "sigma2_hat" << std::setw(14) << "(J-2)/J*b^2" << std::setw(12)
        << "stderr" << '\n';
    for (const auto& r : rows) {
      out << std::setw(6) << r.n_particles << std::setw(14) << std::setprecision(6) << r.sigma2_hat
          << std::setw(14) << r.sigma2_pred << std::setw(12) << r.stderr << '\n';
    }
    if (!opt.out_path.empty()) io::write_json(opt.out_path, io::to_json(rows));
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// verify-divergence

inline std::vector<DivergenceCase> parse_cases(const std::string& spec) {
  std::vector<DivergenceCase> cases;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    std::size_t used_d = 0, used_j = 0;
    long long d = 0, j = 0;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      d = std::stoll(item.substr(0, colon), &used_d);
      j = std::stoll(item.substr(colon + 1), &used_j);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "--cases: cannot parse '" + item + "', expected d:J");
    }
    if (used_d != colon || used_j != item.size() - colon - 1) {
      throw Error(ErrorCode::ConfigError, "--cases: cannot parse '" + item + "', expected d:J");
    }
    if (d < 1 || j < 2) throw Error(ErrorCode::ConfigError, "--cases: need d >= 1 and J >= 2 in '" + item + "'");
    cases.push_back({d, j});
  }
  if (cases.empty()) throw Error(ErrorCode::ConfigError, "--cases: empty case list");
  return cases;
}

struct VerifyOptions {
  std::string cases = "1:4,2:6,3:8,5:12";
  DivergenceCheckConfig run;
  std::string out_path;
};

inline int cmd_verify_divergence(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cases = parse_cases(opt.cases);
    if (opt.run.trials < 1) throw Error(ErrorCode::ConfigError, "--trials: must be >= 1");
    if (opt.run.h && !(*opt.run.h > 0.0)) throw Error(ErrorCode::ConfigError, "--h: must be > 0");
    if (!(opt.run.tol >= 0.0)) throw Error(ErrorCode::ConfigError, "--tol: must be >= 0");
    if (!(opt.run.alpha > 0.0 && opt.run.alpha < 1.0)) throw Error(ErrorCode::ConfigError, "--alpha: must lie in (0,1)");

    const auto rows = divergence_report(cases, opt.run);
    bool all_pass = true;
    for (const auto& r : rows) {
      all_pass = all_pass && r.pass;
      out << "d=" << r.dim << " J=" << r.n_particles << " scheme=" << r.scheme
          << (r.scheme == "leave_one_out" ? " max_self_deriv=" : " max_rel_err=") << std::setprecision(3)
          << r.max_rel_err << (r.pass ? " PASS" : " FAIL") << '\n';
      if (r.sample_particles && r.sample_particles->size() <= 8) {
        out << "  particles:";
        for (Eigen::Index j = 0; j < r.sample_particles->cols(); ++j) out << " (" << r.sample_particles->col(j).transpose() << ")";
        out << "\n  correction:";
        for (Eigen::Index j = 0; j < r.sample_correction->cols(); ++j) out << " (" << r.sample_correction->col(j).transpose() << ")";
        out << '\n';
      }
    }
    if (!opt.out_path.empty()) io::write_json(opt.out_path, io::to_json(rows));
    return all_pass ? int{kOk} : int{kVerificationFailed};
  });
}

// ---------------------------------------------------------------------------
// regression-demo

struct RegressionOptions {
  std::string data_path;
  double gamma = 1.0;
  double sigma0 = 10.0;
  std::string variant = "corrected";
  std::string scheme = "full";
  double alpha = 0.1;
  Eigen::Index n_particles = 16;
  double init_scale = 1.0;
  StepConfig step{0.005, 100000, 1, 0.0};
  std::uint64_t record_every = 10;
  double burn_in_fraction = 0.25;
  std::string out_path;
  std::string trajectory_path;
};

/// z-scores of pooled moments against the closed-form posterior, using
/// se(mean_c) = sqrt(S_cc / ess) and se(cov_ab) = sqrt((S_aa S_bb + S_ab^2) / ess).
struct ZScores {
  Vector mean;
  Matrix cov;
  double max_abs = 0.0;
};

inline ZScores moment_z_scores(const MomentEstimate& est, const GaussianMoments& target) {
  const Eigen::Index d = target.mean.size();
  ZScores z{Vector(d), Matrix(d, d)};
  const Matrix& s = target.covariance.matrix();
  for (Eigen::Index a = 0; a < d; ++a) {
    z.mean(a) = (est.mean(a) - target.mean(a)) / std::sqrt(s(a, a) / est.ess);
    for (Eigen::Index b = 0; b < d; ++b) {
      const double se = std::sqrt((s(a, a) * s(b, b) + s(a, b) * s(a, b)) / est.ess);
      z.cov(a, b) = (est.covariance(a, b) - s(a, b)) / se;
    }
  }
  z.max_abs = std::max(z.mean.cwiseAbs().maxCoeff(), z.cov.cwiseAbs().maxCoeff());
  return z;
}

inline json run_regression_demo(const RegressionOptions& opt) {
  if (opt.data_path.empty()) throw Error(ErrorCode::ConfigError, "--data: required");
  if (!(opt.gamma > 0.0)) throw Error(ErrorCode::ConfigError, "--gamma: must be > 0");
  if (!(opt.sigma0 > 0.0)) throw Error(ErrorCode::ConfigError, "--sigma0: must be > 0");
  if (opt.variant != "uncorrected" && opt.variant != "corrected" && opt.variant != "leave_one_out") {
    throw Error(ErrorCode::ConfigError, "--variant: must be uncorrected, corrected or leave_one_out");
  }
  if (opt.scheme != "full" && opt.scheme != "regularized") {
    throw Error(ErrorCode::ConfigError, "--scheme: must be full or regularized");
  }
  if (opt.n_particles < (opt.variant == "leave_one_out" ? 3 : 2)) {
    throw Error(ErrorCode::ConfigError, "--J: too few particles");
  }
  if (opt.record_every < 1) throw Error(ErrorCode::ConfigError, "--record-every: must be >= 1");
  opt.step.validate();

  const LinearRegressionPotential potential = load_regression(opt.data_path, opt.gamma, opt.sigma0);
  const Eigen::Index d = potential.dim();
  const DynamicsVariant variant = build_variant(opt.variant, opt.scheme, opt.alpha, 1.0, d);
  const Ensemble e0 = gaussian_ensemble(Vector::Zero(d), opt.init_scale, opt.n_particles, mix_seed(opt.step.seed));

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = simulate(e0, potential, variant, opt.step, opt.record_every);
  const double wall = seconds_since(t0);
  if (!opt.trajectory_path.empty()) {
    std::ofstream tf = io::open_output(opt.trajectory_path);
    io::write_trajectory(tf, traj);
  }

  const MomentEstimate est = pooled_moments(traj, opt.burn_in_fraction);
  const GaussianMoments target = *potential.target_moments();
  const ZScores z = moment_z_scores(est, target);

  json s;
  s["variant"] = variant.name();
  s["scheme"] = scheme_name(variant.scheme());
  s["J"] = opt.n_particles;
  s["d"] = d;
  s["n_obs"] = potential.n_obs();
  s["gamma"] = opt.gamma;
  s["sigma0"] = opt.sigma0;
  s["dt"] = opt.step.dt;
  s["n_steps"] = opt.step.n_steps;
  s["burn_in_fraction"] = opt.burn_in_fraction;
  s["seed"] = opt.step.seed;
  s["target_mean"] = io::to_json(target.mean);
  s["target_cov"] = io::to_json(target.covariance);
  s["pooled_mean"] = io::to_json(est.mean);
  s["pooled_cov"] = io::to_json(est.covariance);
  s["ess"] = est.ess;
  s["z_mean"] = io::to_json(z.mean);
  s["z_cov"] = io::to_json(SymMatrix::symmetrize(z.cov));
  s["max_abs_z"] = z.max_abs;
  s["wall_time_s"] = wall;
  return s;
}

inline int cmd_regression_demo(const RegressionOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json s = run_regression_demo(opt);
    if (!opt.out_path.empty()) io::write_json(opt.out_path, s);
    out << "posterior mean  target " << s["target_mean"].dump() << "  estimate " << s["pooled_mean"].dump() << '\n';
    out << "posterior cov   target " << s["target_cov"].dump() << "  estimate " << s["pooled_cov"].dump() << '\n';
    out << "ess " << s["ess"].get<double>() << "  max |z| " << s["max_abs_z"].get<double>() << '\n';
    return int{kOk};
  });
}

}  // namespace ilps::app
