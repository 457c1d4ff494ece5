#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilps/app.hpp"

int main(int argc, char** argv) {
  using namespace ilps::app;

  CLI::App cli{"Interacting Langevin particle samplers and diagnostics"};
  // -h is taken by the finite-difference step of verify-divergence.
  cli.set_help_flag("--help", "print this help and exit");
  cli.require_subcommand(1);

  std::string config_path;
  auto* sample = cli.add_subcommand("sample", "simulate an ensemble from a JSON run config");
  sample->add_option("config", config_path, "run configuration file")->required();

  BiasStudyOptions bias;
  std::vector<std::int64_t> sizes;
  auto* bias_cmd = cli.add_subcommand("bias-study", "pooled variance of the uncorrected dynamics vs (J-2)/J b^2");
  bias_cmd->add_option("--J-list", sizes, "ensemble sizes, comma separated")->delimiter(',')->required();
  bias_cmd->add_option("--b", bias.b, "target standard deviation");
  bias_cmd->add_option("--dt", bias.run.dt, "time step");
  bias_cmd->add_option("--n-steps", bias.run.n_steps, "Euler-Maruyama steps per run");
  bias_cmd->add_option("--seed", bias.run.seed, "base seed");
  bias_cmd->add_option("--record-every", bias.run.record_every, "keep every k-th snapshot");
  bias_cmd->add_option("--burn-in", bias.run.burn_in_fraction, "fraction of snapshots discarded");
  bias_cmd->add_option("--out", bias.out_path, "report JSON path");

  VerifyOptions verify;
  double h = 0.0;
  auto* verify_cmd = cli.add_subcommand("verify-divergence", "finite-difference check of div S(U) = (d+1)/J (U - Ubar)");
  verify_cmd->add_option("--cases", verify.cases, "d:J pairs, comma separated");
  verify_cmd->add_option("--trials", verify.run.trials, "random ensembles per case");
  auto* h_opt = verify_cmd->add_option("--h", h, "finite-difference step (default 1e-5 (1 + |U|_inf))");
  verify_cmd->add_option("--tol", verify.run.tol, "relative tolerance for full/regularized");
  verify_cmd->add_option("--alpha", verify.run.alpha, "regularization weight");
  verify_cmd->add_option("--seed", verify.run.seed, "seed for random ensembles");
  verify_cmd->add_option("--out", verify.out_path, "report JSON path");

  RegressionOptions reg;
  auto* reg_cmd = cli.add_subcommand("regression-demo", "sample a Bayesian linear-regression posterior");
  reg_cmd->add_option("--data", reg.data_path, "CSV with header x_0,...,x_{d-1},y");
  reg_cmd->add_option("--gamma", reg.gamma, "observation noise scale");
  reg_cmd->add_option("--sigma0", reg.sigma0, "prior scale");
  reg_cmd->add_option("--variant", reg.variant, "uncorrected | corrected | leave_one_out");
  reg_cmd->add_option("--scheme", reg.scheme, "full | regularized");
  reg_cmd->add_option("--alpha", reg.alpha, "regularization weight");
  reg_cmd->add_option("--J", reg.n_particles, "ensemble size");
  reg_cmd->add_option("--init-scale", reg.init_scale, "std of the N(0, s^2 I) initial ensemble");
  reg_cmd->add_option("--dt", reg.step.dt, "time step");
  reg_cmd->add_option("--n-steps", reg.step.n_steps, "Euler-Maruyama steps");
  reg_cmd->add_option("--seed", reg.step.seed, "seed");
  reg_cmd->add_option("--record-every", reg.record_every, "keep every k-th snapshot");
  reg_cmd->add_option("--burn-in", reg.burn_in_fraction, "fraction of snapshots discarded");
  reg_cmd->add_option("--out", reg.out_path, "summary JSON path");
  reg_cmd->add_option("--trajectory", reg.trajectory_path, "optional trajectory CSV path");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (*sample) return cmd_sample(config_path, std::cout, std::cerr);
  if (*bias_cmd) {
    bias.sizes = sizes;
    return cmd_bias_study(bias, std::cout, std::cerr);
  }
  if (*verify_cmd) {
    if (h_opt->count() > 0) verify.run.h = h;
    return cmd_verify_divergence(verify, std::cout, std::cerr);
  }
  return cmd_regression_demo(reg, std::cout, std::cerr);
}
