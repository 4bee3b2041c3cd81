#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "fracdecay/experiment.hpp"

using namespace fracdecay;

int main(int argc, char** argv) {
  CLI::App app{"Decay-rate laboratory for mixed classical/fractional-time "
               "diffusion on bounded domains"};
  app.require_subcommand(1);

  std::string config_path;
  auto* sim = app.add_subcommand("simulate",
                                 "run one experiment config, write trace.csv "
                                 "and report.txt");
  sim->add_option("config", config_path, "experiment config file")->required();

  std::string verify_name = "all";
  long samples = 100000;
  std::uint64_t seed = 1;
  std::string verify_out = "out/verify";
  auto* ver = app.add_subcommand("verify",
                                 "check the named inequality (or 'all') on "
                                 "random samples");
  ver->add_option("name", verify_name, "st00|do1|kirch_power|"
                                       "magnetic_pointwise|poincare|"
                                       "sobolev_frac|all");
  ver->add_option("--samples", samples, "random samples per identity");
  ver->add_option("--seed", seed, "RNG seed");
  ver->add_option("--out", verify_out, "output directory");

  BarrierParams bp;
  auto* bar = app.add_subcommand("barrier",
                                 "compare a scalar trajectory against the "
                                 "matching barrier");
  bar->add_option("--kind", bp.kind, "mixed|classical");
  bar->add_option("--alpha", bp.alpha, "fractional order");
  bar->add_option("--gamma", bp.gamma, "nonlinearity power");
  bar->add_option("--nu", bp.nu, "coefficient nu = 1/C");
  bar->add_option("--u0", bp.u0, "barrier initial value");
  bar->add_option("--v0", bp.v0, "trajectory initial value");
  bar->add_option("--lambda1", bp.lambda1, "fractional weight");
  bar->add_option("--lambda2", bp.lambda2, "classical weight");
  bar->add_option("--T", bp.t_final, "final time");
  bar->add_option("--dt", bp.dt, "time step");
  bar->add_option("--out", bp.outdir, "output directory");

  std::string fit_path;
  double fit_s = 2.0;
  auto* fit = app.add_subcommand("fit", "fit a decay law to a trace.csv");
  fit->add_option("trace", fit_path, "trace.csv path")->required();
  fit->add_option("--s", fit_s, "norm index");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep",
                                   "expand ranged keys {a,b,c} and run all "
                                   "cells");
  sweep->add_option("config", sweep_path, "sweep config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunOutcome out;
    if (*sim) {
      out = run_simulate(build_experiment(parse_config_file(config_path)));
    } else if (*ver) {
      out = run_verify(verify_name, samples, seed, verify_out);
    } else if (*bar) {
      out = run_barrier(bp);
    } else if (*fit) {
      out = run_fit(fit_path, fit_s);
    } else if (*sweep) {
      out = run_sweep(parse_config_file(sweep_path));
    }
    std::cout << out.summary << "\n";
    return out.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
