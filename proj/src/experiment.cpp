#include "fracdecay/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fracdecay/barriers.hpp"

namespace fracdecay {

namespace fs = std::filesystem;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct SimulateArtifacts {
  NormTrace trace;
  PredictedDecay predicted;
  bool have_fit = false;
  DecayFit fit;
  bool have_bound = false;
  BoundCheck bound;
  int exit_code = 0;
  std::string fit_error;
};

SimulateArtifacts analyze(const ExperimentConfig& ex) {
  SimulateArtifacts art;
  SimulationResult res = simulate(ex.sim);
  art.trace = std::move(res.trace);
  art.predicted = predicted_rate(ex.sim.op, ex.sim.td, ex.s_report,
                                 ex.sim.grid.dim);
  if (art.trace.blow_up) {
    art.exit_code = 2;
    return art;
  }
  WindowPolicy policy;
  policy.t_lo = ex.fit_t_lo;
  policy.t_hi = ex.fit_t_hi;
  policy.log_fraction = ex.fit_log_fraction;
  if (art.predicted.covered) policy.preferred = art.predicted.kind;
  try {
    art.fit = fit_decay(art.trace, ex.s_report, policy);
    art.have_fit = true;
  } catch (const std::invalid_argument& e) {
    art.fit_error = e.what();
  }
  if (art.predicted.covered && art.have_fit) {
    const double exp_rate =
        art.fit.kind == DecayKind::exponential ? art.fit.rate : 0.0;
    art.bound =
        verify_bound(art.trace, ex.s_report, art.predicted, exp_rate);
    art.have_bound = true;
    if (!art.bound.holds) art.exit_code = 3;
  }
  return art;
}

std::string trace_csv(const SimulateArtifacts& art, double exp_rate) {
  const PredictedDecay& pred = art.predicted;
  auto theta = [&](double t) -> double {
    if (!pred.covered) return std::nan("");
    if (pred.kind == DecayKind::polynomial)
      return 1.0 / (1.0 + std::pow(t, pred.exponent));
    return exp_rate > 0.0 ? std::exp(-exp_rate * t) : std::nan("");
  };
  std::string csv = "t,s,norm,predicted_bound,ratio\n";
  const NormTrace& tr = art.trace;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double bound = theta(tr.times[k]);
    for (std::size_t si = 0; si < tr.s_values.size(); ++si) {
      const double norm = tr.norms[si][k];
      csv += format_g17(tr.times[k]) + "," + format_g17(tr.s_values[si]) +
             "," + format_g17(norm) + "," + format_g17(bound) + "," +
             format_g17(norm / bound) + "\n";
    }
  }
  return csv;
}

std::string simulate_report(const ExperimentConfig& ex,
                            const SimulateArtifacts& art) {
  std::ostringstream r;
  r << "name = " << ex.name << "\n";
  r << "operator = " << operator_summary(ex.sim.op) << "\n";
  r << "dim = " << ex.sim.grid.dim << "\n";
  r << "n = " << ex.sim.grid.n[0];
  if (ex.sim.grid.dim == 2) r << "," << ex.sim.grid.n[1];
  r << "\n";
  r << "lambda1 = " << format_g17(ex.sim.td.lambda1) << "\n";
  r << "lambda2 = " << format_g17(ex.sim.td.lambda2) << "\n";
  r << "alpha = " << format_g17(ex.sim.td.alpha) << "\n";
  r << "dt = " << format_g17(ex.sim.dt) << "\n";
  r << "T = " << format_g17(ex.sim.t_final) << "\n";
  r << "s = " << format_g17(ex.s_report) << "\n";
  const PredictedDecay& p = art.predicted;
  r << "predicted_covered = " << bool_str(p.covered) << "\n";
  if (p.covered) {
    r << "predicted_kind = " << to_string(p.kind) << "\n";
    if (p.kind == DecayKind::polynomial)
      r << "predicted_exponent = " << format_g17(p.exponent) << "\n";
    else
      r << "predicted_rate = 1/C (symbolic)\n";
    r << "predicted_gamma = " << format_g17(p.gamma) << "\n";
    r << "predicted_source = " << p.source << "\n";
  } else {
    r << "predicted_reason = " << p.reason << "\n";
  }
  if (art.have_fit) {
    r << "fit_kind = " << to_string(art.fit.kind) << "\n";
    if (art.fit.kind == DecayKind::polynomial)
      r << "fit_exponent = " << format_g17(art.fit.exponent) << "\n";
    else
      r << "fit_rate = " << format_g17(art.fit.rate) << "\n";
    r << "fit_constant = " << format_g17(art.fit.constant) << "\n";
    r << "fit_residual = " << format_g17(art.fit.residual) << "\n";
    r << "fit_residual_other = " << format_g17(art.fit.residual_other) << "\n";
    r << "fit_window = [" << format_g17(art.fit.window_lo) << ", "
      << format_g17(art.fit.window_hi) << "]\n";
    r << "fit_points = " << art.fit.points << "\n";
  } else if (!art.fit_error.empty()) {
    r << "fit_error = " << art.fit_error << "\n";
  }
  if (art.have_bound) {
    r << "bound_holds = " << bool_str(art.bound.holds) << "\n";
    r << "c_star_hat = " << format_g17(art.bound.c_star_hat) << "\n";
    r << "c_star_late = " << format_g17(art.bound.c_star_late) << "\n";
    r << "tail_slope = " << format_g17(art.bound.tail_slope) << "\n";
  }
  if (art.trace.blow_up) {
    r << "blow_up = step=" << art.trace.blow_up->step
      << " t=" << format_g17(art.trace.blow_up->time) << " "
      << art.trace.blow_up->reason << "\n";
  } else {
    r << "blow_up = none\n";
  }
  r << "exit_code = " << art.exit_code << "\n";
  return r.str();
}

}  // namespace

RunOutcome run_simulate(const ExperimentConfig& ex) {
  const fs::path dir = fs::path(ex.outdir) / ex.name;
  fs::create_directories(dir);
  const SimulateArtifacts art = analyze(ex);
  const double exp_rate =
      art.have_fit && art.fit.kind == DecayKind::exponential ? art.fit.rate
                                                             : 0.0;
  write_file_atomic((dir / "trace.csv").string(), trace_csv(art, exp_rate));
  write_file_atomic((dir / "report.txt").string(), simulate_report(ex, art));
  RunOutcome out;
  out.exit_code = art.exit_code;
  std::ostringstream s;
  s << ex.name << ": exit " << art.exit_code;
  if (art.have_fit)
    s << ", fit " << to_string(art.fit.kind) << " "
      << (art.fit.kind == DecayKind::polynomial ? art.fit.exponent
                                                : art.fit.rate);
  out.summary = s.str();
  return out;
}

std::vector<StructuralCase> default_structural_matrix() {
  VectorFieldSpec a_const;
  a_const.a0[0] = 1.0;
  std::vector<StructuralCase> m;
  m.push_back({Laplacian{1.0}, 2.0, 1.0, "laplacian s=2"});
  m.push_back({Laplacian{1.0}, 3.0, 1.0, "laplacian s=3"});
  m.push_back({FractionalLaplacian{0.5, 1.0, false}, 2.0, 1.0,
               "frac_laplacian s=2"});
  m.push_back({FractionalLaplacian{0.5, 1.0, false}, 3.0, 1.0,
               "frac_laplacian s=3"});
  m.push_back({Magnetic{a_const}, 2.0, 1.0, "magnetic s=2"});
  m.push_back({Magnetic{a_const}, 3.0, 1.0, "magnetic s=3"});
  m.push_back({FractionalMagnetic{0.5, a_const}, 2.0, 1.0, "frac_magnetic s=2"});
  m.push_back({FractionalMagnetic{0.5, a_const}, 3.0, 1.0, "frac_magnetic s=3"});
  m.push_back({KirchhoffClassical{1.0, 0.0}, 2.0, 1.0, "kirchhoff nondegenerate"});
  m.push_back({KirchhoffClassical{0.0, 1.0}, 2.0, 3.0, "kirchhoff degenerate"});
  m.push_back({KirchhoffFractional{0.5, 1.0, 0.0}, 2.0, 1.0,
               "frac_kirchhoff nondegenerate"});
  m.push_back({KirchhoffFractional{0.5, 0.0, 1.0}, 2.0, 3.0,
               "frac_kirchhoff degenerate"});
  m.push_back({PorousMediumII{0.25}, 2.0, 2.0, "porous_medium_2"});
  m.push_back({PorousMediumI{0.5, 2.0}, 2.0, 2.0, "porous_medium_1 m=2"});
  m.push_back({PLaplacianPower{3.0, 1.0}, 2.0, 2.0, "p_laplacian p=3"});
  m.push_back({FractionalPLaplacian{0.5, 3.0}, 2.0, 2.0, "frac_p_laplacian p=3"});
  SumFractionalPLaplacians sum;
  sum.terms = {{1.0, 0.3, 2.0}, {0.5, 0.6, 3.0}};
  m.push_back({sum, 2.0, 2.0, "sum_frac_p_laplacians"});
  AnisotropicFractional aniso;
  aniso.axes = {{1.0, 0.5}};
  m.push_back({aniso, 2.0, 1.0, "anisotropic_fractional"});
  m.push_back({MeanCurvature{}, 2.0, 1.0, "mean_curvature"});
  m.push_back({FractionalMeanCurvature{0.5}, 2.0, 1.0, "frac_mean_curvature"});
  return m;
}

namespace {

// Violation-free structural reports at two resolutions with a stable
// empirical constant (within the factor 2).
bool structural_pass(const StructuralCase& c, std::uint64_t seed,
                     std::ostream& log) {
  double c_hats[2] = {0.0, 0.0};
  int violations = 0;
  const int ns[2] = {99, 199};
  for (int k = 0; k < 2; ++k) {
    const Grid g(0.0, 1.0, ns[k]);
    const auto samples = sample_fields(c.op, g, 24, seed);
    const StructuralReport rep = structural_check(c.op, c.s, c.gamma, samples);
    violations += rep.violations;
    c_hats[k] = rep.c_hat;
  }
  const double ratio = c_hats[1] / c_hats[0];
  const bool stable = ratio < 2.0 && ratio > 0.5;
  const bool pass = violations == 0 && stable;
  log << "structural " << c.label << " s=" << c.s << " gamma=" << c.gamma
      << ": violations=" << violations << " c_hat_99=" << format_g17(c_hats[0])
      << " c_hat_199=" << format_g17(c_hats[1]) << " ratio="
      << format_g17(ratio) << (pass ? " pass" : " FAIL") << "\n";
  return pass;
}

}  // namespace

RunOutcome run_verify(const std::string& which, long samples,
                      std::uint64_t seed, const std::string& outdir) {
  static const std::vector<std::string> kAll = {
      "st00", "do1", "kirch_power", "magnetic_pointwise", "poincare",
      "sobolev_frac"};
  std::vector<std::string> names;
  if (which == "all")
    names = kAll;
  else
    names.push_back(which);

  std::ostringstream report;
  bool all_pass = true;
  for (const auto& n : names) {
    const IdentityReport rep = check_identity(n, samples, seed);
    all_pass = all_pass && rep.pass;
    report << "identity " << rep.name << ": samples=" << rep.samples
           << " worst_margin=" << format_g17(rep.worst_margin)
           << (rep.pass ? " pass" : " FAIL");
    if (!rep.detail.empty()) report << " (" << rep.detail << ")";
    report << "\n";
  }
  if (which == "all") {
    for (const auto& c : default_structural_matrix())
      all_pass = structural_pass(c, seed, report) && all_pass;
  }
  report << "verdict = " << (all_pass ? "pass" : "fail") << "\n";

  fs::create_directories(outdir);
  write_file_atomic((fs::path(outdir) / "report.txt").string(), report.str());
  RunOutcome out;
  out.exit_code = all_pass ? 0 : 3;
  out.summary = report.str();
  return out;
}

RunOutcome run_barrier(const BarrierParams& p) {
  BarrierSpec spec;
  if (p.kind == "mixed")
    spec = make_mixed_barrier(p.u0, p.nu, p.gamma, p.alpha);
  else if (p.kind == "classical")
    spec = make_classical_barrier(p.u0, 1.0 / p.nu, p.gamma);
  else
    throw ConfigError("barrier: kind must be mixed or classical");

  const ScalarTrajectory v = solve_scalar_ode(
      p.lambda1, p.lambda2, p.alpha, p.nu, p.gamma, p.v0, p.t_final, p.dt);
  const ScalarTrajectory w =
      sample_barrier(spec, p.lambda1, p.lambda2, p.t_final, p.dt);
  const ComparisonReport rep = check_comparison(w, v);

  std::string csv = "t,w,v\n";
  for (std::size_t k = 0; k < w.times.size(); ++k)
    csv += format_g17(w.times[k]) + "," + format_g17(w.values[k]) + "," +
           format_g17(v.values[k]) + "\n";

  std::ostringstream r;
  r << "kind = " << p.kind << "\n";
  r << "alpha = " << format_g17(p.alpha) << "\n";
  r << "gamma = " << format_g17(p.gamma) << "\n";
  r << "nu = " << format_g17(p.nu) << "\n";
  r << "t0 = " << format_g17(spec.t0) << "\n";
  r << "is_super = " << bool_str(rep.is_super) << "\n";
  r << "is_sub = " << bool_str(rep.is_sub) << "\n";
  r << "hypothesis_holds = " << bool_str(rep.hypothesis_holds) << "\n";
  r << "ordered = " << bool_str(rep.ordered) << "\n";
  r << "worst_super_residual = " << format_g17(rep.worst_super_residual)
    << "\n";
  r << "tolerance = " << format_g17(rep.tolerance) << "\n";

  fs::create_directories(p.outdir);
  write_file_atomic((fs::path(p.outdir) / "barrier.csv").string(), csv);
  write_file_atomic((fs::path(p.outdir) / "barrier_report.txt").string(),
                    r.str());
  RunOutcome out;
  out.exit_code = rep.is_super && rep.ordered ? 0 : 3;
  out.summary = r.str();
  return out;
}

RunOutcome run_fit(const std::string& csv_path, double s) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("fit: cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "t,s,norm,predicted_bound,ratio")
    throw ConfigError("fit: unexpected header in '" + csv_path + "'");
  NormTrace trace;
  std::vector<double> ss;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    double vals[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(row, cell, ','))
        throw ConfigError("fit: short row in '" + csv_path + "'");
      vals[c] = std::stod(cell);
    }
    std::size_t si = 0;
    for (; si < trace.s_values.size(); ++si)
      if (trace.s_values[si] == vals[1]) break;
    if (si == trace.s_values.size()) {
      trace.s_values.push_back(vals[1]);
      trace.norms.emplace_back();
    }
    if (si == 0) trace.times.push_back(vals[0]);
    trace.norms[si].push_back(vals[2]);
  }
  for (const auto& col : trace.norms)
    if (col.size() != trace.times.size())
      throw ConfigError("fit: ragged trace in '" + csv_path + "'");

  const DecayFit fit = fit_decay(trace, s, WindowPolicy{});
  std::ostringstream r;
  r << "s = " << format_g17(s) << "\n";
  r << "fit_kind = " << to_string(fit.kind) << "\n";
  if (fit.kind == DecayKind::polynomial)
    r << "fit_exponent = " << format_g17(fit.exponent) << "\n";
  else
    r << "fit_rate = " << format_g17(fit.rate) << "\n";
  r << "fit_constant = " << format_g17(fit.constant) << "\n";
  r << "fit_residual = " << format_g17(fit.residual) << "\n";
  RunOutcome out;
  out.exit_code = 0;
  out.summary = r.str();
  return out;
}

namespace {

long thread_cap() {
  if (const char* env = std::getenv("FRACDECAY_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return v;
  }
  const long hw = static_cast<long>(std::thread::hardware_concurrency());
  return hw >= 1 ? hw : 1;
}

}  // namespace

RunOutcome run_sweep(const KeyValues& kv) {
  const auto varied = ranged_keys(kv);
  const auto cells = expand_ranges(kv);
  if (cells.size() <= 1 && varied.empty())
    throw ConfigError("sweep: no ranged keys (use key = {a,b,c})");

  struct Cell {
    KeyValues kv;
    std::string cell_name;
    ExperimentConfig ex;
    int exit_code = 1;
    std::string fit_kind, fit_value, predicted_kind, predicted_value;
    std::string bound_holds = "false", c_star_hat = "nan";
    std::string error;
  };
  std::vector<Cell> work(cells.size());
  const std::string base_name =
      kv.count("name") && kv.at("name").front() != '{' ? kv.at("name")
                                                       : "sweep";
  const std::string outdir = kv.count("outdir") ? kv.at("outdir") : "out";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    work[i].kv = cells[i];
    std::string cn = base_name;
    for (const auto& k : varied) cn += "_" + k + "=" + cells[i].at(k);
    work[i].cell_name = cn;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      Cell& c = work[i];
      try {
        c.ex = build_experiment(c.kv);
        c.ex.name = c.cell_name;
        c.ex.outdir = (fs::path(outdir) / base_name).string();
        const SimulateArtifacts art = analyze(c.ex);
        const double exp_rate =
            art.have_fit && art.fit.kind == DecayKind::exponential
                ? art.fit.rate
                : 0.0;
        const fs::path dir = fs::path(c.ex.outdir) / c.ex.name;
        fs::create_directories(dir);
        write_file_atomic((dir / "trace.csv").string(),
                          trace_csv(art, exp_rate));
        write_file_atomic((dir / "report.txt").string(),
                          simulate_report(c.ex, art));
        c.exit_code = art.exit_code;
        if (art.have_fit) {
          c.fit_kind = to_string(art.fit.kind);
          c.fit_value = format_g17(art.fit.kind == DecayKind::polynomial
                                       ? art.fit.exponent
                                       : art.fit.rate);
        }
        if (art.predicted.covered) {
          c.predicted_kind = to_string(art.predicted.kind);
          c.predicted_value =
              art.predicted.kind == DecayKind::polynomial
                  ? format_g17(art.predicted.exponent)
                  : "1/C";
        } else {
          c.predicted_kind = "not_covered";
        }
        if (art.have_bound) {
          c.bound_holds = bool_str(art.bound.holds);
          c.c_star_hat = format_g17(art.bound.c_star_hat);
        }
      } catch (const std::invalid_argument& e) {
        c.exit_code = 1;
        c.error = e.what();
      }
    }
  };
  const long nthreads = std::min<long>(thread_cap(), work.size());
  std::vector<std::thread> pool;
  for (long t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv =
      "cell,operator,lambda1,lambda2,alpha,predicted_kind,predicted_value,"
      "fit_kind,fit_value,bound_holds,c_star_hat,exit_code,error\n";
  int worst_config = 0, worst_blow = 0, worst_bound = 0;
  for (const auto& c : work) {
    csv += c.cell_name + "," +
           (c.exit_code == 1 ? "" : operator_name(c.ex.sim.op)) + "," +
           (c.kv.count("lambda1") ? c.kv.at("lambda1") : "0") + "," +
           (c.kv.count("lambda2") ? c.kv.at("lambda2") : "") + "," +
           (c.kv.count("alpha") ? c.kv.at("alpha") : "") + "," +
           c.predicted_kind + "," + c.predicted_value + "," + c.fit_kind +
           "," + c.fit_value + "," + c.bound_holds + "," + c.c_star_hat +
           "," + std::to_string(c.exit_code) + "," + c.error + "\n";
    if (c.exit_code == 1) worst_config = 1;
    if (c.exit_code == 2) worst_blow = 2;
    if (c.exit_code == 3) worst_bound = 3;
  }
  const fs::path dir = fs::path(outdir) / base_name;
  fs::create_directories(dir);
  write_file_atomic((dir / "summary.csv").string(), csv);

  RunOutcome out;
  out.exit_code = worst_config ? 1 : (worst_blow ? 2 : (worst_bound ? 3 : 0));
  out.summary = csv;
  return out;
}

}  // namespace fracdecay
