#ifndef FRACDECAY_EXPERIMENT_HPP
#define FRACDECAY_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fracdecay/config.hpp"
#include "fracdecay/decay.hpp"
#include "fracdecay/inequality.hpp"

namespace fracdecay {

/// Exit codes shared by the library entry points and the CLI:
/// 0 pass, 1 usage/config, 2 blow-up, 3 verification or bound failure.
struct RunOutcome {
  int exit_code = 0;
  std::string summary;
};

/// Simulation experiment: writes <outdir>/<name>/trace.csv and report.txt.
RunOutcome run_simulate(const ExperimentConfig& ex);

/// One named inequality, or "all" (six identities plus the structural
/// matrix). Writes <outdir>/report.txt.
RunOutcome run_verify(const std::string& which, long samples,
                      std::uint64_t seed, const std::string& outdir);

struct BarrierParams {
  std::string kind = "mixed";  // mixed | classical
  double alpha = 0.5;
  double gamma = 1.0;
  double nu = 1.0;   // 1/C
  double u0 = 1.0;   // barrier initial value
  double v0 = 0.8;   // trajectory initial value
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double t_final = 20.0;
  double dt = 1e-3;
  std::string outdir = "out";
};

/// Barrier vs. trajectory: writes <outdir>/barrier.csv (t,w,v) and a report;
/// exit 0 iff the barrier is a discrete supersolution and dominates.
RunOutcome run_barrier(const BarrierParams& p);

/// Re-fit a trace.csv produced by run_simulate.
RunOutcome run_fit(const std::string& csv_path, double s);

/// Cartesian sweep over braced keys; cells run concurrently
/// (FRACDECAY_THREADS caps the workers) and write per-cell outputs plus
/// <outdir>/<name>/summary.csv.
RunOutcome run_sweep(const KeyValues& kv);

/// Default (operator, s, gamma) table exercised by `verify all`.
struct StructuralCase {
  DiffusionOperator op;
  double s;
  double gamma;
  std::string label;
};
std::vector<StructuralCase> default_structural_matrix();

/// Serialize with 17 significant digits (round-trip exact).
std::string format_g17(double v);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fracdecay

#endif
