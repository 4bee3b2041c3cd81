#ifndef FRACDECAY_INTEGRATE_HPP
#define FRACDECAY_INTEGRATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracdecay/caputo.hpp"
#include "fracdecay/grid.hpp"
#include "fracdecay/operators.hpp"

namespace fracdecay {

/// Coefficients of the mixed time derivative lambda1 d_t^alpha + lambda2 d_t
/// with the convention lambda1 + lambda2 = 1.
struct TimeDerivative {
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  double alpha = 0.5;
  Normalization normalization = Normalization::standard;

  void validate() const;
};

struct InitialData {
  enum class Kind { zero, eigenfunction, bump, indicator, random };
  Kind kind = Kind::eigenfunction;
  double scale = 1.0;
  double width = 0.8;
  int smoothness = 3;
  std::uint64_t seed = 1;
  bool complex_parts = false;

  Field build(const Grid& grid) const;
};

struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{99, 99};

  Grid build() const;
};

struct SimulationConfig {
  GridSpec grid;
  DiffusionOperator op = Laplacian{1.0};
  TimeDerivative td;
  InitialData u0;
  double dt = 1e-3;
  double t_final = 1.0;
  std::vector<double> s_list{2.0};
  int record_every = 1;
  double c_stab = 0.2;       // explicit stability constant, dt <= c h^nu
  bool record_energy = false;
  int snapshot_every = 0;    // in units of recorded points; 0 disables
  // stop once the first recorded norm falls below this fraction of its
  // initial value (0 disables); keeps exponential runs out of underflow
  double stop_below = 0.0;

  void validate() const;
};

struct BlowUpRecord {
  long step = 0;
  double time = 0.0;
  std::string reason;
};

/// Time series of the recorded L^s norms (and optionally the diffusion
/// energies) along a simulation.
struct NormTrace {
  std::vector<double> times;
  std::vector<double> s_values;
  std::vector<std::vector<double>> norms;     // norms[si][k]
  std::vector<std::vector<double>> energies;  // empty unless recorded
  std::optional<BlowUpRecord> blow_up;

  const std::vector<double>& norms_for(double s) const;
  /// Recording step, times[1] - times[0].
  double dt_recorded() const;
};

struct Snapshot {
  double time;
  Field field;
};

struct SimulationResult {
  NormTrace trace;
  Field final_field;
  std::vector<Snapshot> snapshots;
};

/// March the mixed-derivative evolution to t_final or blow-up, recording
/// norms every `record_every` steps. Deterministic for a fixed config.
SimulationResult simulate(const SimulationConfig& cfg);

}  // namespace fracdecay

#endif
