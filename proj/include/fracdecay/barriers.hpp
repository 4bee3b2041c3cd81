#ifndef FRACDECAY_BARRIERS_HPP
#define FRACDECAY_BARRIERS_HPP

#include <memory>
#include <string>
#include <vector>

#include "fracdecay/caputo.hpp"

namespace fracdecay {

/// Explicit supersolutions of lambda1 d_t^alpha w + lambda2 d_t w
/// = -nu w^gamma: a constant head glued to a power tail (mixed case) or
/// the classical power/exponential pieces. All pieces join continuously.
struct BarrierSpec {
  enum class Kind { mixed_power_tail, classical_exp, classical_power };
  Kind kind = Kind::mixed_power_tail;
  double u0 = 1.0;     // initial value
  double nu = 1.0;     // 1 / C
  double gamma = 1.0;
  double alpha = 0.5;  // mixed kind only
  // derived join data
  double t0 = 0.0;
  double k_coef = 0.0;  // mixed power coefficient K
  double theta0 = 0.0;  // classical exponential prefactor
};

/// Head duration t0 is the smallest admissible value, the maximum of the
/// construction's lower bounds, so the barrier is as tight as the
/// construction allows.
BarrierSpec make_mixed_barrier(double u0, double nu, double gamma,
                               double alpha);
/// Classical barrier; picks the exponential form for gamma <= 1 and the
/// power form for gamma > 1. `c_const` is C = 1/nu.
BarrierSpec make_classical_barrier(double w0, double c_const, double gamma);

/// Nonincreasing, continuous for t >= 0.
double barrier_eval(const BarrierSpec& spec, double t);

struct ScalarTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  double lambda1 = 0.0, lambda2 = 1.0;
  double alpha = 0.5;
  double k = 1.0, gamma = 1.0;
  double v0 = 1.0;
  Normalization normalization = Normalization::standard;
  double dt = 1e-3;
};

/// L1/Euler march of lambda1 d_t^alpha v + lambda2 d_t v = -k v^gamma,
/// explicit in the nonlinearity, clamped at zero.
ScalarTrajectory solve_scalar_ode(double lambda1, double lambda2, double alpha,
                                  double k, double gamma, double v0, double t_final,
                                  double dt,
                                  Normalization norm = Normalization::standard);

/// Barrier sampled on a uniform grid, carrying the ODE parameters it is a
/// supersolution for.
ScalarTrajectory sample_barrier(const BarrierSpec& spec, double lambda1,
                                double lambda2, double t_final, double dt);

struct ComparisonReport {
  bool is_super = false;
  bool is_sub = false;
  bool hypothesis_holds = false;  // w(0) > v(0)
  bool ordered = false;           // hypothesis and w > v at all later nodes
  double worst_super_residual = 0.0;  // min over nodes of the w-residual
  double worst_sub_residual = 0.0;    // max over nodes of the v-residual
  double tolerance = 0.0;
};

/// Discrete residual signs of both trajectories against the equation
/// lambda1 d_t^alpha + lambda2 d_t + k (.)^gamma, and the ordering
/// conclusion. Both trajectories must share the time grid.
ComparisonReport check_comparison(const ScalarTrajectory& w,
                                  const ScalarTrajectory& v);

}  // namespace fracdecay

#endif
