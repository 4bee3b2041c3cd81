#include "fracdecay/barriers.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdecay {

BarrierSpec make_mixed_barrier(double u0, double nu, double gamma,
                               double alpha) {
  if (!(u0 > 0 && nu > 0 && gamma > 0))
    throw std::invalid_argument("mixed barrier: need u0, nu, gamma > 0");
  if (!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("mixed barrier: need alpha in (0,1)");
  BarrierSpec b;
  b.kind = BarrierSpec::Kind::mixed_power_tail;
  b.u0 = u0;
  b.nu = nu;
  b.gamma = gamma;
  b.alpha = alpha;
  const double head = std::pow(u0, 1.0 - gamma) / nu;
  const double t0_frac =
      head * (std::pow(2.0, alpha) / std::tgamma(1.0 - alpha) +
              (alpha / gamma) * std::pow(2.0, alpha + alpha / gamma) /
                  std::tgamma(2.0 - alpha));
  const double t0_classic = alpha * std::pow(u0, 1.0 - gamma) / (gamma * nu);
  b.t0 = std::max({t0_frac, 1.0, t0_classic});
  b.k_coef = u0 * std::pow(b.t0, alpha / gamma);
  return b;
}

BarrierSpec make_classical_barrier(double w0, double c_const, double gamma) {
  if (!(w0 > 0 && c_const > 0 && gamma > 0))
    throw std::invalid_argument("classical barrier: need w0, C, gamma > 0");
  BarrierSpec b;
  b.u0 = w0;
  b.nu = 1.0 / c_const;
  b.gamma = gamma;
  if (gamma <= 1.0) {
    b.kind = BarrierSpec::Kind::classical_exp;
    if (gamma == 1.0) {
      b.t0 = 0.0;
      b.theta0 = w0;
    } else {
      b.t0 = std::max(0.0, c_const / (1.0 - gamma) *
                               (std::pow(w0, 1.0 - gamma) - 1.0));
      b.theta0 = std::pow(
          std::pow(w0, 1.0 - gamma) - (1.0 - gamma) / c_const * b.t0,
          1.0 / (1.0 - gamma));
    }
  } else {
    b.kind = BarrierSpec::Kind::classical_power;
    b.u0 = std::max(w0, std::pow(c_const / (gamma - 1.0), 1.0 / (gamma - 1.0)));
    b.t0 = 1.0;
  }
  return b;
}

double barrier_eval(const BarrierSpec& b, double t) {
  if (t < 0.0) throw std::invalid_argument("barrier_eval: need t >= 0");
  switch (b.kind) {
    case BarrierSpec::Kind::mixed_power_tail:
      if (t <= b.t0) return b.u0;
      return b.k_coef * std::pow(t, -b.alpha / b.gamma);
    case BarrierSpec::Kind::classical_exp: {
      const double c = 1.0 / b.nu;
      if (b.gamma == 1.0) return b.u0 * std::exp(-t / c);
      if (t <= b.t0)
        return std::pow(std::pow(b.u0, 1.0 - b.gamma) - (1.0 - b.gamma) / c * t,
                        1.0 / (1.0 - b.gamma));
      return b.theta0 * std::exp((b.t0 - t) / c);
    }
    case BarrierSpec::Kind::classical_power:
      if (t <= 1.0) return b.u0;
      return b.u0 * std::pow(t, -1.0 / (b.gamma - 1.0));
  }
  throw std::logic_error("barrier_eval: unknown kind");
}

ScalarTrajectory solve_scalar_ode(double lambda1, double lambda2, double alpha,
                                  double k, double gamma, double v0,
                                  double t_final, double dt,
                                  Normalization norm) {
  if (v0 < 0.0) throw std::invalid_argument("solve_scalar_ode: need v0 >= 0");
  if (lambda1 < 0 || lambda2 < 0 || lambda1 + lambda2 <= 0)
    throw std::invalid_argument("solve_scalar_ode: bad lambda coefficients");
  if (!(k > 0 && gamma > 0))
    throw std::invalid_argument("solve_scalar_ode: need k, gamma > 0");
  if (!(dt > 0 && dt < t_final))
    throw std::invalid_argument("solve_scalar_ode: need 0 < dt < T");

  std::unique_ptr<CaputoL1> caputo;
  double a0 = 0.0;
  if (lambda1 > 0) {
    caputo.reset(new CaputoL1(alpha, dt, norm));
    a0 = caputo->leading_weight();
  }
  const double a_eff = lambda1 * a0 + lambda2 / dt;
  // Explicit nonlinearity: one-step contraction requires the local slope
  // k gamma v^{gamma-1} to stay below the time weight.
  const double slope = k * gamma * std::pow(std::max(v0, 1.0), gamma - 1.0);
  if (slope > a_eff)
    throw std::invalid_argument(
        "solve_scalar_ode: dt too large for the explicit nonlinearity "
        "(k gamma v0^{gamma-1} exceeds the leading time weight)");

  const long n_steps = std::lround(t_final / dt);
  ScalarTrajectory out;
  out.lambda1 = lambda1;
  out.lambda2 = lambda2;
  out.alpha = alpha;
  out.k = k;
  out.gamma = gamma;
  out.v0 = v0;
  out.normalization = norm;
  out.dt = dt;
  out.times.reserve(n_steps + 1);
  out.values.reserve(n_steps + 1);
  out.times.push_back(0.0);
  out.values.push_back(v0);

  Eigen::VectorXd w;
  for (long j = 0; j < n_steps; ++j) {
    double rhs = lambda2 / dt * out.values[j] -
                 k * std::pow(out.values[j], gamma);
    if (lambda1 > 0) {
      caputo->weights(j + 1, w);
      double hist = 0.0;
      for (long m = 0; m <= j; ++m) hist += w[m] * out.values[m];
      rhs -= lambda1 * hist;
    }
    double next = rhs / a_eff;
    if (next < 0.0) next = 0.0;  // absorbing state
    out.times.push_back((j + 1) * dt);
    out.values.push_back(next);
  }
  return out;
}

ScalarTrajectory sample_barrier(const BarrierSpec& spec, double lambda1,
                                double lambda2, double t_final, double dt) {
  ScalarTrajectory out;
  out.lambda1 = lambda1;
  out.lambda2 = lambda2;
  out.alpha = spec.alpha;
  out.k = spec.nu;
  out.gamma = spec.gamma;
  out.v0 = barrier_eval(spec, 0.0);
  out.dt = dt;
  const long n_steps = std::lround(t_final / dt);
  for (long j = 0; j <= n_steps; ++j) {
    out.times.push_back(j * dt);
    out.values.push_back(barrier_eval(spec, j * dt));
  }
  return out;
}

ComparisonReport check_comparison(const ScalarTrajectory& w,
                                  const ScalarTrajectory& v) {
  if (w.times.size() != v.times.size() ||
      std::abs(w.dt - v.dt) > 1e-14 * std::max(w.dt, v.dt))
    throw std::invalid_argument("check_comparison: mismatched time grids");
  const double dt = v.dt;
  const double alpha = v.alpha;
  const double lambda1 = v.lambda1, lambda2 = v.lambda2;
  const double k = v.k, gamma = v.gamma;

  std::unique_ptr<CaputoL1> caputo;
  if (lambda1 > 0)
    caputo.reset(new CaputoL1(alpha, dt, v.normalization));

  ComparisonReport rep;
  rep.tolerance =
      5.0 * std::pow(dt, lambda1 > 0 ? std::min(1.0, 2.0 - alpha) : 1.0);

  auto residual = [&](const std::vector<double>& traj, long j,
                      Eigen::VectorXd& wk) {
    double r = lambda2 * (traj[j] - traj[j - 1]) / dt +
               k * std::pow(std::abs(traj[j]), gamma);
    if (lambda1 > 0) {
      caputo->weights(j, wk);
      double d = 0.0;
      for (long m = 0; m <= j; ++m) d += wk[m] * traj[m];
      r += lambda1 * d;
    }
    return r;
  };

  double worst_super = 1e300, worst_sub = -1e300;
  Eigen::VectorXd wk;
  const long n = static_cast<long>(w.times.size());
  for (long j = 1; j < n; ++j) {
    worst_super = std::min(worst_super, residual(w.values, j, wk));
    worst_sub = std::max(worst_sub, residual(v.values, j, wk));
  }
  rep.worst_super_residual = worst_super;
  rep.worst_sub_residual = worst_sub;
  rep.is_super = worst_super >= -rep.tolerance;
  rep.is_sub = worst_sub <= rep.tolerance;

  rep.hypothesis_holds = w.values.front() > v.values.front();
  bool dominated = true;
  for (long j = 1; j < n; ++j)
    dominated = dominated && w.values[j] > v.values[j];
  rep.ordered = rep.hypothesis_holds && dominated;
  return rep;
}

}  // namespace fracdecay
