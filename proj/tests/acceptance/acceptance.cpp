// Acceptance suite: one criterion per function, a pass/fail line each.
// Run with no arguments for the full suite, or pass criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fracdecay/barriers.hpp"
#include "fracdecay/caputo.hpp"
#include "fracdecay/decay.hpp"
#include "fracdecay/experiment.hpp"
#include "fracdecay/inequality.hpp"
#include "fracdecay/integrate.hpp"
#include "fracdecay/special.hpp"

using namespace fracdecay;
using clock_type = std::chrono::steady_clock;

namespace {

struct Criterion {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

double elapsed(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

SimulationConfig heat_config(int n, double l1, double alpha) {
  SimulationConfig cfg;
  cfg.grid.n[0] = n;
  cfg.op = Laplacian{1.0};
  cfg.td = {l1, 1.0 - l1, alpha, Normalization::standard};
  cfg.u0.kind = InitialData::Kind::eigenfunction;
  return cfg;
}

// 1. Scalar fractional relaxation against the Mittag-Leffler function.
Criterion criterion_1() {
  Criterion c;
  const auto t0 = clock_type::now();
  const auto traj = solve_scalar_ode(1.0, 0.0, 0.5, 1.0, 1.0, 1.0, 5.0, 1e-3,
                                     Normalization::standard);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < 0.1 || t > 5.0) continue;
    const double want = mittag_leffler(0.5, -std::sqrt(t));
    worst = std::max(worst, std::abs(traj.values[k] - want) / want);
  }
  const double secs = elapsed(t0);
  c.require(worst < 0.02, "relative error " + fmt(worst) + " >= 2%");
  c.require(secs < 10.0, "runtime " + fmt(secs) + "s >= 10s");
  c.note("worst rel " + fmt(worst) + ", " + fmt(secs) + "s");
  return c;
}

// 2. Classical heat: exponential rate within 3% of pi^2.
Criterion criterion_2() {
  Criterion c;
  const auto t0 = clock_type::now();
  SimulationConfig cfg = heat_config(199, 0.0, 0.5);
  cfg.dt = 1e-4;
  cfg.t_final = 1.0;
  cfg.record_every = 10;
  const auto res = simulate(cfg);
  WindowPolicy pol;
  pol.t_lo = 0.1;
  pol.t_hi = 1.0;
  const auto fit = fit_decay(res.trace, 2.0, pol);
  const double secs = elapsed(t0);
  const double rel = std::abs(fit.rate - M_PI * M_PI) / (M_PI * M_PI);
  c.require(fit.kind == DecayKind::exponential, "fit kind not exponential");
  c.require(rel < 0.03, "rate off pi^2 by " + fmt(rel));
  c.require(secs < 30.0, "runtime " + fmt(secs) + "s >= 30s");
  c.note("rate " + fmt(fit.rate) + " vs pi^2, rel " + fmt(rel) + ", " +
         fmt(secs) + "s");
  return c;
}

// 3. Caputo heat: log-log slope within 0.1 of -alpha on [10, 100].
Criterion criterion_3() {
  Criterion c;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto t0 = clock_type::now();
    SimulationConfig cfg = heat_config(199, 1.0, alpha);
    cfg.dt = 0.01;
    cfg.t_final = 100.0;
    cfg.record_every = 100;
    const auto res = simulate(cfg);
    // slope of log norm against log t over the stated window
    const auto& v = res.trace.norms_for(2.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double t = res.trace.times[k];
      if (t < 10.0 || t > 100.0) continue;
      const double x = std::log(t), y = std::log(v[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      n += 1.0;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double secs = elapsed(t0);
    c.require(std::abs(-slope - alpha) < 0.1,
              "alpha=" + fmt(alpha) + ": slope " + fmt(-slope));
    c.require(secs < 300.0, "alpha=" + fmt(alpha) + " runtime " + fmt(secs));
    // the classifier agrees on the kind
    const auto fit = fit_decay(res.trace, 2.0, {});
    c.require(fit.kind == DecayKind::polynomial,
              "alpha=" + fmt(alpha) + ": fit kind not polynomial");
    c.note("a=" + fmt(alpha) + ": slope " + fmt(-slope) + " (" + fmt(secs) +
           "s)");
  }
  return c;
}

// 4. Exponential-vs-polynomial dichotomy across the linear menu.
Criterion criterion_4() {
  Criterion c;
  VectorFieldSpec a;
  a.a0[0] = 1.0;
  const std::vector<std::pair<std::string, DiffusionOperator>> menu = {
      {"laplacian", Laplacian{1.0}},
      {"frac_laplacian", FractionalLaplacian{0.5, 1.0, false}},
      {"magnetic", Magnetic{a}},
      {"frac_magnetic", FractionalMagnetic{0.5, a}},
      {"kirchhoff", KirchhoffClassical{1.0, 0.0}}};
  for (const auto& [name, op] : menu) {
    for (double l1 : {0.0, 1.0}) {
      SimulationConfig cfg;
      cfg.grid.n[0] = 99;
      cfg.op = op;
      cfg.td = {l1, 1.0 - l1, 0.5, Normalization::standard};
      cfg.u0.kind = InitialData::Kind::bump;
      if (l1 == 0.0) {
        cfg.dt = 1e-3;
        cfg.t_final = 1.5;
        cfg.record_every = 5;
      } else {
        cfg.dt = 0.01;
        cfg.t_final = 50.0;
        cfg.record_every = 50;
      }
      const auto res = simulate(cfg);
      const auto fit = fit_decay(res.trace, 2.0, {});  // no preferred kind
      const DecayKind want =
          l1 == 0.0 ? DecayKind::exponential : DecayKind::polynomial;
      c.require(fit.kind == want, name + " l1=" + fmt(l1) + " classified " +
                                      to_string(fit.kind));
    }
  }
  if (c.pass) c.note("10/10 cells classified per the dichotomy");
  return c;
}

// 5. Degenerate Kirchhoff: exponent in [0.4, 0.7], bound against t^{-1/2}.
Criterion criterion_5() {
  Criterion c;
  SimulationConfig cfg;
  cfg.grid.n[0] = 99;
  cfg.op = KirchhoffClassical{0.0, 1.0};
  cfg.td = {0.0, 1.0, 0.5, Normalization::standard};
  cfg.u0.kind = InitialData::Kind::eigenfunction;
  cfg.dt = 1e-3;
  cfg.t_final = 100.0;
  cfg.record_every = 10;
  const auto res = simulate(cfg);
  const auto fit = fit_decay(res.trace, 2.0, {});
  const auto pred = predicted_rate(cfg.op, cfg.td, 2.0, 1);
  const auto bound = verify_bound(res.trace, 2.0, pred);
  c.require(fit.kind == DecayKind::polynomial, "fit kind not polynomial");
  c.require(fit.exponent >= 0.4, "exponent " + fmt(fit.exponent) + " < 0.4");
  c.require(fit.exponent <= 0.7, "exponent " + fmt(fit.exponent) + " > 0.7");
  c.require(pred.exponent == 0.5, "predicted exponent is not 1/2");
  c.require(bound.holds, "bound against 1/(1+sqrt(t)) does not hold");
  c.note("exponent " + fmt(fit.exponent) + ", C* " + fmt(bound.c_star_hat));
  return c;
}

// 6. Porous medium with nonlocal pressure: bound C*/(1+t), stable C*.
Criterion criterion_6() {
  Criterion c;
  double c_star[2] = {0.0, 0.0};
  int k = 0;
  for (int n : {99, 199}) {
    SimulationConfig cfg;
    cfg.grid.n[0] = n;
    cfg.op = PorousMediumII{0.25};
    cfg.td = {0.0, 1.0, 0.5, Normalization::standard};
    cfg.u0.kind = InitialData::Kind::bump;
    const Grid g = cfg.grid.build();
    cfg.dt = 0.15 * g.h(0) * g.h(0);
    cfg.t_final = n == 99 ? 20.0 : 10.0;
    cfg.record_every = 1000;
    const auto res = simulate(cfg);
    c.require(!res.trace.blow_up.has_value(), "n=" + std::to_string(n) +
                                                  " blew up");
    if (res.trace.blow_up) return c;
    const auto pred = predicted_rate(cfg.op, cfg.td, 2.0, 1);
    const auto bound = verify_bound(res.trace, 2.0, pred);
    c.require(bound.holds, "n=" + std::to_string(n) + ": bound fails");
    c_star[k++] = bound.c_star_hat;
  }
  const double ratio = c_star[1] / c_star[0];
  c.require(ratio < 2.0 && ratio > 0.5,
            "C* unstable across resolutions: " + fmt(ratio));
  c.note("C* " + fmt(c_star[0]) + " / " + fmt(c_star[1]) + " (ratio " +
         fmt(ratio) + ")");
  return c;
}

// 7. Inequality suite: four identities at 1e5 x 3 seeds, then the
// structural matrix at two resolutions.
Criterion criterion_7() {
  Criterion c;
  const auto t0 = clock_type::now();
  for (const char* name :
       {"st00", "do1", "kirch_power", "magnetic_pointwise"}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const auto rep = check_identity(name, 100000, seed);
      c.require(rep.pass && rep.worst_margin >= -1e-12,
                std::string(name) + " seed " + std::to_string(seed) +
                    " margin " + fmt(rep.worst_margin));
    }
  }
  int checked = 0;
  for (const auto& sc : default_structural_matrix()) {
    double c_hat[2] = {0.0, 0.0};
    int violations = 0;
    int k = 0;
    for (int n : {99, 199}) {
      const Grid g(0.0, 1.0, n);
      const auto samples = sample_fields(sc.op, g, 24, 11);
      const auto rep = structural_check(sc.op, sc.s, sc.gamma, samples);
      violations += rep.violations;
      c_hat[k++] = rep.c_hat;
    }
    const double ratio = c_hat[1] / c_hat[0];
    c.require(violations == 0, sc.label + ": violations");
    c.require(ratio < 2.0 && ratio > 0.5, sc.label + ": C ratio " + fmt(ratio));
    ++checked;
  }
  const double secs = elapsed(t0);
  c.require(secs < 120.0, "runtime " + fmt(secs) + "s >= 2min");
  c.note(std::to_string(checked) + " structural rows, " + fmt(secs) + "s");
  return c;
}

// 8. Barrier domination over the (alpha, gamma) grid with mixed derivative.
Criterion criterion_8() {
  Criterion c;
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double gamma : {1.0, 2.0, 3.0}) {
      const auto v =
          solve_scalar_ode(0.5, 0.5, alpha, 1.0, gamma, 1.0, 20.0, 1e-3);
      const auto spec = make_mixed_barrier(1.0, 1.0, gamma, alpha);
      double worst = -1e300;
      for (std::size_t k = 0; k < v.times.size(); ++k)
        worst = std::max(worst,
                         v.values[k] - barrier_eval(spec, v.times[k]));
      c.require(worst <= 1e-6, "a=" + fmt(alpha) + " g=" + fmt(gamma) +
                                   ": trajectory above the barrier by " +
                                   fmt(worst));
      // strict initial ordering for the comparison conclusion
      const auto spec_up = make_mixed_barrier(1.05, 1.0, gamma, alpha);
      const auto w = sample_barrier(spec_up, 0.5, 0.5, 20.0, 1e-3);
      const auto rep = check_comparison(w, v);
      c.require(rep.is_super, "a=" + fmt(alpha) + " g=" + fmt(gamma) +
                                  ": barrier not a discrete supersolution");
      c.require(rep.ordered, "a=" + fmt(alpha) + " g=" + fmt(gamma) +
                                 ": ordering fails");
    }
  }
  if (c.pass) c.note("9/9 cells dominated, ordered");
  return c;
}

// 9. Discrete differential inequality along the heat runs.
Criterion criterion_9() {
  Criterion c;
  for (double l1 : {0.0, 1.0}) {
    SimulationConfig cfg = heat_config(199, l1, 0.5);
    cfg.record_energy = true;
    if (l1 == 0.0) {
      cfg.dt = 1e-4;
      cfg.t_final = 1.0;
      cfg.record_every = 10;
    } else {
      cfg.dt = 0.01;
      cfg.t_final = 100.0;
      cfg.record_every = 100;
    }
    const auto res = simulate(cfg);
    const auto& v = res.trace.norms_for(2.0);
    const auto& e = res.trace.energies[0];
    double c_hat = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k)
      if (e[k] > 0.0) c_hat = std::max(c_hat, v[k] * v[k] / e[k]);
    const double dtr = res.trace.dt_recorded();
    CaputoL1 cap(cfg.td.alpha, dtr, cfg.td.normalization);
    Eigen::VectorXd w;
    long ok = 0, total = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      double d = cfg.td.lambda2 * (v[k] - v[k - 1]) / dtr;
      if (cfg.td.lambda1 > 0.0) {
        cap.weights(static_cast<Eigen::Index>(k), w);
        double acc = 0.0;
        for (std::size_t m = 0; m <= k; ++m) acc += w[m] * v[m];
        d += cfg.td.lambda1 * acc;
      }
      ++total;
      // 5% slack on the dissipation absorbs the scheme error
      if (d <= -(1.0 - 0.05) * v[k] / c_hat) ++ok;
    }
    const double frac = static_cast<double>(ok) / total;
    c.require(frac >= 0.95, "l1=" + fmt(l1) + ": only " + fmt(100 * frac) +
                                "% of nodes dissipate");
    c.note("l1=" + fmt(l1) + ": " + fmt(100 * frac) + "% of " +
           std::to_string(total) + " nodes, C " + fmt(c_hat));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using Fn = Criterion (*)();
  const std::vector<std::pair<std::string, Fn>> criteria = {
      {"mittag-leffler oracle for the scalar relaxation", criterion_1},
      {"classical heat decays exponentially at rate pi^2", criterion_2},
      {"fractional heat decays polynomially at rate alpha", criterion_3},
      {"exponential/polynomial dichotomy across the menu", criterion_4},
      {"degenerate kirchhoff decays like t^{-1/2}", criterion_5},
      {"porous medium pressure form is bounded by C*/(1+t)", criterion_6},
      {"inequality suite and structural matrix", criterion_7},
      {"mixed barriers dominate scalar trajectories", criterion_8},
      {"discrete differential inequality along the runs", criterion_9}};

  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  if (selected.empty())
    for (std::size_t i = 1; i <= criteria.size(); ++i)
      selected.push_back(static_cast<int>(i));

  int failures = 0;
  for (int idx : selected) {
    if (idx < 1 || idx > static_cast<int>(criteria.size())) {
      std::printf("[%d] unknown criterion\n", idx);
      ++failures;
      continue;
    }
    const auto t0 = clock_type::now();
    Criterion result;
    try {
      result = criteria[idx - 1].second();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%d/9] %s  %s (%s) [%.1fs]\n", idx,
                result.pass ? "PASS" : "FAIL", criteria[idx - 1].first.c_str(),
                result.detail.c_str(), elapsed(t0));
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  if (selected.size() > 1)
    std::printf("acceptance: %zu/%zu criteria passed\n",
                selected.size() - failures, selected.size());
  return failures == 0 ? 0 : 1;
}
