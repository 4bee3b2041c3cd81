#include "fracdecay/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdecay {

std::string to_string(DecayKind k) {
  return k == DecayKind::exponential ? "exponential" : "polynomial";
}

namespace {

PredictedDecay covered_poly(double exponent, double gamma, std::string src) {
  PredictedDecay p;
  p.covered = true;
  p.kind = DecayKind::polynomial;
  p.exponent = exponent;
  p.gamma = gamma;
  p.source = std::move(src);
  return p;
}

PredictedDecay covered_exp(double gamma, std::string src) {
  PredictedDecay p;
  p.covered = true;
  p.kind = DecayKind::exponential;
  p.gamma = gamma;
  p.source = std::move(src);
  return p;
}

PredictedDecay not_covered(std::string reason) {
  PredictedDecay p;
  p.covered = false;
  p.reason = std::move(reason);
  return p;
}

// The generic dichotomy once the structural exponent gamma is known:
// mixed/fractional derivative -> polynomial alpha/gamma; classical
// derivative -> exponential for gamma <= 1, polynomial 1/(gamma-1) else.
PredictedDecay from_gamma(double gamma, const TimeDerivative& td,
                          std::string src) {
  if (td.lambda1 > 0.0)
    return covered_poly(td.alpha / gamma, gamma, std::move(src));
  if (gamma <= 1.0) return covered_exp(gamma, std::move(src));
  return covered_poly(1.0 / (gamma - 1.0), gamma, std::move(src));
}

}  // namespace

PredictedDecay predicted_rate(const DiffusionOperator& op,
                              const TimeDerivative& td, double s, int dim) {
  td.validate();
  if (s < 1.0) return not_covered("norm index s < 1");

  if (std::holds_alternative<Laplacian>(op))
    return from_gamma(1.0, td, "linear diffusion");
  if (std::holds_alternative<FractionalLaplacian>(op))
    return from_gamma(1.0, td, "fractional diffusion");
  if (std::holds_alternative<Magnetic>(op))
    return from_gamma(1.0, td, "magnetic diffusion");
  if (std::holds_alternative<FractionalMagnetic>(op))
    return from_gamma(1.0, td, "fractional magnetic diffusion");
  if (std::holds_alternative<AnisotropicFractional>(op))
    return from_gamma(1.0, td, "anisotropic fractional diffusion");
  if (std::holds_alternative<MeanCurvature>(op))
    return from_gamma(1.0, td, "graphical mean curvature");
  if (std::holds_alternative<FractionalMeanCurvature>(op))
    return from_gamma(1.0, td, "fractional graphical mean curvature");

  if (const auto* o = std::get_if<PLaplacianPower>(&op)) {
    const double gamma = o->m * (o->p - 1.0);
    return from_gamma(gamma, td, "nonlinear classical diffusion");
  }
  if (const auto* o = std::get_if<FractionalPLaplacian>(&op))
    return from_gamma(o->p - 1.0, td, "fractional p-laplacian");
  if (const auto* o = std::get_if<SumFractionalPLaplacians>(&op)) {
    double pmax = 0.0;
    for (const auto& t : o->terms) pmax = std::max(pmax, t.p);
    return from_gamma(pmax - 1.0, td, "superposition of fractional p-laplacians");
  }
  if (const auto* o = std::get_if<PorousMediumI>(&op))
    return from_gamma(o->m, td, "fractional porous medium (power form)");
  if (std::holds_alternative<PorousMediumII>(op)) {
    if (s <= 1.0) return not_covered("porous medium pressure form needs s > 1");
    return from_gamma(2.0, td, "porous medium with nonlocal pressure");
  }
  if (const auto* o = std::get_if<KirchhoffClassical>(&op)) {
    if (o->m0 > 0.0) return from_gamma(1.0, td, "kirchhoff, non-degenerate");
    if (dim <= 4) return from_gamma(3.0, td, "kirchhoff, degenerate, dim <= 4");
    if (s <= 2.0 * dim / (dim - 4.0))
      return from_gamma(3.0, td, "kirchhoff, degenerate, restricted s");
    return not_covered("degenerate kirchhoff needs s <= 2n/(n-4) for n > 4");
  }
  if (const auto* o = std::get_if<KirchhoffFractional>(&op)) {
    if (o->m0 > 0.0)
      return from_gamma(1.0, td, "fractional kirchhoff, non-degenerate");
    if (dim <= 4.0 * o->sigma)
      return from_gamma(3.0, td, "fractional kirchhoff, degenerate, dim <= 4 sigma");
    if (s <= 2.0 * dim / (dim - 4.0 * o->sigma))
      return from_gamma(3.0, td, "fractional kirchhoff, degenerate, restricted s");
    return not_covered(
        "degenerate fractional kirchhoff needs s <= 2n/(n-4 sigma)");
  }
  return not_covered("no decay result for this operator");
}

DecayFit fit_decay(const NormTrace& trace, double s,
                   const WindowPolicy& policy) {
  const auto& norms = trace.norms_for(s);
  if (trace.times.size() != norms.size())
    throw std::invalid_argument("fit_decay: malformed trace");

  double t_lo = policy.t_lo, t_hi = policy.t_hi;
  if (!(t_lo > 0.0 && t_hi > t_lo)) {
    double t_first = -1.0;
    for (double t : trace.times)
      if (t > 0.0) {
        t_first = t;
        break;
      }
    if (t_first < 0.0) throw std::invalid_argument("fit_decay: no t > 0");
    const double t_end = trace.times.back();
    if (!(t_end > t_first))
      throw std::invalid_argument("fit_decay: degenerate window");
    t_hi = t_end;
    t_lo = std::exp(std::log(t_end) -
                    policy.log_fraction * (std::log(t_end) - std::log(t_first)));
  }

  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double t = trace.times[k];
    if (t < t_lo || t > t_hi) continue;
    if (!(norms[k] > 0.0))
      throw std::invalid_argument("fit_decay: nonpositive norm in window");
    ts.push_back(t);
    ys.push_back(std::log(norms[k]));
  }
  if (static_cast<long>(ts.size()) < policy.min_points)
    throw std::invalid_argument("fit_decay: fewer than min_points in window");

  // exponential: linear least squares of log norm against t
  auto regress_exp = [&](double& slope, double& intercept) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double x = ts[i];
      sx += x;
      sy += ys[i];
      sxx += x * x;
      sxy += x * ys[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    intercept = (sy - slope * sx) / n;
    double rss = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double r = ys[i] - slope * ts[i] - intercept;
      rss += r * r;
    }
    return std::sqrt(rss / n);
  };

  // polynomial: the bound's own shape C / (1 + t^e); for fixed e the
  // constant is the log mean, so a 1-d search over e suffices
  auto poly_residual = [&](double e, double& log_c) {
    double mean = 0;
    std::vector<double> z(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      z[i] = ys[i] + std::log1p(std::pow(ts[i], e));
      mean += z[i];
    }
    mean /= static_cast<double>(ts.size());
    log_c = mean;
    double rss = 0;
    for (double zi : z) rss += (zi - mean) * (zi - mean);
    return std::sqrt(rss / static_cast<double>(ts.size()));
  };
  auto fit_poly = [&](double& e_best, double& log_c_best) {
    double best = 1e300;
    double dummy;
    for (int k = 0; k <= 160; ++k) {  // coarse scan of log e
      const double e = std::exp(std::log(1e-2) +
                                k * (std::log(30.0) - std::log(1e-2)) / 160.0);
      const double r = poly_residual(e, dummy);
      if (r < best) {
        best = r;
        e_best = e;
      }
    }
    double lo = e_best / 1.25, hi = e_best * 1.25;  // golden refinement
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = poly_residual(x1, dummy), f2 = poly_residual(x2, dummy);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = poly_residual(x1, dummy);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = poly_residual(x2, dummy);
      }
    }
    e_best = 0.5 * (a + b);
    return poly_residual(e_best, log_c_best);
  };

  double exp_rate_slope = 0.0, icept_e = 0.0, poly_e = 1.0, poly_log_c = 0.0;
  const double res_exp = regress_exp(exp_rate_slope, icept_e);
  const double res_poly = fit_poly(poly_e, poly_log_c);

  DecayFit fit;
  fit.window_lo = t_lo;
  fit.window_hi = t_hi;
  fit.points = static_cast<long>(ts.size());

  bool pick_poly = res_poly < res_exp;
  if (policy.preferred) {
    const double pref_res =
        *policy.preferred == DecayKind::polynomial ? res_poly : res_exp;
    const double other_res =
        *policy.preferred == DecayKind::polynomial ? res_exp : res_poly;
    if (pref_res <= 1.1 * other_res)
      pick_poly = *policy.preferred == DecayKind::polynomial;
  }
  if (pick_poly) {
    fit.kind = DecayKind::polynomial;
    fit.exponent = poly_e;
    fit.constant = std::exp(poly_log_c);
    fit.residual = res_poly;
    fit.residual_other = res_exp;
  } else {
    fit.kind = DecayKind::exponential;
    fit.rate = -exp_rate_slope;
    fit.constant = std::exp(icept_e);
    fit.residual = res_exp;
    fit.residual_other = res_poly;
  }
  return fit;
}

BoundCheck verify_bound(const NormTrace& trace, double s,
                        const PredictedDecay& pred, double exp_rate) {
  if (!pred.covered)
    throw std::invalid_argument("verify_bound: prediction not covered");
  const auto& norms = trace.norms_for(s);
  const double rate = pred.kind == DecayKind::exponential ? exp_rate : 0.0;
  if (pred.kind == DecayKind::exponential && !(rate > 0.0))
    throw std::invalid_argument("verify_bound: exponential check needs a rate");

  auto theta = [&](double t) {
    return pred.kind == DecayKind::polynomial
               ? 1.0 / (1.0 + std::pow(t, pred.exponent))
               : std::exp(-rate * t);
  };

  BoundCheck out;
  std::vector<double> ratio(trace.times.size());
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    ratio[k] = norms[k] / theta(trace.times[k]);

  double t_first = trace.times.back();
  for (double t : trace.times)
    if (t > 0.0) {
      t_first = t;
      break;
    }
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    c1 = std::max(c1, ratio[k]);
    if (trace.times[k] >= 2.0 * t_first) c2 = std::max(c2, ratio[k]);
  }
  out.c_star_hat = c1;
  out.c_star_late = c2;

  // Late-time growth of the ratio: slope of log ratio against log t
  // (polynomial) or t (exponential) over the last half of the trace.
  const double t_mid = 0.5 * (trace.times.front() + trace.times.back());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    if (trace.times[k] < t_mid || !(ratio[k] > 0.0)) continue;
    const double x = pred.kind == DecayKind::polynomial
                         ? std::log(trace.times[k])
                         : trace.times[k];
    sx += x;
    sy += std::log(ratio[k]);
    sxx += x * x;
    sxy += x * std::log(ratio[k]);
    n += 1.0;
  }
  out.tail_slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;

  const double slope_tol =
      pred.kind == DecayKind::polynomial ? 0.05 : 0.05 * rate;
  out.holds = std::isfinite(c1) && c2 <= c1 * (1.0 + 1e-12) &&
              out.tail_slope <= slope_tol;
  return out;
}

}  // namespace fracdecay
