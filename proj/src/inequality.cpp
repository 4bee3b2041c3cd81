#include "fracdecay/inequality.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracdecay/kernels.hpp"

namespace fracdecay {

namespace {

double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double phi_s(double t, double s) {
  if (t == 0.0) return 0.0;
  return std::pow(std::abs(t), s - 2.0) * t;
}

}  // namespace

double energy_integral_applied(const Field& u, const Field& nu, double s) {
  if (s < 1.0) throw std::invalid_argument("energy_integral: need s >= 1");
  const auto& uv = u.values();
  const auto& nv = nu.values();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < uv.size(); ++i) {
    const double mag = std::abs(uv[i]);
    if (mag == 0.0) continue;  // |u|^{s-2} u -> 0 limit for s < 2
    const double re = uv[i].real() * nv[i].real() + uv[i].imag() * nv[i].imag();
    acc += std::pow(mag, s - 2.0) * re;
  }
  const double value = acc * u.grid().cell_measure();
  if (!std::isfinite(value))
    throw std::invalid_argument("energy_integral: non-finite integrand");
  return value;
}

double energy_integral(const Field& u, double s, const PreparedOperator& op) {
  return energy_integral_applied(u, op.apply(u), s);
}

double energy_integral(const Field& u, double s, const DiffusionOperator& op) {
  return energy_integral(u, s, *prepared(op, u.grid()));
}

StructuralReport structural_check(const DiffusionOperator& op, double s,
                                  double gamma,
                                  const std::vector<Field>& sample_fields) {
  if (sample_fields.empty())
    throw std::invalid_argument("structural_check: no sample fields");
  StructuralReport rep;
  rep.s = s;
  rep.gamma = gamma;
  rep.samples = static_cast<int>(sample_fields.size());
  auto prep = prepared(op, sample_fields.front().grid());
  for (const Field& u : sample_fields) {
    const double e = energy_integral(u, s, *prep);
    const double np = std::pow(lp_norm(u, s), s - 1.0 + gamma);
    rep.energies.push_back(e);
    rep.norm_powers.push_back(np);
    if (e <= 0.0)
      ++rep.violations;
    else
      rep.c_hat = std::max(rep.c_hat, np / e);
  }
  return rep;
}

std::vector<Field> sample_fields(const DiffusionOperator& op, const Grid& grid,
                                 int count, std::uint64_t seed) {
  std::vector<Field> out;
  const bool wants_nonneg = prefers_nonnegative(op);
  const bool wants_real = requires_real_field(op);
  const bool complex_ok = !wants_real;
  out.push_back(eigenfunction_field(grid));
  out.push_back(bump_field(grid));
  for (int i = static_cast<int>(out.size()); i < count; ++i) {
    const int smoothness = 2 + i % 3;
    const std::uint64_t si = seed + 7919 * i;
    if (wants_nonneg) {
      // nonnegative smooth data: randomly modulated bump
      Field noise = random_field(grid, si, smoothness + 1);
      Field bump = bump_field(grid, 1.0, 0.6 + 0.3 * ((i % 4) / 4.0));
      CVector v = bump.values().cwiseProduct(
          (CVector::Ones(grid.size()) + 0.8 * noise.values()));
      out.emplace_back(grid, v.cwiseAbs().cast<Complex>().eval());
    } else if (complex_ok && is_complex_valued(op)) {
      out.push_back(random_complex_field(grid, si, smoothness));
    } else {
      out.push_back(random_field(grid, si, smoothness));
    }
  }
  return out;
}

namespace {

IdentityReport check_st00(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityReport rep{"st00", true, 1e300, n, ""};
  for (long it = 0; it < n; ++it) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const double a = 2.0 * uniform_pm1(rng);
    const double b = 2.0 * uniform_pm1(rng);
    double lhs_t = 0.0, lhs_a = 0.0, rhs = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double al = 2.0 * uniform_pm1(rng);
      const double be = 2.0 * uniform_pm1(rng);
      const double t = 2.0 * uniform_pm1(rng);
      lhs_t += (a * t - be) * (a * t - be);
      lhs_a += (b * t + al) * (b * t + al);
      rhs += (a * al + b * be) * (a * al + b * be);
    }
    const double margin = (a * a + b * b) * (lhs_t + lhs_a) - rhs;
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

IdentityReport check_do1(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityReport rep{"do1", true, 1e300, n, ""};
  for (long it = 0; it < n; ++it) {
    const double a = 2.0 * uniform_pm1(rng);
    const double b = it % 17 == 0 ? a : 2.0 * uniform_pm1(rng);
    const double s = uniform_in(rng, 1.0, 6.0);
    const double margin = (a - b) * (phi_s(a, s) - phi_s(b, s));
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

// Bounds the ratio of |a|^r - |b|^r powers to the monotone pairing by the
// supremum of g over (-1,1), scanned densely, then verifies random pairs
// against that constant.
IdentityReport check_kirch_power(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityReport rep{"kirch_power", true, 1e300, n, ""};
  const long n_s = std::max(4L, n / 4000);
  for (long is = 0; is < n_s; ++is) {
    const double s = is == 0 ? 2.0 : uniform_in(rng, 1.0, 6.0);
    const double p = std::max(2.0, 0.5 * (s + 2.0));
    const double r = (s + 2.0) / (2.0 * p);
    auto g = [&](double lam) {
      const double num = std::pow(1.0 - std::pow(std::abs(lam), r), 2.0 * p);
      const double den =
          std::pow(1.0 - lam, 3.0) * (1.0 - phi_s(std::abs(lam), s) *
                                                (lam < 0 ? -1.0 : 1.0));
      return num / den;
    };
    double c_hat = 0.0;
    for (int k = 0; k <= 4000; ++k) {
      const double lam = -0.99995 + 1.9999 * k / 4000.0;
      const double val = g(lam);
      if (!std::isfinite(val)) {
        rep.pass = false;
        rep.detail = "g(lambda) not finite on the scan";
        return rep;
      }
      c_hat = std::max(c_hat, val);
    }
    const long per_s = n / n_s;
    for (long it = 0; it < per_s; ++it) {
      double a = 3.0 * uniform_pm1(rng);
      double b = 3.0 * uniform_pm1(rng);
      if (std::abs(a) < std::abs(b)) std::swap(a, b);
      if (a == b || std::abs(a) < 1e-12) continue;
      const double lhs = std::pow(
          std::abs(std::pow(std::abs(a), r) - std::pow(std::abs(b), r)),
          2.0 * p);
      const double rhs =
          std::pow(a - b, 3.0) * (phi_s(a, s) - phi_s(b, s));
      const double scale = std::pow(std::abs(a), s + 2.0);
      const double margin = (c_hat * (1.0 + 1e-9) * rhs - lhs) / scale;
      rep.worst_margin = std::min(rep.worst_margin, margin);
    }
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

IdentityReport check_magnetic_pointwise(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityReport rep{"magnetic_pointwise", true, 1e300, n, ""};
  for (long it = 0; it < n; ++it) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const Complex ux(2.0 * uniform_pm1(rng), 2.0 * uniform_pm1(rng));
    const Complex uy(2.0 * uniform_pm1(rng), 2.0 * uniform_pm1(rng));
    double theta = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double x = uniform_pm1(rng), y = uniform_pm1(rng);
      if (x == y) continue;
      const double a0 = 3.0 * uniform_pm1(rng);
      const double lin = uniform_pm1(rng);
      theta += (x - y) * (a0 + lin * 0.5 * (x + y));
    }
    const Complex phase = std::exp(Complex(0.0, theta));
    const double lhs = (std::conj(ux) * (ux - phase * uy)).real();
    const double rhs = std::abs(ux) * (std::abs(ux) - std::abs(uy));
    rep.worst_margin = std::min(rep.worst_margin, lhs - rhs);
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

IdentityReport check_poincare(long n, std::uint64_t seed) {
  IdentityReport rep{"poincare", true, 1e300, 0, ""};
  const long count = std::min<long>(n, 160);
  rep.samples = count;
  const Grid g1(0.0, 1.0, 99);
  const Grid g2({0.0, 0.0}, {1.0, 1.0}, {17, 17});
  for (long it = 0; it < count; ++it) {
    const Grid& g = it % 4 == 3 ? g2 : g1;
    const Field u = it % 2 == 0
                        ? random_field(g, seed + it, static_cast<int>(it % 3))
                        : random_complex_field(g, seed + it, 2);
    const double cp = 1.0 / g.laplacian_min_eigenvalue();
    const double l2 = lp_norm(u, 2.0);
    const double margin = cp * gradient_sq_norm(u) - l2 * l2;
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

// Fractional Sobolev embedding probed as grid-stability of the empirical
// constant |v|_{L^q}^2 <= C [v]_{sigma}^2 between two resolutions.
IdentityReport check_sobolev_frac(long n, std::uint64_t seed) {
  IdentityReport rep{"sobolev_frac", true, 1e300, 0, ""};
  const long count = std::min<long>(n, 40);
  rep.samples = count;
  const struct {
    double sigma, q;
  } cases[2] = {{0.3, 2.0 / (1.0 - 2.0 * 0.3)}, {0.6, 8.0}};
  for (const auto& c : cases) {
    double c_coarse = 0.0, c_fine = 0.0;
    for (const int nn : {64, 128}) {
      const Grid g(0.0, 1.0, nn);
      double& c_hat = nn == 64 ? c_coarse : c_fine;
      for (long it = 0; it < count; ++it) {
        Field u = it == 0 ? eigenfunction_field(g)
                          : random_field(g, seed + it, 2 + it % 3);
        const double qn = lp_norm(u, c.q);
        const double sem = gagliardo_seminorm_sq(u, c.sigma);
        if (sem > 0.0) c_hat = std::max(c_hat, qn * qn / sem);
      }
    }
    rep.worst_margin = std::min(rep.worst_margin, 2.0 * c_coarse - c_fine);
    rep.detail += "sigma=" + std::to_string(c.sigma) +
                  " C_coarse=" + std::to_string(c_coarse) +
                  " C_fine=" + std::to_string(c_fine) + "; ";
  }
  rep.pass = rep.worst_margin >= -1e-12;
  return rep;
}

}  // namespace

IdentityReport check_identity(const std::string& name, long n_samples,
                              std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("check_identity: need n_samples >= 1");
  if (name == "st00") return check_st00(n_samples, seed);
  if (name == "do1") return check_do1(n_samples, seed);
  if (name == "kirch_power") return check_kirch_power(n_samples, seed);
  if (name == "magnetic_pointwise")
    return check_magnetic_pointwise(n_samples, seed);
  if (name == "poincare") return check_poincare(n_samples, seed);
  if (name == "sobolev_frac") return check_sobolev_frac(n_samples, seed);
  throw std::invalid_argument("check_identity: unknown name '" + name + "'");
}

double porous_medium_pair_energy(const Field& u, double s, double sigma) {
  const Grid& g = u.grid();
  if (!(g.dim() > 2.0 * sigma))
    throw std::invalid_argument("porous_medium_pair_energy: need dim > 2 sigma");
  if (!u.is_real(1e-10))
    throw std::invalid_argument("porous_medium_pair_energy: real fields only");
  const double q = g.dim() + 2.0 * (1.0 - sigma);
  kernels::OffsetWeights w(g, q, false);
  const double c = kernels::riesz_constant(g.dim(), sigma);
  const Eigen::VectorXd ur = u.values().real();
  const int nx = g.n(0), ny = g.dim() == 2 ? g.n(1) : 1;
  double acc = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Eigen::Index i = g.flat_index(ix, iy);
      const double us_i = signed_power(ur[i], s);
      for (int jy = 0; jy < ny; ++jy) {
        for (int jx = 0; jx < nx; ++jx) {
          if (ix == jx && iy == jy) continue;
          const Eigen::Index j = g.flat_index(jx, jy);
          acc += w.at(jx - ix, jy - iy) * (us_i - signed_power(ur[j], s)) *
                 (ur[i] - ur[j]);
        }
      }
      const double tail =
          kernels::exterior_tail(g, kernels::face_distances(g, i), q);
      acc += 2.0 * tail * us_i * ur[i];
    }
  }
  // int u^{s-1} N[u] = c (n-2sigma)(2-2sigma)/2 * (s-1)/s * double sum
  const double scale = (g.dim() - 2.0 * sigma) * (2.0 - 2.0 * sigma) / 2.0 *
                       (s - 1.0) / s;
  return c * scale * acc * g.cell_measure();
}

}  // namespace fracdecay
