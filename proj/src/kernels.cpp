#include "fracdecay/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdecay::kernels {

namespace {

// 16-point Gauss-Legendre on [-1,1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1896530590913408, 0.1896530590913408,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

double gauss_segment(double a, double b,
                     const std::function<double(double)>& f) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kGL; ++i) acc += kGLw[i] * f(mid + half * kGLx[i]);
  return acc * half;
}

// Ray exit distance from the origin to the boundary of the centered
// rectangle [-dxl, dxh] x [-dyl, dyh] in direction theta.
double ray_exit(double dxl, double dxh, double dyl, double dyh, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  double t = std::numeric_limits<double>::infinity();
  if (c > 1e-300) t = std::min(t, dxh / c);
  if (c < -1e-300) t = std::min(t, dxl / (-c));
  if (s > 1e-300) t = std::min(t, dyh / s);
  if (s < -1e-300) t = std::min(t, dyl / (-s));
  return t;
}

// Integrate g(rho(theta)) over [0, 2pi), splitting at the corner angles
// where rho has kinks.
double angular_integral(double dxl, double dxh, double dyl, double dyh,
                        const std::function<double(double)>& g) {
  const double breaks[7] = {std::atan2(dyh, dxh),
                            std::atan2(dyh, -dxl),
                            M_PI,
                            std::atan2(-dyl, -dxl) + 2.0 * M_PI,
                            1.5 * M_PI,
                            std::atan2(-dyl, dxh) + 2.0 * M_PI,
                            std::atan2(dyh, dxh) + 2.0 * M_PI};
  double acc = 0.0;
  auto f = [&](double th) { return g(ray_exit(dxl, dxh, dyl, dyh, th)); };
  for (int i = 0; i < 6; ++i) acc += gauss_segment(breaks[i], breaks[i + 1], f);
  return acc;
}

// Composite tensor Gauss-Legendre over the cell centered at (cx, cy), with
// `order` subdivisions per axis for cells near the singularity.
double cell_integral_2d(double cx, double cy, double hx, double hy, double q,
                        int order) {
  double acc = 0.0;
  const double sx = hx / order, sy = hy / order;
  for (int bx = 0; bx < order; ++bx) {
    for (int by = 0; by < order; ++by) {
      const double x0 = cx - hx / 2 + bx * sx;
      const double y0 = cy - hy / 2 + by * sy;
      for (int i = 0; i < kGL; ++i) {
        const double x = x0 + sx * 0.5 * (1.0 + kGLx[i]);
        for (int j = 0; j < kGL; ++j) {
          const double y = y0 + sy * 0.5 * (1.0 + kGLx[j]);
          acc += kGLw[i] * kGLw[j] * std::pow(x * x + y * y, -0.5 * q);
        }
      }
    }
  }
  return acc * (sx / 2) * (sy / 2);
}

}  // namespace

double power_segment(double a, double b, double q) {
  if (a < 0.0 || b <= a) throw std::invalid_argument("power_segment: bad range");
  if (a == 0.0 && q >= 1.0)
    throw std::invalid_argument("power_segment: divergent at 0");
  if (std::abs(q - 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, 1.0 - q) - std::pow(a, 1.0 - q)) / (1.0 - q);
}

double riesz_constant(int n, double sigma) {
  return std::tgamma(0.5 * n - sigma) /
         (std::pow(4.0, sigma) * std::pow(M_PI, 0.5 * n) * std::tgamma(sigma));
}

double frac_laplacian_constant(int n, double sigma) {
  // |Gamma(-sigma)| = Gamma(1 - sigma) / sigma for sigma in (0,1).
  const double abs_gamma_ms = std::tgamma(1.0 - sigma) / sigma;
  return std::pow(4.0, sigma) * std::tgamma(0.5 * n + sigma) /
         (std::pow(M_PI, 0.5 * n) * abs_gamma_ms);
}

std::array<double, 4> face_distances(const Grid& grid, Eigen::Index k) {
  const auto x = grid.node(k);
  std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) {
    d[2 * a] = x[a] - (grid.lo(a) + 0.5 * grid.h(a));
    d[2 * a + 1] = (grid.hi(a) - 0.5 * grid.h(a)) - x[a];
  }
  return d;
}

OffsetWeights::OffsetWeights(const Grid& grid, double q, bool include_self) {
  // one ghost layer beyond the interior offsets, for evaluations on the
  // boundary ring (porous-medium pressures)
  nx_ = grid.n(0) + 2;
  const int ny = (grid.dim() == 2 ? grid.n(1) : 1) + (grid.dim() == 2 ? 2 : 0);
  table_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx_) * ny);
  if (grid.dim() == 1) {
    const double h = grid.h(0);
    for (int m = 1; m < nx_; ++m)
      table_[m] = power_segment((m - 0.5) * h, (m + 0.5) * h, q);
    if (include_self) {
      if (q >= 1.0)
        throw std::invalid_argument("OffsetWeights: self cell divergent");
      table_[0] = 2.0 * power_segment(0.0, 0.5 * h, q);
    }
    return;
  }
  const double hx = grid.h(0), hy = grid.h(1);
  for (int my = 0; my < ny; ++my) {
    for (int mx = 0; mx < nx_; ++mx) {
      if (mx == 0 && my == 0) continue;
      const int dist = std::max(mx, my);
      const int order = dist <= 2 ? 4 : (dist <= 8 ? 2 : 1);
      table_[mx + static_cast<Eigen::Index>(nx_) * my] =
          cell_integral_2d(mx * hx, my * hy, hx, hy, q, order);
    }
  }
  if (include_self) {
    if (q >= 2.0)
      throw std::invalid_argument("OffsetWeights: self cell divergent");
    // Exact in radius: int over the cell = int_theta rho^{2-q}/(2-q).
    table_[0] = angular_integral(
        hx / 2, hx / 2, hy / 2, hy / 2,
        [q](double rho) { return std::pow(rho, 2.0 - q) / (2.0 - q); });
  }
}

double exterior_tail(const Grid& grid, const std::array<double, 4>& d,
                     double q) {
  if (grid.dim() == 1) {
    if (q <= 1.0) throw std::invalid_argument("exterior_tail: need q > 1");
    return (std::pow(d[0], 1.0 - q) + std::pow(d[1], 1.0 - q)) / (q - 1.0);
  }
  if (q <= 2.0) throw std::invalid_argument("exterior_tail: need q > 2");
  return angular_integral(d[0], d[1], d[2], d[3], [q](double rho) {
    return std::pow(rho, 2.0 - q) / (q - 2.0);
  });
}

std::array<double, 2> self_cell_second_moments(const Grid& grid, double q) {
  if (grid.dim() == 1) {
    const double h = grid.h(0);
    // int_{-h/2}^{h/2} z^2 |z|^{-q} dz
    return {2.0 * std::pow(0.5 * h, 3.0 - q) / (3.0 - q), 0.0};
  }
  const double hx = grid.h(0), hy = grid.h(1);
  std::array<double, 2> m{0.0, 0.0};
  // int_cell z_a^2 |z|^{-q} dz = int_theta trig^2(theta) rho^{4-q}/(4-q)
  auto moment = [&](bool xaxis) {
    auto g = [&](double th) {
      const double rho = ray_exit(hx / 2, hx / 2, hy / 2, hy / 2, th);
      const double trig = xaxis ? std::cos(th) : std::sin(th);
      return trig * trig * std::pow(rho, 4.0 - q) / (4.0 - q);
    };
    double corners[2] = {std::atan2(hy, hx), M_PI - std::atan2(hy, hx)};
    double acc = gauss_segment(0.0, corners[0], g) +
                 gauss_segment(corners[0], corners[1], g) +
                 gauss_segment(corners[1], M_PI, g);
    return 2.0 * acc;  // symmetry in the lower half plane
  };
  m[0] = moment(true);
  m[1] = moment(false);
  return m;
}

double angular_exterior_integral(const Grid& grid,
                                 const std::array<double, 4>& d,
                                 const std::function<double(double)>& g) {
  if (grid.dim() == 1) return g(d[0]) + g(d[1]);
  return angular_integral(d[0], d[1], d[2], d[3], g);
}

}  // namespace fracdecay::kernels
