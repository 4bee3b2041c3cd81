#include "fracdecay/grid.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fracdecay {

namespace {

// Portable uniform double in [-1,1) from raw mt19937_64 output.
// std::uniform_real_distribution is implementation-defined, which would
// break byte-identical outputs across toolchains.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

Grid::Grid(double a, double b, int n)
    : dim_(1), n_{n, 1}, lo_{a, 0.0}, hi_{b, 0.0} {
  if (n < 3) throw std::invalid_argument("Grid: need n >= 3 per axis");
  if (!(b > a)) throw std::invalid_argument("Grid: need b > a");
  h_ = {(b - a) / (n + 1), 0.0};
  size_ = n;
  measure_ = h_[0];
}

Grid::Grid(std::array<double, 2> lo, std::array<double, 2> hi,
           std::array<int, 2> n)
    : dim_(2), n_(n), lo_(lo), hi_(hi) {
  for (int a = 0; a < 2; ++a) {
    if (n[a] < 3) throw std::invalid_argument("Grid: need n >= 3 per axis");
    if (!(hi[a] > lo[a]))
      throw std::invalid_argument("Grid: need hi > lo per axis");
    h_[a] = (hi[a] - lo[a]) / (n[a] + 1);
  }
  size_ = static_cast<Eigen::Index>(n[0]) * n[1];
  measure_ = h_[0] * h_[1];
}

double Grid::box_measure() const {
  double m = hi_[0] - lo_[0];
  if (dim_ == 2) m *= hi_[1] - lo_[1];
  return m;
}

std::array<double, 2> Grid::node(Eigen::Index k) const {
  const auto ij = unflatten(k);
  return {coord(ij[0], 0), dim_ == 2 ? coord(ij[1], 1) : 0.0};
}

bool Grid::operator==(const Grid& o) const {
  return dim_ == o.dim_ && n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_;
}

double Grid::laplacian_min_eigenvalue() const {
  double lam = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double th = M_PI * h_[a] / (hi_[a] - lo_[a]);
    lam += 2.0 / (h_[a] * h_[a]) * (1.0 - std::cos(th));
  }
  return lam;
}

Field::Field(Grid grid, CVector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("Field: value count does not match grid");
}

Field::Field(Grid grid) : grid_(std::move(grid)) {
  values_ = CVector::Zero(grid_.size());
}

Complex Field::at_or_zero(int ix, int iy) const {
  if (ix < 0 || ix >= grid_.n(0)) return {0.0, 0.0};
  if (grid_.dim() == 2 && (iy < 0 || iy >= grid_.n(1))) return {0.0, 0.0};
  if (grid_.dim() == 1 && iy != 0) return {0.0, 0.0};
  return values_[grid_.flat_index(ix, iy)];
}

bool Field::is_finite() const {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
      return false;
  }
  return true;
}

bool Field::is_real(double rel_tol) const {
  const double scale = max_abs();
  if (scale == 0.0) return true;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (std::abs(values_[i].imag()) > rel_tol * scale) return false;
  }
  return true;
}

double Field::max_abs() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    m = std::max(m, std::abs(values_[i]));
  return m;
}

double lp_norm(const Field& field, double s) {
  if (s < 1.0) throw std::invalid_argument("lp_norm: need s >= 1");
  if (!field.is_finite())
    throw std::invalid_argument("lp_norm: field has non-finite entries");
  const auto& u = field.values();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    acc += std::pow(std::abs(u[i]), s);
  return std::pow(acc * field.grid().cell_measure(), 1.0 / s);
}

double gradient_sq_norm(const Field& field) {
  if (!field.is_finite())
    throw std::invalid_argument("gradient_sq_norm: non-finite field");
  const Grid& g = field.grid();
  const double meas = g.cell_measure();
  double acc = 0.0;
  const int ny = g.dim() == 2 ? g.n(1) : 1;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix <= g.n(0); ++ix) {
      const Complex d = field.at_or_zero(ix, iy) - field.at_or_zero(ix - 1, iy);
      acc += std::norm(d) / (g.h(0) * g.h(0)) * meas;
    }
  }
  if (g.dim() == 2) {
    for (int ix = 0; ix < g.n(0); ++ix) {
      for (int iy = 0; iy <= g.n(1); ++iy) {
        const Complex d =
            field.at_or_zero(ix, iy) - field.at_or_zero(ix, iy - 1);
        acc += std::norm(d) / (g.h(1) * g.h(1)) * meas;
      }
    }
  }
  return acc;
}

Field smooth_once(const Field& field) {
  const Grid& g = field.grid();
  CVector out(g.size());
  const int ny = g.dim() == 2 ? g.n(1) : 1;
  const double w = 1.0 / (1.0 + 2.0 * g.dim());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < g.n(0); ++ix) {
      Complex acc = field.at_or_zero(ix, iy) + field.at_or_zero(ix - 1, iy) +
                    field.at_or_zero(ix + 1, iy);
      if (g.dim() == 2)
        acc += field.at_or_zero(ix, iy - 1) + field.at_or_zero(ix, iy + 1);
      out[g.flat_index(ix, iy)] = acc * w;
    }
  }
  return {g, std::move(out)};
}

double laplacian_magnitude(const Field& field) {
  const Grid& g = field.grid();
  double acc = 0.0;
  const int ny = g.dim() == 2 ? g.n(1) : 1;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < g.n(0); ++ix) {
      Complex lap = -2.0 * static_cast<double>(g.dim()) *
                    field.at_or_zero(ix, iy);
      lap += field.at_or_zero(ix - 1, iy) + field.at_or_zero(ix + 1, iy);
      if (g.dim() == 2)
        lap += field.at_or_zero(ix, iy - 1) + field.at_or_zero(ix, iy + 1);
      acc += std::norm(lap);
    }
  }
  return std::sqrt(acc * g.cell_measure());
}

Field random_field(const Grid& grid, std::uint64_t seed, int smoothness) {
  std::mt19937_64 rng(seed);
  CVector v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform_pm1(rng);
  Field f(grid, std::move(v));
  for (int k = 0; k < smoothness; ++k) f = smooth_once(f);
  return f;
}

Field random_complex_field(const Grid& grid, std::uint64_t seed,
                           int smoothness) {
  const Field re = random_field(grid, seed * 2654435761u + 1, smoothness);
  const Field im = random_field(grid, seed * 2654435761u + 2, smoothness);
  CVector v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = Complex(re.values()[i].real(), im.values()[i].real());
  return {grid, std::move(v)};
}

Field eigenfunction_field(const Grid& grid, double scale) {
  CVector v(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    double val = std::sin(M_PI * (x[0] - grid.lo(0)) /
                          (grid.hi(0) - grid.lo(0)));
    if (grid.dim() == 2)
      val *= std::sin(M_PI * (x[1] - grid.lo(1)) / (grid.hi(1) - grid.lo(1)));
    v[k] = scale * val;
  }
  return {grid, std::move(v)};
}

Field bump_field(const Grid& grid, double scale, double width) {
  if (!(width > 0.0 && width < 1.0))
    throw std::invalid_argument("bump_field: need width in (0,1)");
  CVector v(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double c = 0.5 * (grid.lo(a) + grid.hi(a));
      const double half = 0.5 * (grid.hi(a) - grid.lo(a)) * width;
      const double t = (x[a] - c) / half;
      r2 += t * t;
    }
    v[k] = r2 < 1.0 ? scale * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  }
  return {grid, std::move(v)};
}

Field smoothed_indicator_field(const Grid& grid, double scale, int passes) {
  CVector v(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a) {
      const double c = 0.5 * (grid.lo(a) + grid.hi(a));
      const double half = 0.25 * (grid.hi(a) - grid.lo(a));
      inside = inside && std::abs(x[a] - c) < half;
    }
    v[k] = inside ? scale : 0.0;
  }
  Field f(grid, std::move(v));
  for (int k = 0; k < passes; ++k) f = smooth_once(f);
  return f;
}

}  // namespace fracdecay
