#ifndef FRACDECAY_GRID_HPP
#define FRACDECAY_GRID_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace fracdecay {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Uniform grid of interior nodes on a bounded box, 1D interval or 2D
/// rectangle. Values on the boundary and outside the box are 0 by
/// convention; nonlocal operators account for the exterior analytically.
class Grid {
 public:
  Grid(double a, double b, int n);  // 1D
  Grid(std::array<double, 2> lo, std::array<double, 2> hi,
       std::array<int, 2> n);  // 2D

  int dim() const { return dim_; }
  int n(int axis) const { return n_[axis]; }
  double h(int axis) const { return h_[axis]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }

  /// Total number of interior nodes.
  Eigen::Index size() const { return size_; }
  /// Quadrature weight of one node (h in 1D, hx*hy in 2D).
  double cell_measure() const { return measure_; }
  /// |Omega| of the underlying box.
  double box_measure() const;

  /// Coordinate of interior node index `i` along `axis` (0-based,
  /// i = 0..n-1 maps to lo + (i+1)h).
  double coord(int i, int axis) const { return lo_[axis] + (i + 1) * h_[axis]; }

  Eigen::Index flat_index(int ix, int iy = 0) const {
    return ix + static_cast<Eigen::Index>(n_[0]) * iy;
  }
  std::array<int, 2> unflatten(Eigen::Index k) const {
    return {static_cast<int>(k % n_[0]), static_cast<int>(k / n_[0])};
  }
  /// Position of flat node k.
  std::array<double, 2> node(Eigen::Index k) const;

  bool operator==(const Grid& o) const;

  /// Smallest eigenvalue of the discrete Dirichlet Laplacian on this grid.
  double laplacian_min_eigenvalue() const;

 private:
  int dim_;
  std::array<int, 2> n_;
  std::array<double, 2> lo_, hi_, h_;
  Eigen::Index size_;
  double measure_;
};

/// Complex-valued grid function over the interior nodes. Immutable by
/// convention: operations return new fields.
class Field {
 public:
  Field(Grid grid, CVector values);
  /// Zero field.
  explicit Field(Grid grid);

  const Grid& grid() const { return grid_; }
  const CVector& values() const { return values_; }
  CVector& values() { return values_; }

  Eigen::Index size() const { return values_.size(); }

  /// Node accessor with the exterior-zero convention: any index outside
  /// the interior range returns exactly 0.
  Complex at_or_zero(int ix, int iy = 0) const;

  bool is_finite() const;
  bool is_real(double rel_tol = 1e-12) const;
  double max_abs() const;

 private:
  Grid grid_;
  CVector values_;
};

/// L^s norm with midpoint quadrature, (sum |u_i|^s h^dim)^{1/s}.
/// Requires s >= 1 and a finite field.
double lp_norm(const Field& field, double s);

/// Squared L^2 norm of the forward-difference gradient, including the
/// jumps across the zero boundary.
double gradient_sq_norm(const Field& field);

/// Deterministic test-input generator: white noise in [-1,1] smoothed by
/// `smoothness` passes of nearest-neighbor averaging.
Field random_field(const Grid& grid, std::uint64_t seed, int smoothness = 0);

/// Same noise in both parts, independent seeds derived from `seed`.
Field random_complex_field(const Grid& grid, std::uint64_t seed,
                           int smoothness = 0);

/// First Dirichlet eigenfunction, prod_axes sin(pi (x-a)/(b-a)), scaled.
Field eigenfunction_field(const Grid& grid, double scale = 1.0);

/// Smooth bump exp(1 - 1/(1 - r^2)) supported on the centered ball of
/// radius `width` * (half box width), strictly inside the box.
Field bump_field(const Grid& grid, double scale = 1.0, double width = 0.8);

/// Indicator of the centered half-box smoothed by `passes` averaging steps.
Field smoothed_indicator_field(const Grid& grid, double scale = 1.0,
                               int passes = 4);

/// One pass of nearest-neighbor averaging (zero ghost values).
Field smooth_once(const Field& field);

/// Discrete H^1 seminorm magnitude of the Laplacian of the field,
/// used to measure smoothing.
double laplacian_magnitude(const Field& field);

}  // namespace fracdecay

#endif
