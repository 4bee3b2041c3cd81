#ifndef FRACDECAY_KERNELS_HPP
#define FRACDECAY_KERNELS_HPP

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "fracdecay/grid.hpp"

namespace fracdecay::kernels {

/// int_a^b r^{-q} dr for 0 <= a < b (a = 0 needs q < 1).
double power_segment(double a, double b, double q);

/// Riesz potential constant, Gamma(n/2 - sigma) / (4^sigma pi^{n/2}
/// Gamma(sigma)).
double riesz_constant(int n, double sigma);

/// Normalization constant of the integral fractional Laplacian,
/// 4^sigma Gamma(n/2 + sigma) / (pi^{n/2} |Gamma(-sigma)|).
double frac_laplacian_constant(int n, double sigma);

/// Distances from interior node k to the four faces of the cell-union box
/// [lo + h/2, hi - h/2]; order {x_lo, x_hi, y_lo, y_hi}. All >= h/2.
std::array<double, 4> face_distances(const Grid& grid, Eigen::Index k);

/// Cell-integrated kernel weights int_{cell j} |x_i - y|^{-q} dy as a
/// translation-invariant table over node offsets, covering one ghost layer
/// beyond the interior (|dx| <= n+1 per axis). The self weight (offset 0)
/// is the cell average of the kernel and requires q < dim.
class OffsetWeights {
 public:
  OffsetWeights(const Grid& grid, double q, bool include_self);

  double at(int dx, int dy = 0) const {
    return table_[std::abs(dx) + nx_ * std::abs(dy)];
  }
  double self() const { return table_[0]; }

 private:
  int nx_;
  Eigen::VectorXd table_;
};

/// int_{R^n \ box} |x - y|^{-q} dy for a node at the given face distances.
/// Exact in 1D; exact-in-radius angular quadrature in 2D. Requires q > dim.
double exterior_tail(const Grid& grid, const std::array<double, 4>& d,
                     double q);

/// Second moments of the kernel over the self cell,
/// M_a = int_{cell} z_a^2 |z|^{-q} dz, used for the near-field correction
/// of linear fractional operators. Requires q < dim + 2.
std::array<double, 2> self_cell_second_moments(const Grid& grid, double q);

/// Integral over the exterior of the box of f(|x-y|) with kernel handled by
/// the callee: evaluates int_0^{2pi} g(rho(theta)) dtheta where rho is the
/// ray exit distance (2D), or g(d_minus) + g(d_plus) in 1D.
double angular_exterior_integral(const Grid& grid,
                                 const std::array<double, 4>& d,
                                 const std::function<double(double)>& g);

}  // namespace fracdecay::kernels

#endif
