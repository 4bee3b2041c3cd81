#ifndef FRACDECAY_OPERATORS_HPP
#define FRACDECAY_OPERATORS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fracdecay/grid.hpp"

namespace fracdecay {

/// Magnetic potential menu: constant vector or linear A(x) = A0 + M x.
struct VectorFieldSpec {
  Eigen::Vector2d a0 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();

  Eigen::Vector2d at(const std::array<double, 2>& x) const {
    return a0 + m * Eigen::Vector2d(x[0], x[1]);
  }
  bool is_zero() const { return a0.isZero(0.0) && m.isZero(0.0); }
};

struct Laplacian {
  double d = 1.0;
};
struct FractionalLaplacian {
  double sigma;
  double d = 1.0;
  /// Bare kernel |x-y|^{-n-2s} by default; if set, multiplies by the
  /// standard normalization constant of the integral fractional Laplacian.
  bool normalized_kernel = false;
};
/// div(|grad u^m|^{p-2} grad u^m); u^m is the sign-preserving power.
struct PLaplacianPower {
  double p;
  double m;
};
struct FractionalPLaplacian {
  double sigma;
  double p;
};
struct SumFractionalPLaplacians {
  struct Term {
    double beta, sigma, p;
  };
  std::vector<Term> terms;
};
/// Sum over axes of one-dimensional fractional derivatives.
struct AnisotropicFractional {
  struct Axis {
    double beta, sigma;
  };
  std::vector<Axis> axes;  // one entry per grid axis
};
/// (-Delta)^sigma u^m.
struct PorousMediumI {
  double sigma;
  double m;
};
/// -div(u grad(K * u)) with the Riesz potential kernel; needs dim > 2 sigma.
struct PorousMediumII {
  double sigma;
};
struct KirchhoffClassical {
  double m0, b;
};
struct KirchhoffFractional {
  double sigma;
  double m0, b;
};
struct Magnetic {
  VectorFieldSpec a;
};
struct FractionalMagnetic {
  double sigma;
  VectorFieldSpec a;
};
struct MeanCurvature {};
struct FractionalMeanCurvature {
  double sigma;
};

using DiffusionOperator =
    std::variant<Laplacian, FractionalLaplacian, PLaplacianPower,
                 FractionalPLaplacian, SumFractionalPLaplacians,
                 AnisotropicFractional, PorousMediumI, PorousMediumII,
                 KirchhoffClassical, KirchhoffFractional, Magnetic,
                 FractionalMagnetic, MeanCurvature, FractionalMeanCurvature>;

std::string operator_name(const DiffusionOperator& op);
std::string operator_summary(const DiffusionOperator& op);

/// Parameter-range and dimension checks; throws std::invalid_argument.
void validate_operator(const DiffusionOperator& op, const Grid& grid);

/// True for operators with complex output on real input.
bool is_complex_valued(const DiffusionOperator& op);
/// True for the linear menu (implicit time treatment available).
bool is_linear(const DiffusionOperator& op);
bool is_kirchhoff(const DiffusionOperator& op);
/// Operators defined for real fields only.
bool requires_real_field(const DiffusionOperator& op);
/// Operators whose theory assumes nonnegative data.
bool prefers_nonnegative(const DiffusionOperator& op);
/// Exponent nu in the explicit-step bound dt <= c_stab h^nu.
double stability_exponent(const DiffusionOperator& op, const Grid& grid);

/// Raised when an operator application or time step produces non-finite
/// values; the simulation halts with a diagnostic.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operator bound to a grid with its kernel matrices assembled once.
/// Immutable after construction; application is const and thread-safe.
class PreparedOperator {
 public:
  PreparedOperator(DiffusionOperator op, Grid grid);
  ~PreparedOperator();
  PreparedOperator(PreparedOperator&&) noexcept;

  const DiffusionOperator& op() const { return op_; }
  const Grid& grid() const { return grid_; }

  /// N[u] at the interior nodes. Throws NonFiniteError on blow-up.
  Field apply(const Field& u) const;

  /// m0 + b |grad u|_2^2 or M0 + b |u|_Z^2; Kirchhoff variants only.
  double prefactor(const Field& u) const;

  enum class Scheme { ImplicitLinear, SemiImplicitKirchhoff, Explicit };
  Scheme scheme() const;

  /// Solve (a I + c B) x = rhs where B is the operator's linear matrix
  /// (the full operator for linear ones, the diffusion factor for
  /// Kirchhoff). Factorizations are cached per shift `a` for fixed c = 1;
  /// the Kirchhoff path diagonalizes B once and handles any c.
  CVector solve_shifted(double a, double c, const CVector& rhs) const;

  /// B u for the linear matrix above.
  CVector linear_apply(const CVector& u) const;

  /// Discrete Gagliardo seminorm built from the same kernel weights as the
  /// fractional Laplacian matrix (fractional operators only).
  double gagliardo_sq(const Field& u) const;

  /// Riesz potential of a real field (PorousMediumII only).
  Field riesz_potential(const Field& u) const;

 private:
  CVector porous_medium_2_apply(const Eigen::VectorXd& u) const;
  CVector fractional_mean_curvature_apply(const Eigen::VectorXd& u,
                                          double sigma) const;

  struct Impl;
  DiffusionOperator op_;
  Grid grid_;
  std::unique_ptr<Impl> impl_;
};

/// Shared, memoized binding; convenient entry point for one-off uses.
std::shared_ptr<const PreparedOperator> prepared(const DiffusionOperator& op,
                                                 const Grid& grid);

Field apply_operator(const DiffusionOperator& op, const Field& u);

/// Riesz potential u * K, K(x) = c(n,sigma) |x|^{2 sigma - n}, with the
/// cell-averaged kernel at the self node. Requires dim > 2 sigma.
Field riesz_convolution(const Field& u, double sigma);

/// Double-sum Gagliardo seminorm squared with exterior-zero extension;
/// equals twice the discrete fractional Dirichlet energy exactly.
double gagliardo_seminorm_sq(const Field& u, double sigma);

double kirchhoff_prefactor(const DiffusionOperator& op, const Field& u);

/// Sign-preserving power |t|^{m-1} t.
double signed_power(double t, double m);

}  // namespace fracdecay

#endif
