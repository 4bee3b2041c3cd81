#ifndef FRACDECAY_CAPUTO_HPP
#define FRACDECAY_CAPUTO_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace fracdecay {

/// `bare` keeps the unscaled kernel of the expanded Caputo form,
/// (u(t)-u(0))/t^a + a int_0^t (u(t)-u(tau)) (t-tau)^{-1-a} dtau;
/// `standard` divides by Gamma(1-a), recovering the usual definition.
enum class Normalization { bare, standard };

/// L1 discretization of the Caputo derivative on a uniform time grid:
/// piecewise-linear history with exact per-interval kernel integration.
/// The value at t_k is the dot product of the weight vector with
/// u(t_0..t_k); the weights are linear in the history and sum to zero.
class CaputoL1 {
 public:
  CaputoL1(double alpha, double dt, Normalization norm);

  double alpha() const { return alpha_; }
  double dt() const { return dt_; }
  /// Coefficient of u(t_k) (the same for every k >= 1).
  double leading_weight() const { return a0_; }

  /// Fills w[0..k] with the weights at step k >= 1.
  void weights(Eigen::Index k, Eigen::VectorXd& w) const;

 private:
  void ensure_tables(Eigen::Index k) const;

  double alpha_, dt_, scale_, a0_;
  mutable std::vector<double> pw_neg_;  // m^{-alpha}
  mutable std::vector<double> pw_pos_;  // m^{1-alpha}
};

/// Discrete Caputo derivative of a sampled history u(t_0..t_k), uniform
/// step dt, evaluated at t_k. Needs k >= 1 and alpha in (0,1).
double caputo_apply(const std::vector<double>& history, double dt,
                    double alpha, Normalization norm);
std::complex<double> caputo_apply(const std::vector<std::complex<double>>& history,
                                  double dt, double alpha, Normalization norm);

}  // namespace fracdecay

#endif
