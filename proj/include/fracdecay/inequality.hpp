#ifndef FRACDECAY_INEQUALITY_HPP
#define FRACDECAY_INEQUALITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fracdecay/grid.hpp"
#include "fracdecay/operators.hpp"

namespace fracdecay {

/// Ellipticity energy int |u|^{s-2} Re{conj(u) N[u]} dx with the u = 0
/// limit convention for s < 2.
double energy_integral(const Field& u, double s, const DiffusionOperator& op);
double energy_integral(const Field& u, double s, const PreparedOperator& op);
/// Same quadrature when N[u] has already been computed.
double energy_integral_applied(const Field& u, const Field& nu, double s);

/// Empirical form of the structural ellipticity inequality
/// |u|_{L^s}^{s-1+gamma} <= C * energy over a sample set.
struct StructuralReport {
  double s = 2.0;
  double gamma = 1.0;
  int samples = 0;
  std::vector<double> energies;
  std::vector<double> norm_powers;
  double c_hat = 0.0;  // max ratio norm_power / energy over valid samples
  int violations = 0;  // samples with energy <= 0
};

StructuralReport structural_check(const DiffusionOperator& op, double s,
                                  double gamma,
                                  const std::vector<Field>& sample_fields);

/// Admissible sample fields for an operator: smoothed random fields plus
/// deterministic eigenfunction and bump data, restricted to real or
/// nonnegative inputs where the operator requires them.
std::vector<Field> sample_fields(const DiffusionOperator& op, const Grid& grid,
                                 int count, std::uint64_t seed);

struct IdentityReport {
  std::string name;
  bool pass = false;
  double worst_margin = 0.0;
  long samples = 0;
  std::string detail;
};

/// Numerical verification of one named inequality over random samples:
/// st00, do1, kirch_power, magnetic_pointwise, poincare, sobolev_frac.
IdentityReport check_identity(const std::string& name, long n_samples,
                              std::uint64_t seed);

/// Kernel-pair form of the porous-medium energy,
/// c (2-2sigma)/2 * double sum of (u^s(x)-u^s(y))(u(x)-u(y)) against the
/// |x-y|^{-(n+2(1-sigma))} kernel with exterior-zero pairs included.
double porous_medium_pair_energy(const Field& u, double s, double sigma);

}  // namespace fracdecay

#endif
