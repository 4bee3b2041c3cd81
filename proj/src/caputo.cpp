#include "fracdecay/caputo.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdecay {

CaputoL1::CaputoL1(double alpha, double dt, Normalization norm)
    : alpha_(alpha), dt_(dt) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("CaputoL1: need alpha in (0,1)");
  if (!(dt > 0.0)) throw std::invalid_argument("CaputoL1: need dt > 0");
  scale_ = norm == Normalization::standard ? 1.0 / std::tgamma(1.0 - alpha)
                                           : 1.0;
  a0_ = scale_ * std::pow(dt, -alpha) / (1.0 - alpha);
}

void CaputoL1::ensure_tables(Eigen::Index k) const {
  const Eigen::Index need = k + 2;
  if (static_cast<Eigen::Index>(pw_neg_.size()) >= need) return;
  const Eigen::Index old = pw_neg_.size();
  pw_neg_.resize(need);
  pw_pos_.resize(need);
  for (Eigen::Index m = old; m < need; ++m) {
    pw_neg_[m] = std::pow(static_cast<double>(m), -alpha_);
    pw_pos_[m] = std::pow(static_cast<double>(m), 1.0 - alpha_);
  }
}

void CaputoL1::weights(Eigen::Index k, Eigen::VectorXd& w) const {
  if (k < 1) throw std::invalid_argument("CaputoL1: need k >= 1");
  ensure_tables(k);
  const double c = scale_ * std::pow(dt_, -alpha_);
  w.setZero(k + 1);
  w[k] += c / (1.0 - alpha_);
  w[k - 1] -= c * alpha_ / (1.0 - alpha_);
  w[0] -= c * pw_neg_[k];
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    const double r1 = static_cast<double>(k - j);
    const double r2 = static_cast<double>(k - j - 1);
    const double a = (pw_neg_[k - j - 1] - pw_neg_[k - j]) / alpha_;
    const double b = (pw_pos_[k - j] - pw_pos_[k - j - 1]) / (1.0 - alpha_);
    w[j] -= c * alpha_ * (b - r2 * a);
    w[j + 1] -= c * alpha_ * (r1 * a - b);
  }
}

namespace {

template <typename Scalar>
Scalar caputo_apply_impl(const std::vector<Scalar>& history, double dt,
                         double alpha, Normalization norm) {
  if (history.size() < 2)
    throw std::invalid_argument("caputo_apply: need at least two samples");
  const CaputoL1 scheme(alpha, dt, norm);
  Eigen::VectorXd w;
  scheme.weights(static_cast<Eigen::Index>(history.size()) - 1, w);
  Scalar acc{};
  for (Eigen::Index m = 0; m < w.size(); ++m) acc += w[m] * history[m];
  return acc;
}

}  // namespace

double caputo_apply(const std::vector<double>& history, double dt,
                    double alpha, Normalization norm) {
  return caputo_apply_impl(history, dt, alpha, norm);
}

std::complex<double> caputo_apply(
    const std::vector<std::complex<double>>& history, double dt, double alpha,
    Normalization norm) {
  return caputo_apply_impl(history, dt, alpha, norm);
}

}  // namespace fracdecay
