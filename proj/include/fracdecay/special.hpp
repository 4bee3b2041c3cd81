#ifndef FRACDECAY_SPECIAL_HPP
#define FRACDECAY_SPECIAL_HPP

namespace fracdecay {

/// Mittag-Leffler function E_alpha(x) for alpha in (0,1] and x <= 0.
/// Power series where it is numerically safe, otherwise the spectral
/// integral representation of E_alpha(-x) (completely monotone density).
/// Values are in (0,1], decreasing in |x|. Rejects x > 0.
double mittag_leffler(double alpha, double x);

}  // namespace fracdecay

#endif
