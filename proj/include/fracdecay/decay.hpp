#ifndef FRACDECAY_DECAY_HPP
#define FRACDECAY_DECAY_HPP

#include <optional>
#include <string>

#include "fracdecay/integrate.hpp"
#include "fracdecay/operators.hpp"

namespace fracdecay {

enum class DecayKind { exponential, polynomial };

std::string to_string(DecayKind k);

/// Decay law guaranteed for (operator, time derivative, s) when the
/// hypotheses of a result in the table are met. Polynomial laws carry a
/// numeric exponent, Theta(t) = C* / (1 + t^exponent); exponential ones
/// have a symbolic rate 1/C.
struct PredictedDecay {
  bool covered = false;
  DecayKind kind = DecayKind::polynomial;
  double exponent = 0.0;  // polynomial only
  double gamma = 0.0;     // structural exponent behind the law
  std::string source;     // which case produced the law
  std::string reason;     // set when not covered
};

PredictedDecay predicted_rate(const DiffusionOperator& op,
                              const TimeDerivative& td, double s, int dim);

struct WindowPolicy {
  double t_lo = -1.0;        // explicit window when both positive
  double t_hi = -1.0;
  double log_fraction = 0.5;  // else last fraction of the trace in log time
  long min_points = 20;
  std::optional<DecayKind> preferred;  // tie-break within a 10% margin
};

struct DecayFit {
  DecayKind kind = DecayKind::exponential;
  double exponent = 0.0;   // polynomial: norm ~ c t^{-exponent}
  double rate = 0.0;       // exponential: norm ~ c e^{-rate t}
  double constant = 0.0;
  double residual = 0.0;       // RMS log residual of the chosen kind
  double residual_other = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  long points = 0;
};

/// Least squares in log-log (polynomial) and log-linear (exponential)
/// coordinates; picks the kind with the smaller residual, preferring the
/// policy's kind on ties within 10%.
DecayFit fit_decay(const NormTrace& trace, double s,
                   const WindowPolicy& policy = {});

struct BoundCheck {
  bool holds = false;
  double c_star_hat = 0.0;   // max over recorded t of norm(t) / Theta(t)
  double c_star_late = 0.0;  // same with the window start doubled
  double tail_slope = 0.0;   // growth of the ratio at late times
};

/// Checks norm(t) <= C* Theta(t) empirically: the ratio must stay bounded
/// and must not keep growing at the end of the trace. For exponential
/// predictions the symbolic rate is taken from `exp_rate` (typically the
/// fitted one).
BoundCheck verify_bound(const NormTrace& trace, double s,
                        const PredictedDecay& pred, double exp_rate = 0.0);

}  // namespace fracdecay

#endif
