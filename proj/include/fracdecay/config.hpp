#ifndef FRACDECAY_CONFIG_HPP
#define FRACDECAY_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "fracdecay/integrate.hpp"

namespace fracdecay {

/// Raised on malformed configuration input; maps to exit code 1.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using KeyValues = std::map<std::string, std::string>;

/// Line-oriented `key = value` format with `#` comments and an optional
/// `[experiment]` section header. No nesting.
KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

/// Expands braced list values `key = {a,b,c}` into the cartesian product of
/// plain configurations, in deterministic order.
std::vector<KeyValues> expand_ranges(const KeyValues& kv);

/// Keys that were braced lists in the original map (used to name sweep cells).
std::vector<std::string> ranged_keys(const KeyValues& kv);

struct ExperimentConfig {
  std::string name = "experiment";
  SimulationConfig sim;
  double fit_t_lo = -1.0, fit_t_hi = -1.0;
  double fit_log_fraction = 0.5;
  double s_report = 2.0;
  std::string outdir = "out";
};

DiffusionOperator operator_from_keys(const KeyValues& kv, int dim);
ExperimentConfig build_experiment(const KeyValues& kv);

}  // namespace fracdecay

#endif
