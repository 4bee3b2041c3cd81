#include "fracdecay/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fracdecay {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const KeyValues& kv, const std::string& key, double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" +
                      it->second + "'");
  }
}

double require_double(const KeyValues& kv, const std::string& key) {
  if (!kv.count(key)) throw ConfigError("config: missing key '" + key + "'");
  return to_double(kv, key, 0.0);
}

long to_long(const KeyValues& kv, const std::string& key, long dflt) {
  const double v = to_double(kv, key, static_cast<double>(dflt));
  return std::lround(v);
}

std::string to_str(const KeyValues& kv, const std::string& key,
                   const std::string& dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

bool to_bool(const KeyValues& kv, const std::string& key, bool dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config: key '" + key + "' must be true/false");
}

// "(a,b,c);(d,e,f)" -> list of tuples
std::vector<std::vector<double>> parse_tuples(const std::string& text,
                                              std::size_t arity,
                                              const std::string& key) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.front() != '(' || item.back() != ')')
      throw ConfigError("config: '" + key + "' entries must look like (a,b)");
    std::stringstream inner(item.substr(1, item.size() - 2));
    std::vector<double> tuple;
    std::string num;
    while (std::getline(inner, num, ','))
      tuple.push_back(std::stod(trim(num)));
    if (tuple.size() != arity)
      throw ConfigError("config: '" + key + "' entries need " +
                        std::to_string(arity) + " numbers");
    out.push_back(tuple);
  }
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[experiment]")
        throw ConfigError("config: unknown section '" + line + "' at line " +
                          std::to_string(lineno));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value' at line " +
                        std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: empty key or value at line " +
                        std::to_string(lineno));
    kv[key] = value;
  }
  return kv;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::string> ranged_keys(const KeyValues& kv) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : kv)
    if (!v.empty() && v.front() == '{' && v.back() == '}') keys.push_back(k);
  return keys;
}

std::vector<KeyValues> expand_ranges(const KeyValues& kv) {
  std::vector<KeyValues> cells{KeyValues{}};
  for (const auto& [key, value] : kv) {
    if (!value.empty() && value.front() == '{' && value.back() == '}') {
      std::vector<std::string> options;
      std::stringstream ss(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) options.push_back(item);
      }
      if (options.empty())
        throw ConfigError("config: empty range for key '" + key + "'");
      std::vector<KeyValues> next;
      for (const auto& cell : cells) {
        for (const auto& opt : options) {
          KeyValues c = cell;
          c[key] = opt;
          next.push_back(std::move(c));
        }
      }
      cells = std::move(next);
    } else {
      for (auto& cell : cells) cell[key] = value;
    }
  }
  return cells;
}

DiffusionOperator operator_from_keys(const KeyValues& kv, int dim) {
  const std::string name = to_str(kv, "operator", "laplacian");
  const bool normalized = to_str(kv, "frac_kernel", "bare") == "normalized";
  if (to_str(kv, "frac_kernel", "bare") != "bare" && !normalized)
    throw ConfigError("config: frac_kernel must be bare or normalized");

  auto vector_field = [&]() {
    VectorFieldSpec a;
    a.a0[0] = to_double(kv, "a0x", 0.0);
    a.a0[1] = to_double(kv, "a0y", 0.0);
    a.m(0, 0) = to_double(kv, "amxx", 0.0);
    a.m(0, 1) = to_double(kv, "amxy", 0.0);
    a.m(1, 0) = to_double(kv, "amyx", 0.0);
    a.m(1, 1) = to_double(kv, "amyy", 0.0);
    return a;
  };

  if (name == "laplacian") return Laplacian{to_double(kv, "d", 1.0)};
  if (name == "frac_laplacian")
    return FractionalLaplacian{require_double(kv, "sigma"),
                               to_double(kv, "d", 1.0), normalized};
  if (name == "p_laplacian")
    return PLaplacianPower{require_double(kv, "p"), to_double(kv, "m", 1.0)};
  if (name == "frac_p_laplacian")
    return FractionalPLaplacian{require_double(kv, "sigma"),
                                require_double(kv, "p")};
  if (name == "sum_frac_p_laplacians") {
    SumFractionalPLaplacians op;
    for (const auto& t :
         parse_tuples(to_str(kv, "terms", ""), 3, "terms"))
      op.terms.push_back({t[0], t[1], t[2]});
    return op;
  }
  if (name == "anisotropic_fractional") {
    AnisotropicFractional op;
    for (const auto& t : parse_tuples(to_str(kv, "axes", ""), 2, "axes"))
      op.axes.push_back({t[0], t[1]});
    return op;
  }
  if (name == "porous_medium_1")
    return PorousMediumI{require_double(kv, "sigma"), to_double(kv, "m", 1.0)};
  if (name == "porous_medium_2")
    return PorousMediumII{require_double(kv, "sigma")};
  if (name == "kirchhoff")
    return KirchhoffClassical{to_double(kv, "m0", 1.0), to_double(kv, "b", 0.0)};
  if (name == "frac_kirchhoff")
    return KirchhoffFractional{require_double(kv, "sigma"),
                               to_double(kv, "m0", 1.0),
                               to_double(kv, "b", 0.0)};
  if (name == "magnetic") return Magnetic{vector_field()};
  if (name == "frac_magnetic")
    return FractionalMagnetic{require_double(kv, "sigma"), vector_field()};
  if (name == "mean_curvature") return MeanCurvature{};
  if (name == "frac_mean_curvature")
    return FractionalMeanCurvature{require_double(kv, "sigma")};
  (void)dim;
  throw ConfigError("config: unknown operator '" + name + "'");
}

ExperimentConfig build_experiment(const KeyValues& kv) {
  ExperimentConfig ex;
  ex.name = to_str(kv, "name", "experiment");
  ex.outdir = to_str(kv, "outdir", "out");

  SimulationConfig& sim = ex.sim;
  sim.grid.dim = static_cast<int>(to_long(kv, "dim", 1));
  sim.grid.lo[0] = to_double(kv, "x_lo", 0.0);
  sim.grid.hi[0] = to_double(kv, "x_hi", 1.0);
  sim.grid.n[0] = static_cast<int>(to_long(kv, "n", 99));
  sim.grid.lo[1] = to_double(kv, "y_lo", sim.grid.lo[0]);
  sim.grid.hi[1] = to_double(kv, "y_hi", sim.grid.hi[0]);
  sim.grid.n[1] = static_cast<int>(to_long(kv, "ny", sim.grid.n[0]));

  sim.op = operator_from_keys(kv, sim.grid.dim);

  sim.td.lambda1 = to_double(kv, "lambda1", 0.0);
  sim.td.lambda2 = to_double(kv, "lambda2", 1.0 - sim.td.lambda1);
  sim.td.alpha = to_double(kv, "alpha", 0.5);
  const std::string norm = to_str(kv, "normalization", "standard");
  if (norm == "standard")
    sim.td.normalization = Normalization::standard;
  else if (norm == "bare")
    sim.td.normalization = Normalization::bare;
  else
    throw ConfigError("config: normalization must be standard or bare");

  const std::string u0 = to_str(kv, "u0", "eigenfunction");
  if (u0 == "zero")
    sim.u0.kind = InitialData::Kind::zero;
  else if (u0 == "eigenfunction")
    sim.u0.kind = InitialData::Kind::eigenfunction;
  else if (u0 == "bump")
    sim.u0.kind = InitialData::Kind::bump;
  else if (u0 == "indicator")
    sim.u0.kind = InitialData::Kind::indicator;
  else if (u0 == "random")
    sim.u0.kind = InitialData::Kind::random;
  else
    throw ConfigError("config: unknown u0 kind '" + u0 + "'");
  sim.u0.scale = to_double(kv, "u0_scale", 1.0);
  sim.u0.width = to_double(kv, "u0_width", 0.8);
  sim.u0.smoothness = static_cast<int>(to_long(kv, "u0_smoothness", 3));
  sim.u0.seed = static_cast<std::uint64_t>(to_long(kv, "seed", 1));
  sim.u0.complex_parts = to_bool(kv, "u0_complex", false);

  sim.dt = require_double(kv, "dt");
  sim.t_final = require_double(kv, "T");
  sim.record_every = static_cast<int>(to_long(kv, "record_every", 1));
  sim.c_stab = to_double(kv, "c_stab", 0.2);
  sim.record_energy = to_bool(kv, "record_energy", false);
  sim.stop_below = to_double(kv, "stop_below", 0.0);
  sim.snapshot_every = static_cast<int>(to_long(kv, "snapshot_every", 0));

  sim.s_list.clear();
  std::stringstream ss(to_str(kv, "s_list", "2"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) sim.s_list.push_back(std::stod(item));
  }
  if (sim.s_list.empty()) throw ConfigError("config: empty s_list");
  ex.s_report = to_double(kv, "s_report", sim.s_list.front());

  ex.fit_t_lo = to_double(kv, "fit_t_lo", -1.0);
  ex.fit_t_hi = to_double(kv, "fit_t_hi", -1.0);
  ex.fit_log_fraction = to_double(kv, "fit_log_fraction", 0.5);

  try {
    sim.validate();
    validate_operator(sim.op, sim.grid.build());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return ex;
}

}  // namespace fracdecay
