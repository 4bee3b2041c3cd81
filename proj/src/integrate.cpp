#include "fracdecay/integrate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracdecay/inequality.hpp"

namespace fracdecay {

void TimeDerivative::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0)
    throw std::invalid_argument("time derivative: lambda1, lambda2 >= 0");
  if (std::abs(lambda1 + lambda2 - 1.0) > 1e-12)
    throw std::invalid_argument(
        "time derivative: invariant lambda1 + lambda2 = 1 violated");
  if (lambda1 > 0.0 && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(
        "time derivative: need alpha in (0,1) when lambda1 > 0");
}

Grid GridSpec::build() const {
  if (dim == 1) return Grid(lo[0], hi[0], n[0]);
  if (dim == 2) return Grid(lo, hi, n);
  throw std::invalid_argument("grid: dim must be 1 or 2");
}

Field InitialData::build(const Grid& grid) const {
  switch (kind) {
    case Kind::zero:
      return Field(grid);
    case Kind::eigenfunction:
      return eigenfunction_field(grid, scale);
    case Kind::bump:
      return bump_field(grid, scale, width);
    case Kind::indicator:
      return smoothed_indicator_field(grid, scale, smoothness);
    case Kind::random: {
      Field f = complex_parts ? random_complex_field(grid, seed, smoothness)
                              : random_field(grid, seed, smoothness);
      return Field(grid, scale * f.values());
    }
  }
  throw std::invalid_argument("initial data: unknown kind");
}

void SimulationConfig::validate() const {
  td.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("config: need dt > 0");
  if (!(dt < t_final)) throw std::invalid_argument("config: need dt < T");
  if (record_every < 1)
    throw std::invalid_argument("config: need record_every >= 1");
  if (s_list.empty()) throw std::invalid_argument("config: empty s_list");
  for (double s : s_list)
    if (s < 1.0) throw std::invalid_argument("config: s_list entries >= 1");
  if (!(c_stab > 0.0)) throw std::invalid_argument("config: need c_stab > 0");
}

const std::vector<double>& NormTrace::norms_for(double s) const {
  for (std::size_t i = 0; i < s_values.size(); ++i)
    if (s_values[i] == s) return norms[i];
  throw std::invalid_argument("trace: s not recorded");
}

double NormTrace::dt_recorded() const {
  if (times.size() < 2) throw std::invalid_argument("trace: too short");
  return times[1] - times[0];
}

namespace {

struct History {
  // Real and imaginary parts stored separately so real simulations cost
  // half; columns are time levels.
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  bool complex_active = false;

  void init(Eigen::Index n, Eigen::Index cols, bool is_complex) {
    re.resize(n, cols);
    if (is_complex) {
      im.resize(n, cols);
      complex_active = true;
    }
  }
  void store(Eigen::Index col, const CVector& u) {
    re.col(col) = u.real();
    if (complex_active) im.col(col) = u.imag();
  }
  CVector combine(Eigen::Index upto, const Eigen::VectorXd& w) const {
    CVector out(re.rows());
    out.real() = re.leftCols(upto) * w.head(upto);
    if (complex_active)
      out.imag() = im.leftCols(upto) * w.head(upto);
    else
      out.imag().setZero();
    return out;
  }
};

}  // namespace

SimulationResult simulate(const SimulationConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.grid.build();
  auto prep = prepared(cfg.op, grid);
  const auto scheme = prep->scheme();

  double hmin = grid.h(0);
  if (grid.dim() == 2) hmin = std::min(hmin, grid.h(1));
  if (scheme == PreparedOperator::Scheme::Explicit) {
    const double nu = stability_exponent(cfg.op, grid);
    const double bound = cfg.c_stab * std::pow(hmin, nu);
    if (cfg.dt > bound) {
      std::ostringstream msg;
      msg << "config: dt = " << cfg.dt << " violates the explicit stability "
          << "bound dt <= c_stab * h^nu = " << cfg.c_stab << " * " << hmin
          << "^" << nu << " = " << bound << " for operator "
          << operator_name(cfg.op);
      throw std::invalid_argument(msg.str());
    }
  }

  long n_steps = std::lround(cfg.t_final / cfg.dt);
  if (n_steps < 1) n_steps = 1;
  // align the final step with the recording stride so the recorded grid
  // stays uniform
  if (n_steps % cfg.record_every != 0)
    n_steps += cfg.record_every - n_steps % cfg.record_every;

  Field u = cfg.u0.build(grid);
  if (!u.is_finite())
    throw std::invalid_argument("config: non-finite initial data");
  const bool track_real = !is_complex_valued(cfg.op) && u.is_real(1e-12);

  const bool with_memory = cfg.td.lambda1 > 0.0;
  std::unique_ptr<CaputoL1> caputo;
  double a0 = 0.0;
  if (with_memory) {
    caputo.reset(new CaputoL1(cfg.td.alpha, cfg.dt, cfg.td.normalization));
    a0 = caputo->leading_weight();
  }
  const double a_eff = cfg.td.lambda1 * a0 + cfg.td.lambda2 / cfg.dt;

  History hist;
  if (with_memory)
    hist.init(grid.size(), n_steps + 1, !track_real);

  SimulationResult result{NormTrace{}, u, {}};
  NormTrace& trace = result.trace;
  trace.s_values = cfg.s_list;
  trace.norms.assign(cfg.s_list.size(), {});
  if (cfg.record_energy) trace.energies.assign(cfg.s_list.size(), {});

  auto record = [&](double t, const Field& f) {
    trace.times.push_back(t);
    for (std::size_t si = 0; si < cfg.s_list.size(); ++si)
      trace.norms[si].push_back(lp_norm(f, cfg.s_list[si]));
    if (cfg.record_energy) {
      const Field nf = prep->apply(f);
      for (std::size_t si = 0; si < cfg.s_list.size(); ++si)
        trace.energies[si].push_back(
            energy_integral_applied(f, nf, cfg.s_list[si]));
    }
    if (cfg.snapshot_every > 0 &&
        (trace.times.size() - 1) % cfg.snapshot_every == 0)
      result.snapshots.push_back({t, f});
  };

  record(0.0, u);
  if (with_memory) hist.store(0, u.values());

  Eigen::VectorXd w;
  for (long k = 0; k < n_steps; ++k) {
    const double t_next = (k + 1) * cfg.dt;
    CVector rhs = (cfg.td.lambda2 / cfg.dt) * u.values();
    if (with_memory) {
      caputo->weights(k + 1, w);
      rhs.noalias() -= cfg.td.lambda1 * hist.combine(k + 1, w);
    }

    CVector next;
    try {
      switch (scheme) {
        case PreparedOperator::Scheme::ImplicitLinear:
          next = prep->solve_shifted(a_eff, 1.0, rhs);
          break;
        case PreparedOperator::Scheme::SemiImplicitKirchhoff:
          next = prep->solve_shifted(a_eff, prep->prefactor(u), rhs);
          break;
        case PreparedOperator::Scheme::Explicit:
          rhs.noalias() -= prep->apply(u).values();
          next = rhs / a_eff;
          break;
      }
    } catch (const NonFiniteError& e) {
      trace.blow_up = BlowUpRecord{k + 1, t_next, e.what()};
      break;
    }

    Field candidate(grid, std::move(next));
    if (!candidate.is_finite()) {
      trace.blow_up =
          BlowUpRecord{k + 1, t_next, "non-finite field after time step"};
      break;
    }
    u = std::move(candidate);
    if (with_memory) hist.store(k + 1, u.values());

    if ((k + 1) % cfg.record_every == 0) {
      if (track_real && !u.is_real(1e-12))
        throw std::runtime_error(
            "simulate: real evolution developed an imaginary part");
      record(t_next, u);
      if (cfg.stop_below > 0.0 &&
          trace.norms[0].back() <= cfg.stop_below * trace.norms[0].front())
        break;
    }
  }

  result.final_field = u;
  return result;
}

}  // namespace fracdecay
