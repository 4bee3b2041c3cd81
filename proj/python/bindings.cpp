#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracdecay/barriers.hpp"
#include "fracdecay/config.hpp"
#include "fracdecay/decay.hpp"
#include "fracdecay/experiment.hpp"
#include "fracdecay/inequality.hpp"
#include "fracdecay/integrate.hpp"
#include "fracdecay/special.hpp"

namespace py = pybind11;
using namespace fracdecay;

namespace {

Grid make_grid(double a, double b, int n) { return Grid(a, b, n); }
Grid make_grid_2d(std::array<double, 2> lo, std::array<double, 2> hi,
                  std::array<int, 2> n) {
  return Grid(lo, hi, n);
}

DiffusionOperator op_from_dict(const py::dict& d, int dim) {
  KeyValues kv;
  for (const auto& item : d)
    kv[py::str(item.first)] = py::str(item.second);
  return operator_from_keys(kv, dim);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mixed classical/fractional-time diffusion on bounded domains: "
            "operators, time stepping, barriers, and decay-rate analysis";

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("a"), py::arg("b"), py::arg("n"))
      .def(py::init(&make_grid_2d), py::arg("lo"), py::arg("hi"), py::arg("n"))
      .def_property_readonly("dim", &Grid::dim)
      .def("n", &Grid::n, py::arg("axis") = 0)
      .def("h", &Grid::h, py::arg("axis") = 0)
      .def("size", &Grid::size)
      .def("cell_measure", &Grid::cell_measure)
      .def("coord", &Grid::coord)
      .def("laplacian_min_eigenvalue", &Grid::laplacian_min_eigenvalue);

  py::class_<Field>(m, "Field")
      .def(py::init<Grid, CVector>(), py::arg("grid"), py::arg("values"))
      .def(py::init<Grid>(), py::arg("grid"))
      .def_property_readonly("grid", &Field::grid)
      .def_property_readonly(
          "values", [](const Field& f) { return f.values(); })
      .def("at_or_zero", &Field::at_or_zero, py::arg("ix"), py::arg("iy") = 0)
      .def("is_real", &Field::is_real, py::arg("rel_tol") = 1e-12);

  m.def("lp_norm", &lp_norm, py::arg("field"), py::arg("s"));
  m.def("gradient_sq_norm", &gradient_sq_norm);
  m.def("random_field", &random_field, py::arg("grid"), py::arg("seed"),
        py::arg("smoothness") = 0);
  m.def("eigenfunction_field", &eigenfunction_field, py::arg("grid"),
        py::arg("scale") = 1.0);
  m.def("bump_field", &bump_field, py::arg("grid"), py::arg("scale") = 1.0,
        py::arg("width") = 0.8);
  m.def("mittag_leffler", &mittag_leffler, py::arg("alpha"), py::arg("x"));
  m.def("gagliardo_seminorm_sq", &gagliardo_seminorm_sq, py::arg("field"),
        py::arg("sigma"));
  m.def(
      "riesz_convolution",
      [](const Field& f, double sigma) { return riesz_convolution(f, sigma); },
      py::arg("field"), py::arg("sigma"));

  m.def(
      "apply_operator",
      [](const py::dict& op, const Field& u) {
        return apply_operator(op_from_dict(op, u.grid().dim()), u);
      },
      py::arg("op"), py::arg("field"),
      "Apply a diffusion operator given as a dict of config keys, e.g. "
      "{'operator': 'frac_laplacian', 'sigma': 0.5}");

  m.def(
      "energy_integral",
      [](const Field& u, double s, const py::dict& op) {
        return energy_integral(u, s, op_from_dict(op, u.grid().dim()));
      },
      py::arg("field"), py::arg("s"), py::arg("op"));

  py::class_<NormTrace>(m, "NormTrace")
      .def_readonly("times", &NormTrace::times)
      .def_readonly("s_values", &NormTrace::s_values)
      .def_readonly("norms", &NormTrace::norms)
      .def_readonly("energies", &NormTrace::energies)
      .def_property_readonly(
          "blew_up", [](const NormTrace& t) { return t.blow_up.has_value(); })
      .def("norms_for", &NormTrace::norms_for, py::arg("s"));

  m.def(
      "simulate",
      [](const py::dict& d) {
        KeyValues kv;
        for (const auto& item : d)
          kv[py::str(item.first)] = py::str(item.second);
        const ExperimentConfig ex = build_experiment(kv);
        return simulate(ex.sim).trace;
      },
      py::arg("config"),
      "Run a simulation from a dict of config keys and return the trace");

  py::class_<DecayFit>(m, "DecayFit")
      .def_property_readonly(
          "kind", [](const DecayFit& f) { return to_string(f.kind); })
      .def_readonly("exponent", &DecayFit::exponent)
      .def_readonly("rate", &DecayFit::rate)
      .def_readonly("constant", &DecayFit::constant)
      .def_readonly("residual", &DecayFit::residual);

  m.def(
      "fit_decay",
      [](const NormTrace& trace, double s) {
        return fit_decay(trace, s, WindowPolicy{});
      },
      py::arg("trace"), py::arg("s") = 2.0);

  py::class_<PredictedDecay>(m, "PredictedDecay")
      .def_readonly("covered", &PredictedDecay::covered)
      .def_property_readonly(
          "kind", [](const PredictedDecay& p) { return to_string(p.kind); })
      .def_readonly("exponent", &PredictedDecay::exponent)
      .def_readonly("gamma", &PredictedDecay::gamma)
      .def_readonly("source", &PredictedDecay::source)
      .def_readonly("reason", &PredictedDecay::reason);

  m.def(
      "predicted_rate",
      [](const py::dict& op, double lambda1, double alpha, double s, int dim) {
        TimeDerivative td;
        td.lambda1 = lambda1;
        td.lambda2 = 1.0 - lambda1;
        td.alpha = alpha;
        return predicted_rate(op_from_dict(op, dim), td, s, dim);
      },
      py::arg("op"), py::arg("lambda1"), py::arg("alpha") = 0.5,
      py::arg("s") = 2.0, py::arg("dim") = 1);

  m.def("barrier_mixed",
        [](double u0, double nu, double gamma, double alpha, double t) {
          return barrier_eval(make_mixed_barrier(u0, nu, gamma, alpha), t);
        },
        py::arg("u0"), py::arg("nu"), py::arg("gamma"), py::arg("alpha"),
        py::arg("t"));

  py::class_<ScalarTrajectory>(m, "ScalarTrajectory")
      .def_readonly("times", &ScalarTrajectory::times)
      .def_readonly("values", &ScalarTrajectory::values);

  py::enum_<Normalization>(m, "Normalization")
      .value("bare", Normalization::bare)
      .value("standard", Normalization::standard);

  m.def("solve_scalar_ode", &solve_scalar_ode, py::arg("lambda1"),
        py::arg("lambda2"), py::arg("alpha"), py::arg("k"), py::arg("gamma"),
        py::arg("v0"), py::arg("T"), py::arg("dt"),
        py::arg("norm") = Normalization::standard);

  py::class_<IdentityReport>(m, "IdentityReport")
      .def_readonly("name", &IdentityReport::name)
      .def_readonly("passed", &IdentityReport::pass)
      .def_readonly("worst_margin", &IdentityReport::worst_margin)
      .def_readonly("samples", &IdentityReport::samples);

  m.def("check_identity", &check_identity, py::arg("name"),
        py::arg("n_samples") = 10000, py::arg("seed") = 1);
}
