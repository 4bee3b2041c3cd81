#include <doctest.h>

#include <cmath>

#include "fracdecay/decay.hpp"

using namespace fracdecay;

namespace {

NormTrace synthetic(const std::function<double(double)>& f, double t_end,
                    long n) {
  NormTrace tr;
  tr.s_values = {2.0};
  tr.norms.resize(1);
  for (long k = 0; k <= n; ++k) {
    const double t = t_end * k / n;
    tr.times.push_back(t);
    tr.norms[0].push_back(f(t));
  }
  return tr;
}

TimeDerivative mixed(double l1, double alpha = 0.5) {
  TimeDerivative td;
  td.lambda1 = l1;
  td.lambda2 = 1.0 - l1;
  td.alpha = alpha;
  return td;
}

}  // namespace

TEST_CASE("fit recovers synthetic polynomial decay") {
  auto tr = synthetic(
      [](double t) { return 5.0 / (1.0 + std::pow(t, 0.5)); }, 100.0, 500);
  auto fit = fit_decay(tr, 2.0, {});
  CHECK(fit.kind == DecayKind::polynomial);
  CHECK(std::abs(fit.exponent - 0.5) < 0.02);
}

TEST_CASE("fit recovers synthetic exponential decay") {
  auto tr = synthetic([](double t) { return 3.0 * std::exp(-2.0 * t); },
                      10.0, 500);
  auto fit = fit_decay(tr, 2.0, {});
  CHECK(fit.kind == DecayKind::exponential);
  CHECK(std::abs(fit.rate - 2.0) < 0.02);
  CHECK(std::abs(fit.constant - 3.0) / 3.0 < 0.01);
}

TEST_CASE("fit rejects degenerate windows") {
  auto tr = synthetic([](double t) { return std::exp(-t); }, 1.0, 10);
  WindowPolicy pol;
  pol.min_points = 20;
  CHECK_THROWS_AS(fit_decay(tr, 2.0, pol), std::invalid_argument);
  auto zero = synthetic([](double) { return 0.0; }, 1.0, 100);
  CHECK_THROWS_AS(fit_decay(zero, 2.0, {}), std::invalid_argument);
}

TEST_CASE("predicted rates match the decay table") {
  SUBCASE("linear diffusion under a fractional derivative") {
    auto p = predicted_rate(Laplacian{1.0}, mixed(1.0, 0.4), 2.0, 1);
    CHECK(p.covered);
    CHECK(p.kind == DecayKind::polynomial);
    CHECK(p.exponent == doctest::Approx(0.4));
    CHECK(p.gamma == 1.0);
  }
  SUBCASE("porous medium pressure form, classical derivative") {
    auto p = predicted_rate(PorousMediumII{0.25}, mixed(0.0), 2.0, 1);
    CHECK(p.covered);
    CHECK(p.kind == DecayKind::polynomial);
    CHECK(p.exponent == doctest::Approx(1.0));
  }
  SUBCASE("degenerate kirchhoff, classical derivative") {
    auto p = predicted_rate(KirchhoffClassical{0.0, 1.0}, mixed(0.0), 2.0, 1);
    CHECK(p.covered);
    CHECK(p.kind == DecayKind::polynomial);
    CHECK(p.exponent == doctest::Approx(0.5));
    CHECK(p.gamma == 3.0);
  }
  SUBCASE("p-laplacian with powers follows m(p-1)") {
    auto p = predicted_rate(PLaplacianPower{3.0, 2.0}, mixed(1.0, 0.6), 2.0, 1);
    CHECK(p.exponent == doctest::Approx(0.6 / 4.0));
    auto q = predicted_rate(PLaplacianPower{3.0, 2.0}, mixed(0.0), 2.0, 1);
    CHECK(q.kind == DecayKind::polynomial);
    CHECK(q.exponent == doctest::Approx(1.0 / 3.0));
    auto heat = predicted_rate(PLaplacianPower{2.0, 1.0}, mixed(0.0), 2.0, 1);
    CHECK(heat.kind == DecayKind::exponential);
  }
  SUBCASE("fractional p-laplacian dichotomy in p") {
    auto fast = predicted_rate(FractionalPLaplacian{0.5, 1.8}, mixed(0.0), 2.0, 1);
    CHECK(fast.kind == DecayKind::exponential);
    auto slow = predicted_rate(FractionalPLaplacian{0.5, 3.0}, mixed(0.0), 2.0, 1);
    CHECK(slow.kind == DecayKind::polynomial);
    CHECK(slow.exponent == doctest::Approx(1.0));
  }
  SUBCASE("superposition uses the largest p") {
    SumFractionalPLaplacians sum;
    sum.terms = {{1.0, 0.3, 1.5}, {2.0, 0.6, 4.0}};
    auto p = predicted_rate(sum, mixed(1.0, 0.5), 2.0, 1);
    CHECK(p.exponent == doctest::Approx(0.5 / 3.0));
  }
  SUBCASE("porous medium power form splits on m") {
    auto p1 = predicted_rate(PorousMediumI{0.5, 2.0}, mixed(0.0), 2.0, 1);
    CHECK(p1.kind == DecayKind::polynomial);
    CHECK(p1.exponent == doctest::Approx(1.0));
    auto p2 = predicted_rate(PorousMediumI{0.5, 0.8}, mixed(0.0), 2.0, 1);
    CHECK(p2.kind == DecayKind::exponential);
  }
  SUBCASE("restricted degenerate fractional kirchhoff can be uncovered") {
    // only reachable for dim > 4 sigma with large s; dim = 2, sigma = 0.3:
    // s above 2n/(n - 4 sigma) = 5 is outside every case
    auto p = predicted_rate(KirchhoffFractional{0.3, 0.0, 1.0}, mixed(1.0),
                            6.0, 2);
    CHECK(!p.covered);
    CHECK(!p.reason.empty());
  }
}

TEST_CASE("predicted_rate is total over the menu") {
  VectorFieldSpec a;
  a.a0[0] = 1.0;
  SumFractionalPLaplacians sum;
  sum.terms = {{1.0, 0.5, 2.0}};
  AnisotropicFractional aniso;
  aniso.axes = {{1.0, 0.5}};
  const std::vector<DiffusionOperator> menu = {
      Laplacian{1.0},
      FractionalLaplacian{0.5, 1.0, false},
      PLaplacianPower{2.5, 1.5},
      FractionalPLaplacian{0.5, 2.5},
      sum,
      aniso,
      PorousMediumI{0.5, 1.0},
      PorousMediumII{0.25},
      KirchhoffClassical{1.0, 0.0},
      KirchhoffClassical{0.0, 1.0},
      KirchhoffFractional{0.5, 1.0, 0.0},
      KirchhoffFractional{0.5, 0.0, 1.0},
      Magnetic{a},
      FractionalMagnetic{0.5, a},
      MeanCurvature{},
      FractionalMeanCurvature{0.5}};
  for (const auto& op : menu) {
    for (double l1 : {0.0, 1.0}) {
      const auto p = predicted_rate(op, mixed(l1), 2.0, 1);
      INFO(operator_name(op));
      CHECK((p.covered || !p.reason.empty()));
      if (p.covered && l1 > 0.0) CHECK(p.kind == DecayKind::polynomial);
      if (p.covered && l1 == 0.0 && p.gamma <= 1.0)
        CHECK(p.kind == DecayKind::exponential);
    }
  }
}

TEST_CASE("verify_bound on exact and faster-than-predicted traces") {
  PredictedDecay pred;
  pred.covered = true;
  pred.kind = DecayKind::polynomial;
  pred.exponent = 0.5;
  SUBCASE("trace equal to the bound") {
    auto tr = synthetic(
        [](double t) { return 1.0 / (1.0 + std::pow(t, 0.5)); }, 50.0, 400);
    auto bc = verify_bound(tr, 2.0, pred);
    CHECK(bc.holds);
    CHECK(bc.c_star_hat == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("faster decay holds with the max at the start") {
    auto tr = synthetic(
        [](double t) {
          return std::exp(-0.3 * t) / (1.0 + std::pow(t, 0.5));
        },
        20.0, 400);
    auto bc = verify_bound(tr, 2.0, pred);
    CHECK(bc.holds);
    CHECK(bc.c_star_hat == doctest::Approx(1.0));  // attained at t = 0
  }
  SUBCASE("slower decay is flagged") {
    auto tr = synthetic(
        [](double t) { return 1.0 / (1.0 + std::pow(t, 0.2)); }, 200.0, 400);
    auto bc = verify_bound(tr, 2.0, pred);
    CHECK(!bc.holds);
    CHECK(bc.tail_slope > 0.05);
  }
  SUBCASE("uncovered predictions are rejected") {
    PredictedDecay none;
    auto tr = synthetic([](double t) { return std::exp(-t); }, 10.0, 100);
    CHECK_THROWS_AS(verify_bound(tr, 2.0, none), std::invalid_argument);
  }
}

TEST_CASE("nonlinear table rate: porous medium power form, m = 2" *
          doctest::timeout(60)) {
  SimulationConfig cfg;
  cfg.grid.n[0] = 49;
  cfg.op = PorousMediumI{0.5, 2.0};
  cfg.td = {0.0, 1.0, 0.5, Normalization::standard};
  cfg.u0.kind = InitialData::Kind::bump;
  const Grid g = cfg.grid.build();
  cfg.dt = 0.1 * g.h(0);  // within c_stab h^{2 sigma}
  cfg.t_final = 150.0;
  cfg.record_every = 100;
  const auto res = simulate(cfg);
  REQUIRE(!res.trace.blow_up.has_value());
  const auto fit = fit_decay(res.trace, 2.0, {});
  CHECK(fit.kind == DecayKind::polynomial);
  // the classical-derivative rate 1/(m-1) = 1, generous band
  CHECK(fit.exponent > 0.7);
  CHECK(fit.exponent < 1.3);
  const auto pred = predicted_rate(cfg.op, cfg.td, 2.0, 1);
  CHECK(verify_bound(res.trace, 2.0, pred).holds);
}
