"""Smoke tests for the python bindings."""

import math

import pytest

fd = pytest.importorskip("fracdecay")


def test_grid_and_norms():
    g = fd.Grid(0.0, 1.0, 99)
    assert g.size() == 99
    assert g.h() == pytest.approx(0.01)
    u = fd.eigenfunction_field(g)
    assert fd.lp_norm(u, 2.0) == pytest.approx(math.sqrt(0.5), rel=1e-3)
    assert fd.gradient_sq_norm(u) == pytest.approx(math.pi**2 / 2, rel=1e-3)


def test_random_field_determinism():
    g = fd.Grid(0.0, 1.0, 31)
    a = fd.random_field(g, 7, 2)
    b = fd.random_field(g, 7, 2)
    assert (a.values == b.values).all()


def test_mittag_leffler_values():
    assert fd.mittag_leffler(1.0, -1.0) == pytest.approx(math.exp(-1))
    assert fd.mittag_leffler(0.5, -1.0) == pytest.approx(
        math.e * math.erfc(1.0), rel=1e-12
    )
    with pytest.raises(ValueError):
        fd.mittag_leffler(0.5, 1.0)


def test_operator_application():
    g = fd.Grid(0.0, 1.0, 49)
    u = fd.eigenfunction_field(g)
    lap = fd.apply_operator({"operator": "laplacian"}, u)
    lam = g.laplacian_min_eigenvalue()
    assert lap.values[24].real == pytest.approx(lam * u.values[24].real)
    frac = fd.apply_operator({"operator": "frac_laplacian", "sigma": "0.5"}, u)
    assert frac.values[24].real > 0


def test_simulate_and_fit():
    tr = fd.simulate(
        {
            "operator": "laplacian",
            "n": "49",
            "dt": "1e-3",
            "T": "1.0",
            "record_every": "5",
        }
    )
    assert not tr.blew_up
    fit = fd.fit_decay(tr, 2.0)
    assert fit.kind == "exponential"
    g = fd.Grid(0.0, 1.0, 49)
    assert fit.rate == pytest.approx(g.laplacian_min_eigenvalue(), rel=0.01)


def test_predicted_rates():
    pred = fd.predicted_rate({"operator": "laplacian"}, lambda1=1.0, alpha=0.4)
    assert pred.covered and pred.kind == "polynomial"
    assert pred.exponent == pytest.approx(0.4)
    pred = fd.predicted_rate({"operator": "laplacian"}, lambda1=0.0)
    assert pred.kind == "exponential"


def test_barrier_dominates_trajectory():
    traj = fd.solve_scalar_ode(0.5, 0.5, 0.5, 1.0, 2.0, 1.0, 10.0, 1e-3)
    for t, v in zip(traj.times[:: len(traj.times) // 50], traj.values[:: len(traj.values) // 50]):
        assert v <= fd.barrier_mixed(1.0, 1.0, 2.0, 0.5, t) + 1e-6


def test_identity_check():
    rep = fd.check_identity("st00", 5000, 1)
    assert rep.passed and rep.worst_margin >= -1e-12
