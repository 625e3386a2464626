import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from popa import grv
from popa.errors import NonConvergent, NotCollinear, PopaError, ZeroDirection


def test_kernel_examples():
    assert abs(grv.grv_kernel(grv.builtin("builtin:log"), 1.0).value - math.log(2)) <= 1e-4
    assert grv.grv_kernel(grv.builtin("log"), 0.0).value == 0
    assert abs(grv.grv_kernel(grv.builtin("exp"), 1.0).value - (math.e - 1)) <= 1e-4


def test_g_examples():
    assert abs(grv.grv_g(grv.builtin("exp"), 1.0).value - math.e) <= 1e-4
    assert grv.grv_g(grv.builtin("log"), 1.0).value == pytest.approx(1.0)
    assert grv.grv_g(grv.builtin("exp"), 0.0).value == 1.0


@pytest.mark.parametrize("name", sorted(grv.BUILTINS))
@pytest.mark.parametrize("x", [0.25, 1.0, 2.0, 4.0])
def test_builtin_accuracy(name, x):
    p = grv.builtin(name)
    est = grv.grv_kernel(p, x)
    assert est.converged
    assert all(d <= p.schedule.tol_rel for d in est.last_deltas)
    assert abs(est.value - p.K_exact(np.array([x]))) <= 1e-4
    assert abs(grv.grv_g(p, x).value - p.g_exact(np.array([x]))) <= 1e-4
    assert abs(grv.grv_eta(p, x).value - p.eta_exact(np.array([x]))) <= 1e-4


@pytest.mark.parametrize("gamma", [0.5, -0.5, 2.0])
def test_dehaan_kernel(gamma):
    p = grv.dehaan_problem(gamma)
    for x in (1.0, 2.0, 4.0):
        assert abs(grv.grv_kernel(p, x).value - (x ** gamma - 1) / gamma) <= 1e-4


def test_slow_convergence_takes_longer():
    fast = grv.grv_kernel(grv.builtin("log"), 1.0)
    slow = grv.grv_kernel(grv.builtin("shiftlog"), 1.0)
    assert slow.t_final > fast.t_final
    assert abs(slow.value - math.log(2)) <= 1e-6


def test_nonconvergent():
    p = grv.GrvProblem("divergent", f=lambda y: float(y[0]) ** 2, phi=lambda y: float(y[0]), h=lambda y: 1.0)
    with pytest.raises(NonConvergent) as err:
        grv.grv_kernel(p, 1.0)
    assert err.value.estimate is not None
    short = grv.GrvProblem("slow", f=lambda y: math.log1p(abs(y[0])), phi=lambda y: float(y[0]),
                           h=lambda y: 1.0, schedule=grv.Schedule(k_max=3))
    with pytest.raises(NonConvergent):
        grv.grv_kernel(short, 1.0)


def test_schedule_validation():
    with pytest.raises(PopaError):
        grv.Schedule(ratio=1.0)
    with pytest.raises(PopaError):
        grv.Schedule(streak=1)


@pytest.mark.parametrize("name", ["log", "exp", "shiftlog"])
@pytest.mark.parametrize("xi", [0.5, 1.0, 3.0])
def test_radial_consistency(name, xi):
    p = grv.builtin(name)
    u = np.array([1.0])
    a = grv.grv_kernel(p, xi * u).value
    b = grv.grv_kernel_radial(p, u, xi).value
    assert abs(a - b) <= 1e-6
    with pytest.raises(ZeroDirection):
        grv.grv_kernel_radial(p, np.zeros(1), xi)


def test_se_check_examples():
    rep = grv.se_check(lambda y: float(y[0]), 1.0, [1.0])
    assert rep.passed and rep.metrics["eta_hat"][0] == pytest.approx(2.0)
    rep = grv.se_check(lambda y: 1.0, 1.0, [-1.0, 0.5, 2.0])
    assert rep.metrics["eta_hat"] == [1.0, 1.0, 1.0]
    rep = grv.se_check(lambda y: math.sqrt(abs(y[0])), 1.0, [1.0])
    assert abs(rep.metrics["eta_hat"][0] - 1.0) <= 1e-5
    grid = np.linspace(-0.5, 2.0, 11)
    rep = grv.se_check(lambda y: float(y[0]), 1.0, grid)
    np.testing.assert_allclose(rep.metrics["eta_hat"], 1 + grid, atol=1e-9)


def test_se_growth_flag():
    rep = grv.se_check(lambda y: float(y[0]) ** 2, 1.0, [0.0])
    assert not rep.passed


def test_gfe_examples():
    xs = [(np.array([a]), np.array([b])) for a, b in [(0.5, 0.3), (2.0, -0.4), (0.1, 1.7)]]
    rep = grv.gfe_residual(lambda x: math.log1p(x[0]), lambda x: 1.0, lambda x: 1 + x[0], xs, 1e-14)
    assert rep.passed
    rep = grv.gfe_residual(lambda x: math.expm1(x[0]), lambda x: math.exp(x[0]), lambda x: 1.0, xs, 1e-12)
    assert rep.passed
    rep = grv.gfe_residual(lambda x: math.expm1(x[0]), lambda x: math.exp(x[0]), lambda x: 1.0,
                           [(np.array([1.3]), np.array([0.0]))], 0.0)
    assert rep.metrics["gfe"] == 0
    with pytest.raises(NotCollinear):
        grv.gfe_residual(lambda x: x, lambda x: 1.0, lambda x: 1.0, [(np.array([1.0, 0]), np.array([0, 1.0]))])


@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.sampled_from(["log", "exp", "dehaan", "shiftlog"]))
def test_estimated_kernels_satisfy_gfe(a, b, name):
    K, g, eta = grv.estimated_triplet(grv.builtin(name))
    rep = grv.gfe_residual(K, g, eta, [(np.array([a]), np.array([b]))], 5e-4)
    assert rep.passed, rep.failures


def test_unknown_builtin():
    with pytest.raises(PopaError):
        grv.builtin("builtin:nope")
