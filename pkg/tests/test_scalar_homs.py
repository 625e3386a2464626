import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from popa.errors import DomainViolation
from popa.scalar_homs import (ALL_PARAMS, INF, ZERO, BoMap, ExtParam, bo_cell_continuity, bo_eval,
                              bo_eval_table, bo_hom_residual, ext_circle, ext_domain, fin, sample_domain)


def test_domains_and_circles():
    assert ext_domain(fin(1)) == (-1, math.inf)
    assert ext_domain(ZERO) == (-math.inf, math.inf)
    assert ext_domain(INF) == (0, math.inf)
    assert ext_circle(fin(1), 2, 3) == 11
    assert ext_circle(ZERO, 2, 3) == 5
    assert ext_circle(INF, 2, 3) == 6
    with pytest.raises(DomainViolation):
        ext_circle(INF, -1, 2)


def test_bo_examples():
    assert bo_eval(BoMap(fin(1), fin(1), 1.0), 3) == pytest.approx(3.0, abs=1e-15)
    assert bo_eval(BoMap(ZERO, INF, 2.0), 1) == pytest.approx(math.exp(2), rel=1e-15)
    assert bo_eval(BoMap(ZERO, ZERO, 4.2), 0) == 0
    with pytest.raises(DomainViolation):
        bo_eval(BoMap(fin(2), ZERO, 1.0), -0.5)


def test_parse():
    assert ExtParam.parse("0") == ZERO
    assert ExtParam.parse("inf") == INF
    assert ExtParam.parse("2.5") == fin(2.5)
    with pytest.raises(ValueError):
        ExtParam("fin", -1)


def test_residual_examples():
    rng = np.random.default_rng(0)
    s, t = sample_domain(fin(1), 1000, rng), sample_domain(fin(1), 1000, rng)
    assert bo_hom_residual(BoMap(fin(1), fin(1), 1.0), list(zip(s, t)), 1e-12).passed
    s, t = sample_domain(ZERO, 1000, rng), sample_domain(ZERO, 1000, rng)
    assert bo_hom_residual(BoMap(ZERO, INF, 1.3), list(zip(s, t))).metrics["max_residual"] <= 1e-15
    assert bo_hom_residual(BoMap(INF, ZERO, 2.0), [(1.0, 1.0)]).metrics["max_residual"] == 0


def test_continuity_examples():
    assert abs(bo_cell_continuity(fin(1), 1.0, 1.0, 1e-8)) <= 1e-6
    assert abs(bo_eval(BoMap(fin(1), fin(1e-8), 1.0), 1.0) - math.log(2)) <= 1e-6
    assert bo_cell_continuity(fin(1), 0.0, 1.0, 1e-8) == 0
    assert abs(bo_eval(BoMap(INF, fin(1e-8), 3.0), math.e) - 3.0) <= 1e-6


@pytest.mark.parametrize("rho", ALL_PARAMS, ids=str)
@pytest.mark.parametrize("sigma", ALL_PARAMS, ids=str)
def test_table_agrees_with_additive_form(rho, sigma):
    rng = np.random.default_rng(1)
    for t in sample_domain(rho, 50, rng, 1.0):
        for k in (-1.5, 0.0, 0.7, 2.0):
            m = BoMap(rho, sigma, k)
            a, b = bo_eval(m, float(t)), bo_eval_table(m, float(t))
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


@pytest.mark.parametrize("rho", ALL_PARAMS, ids=str)
def test_continuity_grid(rho):
    for t in sample_domain(rho, 32, np.random.default_rng(2), 1.0):
        assert bo_cell_continuity(rho, float(t), 1.7, 1e-8) <= 1e-6


params = st.sampled_from([ZERO, fin(0.5), fin(1.0), fin(3.0), INF])


@given(params, params, params, st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
def test_composition(rho, sigma, pi, k1, k2, a):
    # a is the additive coordinate of t
    t = {"zero": a, "fin": math.expm1(rho.r * a) / rho.r if rho.kind == "fin" else 0, "inf": math.exp(a)}[rho.kind]
    lhs = BoMap(sigma, pi, k2)(BoMap(rho, sigma, k1)(t))
    rhs = BoMap(rho, pi, k1 * k2)(t)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(params, params, st.floats(0.1, 3))
def test_monotone_for_positive_kappa(rho, sigma, k):
    ts = np.sort(sample_domain(rho, 64, np.random.default_rng(5), 1.0))
    vals = [bo_eval(BoMap(rho, sigma, k), float(t)) for t in ts]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@given(params, params)
def test_kappa_zero_is_neutral(rho, sigma):
    for t in sample_domain(rho, 5, np.random.default_rng(0)):
        v = bo_eval(BoMap(rho, sigma, 0.0), float(t))
        assert v == (1.0 if sigma.kind == "inf" else 0.0)
