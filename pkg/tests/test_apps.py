import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from popa import apps
from popa.core import PopaCtx, vec
from popa.errors import BoxOutsideDomain, DegenerateFit, DomainViolation, NonMember, PopaError


def test_evt_examples():
    assert apps.evt_E(apps.EvtParams(1, 1), 2) == pytest.approx(1.0)
    assert apps.evt_E(apps.EvtParams(1, 0), math.e) == pytest.approx(1.0)
    assert apps.evt_E(apps.EvtParams(2, -1), 2) == pytest.approx(1.0)
    assert apps.evt_A(1, 3) == pytest.approx(3)
    assert apps.evt_A(0, 7) == 1
    assert apps.evt_A(0.5, 4) == pytest.approx(2)
    with pytest.raises(DomainViolation):
        apps.evt_E(apps.EvtParams(1, 1), 0)
    with pytest.raises(DomainViolation):
        apps.evt_A(1, -1)


def test_goldie_examples():
    pairs = [(2.0, 3.0), (0.5, 7.0), (1.0, 4.0)]
    assert apps.evt_goldie_residual(apps.EvtParams(1, 1), pairs).passed
    assert apps.evt_goldie_residual(apps.EvtParams(1, 0), pairs).passed
    assert apps.evt_goldie_residual(apps.EvtParams(3, 0.4), [(1.0, 5.0)]).metrics["max_residual"] <= 1e-15


@given(st.floats(-3, 3), st.floats(-2, 2), st.floats(-0.7, 0.7), st.floats(-0.7, 0.7))
def test_goldie_identity(kappa, gamma, lx, ly):
    rep = apps.evt_goldie_residual(apps.EvtParams(kappa, gamma), [(math.exp(lx), math.exp(ly))])
    assert rep.metrics["max_residual"] <= 1e-12


def test_gev_examples():
    assert abs(apps.gev_cdf(0, 0) - math.exp(-1)) <= 1e-12
    assert apps.gev_cdf(1, -1) == 0
    assert apps.gev_cdf(-1, 1) == 1


@pytest.mark.parametrize("gamma", [-1, -0.1, 0, 0.1, 1])
def test_gev_monotone_range(gamma):
    vals = np.array([apps.gev_cdf(gamma, x) for x in np.linspace(-30, 30, 1000)])
    assert np.all(np.diff(vals) >= 0)
    assert vals.min() >= 0 and vals.max() <= 1


def test_gev_continuity_in_gamma():
    for x in np.linspace(-5, 5, 101):
        for g in (1e-6, -1e-6):
            assert abs(apps.gev_cdf(g, x) - apps.gev_cdf(0, x)) <= 1e-5


def test_gev_names_flag_mismatch():
    assert apps.gev_type(0.5)["standard"] == "Frechet"
    assert apps.gev_type(0.0)["standard"] == "Gumbel"
    assert apps.gev_type(-0.5)["standard"] == "Weibull"
    assert not apps.gev_type(0.5)["names_agree"]
    assert apps.gev_type(-0.5)["names_agree"]


@pytest.mark.parametrize("kappa,gamma", [(2, 0.5), (1, 0), (-0.5, -1.2), (3, 2.5)])
def test_fit_noiseless(kappa, gamma):
    data = [(t, apps.evt_E(apps.EvtParams(kappa, gamma), t)) for t in range(1, 11)]
    fit = apps.fit_E(data)
    assert abs(fit.params.kappa - kappa) <= 1e-3
    assert abs(fit.params.gamma - gamma) <= 1e-3


def test_fit_noisy_is_close():
    rng = np.random.default_rng(0)
    ts = np.linspace(1, 20, 60)
    E = [apps.evt_E(apps.EvtParams(1.5, 0.3), t) + 0.01 * rng.standard_normal() for t in ts]
    fit = apps.fit_E(list(zip(ts, E)))
    assert abs(fit.params.gamma - 0.3) <= 0.05
    assert fit.residual <= 0.02


def test_fit_errors():
    with pytest.raises(DegenerateFit):
        apps.fit_E([(t, 0.0) for t in (1, 2, 3)])
    with pytest.raises(PopaError):
        apps.fit_E([(1, 0.0), (2, 1.0)])
    with pytest.raises(DomainViolation):
        apps.fit_E([(0, 0.0), (2, 1.0), (3, 2.0)])


def test_read_csv(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("t,E\n1,0\n2,1\n4,3\n")
    assert apps.read_evt_csv(str(p)) == [(1.0, 0.0), (2.0, 1.0), (4.0, 3.0)]
    p.write_text("t,E\n1,0,5\n")
    with pytest.raises(PopaError):
        apps.read_evt_csv(str(p))


# -- Haar ---------------------------------------------------------------------

CTX = PopaCtx.make([1, 0])


def test_density_examples():
    assert apps.haar_density(CTX, vec([1, 2]), "right") == 0.5
    assert apps.haar_density(CTX, vec([0, 0]), "left") == 1
    assert apps.haar_density(CTX, vec([1, 2]), "left", 2) == 0.25
    with pytest.raises(NonMember):
        apps.haar_density(CTX, vec([-2, 0]))


def test_log2_estimate():
    est = apps.haar_measure_mc(apps.HaarJob(PopaCtx.make([1]), apps.Box([0], [1]), n=10**6, seed=3))
    assert abs(est.value - math.log(2)) <= 3 * est.se


def test_translated_box_is_log2():
    job = apps.HaarJob(PopaCtx.make([1]), apps.Box([0], [1]), n=10**6, seed=4)
    est = apps.translate_measure_mc(job, np.array([0.5]))
    assert abs(est.value - math.log(2)) <= 3 * est.se


def test_flat_density_is_volume():
    est = apps.haar_measure_mc(apps.HaarJob(PopaCtx.make([0, 0]), apps.Box([0, -1], [2, 1]), n=10**4))
    assert est.value == pytest.approx(4.0) and est.se == pytest.approx(0.0, abs=1e-12)


def test_zero_translate_identical():
    rep = apps.haar_invariance_check(CTX, apps.Box([0, 0], [1, 1]), np.zeros(2), "right", 10**4, seed=9)
    assert rep.metrics["mu_box"] == rep.metrics["mu_translate"]


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("side", ["right", "left"])
def test_invariance(d, side):
    ctx = PopaCtx.make([1.0, 0.5, -0.25][:d])
    rep = apps.haar_invariance_check(ctx, apps.Box(np.zeros(d), np.ones(d)), np.array([0.4, -0.3, 0.2][:d]),
                                     side, 10**6, seed=20 + d)
    assert rep.passed, rep.metrics


def test_wrong_side_detected():
    rep = apps.haar_invariance_check(CTX, apps.Box([0, 0], [1, 1]), np.array([0.5, 0.3]), "left", 10**6,
                                     seed=1, density_side="right")
    assert rep.metrics["z"] > 5
    assert rep.metrics["relative_deviation"] == pytest.approx(0.5, abs=0.01)


def test_box_outside_domain():
    with pytest.raises(BoxOutsideDomain):
        apps.HaarJob(CTX, apps.Box([-2, 0], [1, 1]))
    with pytest.raises(PopaError):
        apps.HaarJob(CTX, apps.Box([0, 0], [1, 1]), n=10)


def test_mc_deterministic():
    job = apps.HaarJob(CTX, apps.Box([0, 0], [1, 1]), n=5000, seed=12, chunk=1000)
    assert apps.haar_measure_mc(job) == apps.haar_measure_mc(job)
