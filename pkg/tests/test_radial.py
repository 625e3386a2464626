import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from popa.core import PopaCtx, is_member, vec
from popa.errors import NoCase, NotCommutative, NullDirection, PopaError, ZeroDirection
from popa.radial import (classify_abelian, combination_witness, commutes, halfline, normalize_direction,
                         q_sum_witness, scalar_iso_check, sum_witness)

CTX = PopaCtx.make([1, 0])
CTX_Q = PopaCtx.make([1, 0], exact=True)


def test_halfline_examples():
    h = halfline(CTX, vec([2, 0]))
    assert (h.lo, h.hi) == (-0.5, math.inf)
    h = halfline(CTX, vec([0, 1]))
    assert (h.lo, h.hi) == (-math.inf, math.inf)
    h = halfline(CTX, vec([-1, 0]))
    assert (h.lo, h.hi) == (-math.inf, 1)
    assert 0.9 in h and 1.0 not in h
    with pytest.raises(ZeroDirection):
        halfline(CTX, vec([0, 0]))


def test_normalize_direction_examples():
    np.testing.assert_array_equal(normalize_direction(CTX, vec([2, 6])), [1, 3])
    np.testing.assert_array_equal(normalize_direction(CTX, vec([1, 0])), [1, 0])
    with pytest.raises(NullDirection):
        normalize_direction(CTX, vec([0, 1]))


def test_case1_example():
    w = sum_witness(CTX, vec([1, 0]), vec([2, 0]))
    assert w.case_tag == "case1"
    np.testing.assert_array_equal(w.word[1].element, [1, 0])
    np.testing.assert_array_equal(w.evaluate(CTX), [3, 0])


def test_case2_example_exact():
    w = q_sum_witness(CTX_Q, CTX_Q.point([4, 0]), CTX_Q.point([-3, 0]))
    assert w.case_tag == "case2" and w.delta == Fraction(4, 5)
    assert list(w.word[1].element) == [Fraction(-3, 5), 0]
    assert list(w.evaluate(CTX_Q)) == [1, 0]
    assert w.letters_on_halflines(CTX_Q)


def test_zero_summand():
    w = sum_witness(CTX_Q, CTX_Q.point([2, 1]), CTX_Q.zero())
    assert w.case_tag == "case1"
    assert list(w.word[1].element) == [0, 0]
    assert list(w.evaluate(CTX_Q)) == [2, 1]


def test_case1_preferred_and_swap():
    # both v and -v are members: Case 1 wins
    w = sum_witness(CTX, vec([1, 0]), vec([0, 3]))
    assert w.case_tag == "case1"
    # u outside, v inside: roles swap
    w = sum_witness(CTX_Q, CTX_Q.point([-2, 0]), CTX_Q.point([3, 0]))
    assert list(w.evaluate(CTX_Q)) == [1, 0]


def test_no_case():
    with pytest.raises(NoCase):
        sum_witness(CTX, vec([1, 0]), vec([-3, 0]))
    with pytest.raises(PopaError):
        q_sum_witness(CTX, vec([1, 0]), vec([1, 0]))


def test_combination_witness_permutes():
    gens = [CTX_Q.point([-3, 0]), CTX_Q.point([4, 0]), CTX_Q.point([0, 1])]
    w = combination_witness(CTX_Q, gens, [Fraction(1), Fraction(1), Fraction(2)])
    assert w.perm == (1, 0, 2)
    assert list(w.evaluate(CTX_Q)) == [1, 2]
    assert w.letters_on_halflines(CTX_Q)


def test_classify_abelian_examples():
    assert classify_abelian(CTX, [vec([0, 1]), vec([0, 2])]).kind == "null"
    c = classify_abelian(CTX, [vec([1, 0]), vec([2, 0])])
    assert c.kind == "ray"
    np.testing.assert_array_equal(c.u, [1, 0])
    with pytest.raises(NotCommutative) as err:
        classify_abelian(CTX, [vec([0, 1]), vec([1, 0])])
    assert err.value.pair == (0, 1)


def test_scalar_iso_examples():
    assert scalar_iso_check(CTX, vec([1, 0]), [(1, 1), (0, 2.5), (-0.5, 3)]).passed
    assert scalar_iso_check(CTX, vec([0, 1]), [(2, 3)]).metrics["max_deviation"] == 0
    assert scalar_iso_check(CTX_Q, CTX_Q.point(["1/2", 1]), [(Fraction(1, 3), Fraction(-1, 2))]).passed


small = st.fractions(min_value=-6, max_value=6, max_denominator=7)


@given(st.lists(small, min_size=2, max_size=2), st.lists(small, min_size=2, max_size=2),
       st.lists(small, min_size=2, max_size=2))
def test_witness_soundness_exact(rho, u, v):
    ctx = PopaCtx.make(rho, exact=True)
    u, v = ctx.point(u), ctx.point(v)
    if not (is_member(ctx, u) and is_member(ctx, u + v) and (is_member(ctx, v) or is_member(ctx, -v))):
        return
    w = sum_witness(ctx, u, v)
    assert np.array_equal(w.evaluate(ctx), u + v)
    assert w.letters_on_halflines(ctx)


@given(st.integers(0, 10**6))
def test_ray_class_members_on_ray(seed):
    rng = np.random.default_rng(seed)
    ctx = PopaCtx.make(rng.standard_normal(3))
    z = rng.standard_normal(3)
    S = [t * z for t in rng.uniform(-0.3, 0.3, size=4) / max(1.0, abs(ctx.rho(z)))]
    S = [x for x in S if is_member(ctx, x)]
    for x in S:
        for y in S:
            assert commutes(ctx, x, y)
    cls = classify_abelian(ctx, S)
    if cls.kind == "ray":
        for x in S:
            np.testing.assert_allclose(x, ctx.rho(x) * cls.u, atol=1e-12)
        assert cls.eta_mult_dev <= 1e-12
