import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from betainv.beta_cdf import beta_cdf
from betainv.errors import DomainError
from betainv.special_fns import beta_fn
from betainv.tail_bounds import (
    g_lower,
    g_upper,
    lower_tail_interval,
    upper_tail_interval,
)
from conftest import mp_quantile


def test_maps_at_zero():
    assert g_lower(1, 1, 0.01, 0.0) == pytest.approx(0.01, rel=1e-15)
    assert g_upper(1, 1, 0.01, 0.0) == pytest.approx(0.01, rel=1e-15)
    for p, q, a in ((0.3, 0.4, 1e-3), (5.0, 2.0, 1e-6), (0.05, 3.0, 1e-2)):
        ref = (a * p * beta_fn(p, q)) ** (1 / p)
        assert g_lower(p, q, a, 0.0) == pytest.approx(ref, rel=1e-13)
        assert g_upper(p, q, a, 0.0) == pytest.approx(g_lower(p, q, a, 0.0), rel=4e-16)


def test_maps_formulas():
    p, q, a, x = 2.5, 1.5, 1e-3, 0.02
    b = beta_fn(p, q)
    ref_l = (a * b * (p - (p + q) * x) * (1 - x) ** -q) ** (1 / p)
    den = (1 + (p + q) * x / (p + 1) + (p + q) * (p + q + 1) * x * x / ((p + 1) * (p + 2))) * (1 - x) ** q
    ref_u = (a * p * b / den) ** (1 / p)
    assert g_lower(p, q, a, x) == pytest.approx(ref_l, rel=1e-13)
    assert g_upper(p, q, a, x) == pytest.approx(ref_u, rel=1e-13)


def test_maps_domain():
    with pytest.raises(DomainError):
        g_lower(2, 2, 0.1, 0.6)
    with pytest.raises(DomainError):
        g_upper(2, 2, 0.1, 1.0)
    with pytest.raises(DomainError):
        g_lower(2, 2, 0.0, 0.1)


def test_uniform_bounds():
    iv = lower_tail_interval(1, 1, 0.01, n_iter=1)
    assert iv.lower == pytest.approx(0.01) and iv.upper == pytest.approx(0.01)
    iv = lower_tail_interval(1, 1, 0.01, n_iter=3)
    assert iv.lower < 0.01 < iv.upper
    iv = upper_tail_interval(1, 1, 0.999)
    assert iv.lower < 0.999 < iv.upper and iv.tail == "upper"


def test_orbits_monotone_when_maps_increase():
    # for p = 5, q = 2 both maps increase near 0 and the orbits climb
    ivs = [lower_tail_interval(5, 2, "1e-3", n_iter=n, dps=40) for n in (1, 2, 3, 4)]
    lows = [iv.lower for iv in ivs]
    ups = [iv.upper for iv in ivs]
    assert all(b < c for b, c in zip(lows, lows[1:]))
    assert all(b < c for b, c in zip(ups, ups[1:]))


def test_orbits_alternate_when_maps_decrease():
    # for p = 0.3, q = 0.4 the maps decrease and g(0) overshoots; the orbits
    # then alternate about their limits; the upper orbit is still below x at
    # n = 2, and both bounds hold from n = 3 on
    x = mp_quantile(0.3, 0.4, "1e-3", dps=50)
    ivs = [lower_tail_interval(0.3, 0.4, "1e-3", n_iter=n, dps=50) for n in (1, 2, 3, 4, 5)]
    assert ivs[0].lower > x
    lows = [iv.lower for iv in ivs]
    steps = [b - a for a, b in zip(lows, lows[1:])]
    assert all(s1 * s2 < 0 for s1, s2 in zip(steps, steps[1:]))
    assert ivs[1].upper < x
    for iv in ivs[2:]:
        assert iv.lower < x < iv.upper


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(0.05, 30.0), st.floats(-12, -2))
def test_bracketing_small_p(p, q, la):
    alpha = 10.0**la
    iv = lower_tail_interval(p, q, alpha)
    if iv.truncated or not iv.applicable or iv.underflow or iv.lower == 0.0:
        return
    assert iv.lower <= iv.upper
    # the bounds may be sharper than double precision, so only non-strict here
    assert beta_cdf(p, q, iv.lower) <= alpha * (1 + 1e-12)
    assert beta_cdf(p, q, iv.upper) >= alpha * (1 - 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 30.0), st.floats(0.05, 30.0), st.floats(-12, -2))
def test_limits_bracket(p, q, la):
    alpha = 10.0**la
    iv = lower_tail_interval(p, q, alpha, n_iter=400)
    if iv.truncated or not iv.applicable or iv.underflow or iv.lower == 0.0:
        return
    assert beta_cdf(p, q, iv.lower) <= alpha * (1 + 1e-12)
    assert beta_cdf(p, q, iv.upper) >= alpha * (1 - 1e-12)


def test_three_steps_are_not_enough_for_large_q():
    # the upper orbit climbs from below here; after three steps it has not reached x
    iv = lower_tail_interval(1.0, 8.0, 0.01)
    x = 1 - 0.99 ** (1 / 8)
    assert iv.upper < x
    assert lower_tail_interval(1.0, 8.0, 0.01, n_iter=6).upper > x


def test_sharper_as_alpha_shrinks():
    for p, q in ((0.3, 0.4), (0.4, 0.3), (2.0, 5.0)):
        rel = []
        for a in (1e-3, 1e-5, 1e-7):
            iv = lower_tail_interval(p, q, a, dps=80)
            rel.append((iv.upper - iv.lower) / iv.lower)
        assert rel[0] > rel[1] > rel[2]


def test_upper_is_mirror_of_lower():
    p, q, a = 0.4, 0.3, 1 - 1e-5
    up = upper_tail_interval(p, q, a)
    lo = lower_tail_interval(q, p, 1e-5)
    assert up.lower == pytest.approx(1 - lo.upper, rel=1e-15)
    assert up.upper == pytest.approx(1 - lo.lower, rel=1e-15)
    assert up.complement_lower == pytest.approx(lo.lower, rel=1e-10)
    assert up.complement_upper == pytest.approx(lo.upper, rel=1e-10)


def test_extended_precision_cell():
    # lower tail for (0.3, 0.4, 1e-3): 1 - x_l/x ~ 2.5e-9, x_u/x - 1 ~ 8.5e-29
    x = mp_quantile(0.3, 0.4, "1e-3", dps=60, steps=600)
    iv = lower_tail_interval(0.3, 0.4, "1e-3", dps=60)
    with mpmath.workdps(60):
        lb = float(1 - iv.lower / x)
        ub = float(iv.upper / x - 1)
    assert 2.0e-9 < lb < 3.0e-9
    assert 5e-29 < ub < 1.2e-28


def test_not_a_tail():
    # g(0) = sqrt(0.9 * 2 / 6) is past the mean 1/2
    iv = lower_tail_interval(2.0, 2.0, 0.9)
    assert not iv.applicable
    iv = lower_tail_interval(2.0, 2.0, 0.04)
    assert iv.applicable


def test_underflow_is_flagged():
    iv = lower_tail_interval(0.01, 2.0, 1e-10)
    assert iv.lower == 0.0 and iv.underflow
    iv = lower_tail_interval(0.01, 2.0, "1e-10", dps=30)
    assert 0 < iv.lower <= iv.upper and math.isfinite(float(mpmath.log(iv.lower)))
