import math
import random

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from betainv.beta_cdf import as_params, beta_cdf, beta_pdf, beta_sf, cdf_pair
from betainv.dispatch import (
    CONTRACT,
    DOUBLE,
    SINGLE,
    bisection,
    invert,
    quantile,
    select_region,
    select_region_scheme1,
    select_region_scheme2,
)
from betainv.errors import DomainError
from betainv.result import MethodKind

# extended precision bisection on ln x
Q_600_11_1E30 = 0.89055341802899514104
Q_02_09_1E3 = 1.1669260164730287083e-15
Q_02_2_1E3 = 4.018775720164618122e-16

M = MethodKind


def _rel_residual(p, q, alpha, r):
    """|I_x - alpha| / alpha recomputed from the returned pair (x, 1 - x)."""
    cv = cdf_pair(as_params(p, q), r.x, r.complement)
    if alpha <= 0.5:
        return abs(cv.value - alpha) / alpha
    # 1 - I_x(p,q) keeps its relative accuracy when alpha is near one
    return abs(cv.complement - (1.0 - alpha)) / alpha


def _rounding_allowance(p, q, alpha, x):
    # moving x by one ulp moves I_x by about pdf(x) ulp(x)
    return beta_pdf(p, q, x) * math.ulp(x) / alpha


@pytest.mark.parametrize(
    "p,q,alpha,expected",
    [
        (0.2, 2.0, 1e-3, M.TAIL_BOUND_ONLY),
        (0.3, 2.0, 1e-3, M.TAIL_BOUND_SEEDED),
        (0.9, 20.0, 1e-3, M.TAIL_BOUND_SEEDED),
        (5.0, 0.7, 1e-3, M.TAIL_BOUND_SEEDED),
        (1.0, 0.7, 1e-3, M.TAIL_BOUND_SEEDED),
        (30.0, 0.7, 1e-3, M.TAIL_BOUND_SEEDED),
        (40.0, 0.4, 1e-3, M.TAIL_BOUND_SEEDED),
        (100.0, 2.0, 1e-3, M.ASYMP_GAMMA_SEEDED),
        (100.0, 2.0, 1e-4, M.TAIL_BOUND_SEEDED),
        (100.0, 0.5, 1e-3, M.ASYMP_GAMMA_SEEDED),
        (100.0, 5.0, 1e-3, M.ASYMP_ERF_SEEDED),
        (5.0, 5.0, 0.01, M.ASYMP_ERF_SEEDED),
        (60.0, 2.0, 0.3, M.ASYMP_GAMMA_SEEDED),
        (50.0, 2.0, 0.3, M.SNM_DIRECT),
        (40.0, 2.0, 0.3, M.SNM_DIRECT),
        (40.0, 40.0, 0.3, M.ASYMP_ERF_SEEDED),
        (30.0, 40.0, 0.3, M.SNM_DIRECT),
        (0.7, 2.0, 0.3, M.SNM_EXP),
    ],
)
def test_scheme1_routing(p, q, alpha, expected):
    assert select_region_scheme1(p, q, alpha) == expected
    assert select_region(p, q, alpha, DOUBLE) == expected


@pytest.mark.parametrize(
    "p,q,alpha,expected",
    [
        (0.45, 0.6, 1e-3, M.TAIL_BOUND_ONLY),
        (0.5, 0.6, 1e-3, M.TAIL_BOUND_SEEDED),
        (200.0, 2.0, 0.3, M.ASYMP_GAMMA_ONLY),
        (200.0, 2.0, 0.05, M.SNM_DIRECT),
        (160.0, 2.0, 0.3, M.SNM_DIRECT),
        (200.0, 3.0, 0.3, M.SNM_DIRECT),
        (50.0, 50.0, 0.2, M.ASYMP_ERF_ONLY),
        (60.0, 2.0, 0.3, M.SNM_DIRECT),
    ],
)
def test_scheme2_routing(p, q, alpha, expected):
    assert select_region_scheme2(p, q, alpha) == expected
    assert select_region(p, q, alpha, SINGLE) == expected


@settings(max_examples=500, deadline=None)
@given(
    st.one_of(st.floats(0.01, 500.0), st.sampled_from([0.3, 0.5, 1.0, 30.0, 50.0, 160.0])),
    st.one_of(st.floats(0.01, 500.0), st.sampled_from([0.5, 1.0, 3.0, 5.0, 30.0])),
    st.one_of(st.floats(1e-300, 0.5), st.sampled_from([1e-4, 0.01, 0.1, 0.5])),
)
def test_selectors_are_total(p, q, alpha):
    assert isinstance(select_region_scheme1(p, q, alpha), MethodKind)
    assert isinstance(select_region_scheme2(p, q, alpha), MethodKind)


def test_unknown_scheme():
    with pytest.raises(DomainError):
        select_region(2, 2, 0.1, "quad")
    with pytest.raises(DomainError):
        invert(2, 2, 0.1, scheme="quad")


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, math.nan])
def test_alpha_domain(alpha):
    with pytest.raises(DomainError):
        invert(2, 3, alpha)


def test_examples():
    r = invert(1, 1, 0.3)
    assert r.x == 0.3 and r.method == M.CLOSED_FORM
    assert invert(3, 3, 0.5).x == 0.5
    r = invert(600, 1.1, 1e-30)
    assert r.converged and r.residual <= 5e-13
    assert r.x == pytest.approx(Q_600_11_1E30, rel=1e-14)
    r = invert(0.2, 0.9, 1e-3)
    assert r.method == M.TAIL_BOUND_ONLY
    assert r.x == pytest.approx(Q_02_09_1E3, rel=1e-13)
    r = invert(0.2, 2.0, 1e-3)
    assert r.x == pytest.approx(Q_02_2_1E3, rel=1e-13)


def test_single_scheme_answers_are_checked():
    # the asymptotic answers are returned only if they meet the single precision contract
    for p, q, a in ((200.0, 2.0, 0.3), (50.0, 50.0, 0.2), (0.45, 0.6, 1e-3)):
        r = invert(p, q, a, scheme=SINGLE)
        assert r.residual <= CONTRACT[SINGLE]
        assert _rel_residual(p, q, a, r) <= CONTRACT[SINGLE]


def test_closed_forms_exact():
    rng = random.Random(9)
    for _ in range(200):
        a = rng.random()
        p = rng.uniform(0.05, 50)
        with mpmath.workdps(30):
            ref_q1 = float(mpmath.mpf(a) ** (1 / mpmath.mpf(p)))
            ref_p1 = float(-mpmath.expm1(mpmath.log1p(-mpmath.mpf(a)) / p))
        assert invert(p, 1.0, a).x == pytest.approx(ref_q1, rel=1e-14)
        assert invert(1.0, p, a).x == pytest.approx(ref_p1, rel=1e-14)
        assert invert(1.0, 1.0, a).x == a


def test_forced_method():
    r = invert(1.0, 1.0, 0.3, method="snm_exp")
    assert r.x == pytest.approx(0.3, rel=1e-14) and r.method == M.SNM_EXP
    r = invert(5.0, 4.0, 0.2, method=M.SNM_EXP)
    assert r.residual <= 5e-13
    r = invert(5.0, 4.0, 0.8, method=M.BISECTION)
    assert r.method == M.BISECTION and r.reflected
    assert _rel_residual(5.0, 4.0, 0.8, r) <= 5e-13


def test_failed_method_escalates():
    # the direct variant needs p, q > 1; the ladder moves on and says so
    r = invert(0.5, 3.0, 0.2, method=M.SNM_DIRECT)
    assert r.residual <= 5e-13 and r.method != M.SNM_DIRECT
    assert "snm_direct" in r.note


def test_bisection_oracle():
    for p, q, a in ((0.3, 0.4, 1e-3), (600.0, 1.1, 1e-30), (2.0, 3.0, 0.4)):
        r = bisection(p, q, a)
        assert r.converged and r.residual <= 5e-13
        assert r.x == pytest.approx(invert(p, q, a).x, rel=1e-11)


def test_reflection_flag_and_complement():
    r = invert(2.0, 3.0, 0.9)
    assert r.reflected
    assert r.x + r.complement == pytest.approx(1.0, abs=1e-16)
    r = invert(0.3, 5.0, 1 - 1e-12)
    assert r.reflected and r.complement > 0.0
    assert beta_sf(0.3, 5.0, r.x) == pytest.approx(1e-12, rel=1e-3)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 300.0), st.floats(0.05, 300.0), st.floats(1e-12, 1 - 1e-12))
def test_reflection_identity(p, q, alpha):
    # make 1 - alpha exact so both calls pose the same problem
    alpha = 1.0 - (1.0 - alpha) if alpha < 0.5 else alpha
    a = invert(p, q, alpha)
    b = invert(q, p, 1.0 - alpha)
    assert a.x == pytest.approx(b.complement, rel=1e-11, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 500.0), st.floats(0.05, 500.0), st.floats(1e-15, 1 - 1e-15))
def test_double_contract(p, q, alpha):
    r = invert(p, q, alpha)
    assert 0.0 <= r.x <= 1.0
    assume(not r.underflow)
    assert r.residual <= CONTRACT[DOUBLE]
    assert _rel_residual(p, q, alpha, r) <= 1e-12
    # x alone, up to the error of rounding it to a double
    if alpha <= 0.5:
        assert abs(beta_cdf(p, q, r.x) - alpha) / alpha <= 1e-12 + 2 * _rounding_allowance(p, q, alpha, r.x)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 500.0), st.floats(0.05, 500.0), st.floats(1e-15, 1 - 1e-15))
def test_single_contract(p, q, alpha):
    r = invert(p, q, alpha, scheme=SINGLE)
    assume(not r.underflow)
    assert r.residual <= CONTRACT[SINGLE]


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 200.0), st.floats(0.05, 200.0))
def test_monotone_in_alpha(p, q):
    alphas = [10.0**-k for k in range(12, 0, -1)] + [k / 20 for k in range(2, 19)] + [1 - 10.0**-k for k in range(2, 12)]
    xs = [quantile(p, q, a) for a in alphas]
    assert all(a <= b for a, b in zip(xs, xs[1:]))


def test_deep_tail_underflow_is_flagged():
    # the quantile is near 1e-1000, below the smallest double
    r = invert(0.01, 1.5, 1e-10)
    assert r.x == 0.0 and r.underflow and not r.converged
    r = invert(1.5, 0.01, 1 - 1e-10)
    assert r.x == 1.0 and r.complement == 0.0 and r.underflow
    # just representable
    r = invert(0.01, 1.5, 1e-3)
    assert r.x > 0.0 and not r.underflow
