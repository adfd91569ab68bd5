"""Top-level quantile function: closed forms, region selection, seeding and polish.

Two schemes are provided.  ``"double"`` aims at relative residuals
|I_x - alpha| / alpha <= 5e-13, ``"single"`` at 1e-8 and may return an
asymptotic estimate or a tail bound directly.  For alpha > 1/2 the problem is
solved as I_{1-x}(q,p) = 1 - alpha and the result reflected.
"""

import math

from . import snm
from .asymp_erf import asymp_invert_erf_pair
from .asymp_gamma import asymp_invert_gamma_pair
from .beta_cdf import Parameters, as_params, cdf_pair
from .errors import ConvergenceError, DomainError
from .result import InversionResult, MethodKind
from .special_fns import EPS, log_beta_fn
from .tail_bounds import lower_tail_interval

DOUBLE = "double"
SINGLE = "single"
SCHEMES = (DOUBLE, SINGLE)

# residual each scheme promises, and the stop tolerance handed to the SNM
CONTRACT = {DOUBLE: 5e-13, SINGLE: 1e-8}
STOP_TOL = {DOUBLE: snm.DEFAULT_TOL, SINGLE: 1e-8}

BISECTION_MAX_ITER = 2000
_LOG_TINY = math.log(math.ulp(0.0))

_ANSWER_ONLY = (MethodKind.TAIL_BOUND_ONLY, MethodKind.ASYMP_ERF_ONLY, MethodKind.ASYMP_GAMMA_ONLY)


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")


def plain_snm_method(p, q) -> MethodKind:
    """The SNM variant that applies to (p, q) without any seed."""
    return MethodKind.SNM_DIRECT if (p > 1.0 and q > 1.0) else MethodKind.SNM_EXP


def select_region_scheme1(p, q, alpha) -> MethodKind:
    """Method for alpha <= 1/2 under the double precision scheme."""
    if alpha <= 0.01:
        if p < 0.3:
            return MethodKind.TAIL_BOUND_ONLY
        if p < 1.0:
            return MethodKind.TAIL_BOUND_SEEDED
        if p <= 30.0 and q < 1.0:
            return MethodKind.TAIL_BOUND_SEEDED
        if p > 30.0 and q < 0.5:
            return MethodKind.TAIL_BOUND_SEEDED
        if p > 30.0 and 0.5 <= q < 5.0:
            return MethodKind.ASYMP_GAMMA_SEEDED if alpha > 1e-4 else MethodKind.TAIL_BOUND_SEEDED
        return MethodKind.ASYMP_ERF_SEEDED
    if 1.0 < q < 5.0 and p > 50.0:
        return MethodKind.ASYMP_GAMMA_SEEDED
    if p > 30.0 and q > 30.0:
        return MethodKind.ASYMP_ERF_SEEDED
    return plain_snm_method(p, q)


def select_region_scheme2(p, q, alpha) -> MethodKind:
    """Method for alpha <= 1/2 under the single precision scheme."""
    if alpha <= 0.01:
        if p < 0.5:
            return MethodKind.TAIL_BOUND_ONLY
        if p < 1.0:
            return MethodKind.TAIL_BOUND_SEEDED
        if p <= 30.0 and q < 1.0:
            return MethodKind.TAIL_BOUND_SEEDED
        if p > 30.0 and q < 0.5:
            return MethodKind.TAIL_BOUND_SEEDED
        if p > 30.0 and 0.5 <= q < 5.0:
            return MethodKind.ASYMP_GAMMA_SEEDED if alpha > 1e-4 else MethodKind.TAIL_BOUND_SEEDED
        return MethodKind.ASYMP_ERF_SEEDED
    if 1.0 < q < 3.0 and p > 160.0 and alpha > 0.1:
        return MethodKind.ASYMP_GAMMA_ONLY
    if p > 30.0 and q > 30.0:
        return MethodKind.ASYMP_ERF_ONLY
    return plain_snm_method(p, q)


def select_region(p, q, alpha, scheme=DOUBLE) -> MethodKind:
    _check_scheme(scheme)
    if scheme == DOUBLE:
        return select_region_scheme1(p, q, alpha)
    return select_region_scheme2(p, q, alpha)


def _residual(prm: Parameters, alpha, x, y):
    cv = cdf_pair(prm, x, y)
    f = cv.value - alpha if cv.value <= 0.5 else (1.0 - alpha) - cv.complement
    return abs(f) / alpha


def _estimate(prm: Parameters, alpha, method, x, y, tol):
    res = _residual(prm, alpha, x, y)
    return InversionResult(x=x, complement=y, residual=res, iterations=0, method=method,
                           converged=res <= tol, seed=x)


def _seeded(prm: Parameters, alpha, tol, x, y, method):
    """Polish a seed (x, 1 - x) with the SNM variant suited to (p, q)."""
    if not (x > 0.0 and y > 0.0):
        raise ConvergenceError("seed is not inside (0, 1)")
    if prm.p > 1.0 and prm.q > 1.0:
        res = snm._solve_direct(prm, alpha, x, tol, snm.MAX_ITER_DIRECT)
    else:
        z = math.log(x) - math.log(y)
        res = snm._solve_exp(prm, alpha, z, tol, snm.MAX_ITER_EXP)
    return res.with_method(method, seed=x)


def _plain(prm: Parameters, alpha, tol, method=None):
    p, q = prm.p, prm.q
    if method is None:
        method = plain_snm_method(p, q)
    if method == MethodKind.SNM_DIRECT:
        if not (p > 1.0 and q > 1.0):
            raise DomainError("the direct SNM needs p > 1 and q > 1")
        return snm._solve_direct(prm, alpha, snm.extremum_x_e(p, q), tol, snm.MAX_ITER_DIRECT)
    if p > 1.0 and q > 1.0:
        # forced exponential variant where Omega(z) is not monotone: start beside the mean
        z0 = math.log(prm.s2) - math.log(prm.c2)
        return snm._solve_exp(prm, alpha, z0, tol, snm.MAX_ITER_EXP)
    geo = snm.geometry(p, q)
    side = snm.exp_side(prm, alpha, geo)
    z0 = geo.z_e if side == 0 else snm.exp_start(prm, alpha, side)
    return snm._solve_exp(prm, alpha, z0, tol, snm.MAX_ITER_EXP)


def _bound_seeded(prm: Parameters, alpha, tol):
    iv = lower_tail_interval(prm.p, prm.q, alpha)
    usable = iv.applicable and iv.iterations_used > 0
    if prm.p > 1.0 and prm.q > 1.0:
        lo = iv.lower if usable and iv.lower > 0.0 else None
        hi = iv.upper if usable and iv.upper < 1.0 else None
        x0 = snm.direct_start(prm, alpha, lo, hi)
        res = snm._solve_direct(prm, alpha, x0, tol, snm.MAX_ITER_DIRECT)
    else:
        res = _plain(prm, alpha, tol, MethodKind.SNM_EXP)
    return res.with_method(MethodKind.TAIL_BOUND_SEEDED)


def bisection(p, q, alpha, tol=CONTRACT[DOUBLE]) -> InversionResult:
    """Bisection on the logit of x; slow but unconditionally convergent."""
    prm = as_params(p, q)
    return _bisection(prm, alpha, tol)


def _bisection(prm: Parameters, alpha, tol):
    lo, hi = -snm.Z_MAX, snm.Z_MAX
    n = 0
    best = None
    while n < BISECTION_MAX_ITER:
        z = 0.5 * (lo + hi)
        x, y = snm._xy(z)
        cv = cdf_pair(prm, x, y)
        f = cv.value - alpha if cv.value <= 0.5 else (1.0 - alpha) - cv.complement
        best = (x, y, f)
        n += 1
        if abs(f) <= tol * alpha:
            break
        if f < 0.0:
            lo = z
        else:
            hi = z
        if hi - lo <= 2.0 * EPS * max(1.0, abs(z)):
            break
    x, y, f = best
    return InversionResult(x=x, complement=y, residual=abs(f) / alpha, iterations=n,
                           method=MethodKind.BISECTION, converged=abs(f) <= tol * alpha,
                           underflow=(x == 0.0))


def _run(prm: Parameters, alpha, method: MethodKind, scheme):
    tol = STOP_TOL[scheme]
    p, q = prm.p, prm.q
    if method == MethodKind.TAIL_BOUND_ONLY:
        iv = lower_tail_interval(p, q, alpha)
        if not iv.applicable or iv.iterations_used == 0:
            raise ConvergenceError("tail bounds not applicable here")
        return _estimate(prm, alpha, method, iv.upper, iv.complement_lower, CONTRACT[scheme])
    if method == MethodKind.TAIL_BOUND_SEEDED:
        return _bound_seeded(prm, alpha, tol)
    if method in (MethodKind.ASYMP_ERF_SEEDED, MethodKind.ASYMP_ERF_ONLY):
        x, y = asymp_invert_erf_pair(prm, None, alpha)
        if method == MethodKind.ASYMP_ERF_ONLY:
            return _estimate(prm, alpha, method, x, y, CONTRACT[scheme])
        return _seeded(prm, alpha, tol, x, y, method)
    if method in (MethodKind.ASYMP_GAMMA_SEEDED, MethodKind.ASYMP_GAMMA_ONLY):
        x, y = asymp_invert_gamma_pair(prm, None, alpha)
        if method == MethodKind.ASYMP_GAMMA_ONLY:
            return _estimate(prm, alpha, method, x, y, CONTRACT[scheme])
        return _seeded(prm, alpha, tol, x, y, method)
    if method in (MethodKind.SNM_DIRECT, MethodKind.SNM_EXP):
        return _plain(prm, alpha, tol, method)
    if method == MethodKind.BISECTION:
        return _bisection(prm, alpha, tol)
    raise DomainError(f"method {method!s} cannot be run directly")


def _solve(prm: Parameters, alpha, method: MethodKind, scheme):
    """Run ``method``, escalating along estimate -> seeded SNM -> plain SNM -> bisection."""
    contract = CONTRACT[scheme]
    notes = []
    ladder = [method]
    if method in _ANSWER_ONLY:
        ladder.append(MethodKind.TAIL_BOUND_SEEDED if method == MethodKind.TAIL_BOUND_ONLY
                      else {MethodKind.ASYMP_ERF_ONLY: MethodKind.ASYMP_ERF_SEEDED,
                            MethodKind.ASYMP_GAMMA_ONLY: MethodKind.ASYMP_GAMMA_SEEDED}[method])
    plain = plain_snm_method(prm.p, prm.q)
    for m in (plain, MethodKind.BISECTION):
        if m not in ladder:
            ladder.append(m)
    last = None
    for m in ladder:
        try:
            res = _run(prm, alpha, m, scheme)
        except (ConvergenceError, DomainError, ArithmeticError) as exc:
            notes.append(f"{m!s}: {exc}")
            last = getattr(exc, "result", last)
            continue
        if res.converged and res.residual <= contract:
            if notes:
                res = res.with_method(res.method, note="; ".join(notes))
            return res
        notes.append(f"{m!s}: residual {res.residual:.3g}")
        last = res
    if last is not None and last.underflow:
        return last.with_method(last.method, note="; ".join(notes))
    err = ConvergenceError("no method reached the residual contract: " + "; ".join(notes))
    err.result = last
    raise err


def _below_tiny(prm: Parameters, alpha):
    """True when the quantile is below the smallest subnormal.

    I_x(p,q) >= x^p (1-x)^q / (p B(p,q)), so if that already exceeds alpha at
    the smallest double the solution cannot be represented.
    """
    return prm.p * _LOG_TINY - math.log(prm.p) - log_beta_fn(prm.p, prm.q) >= math.log(alpha)


def _closed_form(prm: Parameters, alpha):
    p, q = prm.p, prm.q
    if p == 1.0 and q == 1.0:
        x, y = alpha, 1.0 - alpha
    elif q == 1.0:
        # I_x(p,1) = x^p
        t = math.log(alpha) / p
        x, y = math.exp(t), -math.expm1(t)
    elif p == 1.0:
        # I_x(1,q) = 1 - (1-x)^q
        t = math.log1p(-alpha) / q
        x, y = -math.expm1(t), math.exp(t)
    else:
        return None
    return InversionResult(x=x, complement=y, residual=_residual(prm, alpha, x, y),
                           iterations=0, method=MethodKind.CLOSED_FORM)


def invert(p, q, alpha, scheme=DOUBLE, method=None) -> InversionResult:
    """Quantile of the beta distribution: the x with I_x(p,q) = alpha.

    ``method`` forces a MethodKind (or its string value), bypassing the closed
    forms and the region tables; reflection for alpha > 1/2 still applies.
    """
    prm = as_params(p, q)
    _check_scheme(scheme)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if method is not None:
        method = MethodKind(method)
    elif (closed := _closed_form(prm, alpha)) is not None:
        return closed

    if alpha > 0.5:
        sub = prm.swapped()
        a = 1.0 - alpha
    else:
        sub, a = prm, alpha
    if _below_tiny(sub, a):
        res = InversionResult(x=0.0, complement=1.0, residual=1.0, iterations=0,
                              method=MethodKind.TAIL_BOUND_ONLY, converged=False, underflow=True,
                              note="quantile below the smallest double")
    else:
        chosen = method if method is not None else select_region(sub.p, sub.q, a, scheme)
        res = _solve(sub, a, chosen, scheme)
    if alpha > 0.5:
        # |I_x(p,q) - alpha| = |I_{1-x}(q,p) - (1 - alpha)|
        res = res.reflect().with_method(res.method, residual=res.residual * a / alpha)
    return res


def quantile(p, q, alpha, scheme=DOUBLE) -> float:
    """Just the x of :func:`invert`."""
    return invert(p, q, alpha, scheme).x
