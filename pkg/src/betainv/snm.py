"""Schwarzian-Newton iteration for I_x(p,q) = alpha.

With f(x) = I_x(p,q) - alpha, Phi = f / sqrt(f') satisfies Phi'' + Omega Phi = 0.
Treating Omega as locally constant and negative gives the fourth order step

    x <- x - atanh(sqrt(-Omega) h) / sqrt(-Omega),   h = Phi / Phi'.

For p, q > 1 the iteration runs in x itself; otherwise it runs in the logit
variable z = ln(x / (1 - x)), where Omega becomes monotone or has a single
minimum, and the starting side is chosen from that shape.
"""

import math
from dataclasses import dataclass

from .beta_cdf import Parameters, as_params, cdf_pair, log_kernel
from .errors import ConvergenceError, DomainError
from .result import InversionResult, MethodKind
from .special_fns import EPS
from .tail_bounds import lower_tail_interval, upper_tail_interval

# stop a little inside the 5e-13 contract so sampled maxima stay clear of it
DEFAULT_TOL = 2e-13
TOL_ABS = 1e-290
MAX_ITER_DIRECT = 25
MAX_ITER_EXP = 40
# logit range in which x or 1 - x is still a nonzero double
Z_MAX = 746.0
FAR_Z = 35.0

DIRECT = "direct"
EXP_A = "exp_a"
EXP_B = "exp_b"
EXP_C = "exp_c"


@dataclass(frozen=True)
class SnmGeometry:
    """Which variant applies, and where Omega has its extremum."""

    case_tag: str
    x_e: float | None = None
    z_e: float | None = None
    delta: float | None = None


def logit(x: float) -> float:
    if not (0.0 < x < 1.0):
        raise DomainError(f"logit needs 0 < x < 1, got {x!r}")
    if x < 0.5:
        return math.log(x) - math.log1p(-x)
    return math.log(x / (1.0 - x))


def expit(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def logit_from_complement(y: float) -> float:
    """logit(1 - y), accurate when y is tiny."""
    return math.log1p(-y) - math.log(y)


def _xy(z):
    return expit(z), expit(-z)


def _seed_x(z0):
    return None if z0 is None else expit(z0)


def omega_x(p, q, x: float) -> float:
    """Half the Schwarzian derivative of I_x(p,q) with respect to x."""
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    prm = as_params(p, q)
    p, q = prm.p, prm.q
    y = 1.0 - x
    return (p - 1.0) * (q - 1.0) / (2.0 * x * y) - 0.25 * (p * p - 1.0) / (x * x) - 0.25 * (q * q - 1.0) / (y * y)


def _x_e_closed(a, b):
    # closed form for the maximiser, written in a = p - 1 >= b = q - 1 > 0
    r = a + b
    inner = (r + 2.0) * (27.0 * b + 54.0 + b * b * a + 18.0 * a * b + 27.0 * a + a * a * b)
    delta = a * b * (
        108.0 * (a - b) * (r + 1.0)
        + 27.0 * (a + b) ** 2 * (a - b)
        + 3.0 * math.sqrt(3.0) * r * (r + 2.0) * math.sqrt(inner)
    )
    d13 = delta ** (1.0 / 3.0)
    num = (3.0 * a * b + 3.0 * a * a + 6.0 * a) * d13 - d13 * d13 + 3.0 * a * b * (r * r + 8.0 * r + 12.0)
    return num / (3.0 * d13 * (r * r + 2.0 * r)), delta


def _omega_slope_cubic(p, q, x):
    # x^3 (1-x)^3 Omega'(x) up to a negative factor; one real root in (0, 1)
    r = p + q
    c3, c2 = r * ((p - 1.0) + (q - 1.0)), -3.0 * (p - 1.0) * r
    c1, c0 = (p - 1.0) * (3.0 * p + q + 2.0), -(p - 1.0) * (p + 1.0)
    return ((c3 * x + c2) * x + c1) * x + c0, (3.0 * c3 * x + 2.0 * c2) * x + c1


def _extremum(p, q):
    if not (p > 1.0 and q > 1.0):
        raise DomainError(f"x_e needs p > 1 and q > 1, got {p!r}, {q!r}")
    if p == q:
        return 0.5, _x_e_closed(p - 1.0, q - 1.0)[1]
    # work on the side where the maximiser is below 1/2, which keeps the
    # cubic well conditioned in relative terms; x_e(p,q) = 1 - x_e(q,p)
    a, b = (p, q) if p < q else (q, p)
    x_big, delta = _x_e_closed(b - 1.0, a - 1.0)
    x = 1.0 - x_big
    if not (0.0 < x < 1.0):
        x = 0.25
    lo, hi = 0.0, 0.5
    for _ in range(60):
        c, dc = _omega_slope_cubic(a, b, x)
        if c < 0.0:
            lo = x
        elif c > 0.0:
            hi = x
        else:
            break
        x_new = x - c / dc if dc > 0.0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 2.0 * EPS * x:
            x = x_new
            break
        x = x_new
    return (x if p < q else 1.0 - x), delta


def extremum_x_e(p, q) -> float:
    """Location of the maximum of omega_x on (0, 1), for p, q > 1."""
    return _extremum(p, q)[0]


def omega_z(p, q, z: float) -> float:
    """Omega in the logit variable; a quadratic in x = expit(z)."""
    prm = as_params(p, q)
    p, q, r = prm.p, prm.q, prm.r
    x = expit(z)
    return 0.25 * (-r * (r - 2.0) * x * x + 2.0 * r * (p - 1.0) * x - p * p)


def geometry(p, q) -> SnmGeometry:
    prm = as_params(p, q)
    p, q = prm.p, prm.q
    if p > 1.0 and q > 1.0:
        xe, delta = _extremum(p, q)
        return SnmGeometry(DIRECT, x_e=xe, delta=delta)
    if p < 1.0 and q < 1.0:
        xe = (1.0 - p) / (2.0 - p - q)
        return SnmGeometry(EXP_C, z_e=logit(xe))
    # Omega(z) is increasing when q <= 1 < p or q < 1 = p, decreasing otherwise
    if q < 1.0 or (q == 1.0 and p > 1.0):
        return SnmGeometry(EXP_B)
    return SnmGeometry(EXP_A)


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def _f_x(prm, alpha, x, y):
    cv = cdf_pair(prm, x, y)
    # take the difference on the side the fraction produced directly
    if cv.value <= 0.5:
        return cv.value - alpha
    return (1.0 - alpha) - cv.complement


def _h_x_from_f(prm, f, x, y):
    dens = math.exp(log_kernel(prm, x, y) - math.log(x) - math.log(y))
    den = 0.5 * (-(prm.p - 1.0) / x + (prm.q - 1.0) / y) * f + dens
    if den == 0.0:
        raise ArithmeticError("h(x) denominator vanished")
    return f / den


def _h_z_from_f(prm, f, x, y):
    dens = math.exp(log_kernel(prm, x, y))
    den = -0.5 * (prm.p * y - prm.q * x) * f + dens
    if den == 0.0:
        raise ArithmeticError("h(z) denominator vanished")
    return f / den


def h_x(p, q, alpha, x) -> float:
    """Phi/Phi' for f(x) = I_x(p,q) - alpha."""
    prm = as_params(p, q)
    _check_alpha(alpha)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    y = 1.0 - x
    return _h_x_from_f(prm, _f_x(prm, alpha, x, y), x, y)


def h_z(p, q, alpha, z) -> float:
    """Phi/Phi' in the logit variable."""
    prm = as_params(p, q)
    _check_alpha(alpha)
    x, y = _xy(z)
    return _h_z_from_f(prm, _f_x(prm, alpha, x, y), x, y)


class StepDomainError(DomainError):
    """The atanh argument left (-1, 1)."""


def snm_step(x: float, omega: float, h: float) -> float:
    if omega > 0.0:
        raise StepDomainError("Omega must be <= 0")
    w = math.sqrt(-omega)
    t = w * h
    if abs(t) >= 1.0:
        raise StepDomainError(f"|sqrt(-Omega) h| = {abs(t)!r} >= 1")
    if t == 0.0:
        return x - h
    return x - math.atanh(t) / w


def _guarded_step(x, omega, h):
    if omega >= 0.0 or abs(math.sqrt(-omega) * h) >= 1.0:
        return x - h
    return snm_step(x, omega, h)


def _result(x, y, f, alpha, n, method, seed, iterates, converged):
    return InversionResult(
        x=x,
        complement=y,
        residual=abs(f) / alpha,
        iterations=n,
        method=method,
        converged=converged,
        seed=seed,
        iterates=tuple(iterates),
    )


def _done(f, alpha, tol):
    return abs(f) <= max(tol * alpha, TOL_ABS)


def _fail(msg, res):
    err = ConvergenceError(msg)
    err.result = res
    raise err


def _solve_direct(prm: Parameters, alpha, x0, tol, max_iter):
    p, q = prm.p, prm.q
    lo, hi = 0.0, 1.0
    x = x0
    iterates = [x]
    n = 0
    stalled = False
    while True:
        y = 1.0 - x
        f = _f_x(prm, alpha, x, y)
        if _done(f, alpha, tol) or stalled:
            return _result(x, y, f, alpha, n, MethodKind.SNM_DIRECT, x0, iterates, _done(f, alpha, tol))
        if f < 0.0:
            lo = x
        else:
            hi = x
        if n >= max_iter:
            _fail(f"direct SNM hit {max_iter} iterations for p={p!r}, q={q!r}, alpha={alpha!r}",
                  _result(x, y, f, alpha, n, MethodKind.SNM_DIRECT, x0, iterates, False))
        h = _h_x_from_f(prm, f, x, y)
        om = (p - 1.0) * (q - 1.0) / (2.0 * x * y) - 0.25 * (p * p - 1.0) / (x * x) - 0.25 * (q * q - 1.0) / (y * y)
        x_new = _guarded_step(x, om, h)
        # a step at roundoff level ends the run; test it before the bracket,
        # which would otherwise reject x_new == x and bisect away from the root
        stalled = abs(x_new - x) <= 4.0 * EPS * x
        if stalled:
            x_new = x
        elif not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        x = x_new
        n += 1
        iterates.append(x)


def _solve_exp(prm: Parameters, alpha, z0, tol, max_iter):
    p, q, r = prm.p, prm.q, prm.r
    lo, hi = -Z_MAX, Z_MAX
    z = z0
    iterates = [z]
    n = 0
    stalled = False
    while True:
        x, y = _xy(z)
        f = _f_x(prm, alpha, x, y)
        if _done(f, alpha, tol) or stalled:
            return _result(x, y, f, alpha, n, MethodKind.SNM_EXP, _seed_x(z0), iterates, _done(f, alpha, tol))
        if f < 0.0:
            lo = z
        else:
            hi = z
        if n >= max_iter:
            _fail(f"exponential SNM hit {max_iter} iterations for p={p!r}, q={q!r}, alpha={alpha!r}",
                  _result(x, y, f, alpha, n, MethodKind.SNM_EXP, _seed_x(z0), iterates, False))
        h = _h_z_from_f(prm, f, x, y)
        om = 0.25 * (-r * (r - 2.0) * x * x + 2.0 * r * (p - 1.0) * x - p * p)
        z_new = _guarded_step(z, om, h)
        stalled = abs(z_new - z) <= 4.0 * EPS * max(abs(z), 1.0)
        if stalled:
            z_new = z
        elif not (lo < z_new < hi):
            z_new = 0.5 * (lo + hi)
        z = z_new
        n += 1
        iterates.append(z)


def _side_ok(prm, alpha, z, side):
    x, y = _xy(z)
    f = _f_x(prm, alpha, x, y)
    return f <= 0.0 if side < 0 else f >= 0.0


def _bound_start(prm: Parameters, alpha, side):
    """Logit of a tail bound lying on the requested side of the root, or None."""
    try:
        if alpha <= 0.5:
            iv = lower_tail_interval(prm.p, prm.q, alpha)
        else:
            iv = upper_tail_interval(prm.p, prm.q, alpha)
    except (DomainError, OverflowError):
        return None
    if not iv.applicable or iv.iterations_used == 0:
        return None
    if side < 0:
        x, y = iv.lower, iv.complement_upper
    else:
        x, y = iv.upper, iv.complement_lower
    if not (x > 0.0 and y > 0.0):
        return None
    return math.log(x) - math.log(y)


def exp_start(prm: Parameters, alpha, side):
    """Starting z on the given side of the root (-1 left, +1 right).

    Tail bounds are preferred; otherwise a far value is moved outwards until
    it is verified to lie on the requested side.
    """
    z = _bound_start(prm, alpha, side)
    if z is not None and abs(z) < Z_MAX and _side_ok(prm, alpha, z, side):
        return z
    z = side * FAR_Z
    while abs(z) < Z_MAX and not _side_ok(prm, alpha, z, side):
        z = side * min(2.0 * abs(z), Z_MAX)
    return z


def exp_side(prm: Parameters, alpha, geo: SnmGeometry | None = None):
    """Side of the root from which convergence is certified: -1 left, +1 right, 0 at z_e."""
    geo = geo or geometry(prm.p, prm.q)
    if geo.case_tag == EXP_A:
        return -1
    if geo.case_tag == EXP_B:
        return 1
    if geo.case_tag == EXP_C:
        x, y = _xy(geo.z_e)
        f = _f_x(prm, alpha, x, y)
        if f == 0.0:
            return 0
        # sign of h(z_e) follows f whenever the denominator is positive
        return -1 if f > 0.0 else 1
    raise DomainError("exponential variant needs p <= 1 or q <= 1")


def direct_start(prm: Parameters, alpha, lower=None, upper=None):
    """Certified start for the direct variant given optional bounds on the root."""
    xe = extremum_x_e(prm.p, prm.q)
    # Omega increases up to x_e and decreases after it
    if upper is not None and 0.0 < upper <= xe:
        return upper
    if lower is not None and lower >= xe and lower < 1.0:
        return lower
    return xe


def snm_solve_direct(p, q, alpha, x0=None, tol=DEFAULT_TOL, max_iter=MAX_ITER_DIRECT) -> InversionResult:
    """Solve I_x(p,q) = alpha for p, q > 1, starting from x0 (default: x_e)."""
    prm = as_params(p, q)
    _check_alpha(alpha)
    if not (prm.p > 1.0 and prm.q > 1.0):
        raise DomainError("direct SNM needs p > 1 and q > 1")
    if x0 is None:
        x0 = extremum_x_e(prm.p, prm.q)
    elif not (0.0 < x0 < 1.0):
        raise DomainError(f"x0 must lie in (0, 1), got {x0!r}")
    return _solve_direct(prm, alpha, x0, tol, max_iter)


def snm_solve_exp(p, q, alpha, z0=None, tol=DEFAULT_TOL, max_iter=MAX_ITER_EXP) -> InversionResult:
    """Solve I_x(p,q) = alpha in the logit variable.

    Without z0, the start is placed on the side of the root where Omega(z)
    is monotone in the direction that guarantees convergence.
    """
    prm = as_params(p, q)
    _check_alpha(alpha)
    if prm.p == 1.0 and prm.q == 1.0:
        raise DomainError("p = q = 1 is the uniform case; x = alpha")
    if z0 is None:
        geo = geometry(prm.p, prm.q)
        if geo.case_tag == DIRECT:
            raise DomainError("exponential SNM is meant for p <= 1 or q <= 1; pass z0 to force it")
        side = exp_side(prm, alpha, geo)
        z0 = geo.z_e if side == 0 else exp_start(prm, alpha, side)
    elif not math.isfinite(z0):
        raise DomainError("z0 must be finite")
    return _solve_exp(prm, alpha, max(-Z_MAX, min(Z_MAX, z0)), tol, max_iter)
