"""Large-parameter inversion of I_x(p,q) through the error function.

With p = r s^2, q = r c^2, the variable eta defined by

    -eta^2 / 2 = s^2 ln(x / s^2) + c^2 ln((1 - x) / c^2),   sign(eta) = sign(x - s^2)

turns I_x(p,q) into erfc(-eta sqrt(r/2)) / 2 plus a correction that is small
for large r = p + q.  Solving for eta as eta0 + eta1/r + eta2/r^2 and mapping
back to x gives the estimate.
"""

import math
from dataclasses import dataclass

from .beta_cdf import Parameters, as_params
from .errors import ConvergenceError, DomainError
from .special_fns import EPS, inv_erfc, log_ratio_excess

# eta2 is a difference of O(eta0^2) terms divided by eta0^3; below this it is noise
ETA_MIN = 1e-2
Z_LIMIT = 745.0
POLISH_MAX_ITER = 40


@dataclass(frozen=True)
class EtaExpansion:
    eta0: float
    eta1: float
    eta2: float
    r: float

    @property
    def eta(self) -> float:
        return self.eta0 + self.eta1 / self.r + self.eta2 / (self.r * self.r)


def _half_eta_sq(prm: Parameters, x, y):
    # -(s^2 ln(x/s^2) + c^2 ln(y/c^2)); the linear parts of the two logs cancel
    return -(prm.s2 * log_ratio_excess(x, prm.s2) + prm.c2 * log_ratio_excess(y, prm.c2))


def _eta_xy(prm: Parameters, x, y):
    if x == prm.s2:
        return 0.0
    v = max(_half_eta_sq(prm, x, y), 0.0)
    e = math.sqrt(2.0 * v)
    return e if x > prm.s2 else -e


def eta_of_x(p, q, x) -> float:
    """The eta variable for a given x in (0, 1)."""
    prm = as_params(p, q)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    return _eta_xy(prm, x, 1.0 - x)


def eta_switch(prm: Parameters) -> float:
    """|eta| beyond which the tail expansions replace the small-eta series."""
    return 0.7 * math.sqrt(2.0) * math.sqrt(min(prm.s2, prm.c2))


def _small_eta_series(prm: Parameters, eta):
    s2, c2 = prm.s2, prm.c2
    s, c = math.sqrt(s2), math.sqrt(c2)
    s4 = s2 * s2
    return (
        s2
        + s * c * eta
        + (1.0 - 2.0 * s2) / 3.0 * eta**2
        + (13.0 * s4 - 13.0 * s2 + 1.0) / (36.0 * s * c) * eta**3
        + (46.0 * s4 * s2 - 69.0 * s4 + 21.0 * s2 + 1.0) / (270.0 * s2 * c2) * eta**4
    )


def _power_series(m, w):
    # w + m w^2 + 3m(3m+1)/3! w^3 + 4m(4m+1)(4m+2)/4! w^4 + 5m(5m+1)(5m+2)(5m+3)/5! w^5
    return (
        w
        + m * w**2
        + 3.0 * m * (3.0 * m + 1.0) / 6.0 * w**3
        + 4.0 * m * (4.0 * m + 1.0) * (4.0 * m + 2.0) / 24.0 * w**4
        + 5.0 * m * (5.0 * m + 1.0) * (5.0 * m + 2.0) * (5.0 * m + 3.0) / 120.0 * w**5
    )


def _log_tail_arg(prm: Parameters, eta, a2):
    # ln u (a2 = s^2) or ln v (a2 = c^2)
    ent = prm.s2 * math.log(prm.s2) + prm.c2 * math.log(prm.c2)
    return (-0.5 * eta * eta + ent) / a2


def _initial_z(prm: Parameters, eta):
    """Starting logit for the polish, from the series appropriate to eta."""
    sw = eta_switch(prm)
    if abs(eta) <= sw:
        x = _small_eta_series(prm, eta)
        if 0.0 < x < 1.0:
            return math.log(x) - math.log1p(-x)
        return math.log(prm.s2) - math.log(prm.c2)
    if eta < 0.0:
        lu = _log_tail_arg(prm, eta, prm.s2)
        mu = prm.c2 / prm.s2
        u = math.exp(lu)
        x = _power_series(mu, u) if u < 1.0 else u
        if 0.0 < x < prm.s2:
            return math.log(x) - math.log1p(-x)
        # fall back on the leading term in log form
        return lu
    lv = _log_tail_arg(prm, eta, prm.c2)
    nu = prm.s2 / prm.c2
    v = math.exp(lv)
    y = _power_series(nu, v) if v < 1.0 else v
    if 0.0 < y < prm.c2:
        return math.log1p(-y) - math.log(y)
    return -lv


def _expit_pair(z):
    if z >= 0.0:
        e = math.exp(-z)
        return 1.0 / (1.0 + e), e / (1.0 + e)
    e = math.exp(z)
    return e / (1.0 + e), 1.0 / (1.0 + e)


def _x_of_eta_z(prm: Parameters, eta):
    """Solve the eta relation for z = logit(x); returns (z, x, 1 - x).

    Newton on eta(z) - eta, whose derivative (x - s^2)/eta(z) stays positive
    and finite through eta = 0, safeguarded by a bracket in z.
    """
    s2 = prm.s2
    z_mid = math.log(s2) - math.log(prm.c2)
    if eta == 0.0:
        x, y = s2, prm.c2
        return z_mid, x, y
    if eta < 0.0:
        lo, hi = -Z_LIMIT, z_mid
    else:
        lo, hi = z_mid, Z_LIMIT
    z = _initial_z(prm, eta)
    if z <= -Z_LIMIT:
        # x itself underflows
        return z, 0.0, 1.0
    if z >= Z_LIMIT:
        return z, 1.0, 0.0
    if not (lo < z < hi):
        z = 0.5 * (lo + hi)
    sc = math.sqrt(s2 * prm.c2)
    for _ in range(POLISH_MAX_ITER):
        x, y = _expit_pair(z)
        e = _eta_xy(prm, x, y)
        g = e - eta
        if g == 0.0:
            return z, x, y
        if g < 0.0:
            lo = z
        else:
            hi = z
        deriv = (x - s2) / e if e != 0.0 else sc
        if not (deriv > 0.0) or not math.isfinite(deriv):
            z_new = 0.5 * (lo + hi)
        else:
            z_new = z - g / deriv
            if abs(z_new - z) <= 4.0 * EPS * max(1.0, abs(z)):
                x, y = _expit_pair(z_new)
                return z_new, x, y
        if not (lo < z_new < hi):
            z_new = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * EPS * max(1.0, abs(z)):
            x, y = _expit_pair(z_new)
            return z_new, x, y
        z = z_new
    raise ConvergenceError(f"x_of_eta did not converge for eta={eta!r}")


def x_of_eta(p, q, eta) -> float:
    """Invert the eta relation; the result is 0 or 1 only when it underflows."""
    prm = as_params(p, q)
    if not math.isfinite(eta):
        raise DomainError("eta must be finite")
    return _x_of_eta_z(prm, eta)[1]


def tail_identity_args(p, q, eta):
    """(mu, u) of x (1-x)^mu = u for eta < 0, or (nu, v) of x^nu (1-x) = v for eta > 0."""
    prm = as_params(p, q)
    if eta < 0.0:
        return prm.c2 / prm.s2, math.exp(_log_tail_arg(prm, eta, prm.s2))
    return prm.s2 / prm.c2, math.exp(_log_tail_arg(prm, eta, prm.c2))


def eta0_erf(r, alpha) -> float:
    """Leading coefficient: erfc(-eta0 sqrt(r/2)) / 2 = alpha."""
    if not (r > 0.0):
        raise DomainError(f"r must be > 0, got {r!r}")
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return -math.sqrt(2.0 / r) * inv_erfc(2.0 * alpha)


def _f_ratio(x, eta0, s, c):
    return eta0 * s * c / (x - s * s)


def eta1_erf(x, eta0, s, c) -> float:
    """ln(f(eta0)) / eta0 with f(eta) = eta s c / (x - s^2); needs |eta0| > ETA_MIN."""
    if abs(eta0) < ETA_MIN:
        raise DomainError("eta0 too close to 0; use the limit evaluation")
    return math.log(_f_ratio(x, eta0, s, c)) / eta0


def eta2_erf(x, eta0, eta1, s, c) -> float:
    """Second coefficient, as a rational expression in x, eta0, eta1, s and c."""
    if abs(eta0) < ETA_MIN:
        raise DomainError("eta0 too close to 0; use the limit evaluation")
    s2, c2 = s * s, c * c
    s4, s6, s8 = s2 * s2, s2 * s2 * s2, s2 * s2 * s2 * s2
    e2, e3 = eta0 * eta0, eta0 * eta0 * eta0
    x2 = x * x
    dx = s2 - x
    body = (
        e2 * (s6 - x2 - s4 - s8 + 2.0 * x * s2 + 2.0 * x * s6 - 2.0 * x * s4 - x2 * s4 + x2 * s2)
        + 12.0 * s2 * c2 * e2 * (x2 - x)
        + 12.0 * s2 * c2 * eta1 * e3 * (x2 - x)
        + 6.0 * e2 * s2 * c2 * eta1 * eta1 * (2.0 * s2 * x - x2 - s4)
        # 12 s^6 c^2 - 24 s^4 c^2 x + 12 s^2 c^2 x^2
        + 12.0 * s2 * c2 * dx * dx
    )
    return body / (12.0 * e3 * c2 * s2 * dx * dx)


def _coefficients_at(prm: Parameters, eta0):
    s, c = prm.s, prm.c
    x = _x_of_eta_z(prm, eta0)[1]
    e1 = eta1_erf(x, eta0, s, c)
    return e1, eta2_erf(x, eta0, e1, s, c)


def expansion(p, q, alpha) -> EtaExpansion:
    """eta0, eta1, eta2 for the requested alpha.

    Near eta0 = 0 the coefficient formulas are 0/0; they are then evaluated at
    +-ETA_MIN and averaged.  For p = q the coefficients are odd in eta0, which
    is imposed exactly so that alpha = 1/2 maps to x = 1/2.
    """
    prm = as_params(p, q)
    e0 = eta0_erf(prm.r, alpha)
    if prm.p == prm.q:
        if abs(e0) >= ETA_MIN:
            a1, a2 = _coefficients_at(prm, abs(e0))
            sign = 1.0 if e0 > 0.0 else -1.0
            e1, e2 = sign * a1, sign * a2
        else:
            e1 = e2 = 0.0
    elif abs(e0) >= ETA_MIN:
        e1, e2 = _coefficients_at(prm, e0)
    else:
        a1, a2 = _coefficients_at(prm, ETA_MIN)
        b1, b2 = _coefficients_at(prm, -ETA_MIN)
        e1, e2 = 0.5 * (a1 + b1), 0.5 * (a2 + b2)
    return EtaExpansion(e0, e1, e2, prm.r)


def asymp_invert_erf_pair(p, q, alpha):
    """Estimate of (x, 1 - x) from the three-term eta expansion."""
    prm = as_params(p, q)
    _, x, y = _x_of_eta_z(prm, expansion(prm, None, alpha).eta)
    return x, y


def asymp_invert_erf(p, q, alpha) -> float:
    """Asymptotic estimate of the x with I_x(p,q) = alpha, best for large p + q."""
    return asymp_invert_erf_pair(p, q, alpha)[0]
