"""Forward evaluation of the incomplete beta function ratio I_x(p, q) and its density."""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from . import special_fns as sf
from .errors import ConvergenceError, DomainError

LENTZ_TINY = 1e-300
LENTZ_TOL = sf.EPS
LENTZ_MAX_TERMS = 500
LOG_DBL_MIN = math.log(2.2250738585072014e-308)


@dataclass(frozen=True)
class Parameters:
    """Shape parameters (p, q) with the derived quantities used by the inversion code.

    ``s2`` and ``c2`` are sin^2 and cos^2 of the angle with p = r sin^2, q = r cos^2.
    ``log_scale`` is ln of B(p,q) / (s2^p c2^q), the factor that remains once the
    dominant exponential has been separated from x^p (1-x)^q / B(p,q).
    """

    p: float
    q: float
    r: float = field(init=False)
    s2: float = field(init=False)
    c2: float = field(init=False)
    log_beta: float = field(init=False)
    log_scale: float = field(init=False)
    switch: float = field(init=False)

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (v > 0.0) or math.isinf(v):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        p, q = float(self.p), float(self.q)
        r = p + q
        a, b = (p, q) if p >= q else (q, p)
        log_scale = (
            sf.LOG_SQRT_2PI
            + 0.5 * math.log(1.0 / a + 1.0 / b)
            + sf.log_gamma_star(a)
            + sf.log_gamma_star(b)
            - sf.log_gamma_star(r)
        )
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s2", p / r)
        object.__setattr__(self, "c2", q / r)
        object.__setattr__(self, "log_beta", sf.log_beta_fn(p, q))
        object.__setattr__(self, "log_scale", log_scale)
        object.__setattr__(self, "switch", (p + 1.0) / (r + 2.0))

    @property
    def s(self) -> float:
        return math.sqrt(self.s2)

    @property
    def c(self) -> float:
        return math.sqrt(self.c2)

    @property
    def mean(self) -> float:
        return self.s2

    def swapped(self) -> "Parameters":
        return Parameters(self.q, self.p)


def as_params(p, q=None) -> Parameters:
    if isinstance(p, Parameters):
        return p
    return Parameters(p, q)


class CdfValue(NamedTuple):
    """I_x(p,q) together with its complement.

    Whichever of the two the fraction produced directly carries full relative
    accuracy; the other is obtained by subtraction from one.
    """

    value: float
    complement: float
    underflow: bool
    terms: int


def log_kernel(prm: Parameters, x: float, y: float) -> float:
    """ln( x^p y^q / B(p,q) ) for y = 1 - x, evaluated without large cancellations.

    Both x and y are passed so callers holding an accurate 1 - x (for example
    from the logit variable) do not lose it.
    """
    if x <= 0.0 or y <= 0.0:
        return -math.inf
    p, q = prm.p, prm.q
    # p ln(x/s2) + q ln(y/c2) = p L(x, s2) + q L(y, c2); the linear parts cancel exactly
    core = p * sf.log_ratio_excess(x, prm.s2) + q * sf.log_ratio_excess(y, prm.c2)
    return core - prm.log_scale


def _lentz(p: float, q: float, x: float):
    """Evaluate 1/(1+ d1/(1+ d2/(1+ ...))) by the modified Lentz algorithm.

    Returns (value, number of partial numerators used).
    """
    tiny = LENTZ_TINY
    f = 1.0
    c = 1.0
    d = 0.0
    pq = p + q
    m = 0
    n = 0
    while n < LENTZ_MAX_TERMS:
        # odd term d_{2m+1}
        a = -(p + m) * (pq + m) * x / ((p + 2 * m) * (p + 2 * m + 1))
        d = 1.0 + a * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        n += 1
        m += 1
        # even term d_{2m}
        a = m * (q - m) * x / ((p + 2 * m - 1) * (p + 2 * m))
        d = 1.0 + a * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta2 = c * d
        f *= delta2
        n += 1
        if abs(delta - 1.0) <= LENTZ_TOL and abs(delta2 - 1.0) <= LENTZ_TOL:
            return 1.0 / f, n
    raise ConvergenceError(f"continued fraction for I_x({p!r},{q!r}) at x={x!r} did not converge")


def _lower(prm: Parameters, p, q, x, y, log_k):
    # I_x(p,q) = x^p y^q / (p B) * CF
    log_pref = log_k - math.log(p)
    if log_pref < LOG_DBL_MIN:
        return 0.0, True, 0
    cf, n = _lentz(p, q, x)
    return math.exp(log_pref) * cf, False, n


def cdf_pair(prm: Parameters, x: float, y: float) -> CdfValue:
    """I_x(p,q) and 1 - I_x(p,q) given both x and y = 1 - x.

    The fraction is evaluated on whichever side converges fastest, switching
    to I_x(p,q) = 1 - I_y(q,p) above x = (p+1)/(p+q+2).
    """
    if x <= 0.0:
        return CdfValue(0.0, 1.0, False, 0)
    if y <= 0.0:
        return CdfValue(1.0, 0.0, False, 0)
    if x == 0.5 and prm.p == prm.q:
        return CdfValue(0.5, 0.5, False, 0)
    if prm.q == 1.0:
        # I_x(p,1) = x^p; ln x from whichever of x, y is small
        t = prm.p * (math.log(x) if x < 0.5 else math.log1p(-y))
        return CdfValue(math.exp(t), -math.expm1(t), t < LOG_DBL_MIN, 0)
    if prm.p == 1.0:
        # I_x(1,q) = 1 - y^q
        t = prm.q * (math.log1p(-x) if x < 0.5 else math.log(y))
        return CdfValue(-math.expm1(t), math.exp(t), False, 0)
    log_k = log_kernel(prm, x, y)
    if x <= prm.switch:
        v, uf, n = _lower(prm, prm.p, prm.q, x, y, log_k)
        return CdfValue(v, 1.0 - v, uf, n)
    w, uf, n = _lower(prm, prm.q, prm.p, y, x, log_k)
    return CdfValue(1.0 - w, w, uf, n)


def _check_x(x):
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")


def beta_cdf(p: float, q: float, x: float) -> float:
    """Regularized incomplete beta function I_x(p, q).

    >>> beta_cdf(2.0, 1.0, 0.5)
    0.25
    """
    prm = as_params(p, q)
    _check_x(x)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    return cdf_pair(prm, x, 1.0 - x).value


def beta_sf(p: float, q: float, x: float) -> float:
    """Complement 1 - I_x(p, q), accurate when it is small."""
    prm = as_params(p, q)
    _check_x(x)
    if x == 0.0:
        return 1.0
    if x == 1.0:
        return 0.0
    return cdf_pair(prm, x, 1.0 - x).complement


def log_beta_pdf(p: float, q: float, x: float) -> float:
    prm = as_params(p, q)
    _check_x(x)
    y = 1.0 - x
    if x == 0.0 or y == 0.0:
        a = prm.p if x == 0.0 else prm.q
        if a < 1.0:
            return math.inf
        if a > 1.0:
            return -math.inf
        # density at the endpoint is 1/B times the other factor, which is 1
        return -prm.log_beta
    if prm.r <= 100.0:
        return (prm.p - 1.0) * math.log(x) + (prm.q - 1.0) * math.log1p(-x) - prm.log_beta
    return log_kernel(prm, x, y) - math.log(x) - math.log(y)


def beta_pdf(p: float, q: float, x: float) -> float:
    """Beta density x^(p-1) (1-x)^(q-1) / B(p,q); +inf where it diverges at an endpoint."""
    return math.exp(log_beta_pdf(p, q, x))
