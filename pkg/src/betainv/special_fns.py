"""Real special functions used throughout the package.

Log-gamma and erfc are backed by the C library through :mod:`math`; the
remaining functions (scaled gamma, Beta, inverse erfc, incomplete gamma ratio
and its inverse) are implemented here.
"""

import math

from .errors import ConvergenceError, DomainError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
EPS = 2.220446049250313e-16

# Stirling series coefficients B_{2k} / (2k (2k-1)) for ln Gamma*(x).
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN = 10.0
_BETAF_SWITCH = 100.0


def _check_positive(name, x):
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"{name} must be finite and > 0, got {x!r}")


def log1pmx(u: float) -> float:
    """Return log(1 + u) - u, accurate also for small |u|."""
    if -0.5 < u < 1.0:
        # log1p(u) = 2 atanh(r), r = u/(2+u); leaves r (2 y S - u), S = sum y^k/(2k+3)
        r = u / (2.0 + u)
        y = r * r
        s = 0.0
        term = 1.0
        k = 0
        while True:
            delta = term / (2 * k + 3)
            s += delta
            if delta <= 1e-17 * s:
                break
            term *= y
            k += 1
        return r * (2.0 * y * s - u)
    return math.log1p(u) - u


def log_ratio_excess(a: float, a0: float) -> float:
    """Return ln(a/a0) - (a - a0)/a0 without losing accuracy near a = a0 or a << a0."""
    d = (a - a0) / a0
    if -0.5 < d < 1.0:
        return log1pmx(d)
    return math.log(a / a0) - d


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    _check_positive("x", x)
    return math.lgamma(x)


def log_gamma_star(x: float) -> float:
    """Natural log of the scaled gamma function Gamma*(x)."""
    _check_positive("x", x)
    if x >= _STIRLING_MIN:
        t = 1.0 / x
        t2 = t * t
        acc = 0.0
        for c in reversed(_STIRLING):
            acc = acc * t2 + c
        return acc * t
    return math.lgamma(x) - (LOG_SQRT_2PI - 0.5 * math.log(x) + x * math.log(x) - x)


def gamma_star(x: float) -> float:
    """Gamma(x) / (sqrt(2 pi / x) x^x e^-x); tends to 1 as x grows."""
    return math.exp(log_gamma_star(x))


def log_beta_fn(p: float, q: float) -> float:
    """ln B(p, q), symmetric in its arguments bit for bit."""
    _check_positive("p", p)
    _check_positive("q", q)
    a, b = (p, q) if p >= q else (q, p)
    r = a + b
    if r <= _BETAF_SWITCH:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(r)
    # scaled-gamma factorisation; a ln(a/r) + b ln(b/r) formed without cancellation
    core = -a * math.log1p(b / a) + b * math.log(b / r)
    return (
        LOG_SQRT_2PI
        + 0.5 * math.log(1.0 / a + 1.0 / b)
        + core
        + log_gamma_star(a)
        + log_gamma_star(b)
        - log_gamma_star(r)
    )


def beta_fn(p: float, q: float) -> float:
    """Beta function B(p, q)."""
    return math.exp(log_beta_fn(p, q))


def erfc(x: float) -> float:
    if math.isnan(x):
        raise DomainError("erfc of NaN")
    return math.erfc(x)


def _erfinv_guess(y: float) -> float:
    # Winitzki's closed-form approximation of erfinv(1 - y) for 0 < y <= 1
    a = 0.147
    ln1mt2 = math.log(y) + math.log(2.0 - y)
    b = 2.0 / (math.pi * a) + 0.5 * ln1mt2
    return math.sqrt(math.sqrt(b * b - ln1mt2 / a) - b)


def inv_erfc(y: float) -> float:
    """Inverse of the complementary error function on (0, 2).

    Winitzki start polished with Halley's method on erfc.
    """
    if not (0.0 < y < 2.0):
        raise DomainError(f"inv_erfc requires 0 < y < 2, got {y!r}")
    if y > 1.0:
        return -inv_erfc(2.0 - y)
    if y == 1.0:
        return 0.0
    x = _erfinv_guess(y)
    for _ in range(50):
        # u = f/f' with f = erfc(x) - y, f' = -2/sqrt(pi) e^{-x^2}; f''/f' = -2x
        u = -(math.erfc(x) - y) * math.exp(x * x) / TWO_OVER_SQRT_PI
        dx = -u / (1.0 + x * u)
        x += dx
        if abs(dx) <= 4.0 * EPS * abs(x):
            return x
    if abs(dx) <= 64.0 * EPS * abs(x):
        # cycling in the last bits
        return x
    raise ConvergenceError(f"inv_erfc did not converge for y={y!r}")


def _log_gamma_prefactor(a: float, x: float) -> float:
    """ln(x^a e^-x / Gamma(a)), with the large-a form free of cancellation."""
    if a >= _STIRLING_MIN:
        return a * log_ratio_excess(x, a) + 0.5 * math.log(a) - LOG_SQRT_2PI - log_gamma_star(a)
    return a * math.log(x) - x - math.lgamma(a)


def _gamma_series(a, x, log_pref):
    # P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
    term = 1.0
    total = 1.0
    n = 1
    while n < 10000:
        term *= x / (a + n)
        total += term
        if term <= EPS * 0.5 * total:
            return math.exp(log_pref) / a * total
        n += 1
    raise ConvergenceError(f"incomplete gamma series stalled at a={a!r}, x={x!r}")


def _gamma_cf(a, x, log_pref):
    # Legendre continued fraction for Q(a,x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= EPS:
            return math.exp(log_pref) * h
    raise ConvergenceError(f"incomplete gamma fraction stalled at a={a!r}, x={x!r}")


def _use_fraction(a, x):
    return x >= a + 1.0 or (a < 1.0 and x >= 1.0)


def gamma_pq(a: float, x: float) -> tuple:
    """Return (P(a,x), Q(a,x)); the smaller of the two carries full relative accuracy."""
    _check_positive("a", a)
    if not (x >= 0.0) or math.isnan(x):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    log_pref = _log_gamma_prefactor(a, x)
    if _use_fraction(a, x):
        q = _gamma_cf(a, x, log_pref)
        return 1.0 - q, q
    p = _gamma_series(a, x, log_pref)
    return p, 1.0 - p


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ratio Q(a, x) = Gamma(a, x) / Gamma(a)."""
    return gamma_pq(a, x)[1]


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ratio P(a, x) = 1 - Q(a, x)."""
    return gamma_pq(a, x)[0]


def _inv_gamma_start(a, alpha):
    """Rough starting value for Q(a, x) = alpha."""
    # Wilson-Hilferty cube-root normal approximation
    z = math.sqrt(2.0) * inv_erfc(2.0 * alpha)
    v = 1.0 / (9.0 * a)
    wh = 1.0 - v + z * math.sqrt(v)
    # lower-tail power law P ~ x^a / Gamma(a+1)
    beta = 1.0 - alpha
    if beta < 0.9:
        x_low = math.exp((math.lgamma(a + 1.0) + math.log(beta)) / a)
    else:
        x_low = math.inf
    if wh > 0.0:
        x = a * wh**3
        if x_low < x and a < 1.0:
            x = x_low
        return x
    if x_low < math.inf:
        return x_low
    return max(a, 1e-300)


def inv_gamma_q(a: float, alpha: float) -> float:
    """Solve Q(a, x) = alpha for x.

    Wilson-Hilferty start, then Halley iteration on Q (or on P when alpha is
    close to one) safeguarded by a bracketing interval.
    """
    _check_positive("a", a)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    upper = alpha <= 0.5
    target = alpha if upper else 1.0 - alpha
    x = _inv_gamma_start(a, alpha)
    lo, hi = 0.0, math.inf
    for _ in range(200):
        p, q = gamma_pq(a, x)
        # F decreasing in x in both branches
        f = q - target if upper else target - p
        if f == 0.0:
            return x
        if f > 0.0:
            lo = x
        else:
            hi = x
        deriv = -math.exp(_log_gamma_prefactor(a, x)) / x
        if deriv == 0.0:
            x_new = math.inf
        else:
            u = f / deriv
            x_new = x - u / (1.0 - 0.5 * u * ((a - 1.0) / x - 1.0))
            if abs(x_new - x) <= 4.0 * EPS * x:
                return x_new
        if not (lo < x_new < hi):
            if hi == math.inf:
                x_new = 2.0 * x + 1.0
            elif lo == 0.0:
                x_new = 0.5 * hi
            else:
                x_new = math.sqrt(lo * hi)
        if abs(x_new - x) <= 4.0 * EPS * x:
            return x_new
        if hi < math.inf and (hi - lo) <= 4.0 * EPS * hi:
            return 0.5 * (lo + hi)
        x = x_new
    raise ConvergenceError(f"inv_gamma_q did not converge for a={a!r}, alpha={alpha!r}")
