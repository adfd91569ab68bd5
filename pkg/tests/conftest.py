import mpmath
import pytest


def mp_cdf(p, q, x, dps=40):
    """I_x(p,q) from mpmath's regularized incomplete beta."""
    with mpmath.workdps(dps):
        return mpmath.betainc(p, q, 0, x, regularized=True)


def mp_quantile(p, q, alpha, dps=60, steps=400):
    """Bisection on ln x with extended precision; slow but independent of the package."""
    with mpmath.workdps(dps):
        p, q, a = mpmath.mpf(p), mpmath.mpf(q), mpmath.mpf(alpha)
        lo, hi = mpmath.mpf(-2000), mpmath.mpf(0)
        for _ in range(steps):
            mid = (lo + hi) / 2
            if mpmath.betainc(p, q, 0, mpmath.exp(mid), regularized=True) < a:
                lo = mid
            else:
                hi = mid
        return mpmath.exp((lo + hi) / 2)


def rel_residual(p, q, alpha, x):
    """|I_x - alpha| / alpha with the cdf taken from mpmath."""
    return float(abs(mp_cdf(p, q, x) - alpha) / alpha)


@pytest.fixture
def oracle():
    return {"cdf": mp_cdf, "quantile": mp_quantile, "residual": rel_residual}
