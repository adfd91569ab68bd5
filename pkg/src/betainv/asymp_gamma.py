"""Large-p inversion of I_x(p,q) through the incomplete gamma function.

With mu = q/p, the variable eta defined by

    eta - mu ln(eta) + (1+mu) ln(1+mu) - mu = -ln(x) - mu ln(1-x)

makes I_x(p,q) approximately Q(q, p eta) when p is large and q moderate.
eta runs from +inf at x = 0 through mu at x = 1/(1+mu) down to 0 at x = 1.
"""

import math

from .asymp_erf import _x_of_eta_z
from .beta_cdf import Parameters, as_params
from .errors import DomainError
from .special_fns import inv_gamma_q, log1pmx

EPS_C = 1e-4


def eta_relation_rhs(p, q, x) -> float:
    """-ln(x) - mu ln(1-x)."""
    prm = as_params(p, q)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    mu = prm.q / prm.p
    return -math.log(x) - mu * math.log1p(-x)


def eta_relation_lhs(mu, eta) -> float:
    """eta - mu ln(eta) + (1+mu) ln(1+mu) - mu."""
    if not (eta > 0.0 and mu > 0.0):
        raise DomainError("eta and mu must be positive")
    return eta - mu * math.log(eta) + (1.0 + mu) * math.log1p(mu) - mu


def eta0_gamma(p, q, alpha) -> float:
    """Solution of Q(q, p eta0) = alpha."""
    prm = as_params(p, q)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return inv_gamma_q(prm.q, alpha) / prm.p


def _erf_eta(prm: Parameters, eta):
    # Both relations fix s^2 ln(x/s^2) + c^2 ln((1-x)/c^2); here it equals
    # s^2 (mu - eta + mu ln(eta/mu)) = c^2 log1pmx(eta/mu - 1).
    mu = prm.q / prm.p
    g = prm.c2 * log1pmx(eta / mu - 1.0)
    e = math.sqrt(max(-2.0 * g, 0.0))
    # x above 1/(1+mu) exactly when eta is below mu
    return e if eta < mu else -e


def _x_pair(prm: Parameters, eta):
    if not (eta > 0.0) or not math.isfinite(eta):
        raise DomainError(f"eta must be finite and > 0, got {eta!r}")
    _, x, y = _x_of_eta_z(prm, _erf_eta(prm, eta))
    return x, y


def x_of_eta_gamma(p, q, eta) -> float:
    """x in (0, 1) corresponding to eta > 0."""
    return _x_pair(as_params(p, q), eta)[0]


def eta1_gamma(x0, eta0, mu) -> float:
    """ln(phi(eta0)) / (1 - mu/eta0), phi(eta) = (eta - mu) / (1 - x (1+mu)) / sqrt(1+mu)."""
    if abs(eta0 - mu) < EPS_C * mu:
        raise DomainError("eta0 too close to mu; use the limit evaluation")
    phi = (eta0 - mu) / (1.0 - x0 * (1.0 + mu)) / math.sqrt(1.0 + mu)
    return math.log(phi) / (1.0 - mu / eta0)


def _eta1_at(prm: Parameters, eta0):
    mu = prm.q / prm.p
    x0, y0 = _x_pair(prm, eta0)
    # 1 - x (1+mu) = (1+mu)(s^2 - x), formed from whichever of x, 1-x is small
    d = (prm.s2 - x0) if x0 < 0.5 else (y0 - prm.c2)
    phi = (eta0 - mu) / ((1.0 + mu) * d) / math.sqrt(1.0 + mu)
    return math.log(phi) / (1.0 - mu / eta0)


def eta1_for(p, q, eta0) -> float:
    """eta1 from eta0, with the eta0 = mu singularity removed by symmetric averaging."""
    prm = as_params(p, q)
    mu = prm.q / prm.p
    # relative to mu: an absolute window swallows eta0 when q << p
    eps = EPS_C * mu
    if abs(eta0 - mu) >= eps:
        return _eta1_at(prm, eta0)
    return 0.5 * (_eta1_at(prm, mu + eps) + _eta1_at(prm, mu - eps))


def asymp_invert_gamma_pair(p, q, alpha):
    """(x, 1 - x) from eta ~ eta0 + eta1 / p."""
    prm = as_params(p, q)
    e0 = eta0_gamma(prm, None, alpha)
    e1 = eta1_for(prm, None, e0)
    eta = e0 + e1 / prm.p
    if not eta > 0.0:
        # the correction overshot the x = 1 end; keep the leading term
        eta = e0
    return _x_pair(prm, eta)


def asymp_invert_gamma(p, q, alpha) -> float:
    """Asymptotic estimate of the x with I_x(p,q) = alpha, best for large p and moderate q."""
    return asymp_invert_gamma_pair(p, q, alpha)[0]
