"""Fixed-point bounds for the quantile in the lower and upper tails.

Starting from x = 0, the orbits of

    g_l(x) = (alpha B (p - (p+q) x) (1-x)^-q)^(1/p)
    g_u(x) = (alpha p B / ((1 + (p+q) x/(p+1) + (p+q)(p+q+1) x^2/((p+1)(p+2))) (1-x)^q))^(1/p)

bracket the solution of I_x(p,q) = alpha, and become very sharp as alpha -> 0.
The upper tail is handled through I_x(p,q) = 1 - I_{1-x}(q,p).

Passing ``dps`` evaluates the same orbits with :mod:`mpmath` at that many
decimal digits, which is how bounds with relative errors far below double
precision can be inspected.
"""

import math
from dataclasses import dataclass

from .errors import DomainError
from .special_fns import log_beta_fn

NOT_A_TAIL_ALPHA = 0.05
_LOG_TINY = math.log(5e-324)


@dataclass(frozen=True)
class TailInterval:
    """Bounds x_l <= x <= x_u on the quantile, with 1 - x bounds kept separately.

    ``truncated`` is set when the lower orbit left the domain of g_l before
    ``n_iter`` steps; ``applicable`` is False when alpha is not in a tail.
    """

    lower: float
    upper: float
    complement_lower: float
    complement_upper: float
    iterations_used: int
    tail: str
    truncated: bool = False
    applicable: bool = True
    underflow: bool = False

    @property
    def width(self):
        return self.upper - self.lower


class _FloatOps:
    log = staticmethod(math.log)
    exp = staticmethod(math.exp)
    log1p = staticmethod(math.log1p)
    zero = 0.0
    one = 1.0

    @staticmethod
    def num(v):
        return float(v)

    @staticmethod
    def log_beta(p, q):
        return log_beta_fn(p, q)


class _MpOps:
    def __init__(self, mp):
        self.mp = mp
        self.log = mp.log
        self.exp = mp.exp
        self.log1p = mp.log1p
        self.zero = mp.mpf(0)
        self.one = mp.mpf(1)

    def num(self, v):
        return self.mp.mpf(v)

    def log_beta(self, p, q):
        return self.mp.log(self.mp.beta(p, q))


def _check(p, q, alpha):
    if not (p > 0 and q > 0):
        raise DomainError(f"p and q must be positive, got {p!r}, {q!r}")
    if not (0 < alpha < 1):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def _log_g_lower(ops, p, q, log_ab, x):
    arg = p - (p + q) * x
    if not arg > 0:
        raise DomainError("g_lower requires p - (p+q) x > 0")
    return (log_ab + ops.log(arg) - q * ops.log1p(-x)) / p


def _log_g_upper(ops, p, q, log_ab, x):
    r = p + q
    poly = 1 + r * x / (p + 1) + r * (r + 1) * x * x / ((p + 1) * (p + 2))
    return (log_ab + ops.log(p) - ops.log(poly) - q * ops.log1p(-x)) / p


def _exp_or_zero(ops, v):
    if ops is _FloatOps and v < _LOG_TINY:
        return ops.zero, True
    return ops.exp(v), False


def g_lower(p, q, alpha, x):
    """One application of the lower-bound map g_l."""
    _check(p, q, alpha)
    if not (0.0 <= x < 1.0):
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    log_ab = math.log(alpha) + log_beta_fn(p, q)
    return _exp_or_zero(_FloatOps, _log_g_lower(_FloatOps, p, q, log_ab, x))[0]


def g_upper(p, q, alpha, x):
    """One application of the upper-bound map g_u."""
    _check(p, q, alpha)
    if not (0.0 <= x < 1.0):
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    log_ab = math.log(alpha) + log_beta_fn(p, q)
    return _exp_or_zero(_FloatOps, _log_g_upper(_FloatOps, p, q, log_ab, x))[0]


def _ops_for(dps):
    if dps is None:
        return _FloatOps, None
    import mpmath

    ctx = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
    ctx.dps = dps
    return _MpOps(ctx), ctx


def lower_tail_interval(p, q, alpha, n_iter=3, dps=None) -> TailInterval:
    """Iterate both maps ``n_iter`` times from 0.

    With ``dps`` set, the returned bounds are mpmath numbers at that precision,
    and ``alpha`` may be a decimal string so that it is not rounded to double.
    """
    _check(float(p), float(q), float(alpha))
    if n_iter < 1:
        raise DomainError("n_iter must be >= 1")
    ops, _ = _ops_for(dps)
    p_, q_, a_ = ops.num(p), ops.num(q), ops.num(alpha)
    log_ab = ops.log(a_) + ops.log_beta(p_, q_)
    mean = p_ / (p_ + q_)

    xl = xu = ops.zero
    underflow = False
    truncated = False
    used = 0
    for k in range(n_iter):
        lu = _log_g_upper(ops, p_, q_, log_ab, xu)
        try:
            ll = _log_g_lower(ops, p_, q_, log_ab, xl)
        except DomainError:
            truncated = True
            break
        new_l, uf_l = _exp_or_zero(ops, ll)
        new_u, uf_u = _exp_or_zero(ops, lu)
        underflow = underflow or uf_l or uf_u
        if k == 0 and float(alpha) > NOT_A_TAIL_ALPHA and new_l > mean:
            return TailInterval(ops.zero, ops.one, ops.one, ops.zero, 0, "lower",
                                applicable=False)
        if not (new_l < 1 and new_u < 1):
            truncated = True
            break
        xl, xu = new_l, new_u
        used += 1
    if used == 0:
        return TailInterval(ops.zero, ops.one, ops.one, ops.zero, 0, "lower",
                            truncated=True, applicable=True)
    return TailInterval(xl, xu, 1 - xu, 1 - xl, used, "lower", truncated, True, underflow)


def upper_tail_interval(p, q, alpha, n_iter=3, dps=None) -> TailInterval:
    """Bounds for alpha near one, from the lower-tail bounds of 1 - x with p and q swapped."""
    _check(float(p), float(q), float(alpha))
    if dps is None:
        comp = 1.0 - alpha
    else:
        ops, _ = _ops_for(dps)
        comp = 1 - ops.num(alpha)
    iv = lower_tail_interval(q, p, comp, n_iter=n_iter, dps=dps)
    return TailInterval(
        lower=1 - iv.upper,
        upper=1 - iv.lower,
        complement_lower=iv.lower,
        complement_upper=iv.upper,
        iterations_used=iv.iterations_used,
        tail="upper",
        truncated=iv.truncated,
        applicable=iv.applicable,
        underflow=iv.underflow,
    )
