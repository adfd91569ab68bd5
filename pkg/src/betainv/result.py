"""Result and method types shared by the solvers and the dispatcher."""

from dataclasses import dataclass, field, replace
from enum import Enum


class MethodKind(str, Enum):
    CLOSED_FORM = "closed_form"
    TAIL_BOUND_ONLY = "tail_bound_only"
    TAIL_BOUND_SEEDED = "tail_bound_seeded"
    ASYMP_ERF_SEEDED = "asymp_erf_seeded"
    ASYMP_GAMMA_SEEDED = "asymp_gamma_seeded"
    ASYMP_ERF_ONLY = "asymp_erf_only"
    ASYMP_GAMMA_ONLY = "asymp_gamma_only"
    SNM_DIRECT = "snm_direct"
    SNM_EXP = "snm_exp"
    BISECTION = "bisection"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class InversionResult:
    """Outcome of solving I_x(p,q) = alpha.

    ``x`` and ``complement`` (= 1 - x) are both kept because near either end
    only one of them is representable to full relative accuracy.  ``residual``
    is |I_x - alpha| / alpha, measured on the side that was actually solved.
    ``iterations`` counts solver steps after the starting value was chosen.
    """

    x: float
    complement: float
    residual: float
    iterations: int
    method: MethodKind
    reflected: bool = False
    converged: bool = True
    seed: float | None = None
    underflow: bool = False
    iterates: tuple = field(default=(), repr=False)
    note: str = ""

    def reflect(self) -> "InversionResult":
        """Swap x and 1 - x, as after solving I_{1-x}(q,p) = 1 - alpha."""
        seed = None if self.seed is None else 1.0 - self.seed
        return replace(self, x=self.complement, complement=self.x,
                       reflected=not self.reflected, seed=seed)

    def with_method(self, method, **changes) -> "InversionResult":
        return replace(self, method=method, **changes)
