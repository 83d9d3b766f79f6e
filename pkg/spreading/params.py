"""
Kinetic parameters and closed-form speed quantities.

Holds the six rates of the competition-diffusion system

    u_t = d1 Δu + r1 u (1 - u - a1 v)
    v_t = d2 Δv + r2 v (1 - v - a2 u)

together with the closed-form speeds and the published sufficient
conditions for linear or nonlinear determinacy of the minimal wave speed.
Every function here is pure and safe to call from any thread.
"""

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Tuple

from .errors import ClassificationConflictError, DegenerateDenominatorError, ParameterError

HUANG_HAN_NOTE = (
    "When d1*r2 == d2*r1 and a1 lies in [1 - eps, 1) for some small eps > 0, "
    "the minimal wave speed is strictly larger than the linear speed "
    "(not linearly determined). The admissible eps is not quantified, so "
    "this regime is documented only and has no predicate."
)

FIELDS = ("d1", "d2", "r1", "r2", "a1", "a2")


class Determinacy(str, Enum):
    NONLINEAR = "nonlinear"
    LINEAR = "linear"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class KineticParams:
    """
    Diffusion, growth and competition rates of the two species.

    Attributes:
        d1 (float): diffusivity of the invader u
        d2 (float): diffusivity of the resident v
        r1 (float): growth rate of u
        r2 (float): growth rate of v
        a1 (float): competition pressure of v on u, in (0, 1)
        a2 (float): competition pressure of u on v, above 1
    """
    d1: float
    d2: float
    r1: float
    r2: float
    a1: float
    a2: float

    def __post_init__(self):
        for name in FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, float(value))
        if not (self.a1 < 1.0 < self.a2):
            raise ParameterError(
                f"monostable condition 0 < a1 < 1 < a2 violated (a1={self.a1}, a2={self.a2})"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "KineticParams":
        missing = [name for name in FIELDS if name not in data]
        if missing:
            raise ParameterError(f"missing parameters: {', '.join(missing)}")
        extra = sorted(set(data) - set(FIELDS))
        if extra:
            raise ParameterError(f"unknown parameters: {', '.join(extra)}")
        return cls(**{name: data[name] for name in FIELDS})

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def linear_speed(p: KineticParams) -> float:
    """Speed obtained by linearizing at the invaded state: 2 sqrt(d1 r1 (1 - a1))."""
    return 2.0 * math.sqrt(p.d1 * p.r1 * (1.0 - p.a1))


def kpp_speed(p: KineticParams) -> float:
    """Speed of u alone, 2 sqrt(d1 r1): the upper Kan-on bound."""
    return 2.0 * math.sqrt(p.d1 * p.r1)


def kanon_bounds(p: KineticParams) -> Tuple[float, float]:
    """
    Bounds on the minimal wave speed.

    Returns:
        tuple: (2 sqrt(d1 r1 (1-a1)), 2 sqrt(d1 r1)), lower strictly below upper
    """
    return linear_speed(p), kpp_speed(p)


def exterior_upper_bound(p: KineticParams) -> float:
    """Upper bound of all spreading speeds on exterior domains: 2 sqrt(r1) max(sqrt(d1), sqrt(d2/2))."""
    return 2.0 * math.sqrt(p.r1) * max(math.sqrt(p.d1), math.sqrt(p.d2 / 2.0))


def llw_linear_determinacy(p: KineticParams) -> bool:
    """
    Sufficient condition for the minimal wave speed to equal the linear speed.

    Requires 0 < d2 <= 2 d1, and then either a1 a2 <= 1 or
    r2 <= r1 (2 - d2/d1)(1 - a1) / (a1 a2 - 1).

    Args:
        p (KineticParams): kinetic parameters

    Returns:
        bool: True when the condition holds
    """
    if p.d2 > 2.0 * p.d1:
        return False
    product = p.a1 * p.a2
    if product <= 1.0:
        return True
    threshold = p.r1 * (2.0 - p.d2 / p.d1) * (1.0 - p.a1) / (product - 1.0)
    return p.r2 <= threshold


def huang_condition(p: KineticParams) -> bool:
    """
    Huang's sufficient condition for linear determinacy.

    Args:
        p (KineticParams): kinetic parameters, with d1 != d2

    Returns:
        bool: True iff (r1 (2 - d2/d1)(1 - a1) + r2) / (r2 a2) >= max(a1, (d2 - 2 d1) / (2 |d2 - d1|))

    Raises:
        DegenerateDenominatorError: when d1 == d2
    """
    gap = abs(p.d2 - p.d1)
    if gap == 0.0:
        raise DegenerateDenominatorError("huang_condition needs d1 != d2 (|d2 - d1| is a denominator)")
    lhs = (p.r1 * (2.0 - p.d2 / p.d1) * (1.0 - p.a1) + p.r2) / (p.r2 * p.a2)
    rhs = max(p.a1, (p.d2 - 2.0 * p.d1) / (2.0 * gap))
    return lhs >= rhs


def _alhasanat_ou_nonlinear(p: KineticParams) -> bool:
    lhs = (p.r1 * (p.d2 / p.d1 + 2.0) * (1.0 - p.a1) + p.r2) / (p.r2 * p.a2)
    return lhs < 1.0 - 2.0 * (1.0 - p.a1)


def _alhasanat_ou_linear(p: KineticParams) -> bool:
    if not p.a1 < 1.0 / 3.0:
        return False
    ratio = p.d2 / p.d1
    pivot = p.d2 * p.r1 * (1.0 - p.a1) / (2.0 * p.d1 * p.a2)
    first = p.r1 * (ratio - 4.0) * (1.0 - p.a1) / 4.0 < p.r2 < pivot
    second = pivot <= p.r2 < p.r1 * (ratio + 4.0) * (1.0 - p.a1) / (4.0 * (p.a2 - 1.0))
    return first or second


def alhasanat_ou_conditions(p: KineticParams) -> Determinacy:
    """
    Three-way classification from the Alhasanat-Ou sufficient conditions.

    Args:
        p (KineticParams): kinetic parameters

    Returns:
        Determinacy: NONLINEAR, LINEAR, or INCONCLUSIVE when neither test fires

    Raises:
        ClassificationConflictError: if both tests fire on the same input
    """
    nonlinear = _alhasanat_ou_nonlinear(p)
    linear = _alhasanat_ou_linear(p)
    if nonlinear and linear:
        raise ClassificationConflictError(f"both determinacy tests fired for {p}")
    if nonlinear:
        return Determinacy.NONLINEAR
    if linear:
        return Determinacy.LINEAR
    return Determinacy.INCONCLUSIVE
