"""Long-run cost: exact finite-``L`` objective and its heavy-traffic limits.

The objective charges ``j1 * L`` per unit time while the dam is empty,
``j2 * L`` while the high-regime outflow runs, and ``c_i`` per unit time
for normal-regime operation at level ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .asymptotics import HeavyTrafficParams
from .errors import DomainError
from .model import DamModel
from .stationary import StationaryDistribution, stationary_distribution

# internal resolution for explicit cost profiles
L_INT = 100_000
_EXP_MAX = 700.0


@dataclass(frozen=True)
class CostProfile:
    """Water cost per level, non-increasing from the bottom level up.

    ``Linear`` interpolates from ``c_hi`` at level 1 to ``c_lo`` at level ``L``.
    ``Explicit`` holds a sequence that is resampled piecewise-constantly when
    instantiated at a different ``L``.
    """

    kind: str
    c_hi: float = 0.0
    c_lo: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "linear":
            if not self.c_hi >= self.c_lo >= 0:
                raise DomainError("linear costs need c_hi >= c_lo >= 0")
        elif self.kind == "explicit":
            v = np.asarray(self.values, dtype=float)
            if v.size == 0 or np.any(v < 0):
                raise DomainError("explicit costs must be a non-empty non-negative sequence")
            if np.any(np.diff(v) > 0):
                raise DomainError("explicit costs must be non-increasing in the level")
            object.__setattr__(self, "values", tuple(v.tolist()))
        else:
            raise DomainError(f"unknown cost profile kind {self.kind!r}")

    @classmethod
    def linear(cls, c_hi: float, c_lo: float) -> "CostProfile":
        return cls("linear", c_hi=float(c_hi), c_lo=float(c_lo))

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "CostProfile":
        return cls("explicit", values=tuple(values))

    @classmethod
    def uniform(cls, c: float) -> "CostProfile":
        return cls.linear(c, c)

    @property
    def upper(self) -> float:
        return self.c_hi if self.kind == "linear" else self.values[0]

    @property
    def lower(self) -> float:
        return self.c_lo if self.kind == "linear" else self.values[-1]

    def at(self, L: int) -> np.ndarray:
        """``c_1..c_L``."""
        if self.kind == "linear":
            if L == 1:
                return np.array([self.c_hi])
            i = np.arange(L, dtype=float)
            return self.c_hi - i / (L - 1) * (self.c_hi - self.c_lo)
        v = np.asarray(self.values)
        if v.size == L:
            return v.copy()
        return v[(np.arange(L) * v.size) // L]


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    damage_lower: float
    damage_upper: float
    water_cost: float


def exact_objective(model: DamModel, dist: Optional[StationaryDistribution] = None) -> ObjectiveValue:
    """``p1 j1 L + p2 j2 L + sum c_i q_i`` for the model's own cost profile."""
    if model.costs is None:
        raise DomainError("the model has no cost profile")
    if dist is None:
        dist = stationary_distribution(model)
    L = model.L
    lower = dist.p1 * model.j1 * L
    upper = dist.p2 * model.j2 * L
    water = float(model.costs.at(L) @ dist.q)
    return ObjectiveValue(value=lower + upper + water, damage_lower=lower, damage_upper=upper, water_cost=water)


def c_star(costs: CostProfile) -> float:
    """Average cost per level in the large-``L`` limit."""
    if costs.kind == "linear":
        return 0.5 * (costs.c_hi + costs.c_lo)
    return float(np.mean(costs.values))


def _h(x: float) -> float:
    """``1/x - 1/(e^x - 1)``, decreasing from 1/2 at 0 to 0 at infinity."""
    if x < 1e-3:
        return 0.5 - x / 12.0 + x**3 / 720.0
    return 1.0 / x - 1.0 / math.expm1(x)


def _weighted_top_average(c: np.ndarray, x: float, sign: int) -> float:
    # (1/L) sum_j c_{L-j} (1 + sign x/L)^j, normalised by the same sum without c
    L = c.size
    j = np.arange(L, dtype=float)
    logw = j * math.log1p(sign * x / L)
    w = np.exp(logw - logw.max())
    return float(c[::-1] @ w / w.sum())


def _explicit_limit(costs: CostProfile, x: float, sign: int) -> float:
    if x == 0.0:
        return c_star(costs)
    if sign < 0 and x >= L_INT:
        return costs.lower
    v1 = _weighted_top_average(costs.at(L_INT), x, sign)
    v2 = _weighted_top_average(costs.at(2 * L_INT), x, sign)
    return 2.0 * v2 - v1


def psi(costs: CostProfile, x: float) -> float:
    """Limiting water cost when the outflow is slightly too slow (Upper regime)."""
    if x < 0:
        raise DomainError("x must be non-negative")
    if costs.kind == "linear":
        return costs.c_lo + (costs.c_hi - costs.c_lo) * _h(x)
    return _explicit_limit(costs, x, -1)


def eta(costs: CostProfile, x: float) -> float:
    """Limiting water cost when the outflow is slightly too fast (Lower regime)."""
    if x < 0:
        raise DomainError("x must be non-negative")
    if costs.kind == "linear":
        return costs.c_lo + (costs.c_hi - costs.c_lo) * (1.0 - _h(x))
    return _explicit_limit(costs, x, +1)


def _j2_eff(params: HeavyTrafficParams, j2: float) -> float:
    return j2 * params.rho2 / (1.0 - params.rho2)


def j_critical(params: HeavyTrafficParams, costs: CostProfile, j1: float, j2: float) -> float:
    """Limit objective at ``rho1 = 1``."""
    return (j1 + _j2_eff(params, j2)) * params.D / (2.0 * params.es) + c_star(costs)


def j_upper(params: HeavyTrafficParams, costs: CostProfile, j1: float, j2: float, C: Optional[float] = None) -> float:
    """Limit objective for ``rho1 = 1 + C/L``; continuous at ``C = 0``."""
    if C is not None:
        params = params.with_C(C)
    if params.C == 0.0:
        return j_critical(params, costs, j1, j2)
    x = params.x
    # C/(e^x-1) = (D/2Es) x/expm1(x) and C e^x/(e^x-1) = (D/2Es) x/(1-e^-x)
    scale = params.D / (2.0 * params.es)
    damage = scale * (j1 * x / math.expm1(x) + _j2_eff(params, j2) * x / -math.expm1(-x))
    return damage + psi(costs, x)


def j_lower(params: HeavyTrafficParams, costs: CostProfile, j1: float, j2: float, C: Optional[float] = None) -> float:
    """Limit objective for ``rho1 = 1 - C/L`` (``C > 0``); infinite where ``e^(1/x)`` overflows."""
    if C is not None:
        params = params.with_C(C)
    if not params.C > 0:
        raise DomainError("the lower-regime objective is defined only for C > 0")
    x = params.x
    if 1.0 / x > _EXP_MAX:
        return math.inf
    e = math.exp(1.0 / x)
    return params.C * (j1 * e + _j2_eff(params, j2) * (e - 1.0)) + eta(costs, x)
