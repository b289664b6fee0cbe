"""Roots of ``z = F(z)`` and the heavy-traffic limit formulas.

Here ``F(z) = lst(B1, lam - lam * R(z))`` is the generating function of the
arrivals-per-service sequence.  In heavy traffic ``rho1 = 1 +/- delta`` with
``delta * L -> C``; every limit is written in terms of
``D = rho12 * Es**3 + Es2 - Es`` and ``x = 2 * C * Es / D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import DomainError, NoBracketError
from .model import DamModel

ROOT_TOL = 1e-12
TAU_STEP = 0.05
_EXP_MAX = 700.0


class Regime(str, Enum):
    CRITICAL = "critical"
    UPPER = "upper"
    LOWER = "lower"


class Side(str, Enum):
    BELOW_ONE = "below"  # phi, exists when rho1 > 1
    ABOVE_ONE = "above"  # tau, sought when rho1 < 1


@dataclass(frozen=True)
class HeavyTrafficParams:
    """Moments entering the limits, plus the control parameter ``C``.

    ``L_ref`` is only used by :func:`limit_q` in the Upper/Lower regimes to
    turn ``C`` into ``delta = C / L_ref``.
    """

    es: float
    es2: float
    rho12: float
    rho2: float
    C: float = 0.0
    regime: Regime = Regime.CRITICAL
    L_ref: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.es < 1 or self.es2 < self.es**2 * (1 - 1e-12):
            raise DomainError("batch moments must satisfy Es >= 1 and Es2 >= Es**2")
        if not self.rho12 > 0:
            raise DomainError("rho12 must be positive")
        if not 0 < self.rho2 < 1:
            raise DomainError(f"the high-regime load must obey 0 < rho2 < 1 (got {self.rho2})")
        if self.C < 0:
            raise DomainError("C must be non-negative")

    @classmethod
    def from_model(cls, model: DamModel, C: float = 0.0, regime=Regime.CRITICAL, L_ref=None):
        """Moments of ``model``; ``rho12`` is taken at the model's current load."""
        return cls(
            es=model.batch.m1,
            es2=model.batch.m2,
            rho12=model.rho12,
            rho2=model.rho2,
            C=C,
            regime=regime,
            L_ref=L_ref,
        )

    @property
    def D(self) -> float:
        return self.rho12 * self.es**3 + self.es2 - self.es

    @property
    def x(self) -> float:
        return 2.0 * self.C * self.es / self.D

    def with_C(self, C: float, regime=None) -> "HeavyTrafficParams":
        return replace(self, C=C, regime=self.regime if regime is None else regime)


@dataclass(frozen=True)
class RootSolution:
    value: float
    residual: float
    side: Side


@dataclass(frozen=True)
class LimitP:
    """Scaled limits of ``p1`` and ``p2``.

    ``scale`` is ``"L"`` (Critical: values are limits of ``L * p``) or
    ``"delta"`` (Upper/Lower: values are limits of ``p / delta``).
    """

    p1: float
    p2: float
    scale: str


def _g(model: DamModel, z: float) -> float:
    lam = model.lam
    return model.service1.lst(lam - lam * model.batch.pgf(z)) - z


def _dg(model: DamModel, z: float) -> float:
    lam = model.lam
    s = lam - lam * model.batch.pgf(z)
    return -model.service1.lst_derivative(s) * lam * model.batch.pgf_derivative(z) - 1.0


def _evaluable(model: DamModel, z: float) -> bool:
    if z >= model.batch.pgf_radius():
        return False
    try:
        s = model.lam - model.lam * model.batch.pgf(z)
    except DomainError:
        return False
    return s > model.service1.lst_domain()


def _refine(model: DamModel, a: float, b: float) -> float:
    """Bisection safeguarded Newton on a bracket with ``g(a) * g(b) < 0``."""
    ga = _g(model, a)
    z = 0.5 * (a + b)
    for _ in range(200):
        gz = _g(model, z)
        if gz == 0.0:
            return z
        if (gz > 0) == (ga > 0):
            a, ga = z, gz
        else:
            b = z
        dg = _dg(model, z)
        step = z - gz / dg if dg != 0.0 else math.nan
        z_new = step if a < step < b else 0.5 * (a + b)
        if abs(z_new - z) <= 1e-15 * max(1.0, abs(z)) and abs(_g(model, z_new)) < ROOT_TOL:
            return z_new
        z = z_new
        if b - a < 1e-16:
            break
    return z


def find_root(model: DamModel, side) -> RootSolution:
    """Non-trivial real root of ``z = F(z)`` below or above one.

    Raises
    ------
    DomainError
        if the load is on the wrong side of one for the requested root.
    NoBracketError
        if no sign change is found before the transform stops being finite.
    """
    side = Side(side)
    rho1 = model.rho1
    if side is Side.BELOW_ONE:
        if not rho1 > 1:
            raise DomainError("the root below one exists only for rho1 > 1")
        h = 0.5
        while _g(model, 1.0 - h) >= 0.0:
            h *= 0.5
            if h < 1e-15:
                raise NoBracketError("no sign change found below z = 1")
        z = _refine(model, 0.0, 1.0 - h)
    else:
        if not rho1 < 1:
            raise DomainError("the root above one is sought only for rho1 < 1")
        h = TAU_STEP
        while not (_evaluable(model, 1.0 + h) and _g(model, 1.0 + h) < 0.0):
            h *= 0.5
            if h < 1e-15:
                raise NoBracketError("g does not turn negative just above z = 1")
        lo, step = 1.0 + h, TAU_STEP
        while True:
            hi = lo + step
            if not _evaluable(model, hi):
                # creep up to the boundary before giving up
                step *= 0.5
                if step < 1e-12:
                    raise NoBracketError(
                        f"no sign change before the analyticity boundary (searched up to z={lo:.6g})"
                    )
                continue
            if _g(model, hi) > 0.0:
                break
            lo = hi
        z = _refine(model, lo, hi)
    return RootSolution(value=z, residual=abs(_g(model, z)), side=side)


def root_expansion(params: HeavyTrafficParams, delta: float, side) -> float:
    """First-order expansion ``1 -/+ 2 delta Es / D`` of the root."""
    shift = 2.0 * delta * params.es / params.D
    return 1.0 - shift if Side(side) is Side.BELOW_ONE else 1.0 + shift


def _safe_exp(v: float) -> float:
    return math.exp(v) if v < _EXP_MAX else math.inf


def _need_positive_C(params: HeavyTrafficParams):
    if not params.C > 0:
        raise DomainError(f"the {params.regime.value} regime needs C > 0")


def limit_p(params: HeavyTrafficParams) -> LimitP:
    """Limits of the idle and high-regime probabilities."""
    r = params.rho2 / (1.0 - params.rho2)
    if params.regime is Regime.CRITICAL:
        base = params.D / (2.0 * params.es)
        return LimitP(p1=base, p2=r * base, scale="L")
    _need_positive_C(params)
    x = params.x
    if params.regime is Regime.UPPER:
        # 1/(e^x - 1) and e^x/(e^x - 1) written without overflow
        inv = -1.0 / math.expm1(-x)
        return LimitP(p1=math.exp(-x) * inv, p2=r * inv, scale="delta")
    e = _safe_exp(1.0 / x)
    return LimitP(p1=e, p2=r * (e - 1.0), scale="delta")


def lower_diffusion_limit_p(params: HeavyTrafficParams) -> LimitP:
    """Lower-regime limits of ``p / delta`` from the reflected-diffusion picture.

    Mirror image of the Upper formulas: ``p1 / delta -> 1 / (1 - e^-x)`` and
    ``p2 / delta -> rho2 / ((1 - rho2)(e^x - 1))``.  Exact finite-``L``
    probabilities converge to these values; :func:`limit_p` keeps the
    ``e^(1/x)`` reference forms.
    """
    _need_positive_C(params)
    x = params.x
    r = params.rho2 / (1.0 - params.rho2)
    return LimitP(p1=-1.0 / math.expm1(-x), p2=r * math.exp(-x) / -math.expm1(-x), scale="delta")


def limit_q_terms(params: HeavyTrafficParams):
    """``(prefactor, ratio)`` with ``q_{L-j} / delta -> prefactor * ratio**j``."""
    if params.regime is Regime.CRITICAL:
        return 1.0, 1.0
    _need_positive_C(params)
    if not params.L_ref:
        raise DomainError("Upper/Lower q limits need a reference L (L_ref)")
    x = params.x
    k = 2.0 * params.es / params.D
    delta = params.C / params.L_ref
    if params.regime is Regime.UPPER:
        return k / -math.expm1(-x), 1.0 - k * delta
    return k * math.exp(-x) / -math.expm1(-x), 1.0 + k * delta


def limit_q(params: HeavyTrafficParams, j: int) -> float:
    """Limit of ``L * q_{L-j}`` (Critical) or ``q_{L-j} / delta`` (Upper/Lower)."""
    if j < 0:
        raise DomainError("j must be non-negative")
    pre, ratio = limit_q_terms(params)
    return pre * ratio**j
