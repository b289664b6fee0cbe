"""Choice of the normal-regime load ``rho1 = 1 +/- C/L`` minimising the limit objective."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np

from .asymptotics import HeavyTrafficParams, Regime
from .errors import ConsistencyWarning, DomainError
from .objective import CostProfile, j_critical, j_lower, j_upper

C_MAX = 50.0
EPS_LOWER = 1e-4
TOL_DECIDE = 1e-9
TOL_C = 1e-7
_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MinimizeResult:
    argmin: float
    value: float


def minimize_scalar(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6,
                    grid: Optional[np.ndarray] = None) -> MinimizeResult:
    """Golden-section search on ``[lo, hi]`` followed by one parabolic step.

    If ``grid`` is given, the search is first narrowed to the two grid cells
    around the best grid point, which guards against far-off local minima.
    A minimum at an end point is returned as that end point.
    """
    if not tol > 0 or not hi >= lo:
        raise DomainError("minimize_scalar needs tol > 0 and hi >= lo")
    if grid is not None:
        pts = np.unique(np.clip(np.concatenate([[lo, hi], np.asarray(grid, float)]), lo, hi))
        vals = np.array([f(float(p)) for p in pts])
        k = int(np.argmin(vals))
        lo, hi = float(pts[max(k - 1, 0)]), float(pts[min(k + 1, pts.size - 1)])
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc <= fd else (d, fd)
    # parabolic polish through a, x, b; kept only if it improves
    fa, fb = f(a), f(b)
    den = (x - a) * (fx - fb) - (x - b) * (fx - fa)
    if den != 0.0:
        u = x - 0.5 * ((x - a) ** 2 * (fx - fb) - (x - b) ** 2 * (fx - fa)) / den
        if a <= u <= b:
            fu = f(u)
            if fu < fx:
                x, fx = u, fu
    for end, fe in ((lo, f(lo)), (hi, f(hi))):
        if fe <= fx:
            x, fx = end, fe
    return MinimizeResult(argmin=float(x), value=float(fx))


@dataclass(frozen=True)
class ControlSolution:
    """Optimal regime, ``C`` and limit objective.

    ``upper`` and ``lower`` keep the interior searches for inspection.
    """

    regime: Regime
    C_opt: float
    objective: float
    j_crit: float
    upper: MinimizeResult
    lower: MinimizeResult

    def rho1(self, L: int) -> float:
        """Prescribed normal-regime load at threshold ``L``."""
        if self.regime is Regime.UPPER:
            return 1.0 + self.C_opt / L
        if self.regime is Regime.LOWER:
            return 1.0 - self.C_opt / L
        return 1.0

    @property
    def prescription(self) -> str:
        if self.regime is Regime.UPPER:
            return f"rho1 = 1 + {self.C_opt:.6g}/L"
        if self.regime is Regime.LOWER:
            return f"rho1 = 1 - {self.C_opt:.6g}/L"
        return "rho1 = 1"


@dataclass(frozen=True)
class SweepRow:
    j2: float
    C_opt: float
    objective: float
    regime: Regime


def _search_grid(lo: float, hi: float) -> np.ndarray:
    return np.unique(np.concatenate([np.linspace(lo, min(1.0, hi), 101), np.linspace(min(1.0, hi), hi, 200)]))


def solve_control(params: HeavyTrafficParams, costs: CostProfile, j1: float, j2: float,
                  C_max: float = C_MAX, eps: float = EPS_LOWER, tol_decide: float = TOL_DECIDE,
                  tol: float = TOL_C) -> ControlSolution:
    """Compare the Critical value with the best Upper and Lower interior choices.

    Ties within ``tol_decide`` resolve to Critical.  Emits
    :class:`ConsistencyWarning` if both interior minima beat the Critical
    value, which the uniqueness theory rules out.
    """
    if not 0 < params.rho2 < 1:
        raise DomainError("the high-regime load must obey rho2 < 1")
    jc = j_critical(params, costs, j1, j2)
    up = minimize_scalar(lambda c: j_upper(params, costs, j1, j2, C=c), 0.0, C_max, tol,
                         grid=_search_grid(0.0, C_max))
    low = minimize_scalar(lambda c: j_lower(params, costs, j1, j2, C=c), eps, C_max, tol,
                          grid=_search_grid(eps, C_max))
    if up.value < jc - tol_decide and low.value < jc - tol_decide:
        warnings.warn(
            f"both interior minima beat the critical value ({up.value:.12g}, {low.value:.12g} < {jc:.12g})",
            ConsistencyWarning,
            stacklevel=2,
        )
    if up.value < min(jc, low.value) - tol_decide:
        regime, C, val = Regime.UPPER, up.argmin, up.value
    elif low.value < min(jc, up.value) - tol_decide:
        regime, C, val = Regime.LOWER, low.argmin, low.value
    else:
        regime, C, val = Regime.CRITICAL, 0.0, jc
    return ControlSolution(regime=regime, C_opt=C, objective=val, j_crit=jc, upper=up, lower=low)


def sweep_j2(params: HeavyTrafficParams, costs: CostProfile, j1: float, j2_list: Iterable[float],
             **kwargs) -> List[SweepRow]:
    """One :func:`solve_control` per ``j2`` value, in input order."""
    rows = []
    for j2 in j2_list:
        sol = solve_control(params, costs, j1, float(j2), **kwargs)
        rows.append(SweepRow(j2=float(j2), C_opt=sol.C_opt, objective=sol.objective, regime=sol.regime))
    return rows
