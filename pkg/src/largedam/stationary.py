"""Exact stationary probabilities for a finite threshold ``L``.

``p1`` is the idle probability and ``p2`` the fraction of time a
high-regime service is in progress (renewal-reward over busy cycles).
``q[i-1]`` is the fraction of time occupied by normal-regime services that
started with ``i`` units present.  These three partition the time axis, so
they sum to one.  For exponential services ``q`` is therefore shifted
relative to the queue-length histogram: in M/M/1 ``q_i = (1 - rho) rho**(i+1)``
for ``i >= 2`` and ``q_1 = rho (1 - rho)(1 + rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NormalizationError
from .model import DamModel
from .takacs import BusyTable, busy_table

NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class StationaryDistribution:
    p1: float
    p2: float
    q: np.ndarray

    @property
    def total(self) -> float:
        return self.p1 + self.p2 + float(self.q.sum())


def stationary_distribution(model: DamModel, table: Optional[BusyTable] = None) -> StationaryDistribution:
    """Exact ``p1``, ``p2`` and ``q_1..q_L``.

    Raises
    ------
    DomainError
        if ``rho2 >= 1``.
    NormalizationError
        if the probabilities fail to sum to one within ``NORMALIZATION_TOL``.
    """
    rho1, rho2 = model.rho1, model.rho2
    if rho2 >= 1.0:
        raise DomainError(f"the high-regime load must obey rho2 < 1 (got rho2={rho2:.6g})")
    if table is None:
        table = busy_table(model)
    es = model.batch.m1
    nu_L = float(table.nu_cond[model.L])
    denom = es + (rho1 - rho2) * nu_L
    p1 = (1.0 - rho2) * es / denom
    # cancels to rounding level when rho1 < 1 and L is large
    p2 = max((rho2 * es + rho2 * (rho1 - 1.0) * nu_L) / denom, 0.0)
    q = (rho1 / es) * p1 * np.diff(table.nu_cond)
    dist = StationaryDistribution(p1=p1, p2=p2, q=q)
    if not abs(dist.total - 1.0) <= NORMALIZATION_TOL:
        raise NormalizationError(f"stationary probabilities sum to {dist.total!r}")
    return dist
