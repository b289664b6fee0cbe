"""The full model instance shared by the analytic modules and the simulator."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Optional

from .dist import BatchDistribution, CoeffSeq, ServiceDistribution, arrivals_per_service_coeffs
from .errors import DomainError


@dataclass(frozen=True)
class DamModel:
    """Compound-Poisson inflow, two-regime outflow, threshold ``L``.

    A service that starts while more than ``L`` units are present (counting
    the unit entering service) follows ``service2``; otherwise ``service1``.
    ``j1``/``j2`` are damage rates per level unit and ``costs`` a
    :class:`~largedam.objective.CostProfile` (optional for pure queueing work).
    """

    lam: float
    batch: BatchDistribution
    service1: ServiceDistribution
    service2: ServiceDistribution
    L: int
    j1: float = 1.0
    j2: float = 1.0
    costs: Optional[Any] = None

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"arrival rate must be positive, got {self.lam}")
        if int(self.L) != self.L or self.L < 1:
            raise DomainError(f"threshold L must be a positive integer, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        if self.j1 < 0 or self.j2 < 0:
            raise DomainError("damage rates j1, j2 must be non-negative")

    @property
    def rho1(self) -> float:
        return self.service1.rho(self.lam, self.batch)

    @property
    def rho2(self) -> float:
        return self.service2.rho(self.lam, self.batch)

    @property
    def rho12(self) -> float:
        return self.service1.rho_l(self.lam, 2)

    @property
    def rho13(self) -> float:
        return self.service1.rho_l(self.lam, 3)

    @cached_property
    def coeffs(self) -> CoeffSeq:
        """``f_0..f_{L+1}`` for the normal-regime service."""
        return arrivals_per_service_coeffs(self.service1, self.batch, self.lam, self.L + 1)

    def with_rho(self, rho1: Optional[float] = None, rho2: Optional[float] = None, **changes) -> "DamModel":
        """Copy with services rescaled in time to hit the requested loads."""
        s1, s2 = self.service1, self.service2
        if rho1 is not None:
            s1 = s1.scaled(rho1 / self.rho1)
        if rho2 is not None:
            s2 = s2.scaled(rho2 / self.rho2)
        return replace(self, service1=s1, service2=s2, **changes)

    def replace(self, **changes) -> "DamModel":
        return replace(self, **changes)
