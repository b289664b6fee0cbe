"""Takács-type recurrence and the busy-period expectation tables.

Levels are counted down from the threshold: the excursion ``j`` starts with
``L - j + 1`` units present and ends the first time the count drops to
``L - j``.  Its expected number of normal-regime services is ``nu_tilde[j]``
(``j >= 1``).  The recurrence seed ``nu_tilde[0] = 1`` counts the one
service that completes a busy period once the queue is back at its lower
level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .dist import CoeffSeq
from .errors import DomainError, SingularError
from .model import DamModel


@dataclass(frozen=True)
class BusyTable:
    """Busy-period expectations for every threshold ``j = 0..L``.

    Attributes
    ----------
    nu_tilde : ndarray
        Takács sequence with ``nu_tilde[0] = 1``.
    nu : ndarray
        Batch-start decomposition over ``min(batch, j + 1)`` including the
        seed term ``nu_tilde[0]``.  ``nu[j] = nu_cond[j] + Pr{batch > j}``.
    nu_cond : ndarray
        Expected number of normal-regime services in a busy period when the
        threshold is ``j``; the first batch is cut at ``j``
        (``E E{nu | min(batch, j)}``).  ``nu_cond[0] = 0``.
    L : int
    """

    nu_tilde: np.ndarray
    nu: np.ndarray
    nu_cond: np.ndarray
    L: int


@dataclass(frozen=True)
class LinearReps:
    """Expected service counts and durations over one busy period at level ``L``."""

    nu1: float
    nu2: float
    T1: float
    T2: float
    T: float
    nu: float


def solve_takacs(f, q0: float, n: int) -> np.ndarray:
    """Return ``Q_0..Q_n`` solving ``Q_m = sum_{i=0}^{m} f_i Q_{m-i+1}``.

    Uses the forward form ``Q_{m+1} = (Q_m - sum_{i=1}^{m} f_i Q_{m-i+1}) / f_0``.
    Coefficients beyond the supplied length are taken as zero.
    """
    values = np.asarray(f.values if isinstance(f, CoeffSeq) else f, dtype=float)
    if n < 0:
        raise DomainError("n must be non-negative")
    if values.size == 0 or not values[0] > 0:
        raise SingularError("the recurrence needs f_0 > 0")
    return _backend.takacs_forward(values, float(q0), int(n))


def _prefix_conv(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``out[j] = sum_{i=1}^{j} r[i] * s[j - i]`` for ``j = 0..len(s)-1``."""
    n = s.size
    return np.convolve(r[:n], s)[:n]


def busy_table(model: DamModel) -> BusyTable:
    """Build :class:`BusyTable` for thresholds ``0..model.L``."""
    L = model.L
    nu_tilde = solve_takacs(model.coeffs, 1.0, L)
    S = np.cumsum(nu_tilde)
    r = model.batch.pmf(L + 1)
    surv = np.array([model.batch.survival(j) for j in range(L + 1)])
    # nu_cond[j] = S(j) - sum_{i<j} r_i S(j-i) - Pr{batch >= j} S(0), j >= 1
    rs = _prefix_conv(r, S)
    j = np.arange(L + 1)
    ge = surv + r[j]  # Pr{batch >= j} for j >= 1
    nu_cond = S - (rs - r[j] * S[0]) - ge * S[0]
    nu_cond[0] = 0.0
    nu = nu_cond + surv
    return BusyTable(nu_tilde=nu_tilde, nu=nu, nu_cond=nu_cond, L=L)


def cond_expectation_direct(nu_tilde: np.ndarray, batch, j: int) -> float:
    """``E E{nu | min(batch, j)}`` by the plain double sum (slow reference form)."""
    total = 0.0
    for i in range(1, j + 1):
        p = batch.pmf(i)[i] if i < j else batch.survival(j - 1)
        total += p * sum(nu_tilde[j - k + 1] for k in range(1, i + 1))
    return total


def nu_direct(nu_tilde: np.ndarray, batch, j: int) -> float:
    """Batch-start sum over ``min(batch, j + 1)`` with the seed term (reference form)."""
    total = 0.0
    for i in range(1, j + 2):
        p = batch.pmf(i)[i] if i < j + 1 else batch.survival(j)
        total += p * sum(nu_tilde[j - k + 1] for k in range(1, i + 1))
    return total


def _check_rho2(model: DamModel) -> float:
    rho2 = model.rho2
    if rho2 >= 1.0:
        raise DomainError(f"the high-regime load must obey rho2 < 1 (got rho2={rho2:.6g})")
    return rho2


def linear_reps(table: BusyTable, model: DamModel) -> LinearReps:
    """Split a level-``L`` busy period into normal and high-regime parts.

    ``nu1`` is the expected number of normal-regime services; the rest
    follows from the linear relation between the two counts, Wald's
    identity and the arrivals-equal-departures balance.
    """
    rho1, rho2 = model.rho1, _check_rho2(model)
    es = model.batch.m1
    nu1 = float(table.nu_cond[table.L])
    nu2 = es / (1.0 - rho2) - (1.0 - rho1) / (1.0 - rho2) * nu1
    T1 = nu1 * model.service1.mean
    T2 = nu2 * model.service2.mean
    return LinearReps(nu1=nu1, nu2=nu2, T1=T1, T2=T2, T=T1 + T2, nu=nu1 + nu2)


def quasi_linear_nu2(table: BusyTable, model: DamModel, method: str = "representation") -> float:
    """``E E{nu2 | min(batch, L)}`` by the closed representation or by direct summation."""
    rho1, rho2 = model.rho1, _check_rho2(model)
    L = table.L
    a = 1.0 / (1.0 - rho2)
    b = -(1.0 - rho1) / (1.0 - rho2)
    probs = model.batch.pmf(L)[1:].copy()
    probs[L - 1] = model.batch.survival(L - 1)
    if method == "representation":
        e_min = float(np.arange(1, L + 1) @ probs)
        return a * e_min + b * float(table.nu_cond[L])
    if method == "direct":
        nu2_tilde = a + b * table.nu_tilde
        total = 0.0
        for i in range(1, L + 1):
            total += probs[i - 1] * float(nu2_tilde[L - i + 1 : L + 1].sum())
        return total
    raise ValueError(f"unknown method {method!r}")
