"""Discrete-event simulation of the two-regime queue (the cross-check oracle).

Each service start looks at the number present ``n`` (including the unit
entering service) and uses the high-regime law when ``n > L``; a running
service is never switched.  Statistics are time-weighted after a warmup,
with standard errors from batch means (pooled over independent runs in
:func:`replicate`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._fallback import COL_ABOVE, COL_B2, COL_IDLE, COL_LEVEL, COL_TOTAL
from .errors import DomainError, StabilityError
from .model import DamModel

RNG_ALGORITHM = "numpy-PCG64"
N_STAT_BATCHES = 32
MIN_EVENTS = 10_000


@dataclass(frozen=True)
class SimulationResult:
    """Time-average estimates with standard errors.

    ``q_hat[i-1]`` is the fraction of time with ``i`` units present (any
    service type).  ``q_start_hat[i-1]`` is the fraction of time spent in
    normal-regime services that started with ``i`` units present; together
    with ``p1_hat`` and ``p2_service_hat`` it partitions the time axis.
    """

    p1_hat: float
    p1_se: float
    p2_service_hat: float
    p2_service_se: float
    p2_level_hat: float
    p2_level_se: float
    q_hat: np.ndarray
    q_se: np.ndarray
    q_start_hat: np.ndarray
    q_start_se: np.ndarray
    cycle_served_mean: float
    cycle_served_se: float
    cycle_served1_mean: float
    cycle_served1_se: float
    events: int
    busy_cycles: int
    seed: int
    rng: str = RNG_ALGORITHM
    backend: str = _backend.BACKEND
    n_reps: int = 1


def _ratio_estimate(stat: np.ndarray, total: np.ndarray):
    """Pooled ratio and batch-means standard error (columns of ``stat``)."""
    est = stat.sum(axis=0) / total.sum()
    per = stat / total[:, None]
    se = per.std(axis=0, ddof=1) / math.sqrt(per.shape[0])
    return est, se


def _check(model: DamModel):
    if model.rho2 >= 1.0:
        raise StabilityError(f"the high-regime load must obey rho2 < 1 (got rho2={model.rho2:.6g})")


def _run(model: DamModel, n_events: int, warmup_fraction: float, seed: int, n_batches: int):
    L = model.L
    code1, par1 = model.service1.kernel_spec()
    code2, par2 = model.service2.kernel_spec()
    bitgen = np.random.PCG64(np.random.SeedSequence(seed))
    return _backend.simulate_kernel(
        bitgen, float(model.lam), model.batch.cdf_table(), code1, par1, code2, par2,
        L, n_events, int(warmup_fraction * n_events), n_batches,
    )


def _summarize(L: int, acc: np.ndarray, cyc: np.ndarray, events: int, seed: int, n_reps: int) -> SimulationResult:
    est, se = _ratio_estimate(acc[:, 1:], acc[:, COL_TOTAL])
    off = lambda col: col - 1  # noqa: E731  (acc column -> est index)
    lv = slice(off(COL_LEVEL), off(COL_LEVEL) + L)
    st = slice(off(COL_LEVEL) + L, off(COL_LEVEL) + 2 * L)
    n_cyc = int(cyc[0])
    if n_cyc > 1:
        m, m1 = cyc[1] / n_cyc, cyc[3] / n_cyc
        s = math.sqrt(max(cyc[2] / n_cyc - m * m, 0.0) / n_cyc)
        s1 = math.sqrt(max(cyc[4] / n_cyc - m1 * m1, 0.0) / n_cyc)
    else:
        m = m1 = s = s1 = math.nan
    return SimulationResult(
        p1_hat=float(est[off(COL_IDLE)]), p1_se=float(se[off(COL_IDLE)]),
        p2_service_hat=float(est[off(COL_B2)]), p2_service_se=float(se[off(COL_B2)]),
        p2_level_hat=float(est[off(COL_ABOVE)]), p2_level_se=float(se[off(COL_ABOVE)]),
        q_hat=est[lv].copy(), q_se=se[lv].copy(),
        q_start_hat=est[st].copy(), q_start_se=se[st].copy(),
        cycle_served_mean=m, cycle_served_se=s,
        cycle_served1_mean=m1, cycle_served1_se=s1,
        events=events, busy_cycles=n_cyc, seed=int(seed), n_reps=n_reps,
    )


def _validate(model, min_events, warmup_fraction):
    _check(model)
    if min_events < MIN_EVENTS:
        raise DomainError(f"min_events must be at least {MIN_EVENTS}")
    if not 0.0 <= warmup_fraction < 1.0:
        raise DomainError("warmup_fraction must lie in [0, 1)")


def simulate(model: DamModel, min_events: int = 1_000_000, warmup_fraction: float = 0.2,
             seed: int = 0, n_batches: int = N_STAT_BATCHES) -> SimulationResult:
    """Run ``min_events`` arrival/departure events; discard the first ``warmup_fraction``."""
    _validate(model, min_events, warmup_fraction)
    n_events = int(min_events)
    acc, cyc = _run(model, n_events, warmup_fraction, seed, n_batches)
    return _summarize(model.L, acc, cyc, n_events, seed, 1)


def replication_seeds(base_seed: int, n_reps: int):
    """Integer seeds derived deterministically from ``base_seed``."""
    children = np.random.SeedSequence(base_seed).spawn(n_reps)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def replicate(model: DamModel, n_reps: int, base_seed: int = 0, min_events: int = 1_000_000,
              warmup_fraction: float = 0.2, n_batches: int = N_STAT_BATCHES) -> SimulationResult:
    """Pool ``n_reps`` independent runs of ``min_events`` events each.

    Estimates are ratios of pooled time totals.  Standard errors come from
    the spread of all ``n_reps * n_batches`` batch means, which mixes
    between-run and within-run variation and stays stable for few runs.
    """
    if n_reps < 1:
        raise DomainError("n_reps must be at least 1")
    _validate(model, min_events, warmup_fraction)
    seeds = replication_seeds(base_seed, n_reps)
    if n_reps == 1:
        return simulate(model, min_events, warmup_fraction, seeds[0], n_batches)
    accs, cycs = [], []
    for s in seeds:
        acc, cyc = _run(model, int(min_events), warmup_fraction, s, n_batches)
        accs.append(acc)
        cycs.append(cyc)
    return _summarize(model.L, np.vstack(accs), np.sum(cycs, axis=0), n_reps * int(min_events), base_seed, n_reps)
