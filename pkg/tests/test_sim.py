import dataclasses

import numpy as np
import pytest

from largedam import (
    BatchDistribution,
    DamModel,
    DomainError,
    ServiceDistribution,
    StabilityError,
    busy_table,
    linear_reps,
    replicate,
    simulate,
    stationary_distribution,
)
from largedam.sim import replication_seeds

from conftest import geometric_model, mm1


def same(a, b):
    for f in dataclasses.fields(a):
        x, y = getattr(a, f.name), getattr(b, f.name)
        if isinstance(x, np.ndarray):
            if not np.array_equal(x, y):
                return False
        elif not (x == y or (x != x and y != y)):
            return False
    return True


def test_mm1_idle_fraction():
    r = simulate(mm1(0.5, 12), 1_000_000, seed=42)
    assert abs(r.p1_hat - 0.5) < 3 * r.p1_se
    assert r.rng == "numpy-PCG64"


def test_nearly_empty_system():
    s = ServiceDistribution.exponential(1.0)
    r = simulate(DamModel(1e-9, BatchDistribution.single(), s, s, 3), 10_000, seed=1)
    assert r.p1_hat > 1 - 1e-6


def test_time_accounting_closes():
    r = simulate(geometric_model(L=6), 200_000, seed=3)
    assert r.p1_hat + r.p2_service_hat + r.q_start_hat.sum() == pytest.approx(1.0, abs=1e-9)
    assert r.p1_hat + r.p2_level_hat + r.q_hat.sum() == pytest.approx(1.0, abs=1e-9)
    assert min(r.p1_se, r.p2_service_se, r.q_se.min(), r.q_start_se.min()) >= 0


def test_against_exact_law(geo):
    exact = stationary_distribution(geo)
    r = replicate(geo, 4, base_seed=11, min_events=500_000)
    assert abs(r.p1_hat - exact.p1) < 3.5 * r.p1_se
    assert abs(r.p2_service_hat - exact.p2) < 3.5 * r.p2_service_se
    assert np.all(np.abs(r.q_start_hat - exact.q) < 4 * r.q_start_se)


def test_busy_cycle_counts_match_linear_representation(geo):
    reps = linear_reps(busy_table(geo), geo)
    r = replicate(geo, 4, base_seed=2, min_events=500_000)
    assert abs(r.cycle_served_mean - reps.nu) < 3.5 * r.cycle_served_se
    assert abs(r.cycle_served1_mean - reps.nu1) < 3.5 * r.cycle_served1_se


def test_service_and_level_readings_agree_without_batches():
    """Stated model property; a normal service running while an arrival lifts
    the level above L separates the two readings even without batches."""
    m = DamModel(1.0, BatchDistribution.single(), ServiceDistribution.exponential(1.1),
                 ServiceDistribution.exponential(2.0), 4)
    r = replicate(m, 4, base_seed=8, min_events=500_000)
    se = np.hypot(r.p2_service_se, r.p2_level_se)
    assert abs(r.p2_service_hat - r.p2_level_hat) < 3 * se


def test_mm1_service_and_level_readings():
    rho, L = 0.5, 3
    r = replicate(mm1(rho, L), 4, base_seed=13, min_events=500_000)
    assert abs(r.p2_level_hat - rho ** (L + 1)) < 3.5 * r.p2_level_se
    assert abs(r.p2_service_hat - rho ** (L + 2)) < 3.5 * r.p2_service_se


@pytest.mark.parametrize("service", [
    ServiceDistribution.deterministic(0.8),
    ServiceDistribution.erlang(3, 3.5),
    ServiceDistribution.hyperexponential([0.4, 0.6], [0.7, 3.0]),
])
def test_other_families_against_exact(service):
    m = DamModel(0.9, BatchDistribution.explicit([0.6, 0.3, 0.1]), service, ServiceDistribution.exponential(4.0), 6)
    exact = stationary_distribution(m)
    r = replicate(m, 4, base_seed=21, min_events=400_000)
    assert abs(r.p1_hat - exact.p1) < 4 * r.p1_se
    assert np.all(np.abs(r.q_start_hat - exact.q) < 4.5 * r.q_start_se)


def test_reproducible():
    m = geometric_model(L=5)
    assert same(simulate(m, 50_000, seed=9), simulate(m, 50_000, seed=9))
    assert same(replicate(m, 3, 4, 20_000), replicate(m, 3, 4, 20_000))
    assert not same(simulate(m, 50_000, seed=9), simulate(m, 50_000, seed=10))


def test_single_replication_is_simulate():
    m = geometric_model(L=5)
    seed = replication_seeds(77, 1)[0]
    assert same(replicate(m, 1, 77, 30_000), simulate(m, 30_000, seed=seed))


def test_pooled_error_shrinks():
    m = mm1(0.5, 12)
    single = simulate(m, 200_000, seed=replication_seeds(5, 1)[0])
    pooled = replicate(m, 8, 5, 200_000)
    ratio = pooled.p1_se / single.p1_se
    assert 1 / np.sqrt(8) / 1.5 < ratio < 1.5 / np.sqrt(8)


def test_preconditions():
    with pytest.raises(StabilityError):
        simulate(geometric_model(rho2=1.0), 10_000)
    with pytest.raises(DomainError):
        simulate(geometric_model(), 100)
    with pytest.raises(DomainError):
        simulate(geometric_model(), 10_000, warmup_fraction=1.0)
    with pytest.raises(DomainError):
        replicate(geometric_model(), 0)
