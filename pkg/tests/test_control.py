import warnings

import numpy as np
import pytest

from largedam import (
    ConsistencyWarning,
    CostProfile,
    HeavyTrafficParams,
    Regime,
    j_lower,
    j_upper,
    minimize_scalar,
    solve_control,
    sweep_j2,
)

UNIT = HeavyTrafficParams(es=1.0, es2=1.0, rho12=1.0, rho2=0.5)
LIN = CostProfile.linear(2.0, 1.0)


def test_minimize_quadratic():
    r = minimize_scalar(lambda x: (x - 1) ** 2, 0.0, 3.0, 1e-6)
    assert r.argmin == pytest.approx(1.0, abs=1e-6)


def test_minimize_boundary():
    r = minimize_scalar(lambda x: x, 0.0, 2.0, 1e-8)
    assert r.argmin == 0.0 and r.value == 0.0


def test_minimize_is_deterministic():
    f = lambda c: j_upper(UNIT, LIN, 1.0, 1.1, C=c)  # noqa: E731
    assert minimize_scalar(f, 0, 5, 1e-4) == minimize_scalar(f, 0, 5, 1e-4)


@pytest.mark.parametrize("j2,expected", [(1.06, 0.200), (1.20, 0.090)])
def test_minimize_table_rows(j2, expected):
    r = minimize_scalar(lambda c: j_upper(UNIT, LIN, 1.0, j2, C=c), 0.0, 5.0, 1e-4)
    assert r.argmin == pytest.approx(expected, abs=0.005)


def test_solve_control_upper():
    sol = solve_control(UNIT, LIN, 1.0, 1.06)
    assert sol.regime is Regime.UPPER
    assert sol.C_opt == pytest.approx(0.200, abs=0.005)
    assert sol.objective <= sol.j_crit + 1e-9
    assert sol.rho1(400) == pytest.approx(1 + sol.C_opt / 400)


def test_solve_control_critical():
    sol = solve_control(UNIT, LIN, 1.0, 1.34)
    assert sol.regime is Regime.CRITICAL and sol.C_opt == 0.0
    assert sol.objective == sol.j_crit and sol.rho1(50) == 1.0


def test_equality_case_uniform_costs():
    # j1 = j2 rho2 / (1 - rho2): both interior searches end on the boundary
    uniform = CostProfile.uniform(1.0)
    sol = solve_control(UNIT, uniform, 1.0, 1.0)
    assert sol.regime is Regime.CRITICAL
    assert sol.upper.argmin == 0.0
    assert sol.lower.value > sol.j_crit


@pytest.mark.parametrize("j1,j2", [(0.5, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 0.5), (0.2, 3.0)])
def test_cor2_inequality_uniform_costs(j1, j2):
    sol = solve_control(UNIT, CostProfile.uniform(1.0), j1, j2)
    if sol.regime is Regime.CRITICAL:
        assert j1 <= j2 * UNIT.rho2 / (1 - UNIT.rho2) + 1e-12
    else:
        assert sol.regime is Regime.UPPER and j1 > j2


def test_threshold():
    j2_star = 1.0 + (2.0 - 1.0) / 3
    assert solve_control(UNIT, LIN, 1.0, j2_star - 1e-3).regime is Regime.UPPER
    assert solve_control(UNIT, LIN, 1.0, j2_star + 1e-3).regime is Regime.CRITICAL


def test_sweep_monotone():
    rows = sweep_j2(UNIT, LIN, 1.0, np.arange(1.0, 1.4, 0.02))
    c = [r.C_opt for r in rows]
    assert all(a >= b for a, b in zip(c, c[1:]))
    assert all(r.C_opt >= 0 for r in rows)


def test_single_local_minimum_on_grid():
    grid = np.linspace(0.0, 5.0, 10_000)
    for j2 in (1.1, 1.2, 1.5):
        v = np.array([j_upper(UNIT, LIN, 1.0, j2, C=c) for c in grid])
        interior = (v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])
        assert interior.sum() + (v[0] < v[1]) == 1
    v = np.array([j_lower(UNIT, LIN, 0.3, 2.0, C=c) for c in grid[1:]])
    interior = (v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])
    assert interior.sum() + (v[0] < v[1]) == 1


def test_consistency_warning(monkeypatch):
    import largedam.control as control

    monkeypatch.setattr(control, "j_lower", lambda p, c, a, b, C: 0.0)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        sol = control.solve_control(UNIT, LIN, 1.0, 1.06)
    assert any(issubclass(w.category, ConsistencyWarning) for w in rec)
    assert sol.regime is Regime.LOWER


def test_critical_tie_within_tolerance():
    sol = solve_control(UNIT, LIN, 1.0, 1.06, tol_decide=1.0)
    assert sol.regime is Regime.CRITICAL
