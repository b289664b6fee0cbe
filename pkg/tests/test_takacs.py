import numpy as np
import pytest

from largedam import (
    BatchDistribution,
    DamModel,
    DomainError,
    ServiceDistribution,
    SingularError,
    arrivals_per_service_coeffs,
    busy_table,
    linear_reps,
    quasi_linear_nu2,
    solve_takacs,
)
from largedam.takacs import cond_expectation_direct, nu_direct

from conftest import geometric_model, mm1


def series_divide(num, den, n):
    """Power-series long division ``num / den`` to ``n + 1`` terms."""
    out = np.zeros(n + 1)
    rem = np.zeros(n + 1)
    rem[: min(n + 1, num.size)] = num[: n + 1]
    for k in range(n + 1):
        out[k] = rem[k] / den[0]
        m = min(den.size, n + 1 - k)
        rem[k : k + m] -= out[k] * den[:m]
    return out


def test_mm1_critical_example():
    f = 0.5 ** np.arange(1, 40)
    np.testing.assert_allclose(solve_takacs(f, 1.0, 5), [1, 2, 3, 4, 5, 6], rtol=1e-14)


def test_no_arrivals_fixed_point():
    np.testing.assert_array_equal(solve_takacs(np.array([1.0]), 2.5, 6), np.full(7, 2.5))


@pytest.mark.parametrize("service", [ServiceDistribution.erlang(2, 2.5), ServiceDistribution.deterministic(0.9)])
def test_generating_function_by_long_division(service):
    n = 30
    f = arrivals_per_service_coeffs(service, BatchDistribution.geometric(0.3), 0.7, n + 1).values
    den = f.copy()
    den[1] -= 1.0  # F(z) - z
    expected = series_divide(f, den, n)
    np.testing.assert_allclose(solve_takacs(f, 1.0, n), expected, rtol=1e-10)


def test_singular_recurrence():
    with pytest.raises(SingularError):
        solve_takacs(np.array([0.0, 1.0]), 1.0, 3)


def test_single_arrivals_tables_coincide():
    m = DamModel(1.3, BatchDistribution.single(), ServiceDistribution.erlang(3, 4.0),
                 ServiceDistribution.exponential(3.0), 15)
    t = busy_table(m)
    np.testing.assert_allclose(t.nu, t.nu_tilde, rtol=1e-13)
    np.testing.assert_allclose(t.nu_cond[1:], t.nu_tilde[1:], rtol=1e-13)
    assert t.nu_cond[0] == 0.0


def test_mm1_critical_table():
    s = ServiceDistribution.exponential(1.0)
    t = busy_table(DamModel(1.0, BatchDistribution.single(), s, ServiceDistribution.exponential(2.0), 10))
    assert t.nu_tilde[10] == pytest.approx(11.0, rel=1e-13)
    assert t.nu_tilde[0] == 1.0


def test_truncation_identity_geometric():
    m = geometric_model(L=10)
    t = busy_table(m)
    direct_nu = nu_direct(t.nu_tilde, m.batch, 10)
    direct_cond = cond_expectation_direct(t.nu_tilde, m.batch, 10)
    assert direct_nu - direct_cond == pytest.approx(0.5**10, abs=1e-12)
    assert t.nu[10] == pytest.approx(direct_nu, rel=1e-13)
    assert t.nu_cond[10] == pytest.approx(direct_cond, rel=1e-13)


def test_tables_match_direct_sums_every_threshold():
    m = DamModel(0.6, BatchDistribution.explicit([0.2, 0.3, 0.1, 0.4]), ServiceDistribution.erlang(2, 3.0),
                 ServiceDistribution.exponential(5.0), 12)
    t = busy_table(m)
    for j in range(13):
        assert t.nu[j] == pytest.approx(nu_direct(t.nu_tilde, m.batch, j), rel=1e-12)
        assert t.nu_cond[j] == pytest.approx(cond_expectation_direct(t.nu_tilde, m.batch, j), rel=1e-12, abs=1e-14)


def test_linear_reps_critical_load():
    m = geometric_model(L=7, rho1=1.0, rho2=0.4)
    r = linear_reps(busy_table(m), m)
    assert r.nu2 == pytest.approx(m.batch.m1 / 0.6, rel=1e-12)


def test_linear_reps_mm1_busy_period():
    m = mm1(rho=0.5, L=8)
    r = linear_reps(busy_table(m), m)
    assert r.nu == pytest.approx(2.0, abs=1e-8)


def test_linear_reps_identities_overloaded():
    m = geometric_model(L=20, rho1=1.2, rho2=0.5)
    r = linear_reps(busy_table(m), m)
    assert r.nu == pytest.approx(r.nu1 + r.nu2, abs=1e-9)
    assert r.T == pytest.approx(r.T1 + r.T2, abs=1e-9)
    assert r.T1 == pytest.approx(r.nu1 * m.service1.mean, rel=1e-12)
    assert r.T2 == pytest.approx(r.nu2 * m.service2.mean, rel=1e-12)
    assert m.lam * m.batch.m1 * r.T + m.batch.m1 == pytest.approx(r.nu, rel=1e-9)


def test_linear_reps_requires_stable_high_regime():
    m = geometric_model(L=5, rho2=1.1)
    with pytest.raises(DomainError):
        linear_reps(busy_table(m), m)


@pytest.mark.parametrize("rho1", [0.8, 1.0, 1.15])
def test_quasi_linear_two_ways(rho1):
    m = geometric_model(L=25, rho1=rho1, rho2=0.6, q=0.4)
    t = busy_table(m)
    a = quasi_linear_nu2(t, m, "representation")
    b = quasi_linear_nu2(t, m, "direct")
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_nu_tilde_converges_below_critical():
    m = geometric_model(L=400, rho1=0.7)
    t = busy_table(m)
    assert np.all(np.diff(t.nu_tilde) >= 0)
    assert t.nu_tilde[-1] == pytest.approx(1 / (1 - 0.7), rel=1e-9)
