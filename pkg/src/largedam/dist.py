"""Batch-size laws, service-time families and the arrivals-per-service sequence.

Every recurrence in the package is driven by the sequence ``f[i]``: the
probability that exactly ``i`` customers (water units) arrive during one
normal-regime service.  Its generating function is
``F(z) = lst(B1, lam - lam * R(z))`` with ``R`` the batch pgf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError

# Geometric supports are cut where the remaining tail is below this mass.
GEOMETRIC_TAIL_CUT = 1e-17
# Adaptive coefficient extraction stops once the unaccumulated mass is below this.
COEFF_TAIL_TOL = 1e-10
COEFF_NMAX_CAP = 1_000_000


@dataclass(frozen=True)
class BatchDistribution:
    """Law of the number of units brought by one Poisson arrival (support >= 1).

    ``probabilities[i - 1]`` is ``r_i``.  Geometric laws keep their parameter
    ``q`` so the pgf, tails and moments stay in closed form; the stored array
    is truncated once the tail mass drops below ``GEOMETRIC_TAIL_CUT``.
    """

    probabilities: np.ndarray
    kind: str = "explicit"
    q: float = 0.0
    m1: float = field(init=False)
    m2: float = field(init=False)
    m3: float = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.probabilities, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise DomainError("batch probabilities must be a non-empty 1-d sequence")
        if np.any(r < 0):
            raise DomainError("batch probabilities must be non-negative")
        object.__setattr__(self, "probabilities", r)
        if self.kind == "geometric":
            q = self.q
            m1 = 1.0 / (1.0 - q)
            m2 = (1.0 + q) / (1.0 - q) ** 2
            m3 = (1.0 + 4.0 * q + q * q) / (1.0 - q) ** 3
        else:
            if abs(r.sum() - 1.0) > 1e-12:
                raise DomainError(f"batch probabilities sum to {r.sum()!r}, not 1")
            i = np.arange(1, r.size + 1, dtype=float)
            m1, m2, m3 = float(i @ r), float((i * i) @ r), float((i**3) @ r)
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m2", m2)
        object.__setattr__(self, "m3", m3)

    @classmethod
    def single(cls) -> "BatchDistribution":
        """Ordinary Poisson input: every arrival brings one unit."""
        return cls(np.array([1.0]))

    @classmethod
    def explicit(cls, probabilities: Sequence[float]) -> "BatchDistribution":
        return cls(np.asarray(probabilities, dtype=float))

    @classmethod
    def geometric(cls, q: float) -> "BatchDistribution":
        """``r_i = (1 - q) q**(i - 1)``, ``i >= 1``."""
        if not 0.0 <= q < 1.0:
            raise DomainError(f"geometric batch needs 0 <= q < 1, got {q}")
        if q == 0.0:
            return cls(np.array([1.0]), kind="geometric", q=0.0)
        k = max(1, int(math.ceil(math.log(GEOMETRIC_TAIL_CUT) / math.log(q))))
        r = (1.0 - q) * q ** np.arange(k, dtype=float)
        return cls(r, kind="geometric", q=q)

    @property
    def support_size(self) -> int:
        return self.probabilities.size

    def pmf(self, n: int) -> np.ndarray:
        """Array ``a`` of length ``n + 1`` with ``a[i] = r_i`` (``a[0] = 0``)."""
        out = np.zeros(n + 1)
        k = min(n, self.support_size)
        out[1 : k + 1] = self.probabilities[:k]
        return out

    def survival(self, i: int) -> float:
        """``Pr{batch > i}``."""
        if i < 1:
            return 1.0
        if self.kind == "geometric":
            return self.q**i
        return float(self.probabilities[i:].sum())

    def cdf_table(self) -> np.ndarray:
        """Cumulative probabilities used for inverse-transform sampling."""
        c = np.cumsum(self.probabilities)
        c[-1] = 1.0
        return c

    def pgf(self, z: float) -> float:
        if self.kind == "geometric" and self.q > 0.0:
            if abs(self.q * z) >= 1.0:
                raise DomainError(f"geometric batch pgf diverges at z={z}")
            return (1.0 - self.q) * z / (1.0 - self.q * z)
        i = np.arange(1, self.support_size + 1, dtype=float)
        return float(self.probabilities @ np.power(z, i))

    def pgf_derivative(self, z: float) -> float:
        if self.kind == "geometric" and self.q > 0.0:
            if abs(self.q * z) >= 1.0:
                raise DomainError(f"geometric batch pgf diverges at z={z}")
            return (1.0 - self.q) / (1.0 - self.q * z) ** 2
        i = np.arange(1, self.support_size + 1, dtype=float)
        return float((self.probabilities * i) @ np.power(z, i - 1))

    def pgf_radius(self) -> float:
        """Radius of convergence of the pgf (``inf`` for finite support)."""
        if self.kind == "geometric" and self.q > 0.0:
            return 1.0 / self.q
        return math.inf


_FAMILIES = ("deterministic", "exponential", "erlang", "hyperexponential")
# integer codes understood by the compiled simulation kernel
FAMILY_CODES = {name: code for code, name in enumerate(_FAMILIES)}


@dataclass(frozen=True)
class ServiceDistribution:
    """One of four service-time families.

    ``rates`` are per-stage (Erlang) or per-branch (hyperexponential) rates;
    a deterministic law keeps its duration in ``value``.
    """

    family: str
    value: float = 0.0
    k: int = 1
    weights: tuple = ()
    rates: tuple = ()

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown service family {self.family!r}")
        if self.family == "deterministic":
            if self.value < 0:
                raise DomainError("deterministic service time must be >= 0")
        elif self.family == "hyperexponential":
            w = np.asarray(self.weights, dtype=float)
            mu = np.asarray(self.rates, dtype=float)
            if w.size == 0 or w.size != mu.size:
                raise DomainError("hyperexponential needs matching weights and rates")
            if np.any(w <= 0) or np.any(mu <= 0) or abs(w.sum() - 1.0) > 1e-12:
                raise DomainError("hyperexponential weights must be positive and sum to 1")
        else:
            if len(self.rates) != 1 or self.rates[0] <= 0:
                raise DomainError(f"{self.family} service needs one positive rate")
            if self.family == "erlang" and self.k < 1:
                raise DomainError("erlang shape must be >= 1")

    @classmethod
    def deterministic(cls, d: float) -> "ServiceDistribution":
        return cls("deterministic", value=float(d))

    @classmethod
    def exponential(cls, rate: float) -> "ServiceDistribution":
        return cls("exponential", rates=(float(rate),))

    @classmethod
    def erlang(cls, k: int, rate: float) -> "ServiceDistribution":
        return cls("erlang", k=int(k), rates=(float(rate),))

    @classmethod
    def hyperexponential(cls, weights, rates) -> "ServiceDistribution":
        return cls(
            "hyperexponential",
            weights=tuple(float(w) for w in weights),
            rates=tuple(float(r) for r in rates),
        )

    def moment(self, l: int) -> float:
        """``l``-th raw moment of the service time."""
        if self.family == "deterministic":
            return self.value**l
        if self.family == "exponential":
            return math.factorial(l) / self.rates[0] ** l
        if self.family == "erlang":
            return math.prod(range(self.k, self.k + l)) / self.rates[0] ** l
        return sum(w * math.factorial(l) / mu**l for w, mu in zip(self.weights, self.rates))

    @property
    def mean(self) -> float:
        return self.moment(1)

    def rho(self, lam: float, batch: BatchDistribution) -> float:
        """Expected number of arrived units per service: ``lam * E(batch) * mean``."""
        return lam * batch.m1 * self.mean

    def rho_l(self, lam: float, l: int) -> float:
        """Scaled raw moment ``lam**l * E[X**l]``."""
        return lam**l * self.moment(l)

    def scaled(self, factor: float) -> "ServiceDistribution":
        """The same family with every service time multiplied by ``factor``."""
        if factor <= 0:
            raise DomainError("time scale factor must be positive")
        if self.family == "deterministic":
            return ServiceDistribution.deterministic(self.value * factor)
        if self.family == "hyperexponential":
            return ServiceDistribution.hyperexponential(
                self.weights, [mu / factor for mu in self.rates]
            )
        return ServiceDistribution(self.family, k=self.k, rates=(self.rates[0] / factor,))

    def with_mean(self, mean: float) -> "ServiceDistribution":
        return self.scaled(mean / self.mean)

    def lst_domain(self) -> float:
        """Infimum of the real ``s`` where the transform is finite."""
        if self.family == "deterministic":
            return -math.inf
        return -min(self.rates)

    def lst(self, s: float) -> float:
        """Laplace-Stieltjes transform ``E exp(-s X)``."""
        if s <= self.lst_domain():
            raise DomainError(f"LST of {self.family} service undefined at s={s}")
        if self.family == "deterministic":
            return math.exp(-s * self.value)
        if self.family == "exponential":
            mu = self.rates[0]
            return mu / (mu + s)
        if self.family == "erlang":
            mu = self.rates[0]
            return (mu / (mu + s)) ** self.k
        return sum(w * mu / (mu + s) for w, mu in zip(self.weights, self.rates))

    def lst_derivative(self, s: float) -> float:
        if s <= self.lst_domain():
            raise DomainError(f"LST of {self.family} service undefined at s={s}")
        if self.family == "deterministic":
            return -self.value * math.exp(-s * self.value)
        if self.family == "exponential":
            mu = self.rates[0]
            return -mu / (mu + s) ** 2
        if self.family == "erlang":
            mu = self.rates[0]
            return -self.k * mu**self.k / (mu + s) ** (self.k + 1)
        return sum(-w * mu / (mu + s) ** 2 for w, mu in zip(self.weights, self.rates))

    def kernel_spec(self):
        """``(code, params)`` encoding consumed by the simulation kernels."""
        code = FAMILY_CODES[self.family]
        if self.family == "deterministic":
            params = [self.value]
        elif self.family == "exponential":
            params = [self.rates[0]]
        elif self.family == "erlang":
            params = [float(self.k), self.rates[0]]
        else:
            params = list(np.cumsum(self.weights)) + list(self.rates)
            params[len(self.weights) - 1] = 1.0
        return code, np.asarray(params, dtype=float)


@dataclass(frozen=True)
class CoeffSeq:
    """Probabilities ``values[i]``, ``i = 0..n_max``, of a count law (possibly truncated)."""

    values: np.ndarray

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def tail_mass(self) -> float:
        return max(0.0, 1.0 - float(self.values.sum()))


def batch_pgf(batch: BatchDistribution, z: float) -> float:
    """``R(z) = sum r_i z**i``."""
    return batch.pgf(z)


def lst(service: ServiceDistribution, s: float) -> float:
    return service.lst(s)


def compound_poisson_pmf(batch: BatchDistribution, rate_time: float, n_max: int) -> CoeffSeq:
    """Pmf of the number of units brought in time ``t`` (argument ``lam * t``).

    Panjer recursion: ``p_n = (lam t / n) * sum_j j r_j p_{n-j}``.
    """
    if rate_time < 0 or n_max < 0:
        raise DomainError("compound_poisson_pmf needs rate_time >= 0 and n_max >= 0")
    p = np.zeros(n_max + 1)
    p[0] = math.exp(-rate_time)
    if rate_time == 0.0:
        return CoeffSeq(p)
    k = batch.support_size
    jr = np.arange(1, k + 1) * batch.probabilities
    for n in range(1, n_max + 1):
        m = min(n, k)
        # p[n-1], ..., p[n-m] against 1*r_1, ..., m*r_m
        p[n] = rate_time / n * float(jr[:m] @ p[n - 1 :: -1][:m])
    return CoeffSeq(p)


def _exp_stage_coeffs(rate: float, batch: BatchDistribution, lam: float, n_max: int) -> np.ndarray:
    # F(z) = mu / (mu + lam - lam R(z)):  f_i = a * sum_j r_j f_{i-j}
    f = np.zeros(n_max + 1)
    f[0] = rate / (rate + lam)
    a = lam / (rate + lam)
    r = batch.probabilities
    k = r.size
    for i in range(1, n_max + 1):
        m = min(i, k)
        f[i] = a * float(r[:m] @ f[i - 1 :: -1][:m])
    return f


def _coeffs_fixed(service: ServiceDistribution, batch: BatchDistribution, lam: float, n_max: int) -> np.ndarray:
    fam = service.family
    if fam == "deterministic":
        return compound_poisson_pmf(batch, lam * service.value, n_max).values
    if fam == "exponential":
        return _exp_stage_coeffs(service.rates[0], batch, lam, n_max)
    if fam == "erlang":
        stage = _exp_stage_coeffs(service.rates[0], batch, lam, n_max)
        out = stage
        for _ in range(service.k - 1):
            out = np.convolve(out, stage)[: n_max + 1]
        return out
    out = np.zeros(n_max + 1)
    for w, mu in zip(service.weights, service.rates):
        out += w * _exp_stage_coeffs(mu, batch, lam, n_max)
    return out


def arrivals_per_service_coeffs(
    service: ServiceDistribution,
    batch: BatchDistribution,
    lam: float,
    n_max: Optional[int] = None,
) -> CoeffSeq:
    """``f_i = Pr{i units arrive during one service}`` for ``i = 0..n_max``.

    With ``n_max=None`` the length doubles until the unaccumulated mass is
    below ``COEFF_TAIL_TOL``.
    """
    if lam <= 0:
        raise DomainError("arrival rate must be positive")
    if n_max is not None:
        return CoeffSeq(_coeffs_fixed(service, batch, lam, int(n_max)))
    n = 64
    while True:
        f = _coeffs_fixed(service, batch, lam, n)
        if 1.0 - f.sum() < COEFF_TAIL_TOL or n >= COEFF_NMAX_CAP:
            return CoeffSeq(f)
        n *= 2
