"""TOML run configuration -> model objects, with field-path error messages.

Example::

    [model]
    lambda = 1.0
    L = 10
    j1 = 1.0
    j2 = 1.06

    [model.batch]
    kind = "geometric"      # single | geometric | explicit
    q = 0.5                 # explicit: probabilities = [0.5, 0.3, 0.2]

    [model.service1]
    family = "exponential"  # deterministic | exponential | erlang | hyperexponential
    rho = 1.0               # or the native parameters (value / rate / k / weights, rates)

    [model.service2]
    family = "exponential"
    rho = 0.5

    [model.costs]
    kind = "linear"         # linear (c_hi, c_lo) | explicit (values)
    c_hi = 2.0
    c_lo = 1.0
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .asymptotics import HeavyTrafficParams
from .dist import BatchDistribution, ServiceDistribution
from .errors import ConfigError, DamError
from .model import DamModel
from .objective import CostProfile

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class RunConfig:
    model: Optional[DamModel]
    heavy_traffic: Optional[HeavyTrafficParams]
    options: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def opts(self, command: str) -> Dict[str, Any]:
        return self.options.get(command, {})


def _get(block: dict, key: str, path: str, kind=float, default=None, required=True):
    if key not in block:
        if required and default is None:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    val = block[key]
    try:
        if kind is float and isinstance(val, bool):
            raise TypeError
        if kind is list:
            if not isinstance(val, list):
                raise TypeError
            return [float(v) for v in val]
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}", f"expected {kind.__name__}, got {val!r}") from None


def _table(doc: dict, key: str, path: str) -> dict:
    val = doc.get(key)
    if not isinstance(val, dict):
        raise ConfigError(f"{path}.{key}" if path else key, "missing table")
    return val


def parse_batch(block: dict, path: str) -> BatchDistribution:
    kind = _get(block, "kind", path, str)
    if kind == "single":
        return BatchDistribution.single()
    if kind == "geometric":
        return BatchDistribution.geometric(_get(block, "q", path))
    if kind == "explicit":
        return BatchDistribution.explicit(_get(block, "probabilities", path, list))
    raise ConfigError(f"{path}.kind", f"unknown batch kind {kind!r}")


def parse_service(block: dict, path: str, lam: float, batch: BatchDistribution) -> ServiceDistribution:
    fam = _get(block, "family", path, str)
    has_rho = "rho" in block
    if fam == "deterministic":
        s = ServiceDistribution.deterministic(_get(block, "value", path, default=1.0 if has_rho else None))
    elif fam == "exponential":
        s = ServiceDistribution.exponential(_get(block, "rate", path, default=1.0 if has_rho else None))
    elif fam == "erlang":
        s = ServiceDistribution.erlang(
            _get(block, "k", path, int), _get(block, "rate", path, default=1.0 if has_rho else None)
        )
    elif fam == "hyperexponential":
        s = ServiceDistribution.hyperexponential(_get(block, "weights", path, list), _get(block, "rates", path, list))
    else:
        raise ConfigError(f"{path}.family", f"unknown service family {fam!r}")
    if has_rho:
        rho = _get(block, "rho", path)
        if not rho > 0:
            raise ConfigError(f"{path}.rho", "load must be positive")
        s = s.scaled(rho / s.rho(lam, batch))
    return s


def parse_costs(block: dict, path: str) -> CostProfile:
    kind = _get(block, "kind", path, str)
    if kind == "linear":
        return CostProfile.linear(_get(block, "c_hi", path), _get(block, "c_lo", path))
    if kind == "explicit":
        return CostProfile.explicit(_get(block, "values", path, list))
    raise ConfigError(f"{path}.kind", f"unknown cost kind {kind!r}")


def parse_model(block: dict) -> DamModel:
    path = "model"
    lam = _get(block, "lambda", path)
    batch = _wrap(lambda: parse_batch(_table(block, "batch", path), "model.batch"), "model.batch")
    s1 = _wrap(lambda: parse_service(_table(block, "service1", path), "model.service1", lam, batch), "model.service1")
    s2 = _wrap(lambda: parse_service(_table(block, "service2", path), "model.service2", lam, batch), "model.service2")
    costs = None
    if "costs" in block:
        costs = _wrap(lambda: parse_costs(_table(block, "costs", path), "model.costs"), "model.costs")
    L = _get(block, "L", path, int)
    j1 = _get(block, "j1", path, default=1.0)
    j2 = _get(block, "j2", path, default=1.0)
    return _wrap(lambda: DamModel(lam, batch, s1, s2, L, j1, j2, costs), path)


def _wrap(fn, path):
    try:
        return fn()
    except ConfigError:
        raise
    except DamError as exc:
        raise ConfigError(path, str(exc)) from None


def parse_heavy_traffic(block: dict) -> HeavyTrafficParams:
    path = "heavy_traffic"
    return _wrap(
        lambda: HeavyTrafficParams(
            es=_get(block, "es", path),
            es2=_get(block, "es2", path),
            rho12=_get(block, "rho12", path),
            rho2=_get(block, "rho2", path),
        ),
        path,
    )


def load_config(doc: dict) -> RunConfig:
    """Validate a parsed TOML document.

    ``[model]`` describes a full instance; ``[heavy_traffic]`` (``es``,
    ``es2``, ``rho12``, ``rho2``) may replace it for the limit-only commands.
    Any other top-level table holds options for the command of that name.
    """
    model = parse_model(doc["model"]) if "model" in doc else None
    ht = parse_heavy_traffic(doc["heavy_traffic"]) if "heavy_traffic" in doc else None
    options = {}
    for key, val in doc.items():
        if key in ("model", "heavy_traffic"):
            continue
        if not isinstance(val, dict):
            raise ConfigError(key, "expected a table of command options")
        options[key] = val
    return RunConfig(model=model, heavy_traffic=ht, options=options)


def read_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(path, f"cannot read config ({exc.strerror})") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(path, f"invalid TOML ({exc})") from None
    return load_config(doc)
