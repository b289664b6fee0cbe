"""Command-line front end.

Exit status: 0 success, 2 configuration error, 3 numerical or domain error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .asymptotics import (
    HeavyTrafficParams,
    Regime,
    Side,
    find_root,
    limit_p,
    limit_q,
    lower_diffusion_limit_p,
    root_expansion,
)
from .config import RunConfig, read_config
from .control import C_MAX, EPS_LOWER, TOL_DECIDE, solve_control, sweep_j2
from .errors import ConfigError, DamError, DomainError
from .objective import exact_objective
from .sim import replicate
from .stationary import stationary_distribution
from .takacs import busy_table, linear_reps

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4


def fmt(v) -> str:
    """Numbers with 12 significant digits; other values verbatim."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return "" if v is None else str(v)


def _csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _need_model(cfg: RunConfig):
    if cfg.model is None:
        raise ConfigError("model", "this command needs a [model] table")
    if cfg.model.rho2 >= 1.0:
        raise DomainError(f"the high-regime load must obey rho2 < 1 (got rho2={cfg.model.rho2:.6g})")
    return cfg.model


def _heavy_traffic(cfg: RunConfig) -> HeavyTrafficParams:
    if cfg.heavy_traffic is not None:
        return cfg.heavy_traffic
    model = _need_model(cfg)
    return HeavyTrafficParams.from_model(model.with_rho(rho1=1.0))


def _costs_and_damages(cfg: RunConfig, opts):
    model = cfg.model
    costs = model.costs if model is not None and model.costs is not None else None
    if "costs" in opts:
        from .config import parse_costs

        costs = parse_costs(opts["costs"], "costs")
    if costs is None:
        raise ConfigError("model.costs", "a cost profile is required")
    j1 = float(opts.get("j1", model.j1 if model is not None else 1.0))
    j2 = float(opts.get("j2", model.j2 if model is not None else 1.0))
    return costs, j1, j2


def _control_kwargs(opts):
    return dict(
        C_max=float(opts.get("C_max", C_MAX)),
        eps=float(opts.get("eps", EPS_LOWER)),
        tol_decide=float(opts.get("tol_decide", TOL_DECIDE)),
    )


def cmd_analyze(cfg: RunConfig, args) -> str:
    model = _need_model(cfg)
    dist = stationary_distribution(model)
    rows = [("rho1", "", model.rho1), ("rho2", "", model.rho2), ("p1", "", dist.p1), ("p2", "", dist.p2)]
    rows += [("q", i + 1, v) for i, v in enumerate(dist.q)]
    if model.costs is not None:
        obj = exact_objective(model, dist)
        rows += [
            ("J", "", obj.value),
            ("J_damage_lower", "", obj.damage_lower),
            ("J_damage_upper", "", obj.damage_upper),
            ("J_water", "", obj.water_cost),
        ]
    return _csv(["quantity", "index", "value"], rows)


def cmd_asymptotics(cfg: RunConfig, args) -> str:
    opts = cfg.opts("asymptotics")
    params = _heavy_traffic(cfg)
    C = float(opts.get("C", 1.0))
    L_ref = int(opts.get("L_ref", cfg.model.L if cfg.model is not None else 1000))
    rows = [("D", params.D), ("x", params.with_C(C).x), ("C", C)]
    if cfg.model is not None:
        model = cfg.model
        rows.append(("rho1", model.rho1))
        if model.rho1 > 1:
            rows.append(("phi", find_root(model, Side.BELOW_ONE).value))
        elif model.rho1 < 1:
            rows.append(("tau", find_root(model, Side.ABOVE_ONE).value))
    for d in opts.get("deltas", [0.04, 0.02, 0.01]):
        rows.append((f"phi_expansion[delta={fmt(float(d))}]", root_expansion(params, float(d), Side.BELOW_ONE)))
        rows.append((f"tau_expansion[delta={fmt(float(d))}]", root_expansion(params, float(d), Side.ABOVE_ONE)))
    crit = limit_p(params)
    rows += [("critical_L_p1", crit.p1), ("critical_L_p2", crit.p2)]
    if C > 0:
        for regime in (Regime.UPPER, Regime.LOWER):
            lp = limit_p(params.with_C(C, regime))
            rows += [(f"{regime.value}_p1_over_delta", lp.p1), (f"{regime.value}_p2_over_delta", lp.p2)]
        diff = lower_diffusion_limit_p(params.with_C(C, Regime.LOWER))
        rows += [("lower_diffusion_p1_over_delta", diff.p1), ("lower_diffusion_p2_over_delta", diff.p2)]
    for regime in (Regime.CRITICAL, Regime.UPPER, Regime.LOWER):
        if regime is not Regime.CRITICAL and not C > 0:
            continue
        p = params.with_C(C, regime)
        p = HeavyTrafficParams(p.es, p.es2, p.rho12, p.rho2, p.C, p.regime, L_ref)
        for j in range(3):
            rows.append((f"{regime.value}_q_limit[j={j}]", limit_q(p, j)))
    return _csv(["quantity", "value"], rows)


def cmd_optimize(cfg: RunConfig, args) -> str:
    opts = cfg.opts("optimize")
    params = _heavy_traffic(cfg)
    costs, j1, j2 = _costs_and_damages(cfg, opts)
    sol = solve_control(params, costs, j1, j2, **_control_kwargs(opts))
    print(
        f"regime {sol.regime.value}: C = {sol.C_opt:.6g}, limit objective {sol.objective:.6g} "
        f"(critical {sol.j_crit:.6g}); prescription {sol.prescription}",
        file=sys.stderr,
    )
    return _csv(
        ["regime", "C_opt", "objective", "J_crit", "rho1_prescription"],
        [(sol.regime.value, sol.C_opt, sol.objective, sol.j_crit, sol.prescription)],
    )


def _j2_grid(opts) -> List[float]:
    if "j2_values" in opts:
        return [float(v) for v in opts["j2_values"]]
    start = float(opts.get("j2_start", 1.06))
    stop = float(opts.get("j2_stop", 1.34))
    step = float(opts.get("j2_step", 0.02))
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def cmd_sweep(cfg: RunConfig, args) -> str:
    opts = cfg.opts("sweep")
    params = _heavy_traffic(cfg)
    costs, j1, _ = _costs_and_damages(cfg, opts)
    rows = sweep_j2(params, costs, j1, _j2_grid(opts), **_control_kwargs(opts))
    return _csv(["j2", "C_opt", "objective", "regime"], [(r.j2, r.C_opt, r.objective, r.regime.value) for r in rows])


def _simulate(cfg: RunConfig, opts, seed):
    model = _need_model(cfg)
    return replicate(
        model,
        n_reps=int(opts.get("n_reps", 8)),
        base_seed=seed,
        min_events=int(opts.get("min_events", 1_000_000)),
        warmup_fraction=float(opts.get("warmup_fraction", 0.2)),
    )


def cmd_simulate(cfg: RunConfig, args) -> str:
    res = _simulate(cfg, cfg.opts("simulate"), args.seed)
    rows = [
        ("p1", "", res.p1_hat, res.p1_se),
        ("p2_service", "", res.p2_service_hat, res.p2_service_se),
        ("p2_level", "", res.p2_level_hat, res.p2_level_se),
    ]
    rows += [("q_level", i + 1, v, s) for i, (v, s) in enumerate(zip(res.q_hat, res.q_se))]
    rows += [("q_start", i + 1, v, s) for i, (v, s) in enumerate(zip(res.q_start_hat, res.q_start_se))]
    rows += [
        ("cycle_served", "", res.cycle_served_mean, res.cycle_served_se),
        ("cycle_served_normal", "", res.cycle_served1_mean, res.cycle_served1_se),
        ("events", "", res.events, ""),
        ("busy_cycles", "", res.busy_cycles, ""),
        ("replications", "", res.n_reps, ""),
        ("seed", "", res.seed, ""),
        ("rng", "", res.rng, ""),
    ]
    return _csv(["quantity", "index", "estimate", "std_error"], rows)


def cmd_validate(cfg: RunConfig, args):
    opts = cfg.opts("validate")
    model = _need_model(cfg)
    z_max = float(opts.get("z_max", 4.0))
    checks = []

    def add(name, value, target, tol, ok=None):
        if ok is None:
            ok = abs(value - target) <= tol
        checks.append((name, value, target, tol, bool(ok)))

    table = busy_table(model)
    dist = stationary_distribution(model, table)
    add("normalization", dist.total, 1.0, 1e-9)
    reps = linear_reps(table, model)
    add("wald_balance", model.lam * model.batch.m1 * reps.T + model.batch.m1, reps.nu, 1e-9 * max(1.0, reps.nu))
    add("truncation_identity", table.nu[-1] - table.nu_cond[-1], model.batch.survival(model.L), 1e-12)

    sim = _simulate(cfg, opts, args.seed)
    for name, est, se, exact in (
        ("sim_p1", sim.p1_hat, sim.p1_se, dist.p1),
        ("sim_p2_service", sim.p2_service_hat, sim.p2_service_se, dist.p2),
    ):
        add(name, est, exact, z_max * se)
    for i, (est, se) in enumerate(zip(sim.q_start_hat, sim.q_start_se)):
        add(f"sim_q[{i + 1}]", est, dist.q[i], z_max * se)
    add("sim_busy_cycle_served", sim.cycle_served_mean, reps.nu, z_max * sim.cycle_served_se)

    L_lim = int(opts.get("limit_L", 400))
    crit = model.with_rho(rho1=1.0, L=L_lim)
    params = HeavyTrafficParams.from_model(crit)
    d = stationary_distribution(crit)
    target = limit_p(params).p1
    add("limit_L_p1", L_lim * d.p1, target, 0.1 * target)

    out = _csv(["check", "value", "target", "tolerance", "passed"], checks)
    failed = [c[0] for c in checks if not c[4]]
    if failed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
    return out, (EXIT_VALIDATION if failed else EXIT_OK)


COMMANDS = {
    "analyze": (cmd_analyze, "exact p1, p2, q and objective"),
    "asymptotics": (cmd_asymptotics, "roots, expansions and limit values"),
    "optimize": (cmd_optimize, "optimal heavy-traffic control"),
    "sweep": (cmd_sweep, "optimal C over a grid of j2 values"),
    "simulate": (cmd_simulate, "replicated discrete-event simulation"),
    "validate": (cmd_validate, "exact-vs-simulation and exact-vs-limit checks"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="largedam", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="base seed for simulation (default 0)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        cfg = read_config(args.config)
        result = fn(cfg, args)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DamError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TypeError, ValueError) as exc:
        print(f"error: ConfigError: bad command option ({exc})", file=sys.stderr)
        return EXIT_CONFIG
    text, status = result if isinstance(result, tuple) else (result, EXIT_OK)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
