import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest

from largedam.cli import fmt, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, list(csv.reader(io.StringIO(out))), err


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_sweep_table_rows(capsys):
    code, rows, _ = run(capsys, "sweep", "--config", str(CONFIGS / "scenario_b.toml"))
    assert code == 0
    assert rows[0] == ["j2", "C_opt", "objective", "regime"]
    table = {float(r[0]): float(r[1]) for r in rows[1:]}
    assert table[1.06] == pytest.approx(0.200, abs=0.005)
    assert table[1.2] == pytest.approx(0.090, abs=0.005)
    assert table[1.34] == 0.0


def test_unstable_high_regime_exit_3(capsys, tmp_path):
    cfg = (CONFIGS / "geometric.toml").read_text().replace("rho = 0.5", "rho = 1.2")
    code, _, err = run(capsys, "analyze", "--config", write(tmp_path, cfg))
    assert code == 3
    assert "rho2 < 1" in err and "DomainError" in err


def test_analyze_mm1(capsys):
    code, rows, _ = run(capsys, "analyze", "--config", str(CONFIGS / "mm1.toml"))
    assert code == 0
    vals = {(r[0], r[1]): float(r[2]) for r in rows[1:]}
    rho = 0.5
    assert vals[("p1", "")] == pytest.approx(1 - rho, abs=1e-12)
    assert vals[("q", "1")] == pytest.approx(rho * (1 - rho) * (1 + rho), abs=1e-12)
    for i in range(2, 13):
        assert vals[("q", str(i))] == pytest.approx((1 - rho) * rho ** (i + 1), abs=1e-8)


def test_schema_errors_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "--config", write(tmp_path, "[model]\nlambda = 1.0\n"))
    assert code == 2 and "model" in err
    code, _, err = run(capsys, "analyze", "--config", write(tmp_path, "not toml ["))
    assert code == 2
    code, _, err = run(capsys, "analyze", "--config", str(tmp_path / "missing.toml"))
    assert code == 2
    bad = (CONFIGS / "mm1.toml").read_text().replace('family = "exponential"\nrate = 2.0\n\n[model.service2]',
                                                    'family = "weibull"\n\n[model.service2]')
    code, _, err = run(capsys, "analyze", "--config", write(tmp_path, bad))
    assert code == 2 and "model.service1.family" in err


def test_optimize_and_asymptotics(capsys):
    code, rows, err = run(capsys, "optimize", "--config", str(CONFIGS / "scenario_b.toml"))
    assert code == 0 and rows[1][0] == "upper" and "prescription" in err
    assert float(rows[1][1]) == pytest.approx(0.198, abs=0.002)
    code, rows, _ = run(capsys, "asymptotics", "--config", str(CONFIGS / "scenario_b.toml"))
    vals = {r[0]: float(r[1]) for r in rows[1:]}
    assert code == 0 and vals["D"] == pytest.approx(1.0) and vals["critical_L_p1"] == pytest.approx(0.5)


def test_heavy_traffic_only_config(capsys, tmp_path):
    cfg = """
[heavy_traffic]
es = 1.0
es2 = 1.0
rho12 = 1.0
rho2 = 0.5

[optimize]
j1 = 1.0
j2 = 1.2
costs = { kind = "linear", c_hi = 2.0, c_lo = 1.0 }
"""
    code, rows, _ = run(capsys, "optimize", "--config", write(tmp_path, cfg))
    assert code == 0 and float(rows[1][1]) == pytest.approx(0.090, abs=0.005)


def test_simulate_reproducible(capsys, tmp_path):
    cfg = (CONFIGS / "geometric.toml").read_text().replace("min_events = 1000000", "min_events = 20000")
    path = write(tmp_path, cfg)
    out = tmp_path / "a.csv"
    assert main(["simulate", "--config", path, "--seed", "5", "--out", str(out)]) == 0
    first = out.read_text()
    assert main(["simulate", "--config", path, "--seed", "5", "--out", str(out)]) == 0
    assert out.read_text() == first
    assert first.splitlines()[0] == "quantity,index,estimate,std_error"


def test_validate(capsys, tmp_path):
    code, rows, _ = run(capsys, "validate", "--config", str(CONFIGS / "geometric.toml"))
    assert code == 0 and all(r[4] == "true" for r in rows[1:])
    strict = (CONFIGS / "geometric.toml").read_text() + "\n[validate]\nz_max = 1e-9\nmin_events = 20000\n"
    code, _, err = run(capsys, "validate", "--config", write(tmp_path, strict))
    assert code == 4 and "validation failed" in err


def test_number_format():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(2.0) == "2" and fmt(7) == "7" and fmt(True) == "true"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "largedam", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sweep" in proc.stdout
