"""Config parsing, the blow-up guard, run outputs and the CLI surface."""

import json
import subprocess

import numpy as np
import pytest

from kplab import cli, runner, snapshots
from kplab.diagnostics import DiagnosticsRow
from kplab.errors import ParseError, ValidationError
from kplab.runner import (EXPERIMENTS, GuardPolicy, blowup_guard,
                          experiment_config_path, parse_config, run_experiment)

MINIMAL = """
[grid]
lx = 5
ly = 2
nx = 33
ny = 8

[model]
p = 1
lambda = -1

[scheme]
kind = compact
order = 4

[time]
dt = 1e-3
n_steps = {n_steps}

[initial]
state = gaussian-xx
prefactor = 1

[outputs]
diag_every = 1
snapshot_every = 2
out_dir = {out_dir}
"""


def _write_cfg(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -------------------------------------------------------------------- parsing

def test_registry_complete():
    assert set(EXPERIMENTS) == {"zaitsev-accuracy", "gaussian-conservation",
                                "zaitsev-perturbation", "line-instability",
                                "blowup"}
    for name in EXPERIMENTS:
        cfg = parse_config(experiment_config_path(name))
        assert cfg.time.dt > 0


def test_shipped_zaitsev_accuracy_values():
    cfg = parse_config(experiment_config_path("zaitsev-accuracy"))
    assert cfg.grid.Lx == 89.6 and cfg.grid.Ly == 21.0
    assert cfg.initial_params["alpha"] == 0.0174
    assert cfg.initial_params["delta"] == pytest.approx(np.pi / 21.0)
    assert cfg.time.dt == 1e-4
    assert cfg.scheme.kind == "spectral"


def test_shipped_blowup_values():
    cfg = parse_config(experiment_config_path("blowup"))
    assert cfg.model.p == 2 and cfg.model.lam == -1.0
    assert (cfg.grid.Nx, cfg.grid.Ny) == (201, 50)
    assert cfg.scheme.kind == "compact" and cfg.scheme.order == 6


def test_parse_minimal(tmp_path):
    p = _write_cfg(tmp_path, MINIMAL.format(n_steps=3, out_dir=tmp_path / "o"))
    cfg = parse_config(p)
    assert cfg.grid.Nx == 33
    assert cfg.experiment == "exp"
    assert cfg.initial_params == {"prefactor": 1.0}


def test_missing_dt_names_key(tmp_path):
    text = MINIMAL.format(n_steps=3, out_dir="o").replace("dt = 1e-3\n", "")
    with pytest.raises(ValidationError) as exc:
        parse_config(_write_cfg(tmp_path, text))
    assert "time.dt" in str(exc.value)


def test_missing_file_and_bad_syntax(tmp_path):
    with pytest.raises(ParseError):
        parse_config(tmp_path / "nope.cfg")
    with pytest.raises(ParseError):
        parse_config(_write_cfg(tmp_path, "not a config\n[grid"))


def test_validation_odd_nx_for_compact(tmp_path):
    text = MINIMAL.format(n_steps=3, out_dir="o").replace("nx = 33", "nx = 32")
    with pytest.raises(ValidationError) as exc:
        parse_config(_write_cfg(tmp_path, text))
    assert "nx" in str(exc.value)


def test_validation_pow2_for_spectral(tmp_path):
    text = MINIMAL.format(n_steps=3, out_dir="o").replace("kind = compact",
                                                          "kind = spectral")
    with pytest.raises(ValidationError):
        parse_config(_write_cfg(tmp_path, text))


# ---------------------------------------------------------------------- guard

def _row(**kw):
    base = dict(step=0, time=0.0, mass=0.0, l2=1.0, linf=1.0, energy=0.0,
                max_xline_mass=0.0)
    base.update(kw)
    return DiagnosticsRow(**base)


def test_guard_continue():
    assert blowup_guard(_row(), GuardPolicy(linf_ceiling=100.0)) is None


def test_guard_nonfinite():
    assert blowup_guard(_row(l2=np.nan), GuardPolicy(linf_ceiling=100.0)) == "nonfinite"
    assert blowup_guard(_row(energy=np.inf), GuardPolicy(linf_ceiling=100.0)) == "nonfinite"


def test_guard_ceiling():
    assert blowup_guard(_row(linf=101.0), GuardPolicy(linf_ceiling=100.0)) == "blow-up"


# ----------------------------------------------------------------------- runs

def test_run_writes_outputs(tmp_path):
    out = tmp_path / "out"
    p = _write_cfg(tmp_path, MINIMAL.format(n_steps=4, out_dir=out))
    status = run_experiment(parse_config(p), quiet=True)
    assert status == 0
    lines = (out / "diagnostics.csv").read_text().strip().splitlines()
    assert lines[0] == DiagnosticsRow.CSV_HEADER
    assert len(lines) == 1 + 5  # step 0 plus 4 steps at diag_every=1
    assert (out / "snap_000000.kps").exists()
    assert (out / "snap_000002.kps").exists()
    assert (out / "snap_final.kps").exists()
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["terminal_event"] is None
    assert meta["time"]["n_steps"] == 4
    f, t = snapshots.read_snapshot(out / "snap_final.kps")
    assert t == pytest.approx(4e-3)
    assert f.is_finite()


def test_zero_state_run_all_zero(tmp_path):
    out = tmp_path / "out0"
    text = MINIMAL.format(n_steps=3, out_dir=out).replace("prefactor = 1",
                                                          "prefactor = 0")
    run_experiment(parse_config(_write_cfg(tmp_path, text)), quiet=True)
    rows = (out / "diagnostics.csv").read_text().strip().splitlines()[1:]
    for row in rows:
        vals = [float(v) for v in row.split(",")[2:7]]
        assert vals == [0.0] * 5


def test_determinism(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        p = _write_cfg(tmp_path, MINIMAL.format(n_steps=4, out_dir=out),
                       name=f"{tag}.cfg")
        run_experiment(parse_config(p), quiet=True)
        outs.append(out)
    a, b = outs
    assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()
    assert (a / "snap_final.kps").read_bytes() == (b / "snap_final.kps").read_bytes()


def test_zaitsev_metadata_recorded(tmp_path):
    out = tmp_path / "z"
    text = MINIMAL.format(n_steps=1, out_dir=out).replace(
        "state = gaussian-xx\nprefactor = 1",
        "state = zaitsev\nalpha = 0.75\ndelta = 1.0")
    run_experiment(parse_config(_write_cfg(tmp_path, text)), quiet=True)
    meta = json.loads((out / "metadata.json").read_text())
    z = meta["zaitsev_derived"]
    assert z["omega"] == pytest.approx((1.0 + 0.75**4) / 0.75)
    assert z["c"] == pytest.approx(z["omega"] / 0.75)


# ------------------------------------------------------------------------ cli

def test_cli_list_experiments(capsys):
    assert cli.main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_cli_run_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "cli-out"
    p = _write_cfg(tmp_path, MINIMAL.format(n_steps=2, out_dir=out))
    assert cli.main(["run", "--config", str(p)]) == 0
    assert (out / "metadata.json").exists()
    # config error -> exit 2
    bad = _write_cfg(tmp_path, MINIMAL.format(n_steps=2, out_dir=out)
                     .replace("nx = 33", "nx = 32"), name="bad.cfg")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG
    capsys.readouterr()


def test_cli_out_dir_override(tmp_path):
    p = _write_cfg(tmp_path, MINIMAL.format(n_steps=2, out_dir=tmp_path / "x"))
    other = tmp_path / "override"
    assert cli.main(["run", "--config", str(p), "--out-dir", str(other)]) == 0
    assert (other / "diagnostics.csv").exists()


def test_cli_entry_point_installed():
    proc = subprocess.run(["kp", "list-experiments"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "blowup" in proc.stdout


def test_cli_convergence_smoke(tmp_path, capsys):
    cfg = tmp_path / "conv.cfg"
    cfg.write_text("""
[grid]
lx = 40
ly = 3.14159265358979
nx = 64
ny = 16

[model]
p = 1
lambda = -1

[scheme]
kind = mixed
order = 4

[time]
dt = 1e-3
n_steps = 20

[initial]
state = zaitsev
alpha = 0.75
delta = 1.0
""")
    assert cli.main(["convergence", "--config", str(cfg), "--refine", "y",
                     "--sizes", "16", "24", "32"]) == 0
    out = capsys.readouterr().out
    assert "measured order" in out
