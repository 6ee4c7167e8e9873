"""Experiment harness: config files, run loop, outputs, blow-up guard.

Configs are sectioned key = value files ([grid] [model] [scheme] [time]
[initial] [outputs], optional [guard]).  A run writes diagnostics.csv,
KPS1 snapshots and metadata.json into the output directory, and reports a
terminal blow-up/divergence event instead of crashing on PicardDiverged.
"""

import configparser
import json
import time as _time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import analytic, diagnostics, snapshots
from .errors import ParseError, PicardDiverged, ValidationError
from .field2d import Field, Grid2D
from .stepper import (GmresParams, ModelParams, PicardParams, SchemeConfig,
                      TimeParams, make_stepper)

EXPERIMENTS = {
    "zaitsev-accuracy": "zaitsev-accuracy.cfg",
    "gaussian-conservation": "gaussian-conservation.cfg",
    "zaitsev-perturbation": "zaitsev-perturbation.cfg",
    "line-instability": "line-instability.cfg",
    "blowup": "blowup.cfg",
}


def experiment_config_path(name):
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; "
                              f"known: {', '.join(sorted(EXPERIMENTS))}")
    return resources.files("kplab.configs") / EXPERIMENTS[name]


@dataclass
class GuardPolicy:
    linf_ceiling: float = None  # default set to 1e4 * initial linf at run start
    ceiling_factor: float = 1e4


@dataclass
class OutputSpec:
    diag_every: int = 10
    snapshot_every: int = 100
    out_dir: str = "runs/out"


@dataclass
class ExperimentConfig:
    experiment: str
    grid: Grid2D
    model: ModelParams
    scheme: SchemeConfig
    time: TimeParams
    initial_name: str
    initial_params: dict
    outputs: OutputSpec
    guard: GuardPolicy = field(default_factory=GuardPolicy)


def _is_pow2(n):
    return n >= 2 and n & (n - 1) == 0


def _get(cp, section, key, conv, default=None, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ValidationError(f"{section}.{key}")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as e:
        raise ValidationError(f"{section}.{key}: {e}") from e


def parse_config(path):
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh, source=str(path))
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}")
    except configparser.Error as e:
        line = getattr(e, "lineno", None)
        raise ParseError(str(e), line=line)

    for sec in ("grid", "model", "scheme", "time", "initial"):
        if not cp.has_section(sec):
            raise ValidationError(f"missing section [{sec}]")

    grid = Grid2D(
        Lx=_get(cp, "grid", "lx", float, required=True),
        Ly=_get(cp, "grid", "ly", float, required=True),
        Nx=_get(cp, "grid", "nx", int, required=True),
        Ny=_get(cp, "grid", "ny", int, required=True),
        bc_x=_get(cp, "grid", "bc_x", str, "periodic"),
        bc_y=_get(cp, "grid", "bc_y", str, "periodic"),
    )
    model = ModelParams(
        p=_get(cp, "model", "p", int, 1),
        lam=_get(cp, "model", "lambda", float, -1.0),
    )
    scheme = SchemeConfig(
        kind=_get(cp, "scheme", "kind", str, required=True),
        order=_get(cp, "scheme", "order", int, 6),
        picard=PicardParams(
            tol=_get(cp, "scheme", "picard_tol", float, 1e-12),
            max_iter=_get(cp, "scheme", "picard_max_iter", int, 50),
        ),
        gmres=GmresParams(
            rel_tol=_get(cp, "scheme", "gmres_rel_tol", float, 1e-10),
            max_iter=_get(cp, "scheme", "gmres_max_iter", int, 500),
            restart=_get(cp, "scheme", "gmres_restart", int, 60),
        ),
        solver=_get(cp, "scheme", "solver", str, "direct"),
    )
    tp = TimeParams(
        dt=_get(cp, "time", "dt", float, required=True),
        t_end=_get(cp, "time", "t_end", float),
        n_steps=_get(cp, "time", "n_steps", int),
    )
    initial_name = _get(cp, "initial", "state", str, required=True)
    initial_params = {}
    for key, raw in cp.items("initial"):
        if key == "state":
            continue
        try:
            initial_params[key] = float(raw)
        except ValueError:
            initial_params[key] = raw
    outputs = OutputSpec(
        diag_every=_get(cp, "outputs", "diag_every", int, 10) if cp.has_section("outputs") else 10,
        snapshot_every=_get(cp, "outputs", "snapshot_every", int, 100) if cp.has_section("outputs") else 100,
        out_dir=_get(cp, "outputs", "out_dir", str, "runs/out") if cp.has_section("outputs") else "runs/out",
    )
    guard = GuardPolicy()
    if cp.has_section("guard"):
        guard.ceiling_factor = _get(cp, "guard", "linf_ceiling_factor", float, 1e4)
    name = _get(cp, "experiment", "name", str, path.stem) if cp.has_section("experiment") else path.stem

    cfg = ExperimentConfig(name, grid, model, scheme, tp, initial_name,
                           initial_params, outputs, guard)
    _validate(cfg)
    return cfg


def _validate(cfg):
    g, scheme = cfg.grid, cfg.scheme
    if scheme.kind == "compact" and g.Nx % 2 == 0:
        raise ValidationError("grid.nx: compact scheme needs odd Nx "
                              "(antiderivative closure)")
    if scheme.kind in ("spectral", "mixed") and not _is_pow2(g.Nx):
        raise ValidationError("grid.nx: spectral x-direction needs a power of two")
    if scheme.kind == "spectral" and g.Ny % 2 != 0:
        raise ValidationError("grid.ny: spectral y-direction needs even Ny")
    if cfg.time.dt <= 0:
        raise ValidationError("time.dt")


def blowup_guard(row, policy):
    """Return None to continue, or a halt reason string."""
    vals = (row.mass, row.l2, row.linf, row.energy)
    if not all(np.isfinite(v) for v in vals):
        return "nonfinite"
    if policy.linf_ceiling is not None and row.linf > policy.linf_ceiling:
        return "blow-up"
    return None


def _zaitsev_metadata(cfg):
    if "zaitsev" not in cfg.initial_name:
        return None
    p = cfg.initial_params
    zp = analytic.zaitsev_params(p["alpha"], p["delta"], p.get("beta_override"))
    return {"alpha": zp.alpha, "delta": zp.delta, "beta": zp.beta,
            "omega": zp.omega, "c": zp.c}


def run_experiment(cfg, quiet=False):
    """Execute a configured run; returns the process exit status (0 or 3)."""
    out_dir = Path(cfg.outputs.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    f = analytic.initial_state(cfg.initial_name, cfg.grid, cfg.initial_params)
    st = make_stepper(cfg.grid, cfg.model, cfg.scheme, cfg.time.dt)
    n_steps = cfg.time.steps()
    policy = cfg.guard
    if policy.linf_ceiling is None:
        policy.linf_ceiling = policy.ceiling_factor * max(
            diagnostics.linf_norm(f), 1e-300)

    csv_path = out_dir / "diagnostics.csv"
    terminal = None
    t = 0.0
    wall0 = _time.time()
    with open(csv_path, "w") as csv:
        csv.write(diagnostics.DiagnosticsRow.CSV_HEADER + "\n")

        def emit(step, rep=None):
            row = diagnostics.measure(
                f, step, t, cfg.model, st.ops,
                picard_iters=rep.picard_iters if rep else 0,
                gmres_iters=rep.gmres_total_iters if rep else 0)
            csv.write(row.csv_line() + "\n")
            return row

        row = emit(0)
        snapshots.write_snapshot(f, t, out_dir / "snap_000000.kps")
        reason = blowup_guard(row, policy)
        step = 0
        while step < n_steps and reason is None:
            step += 1
            try:
                vals, rep = st.step(f.values)
            except PicardDiverged as e:
                terminal = {"event": "divergence", "time": t, "step": step,
                            "detail": str(e)}
                if e.last_iterate is not None and np.isfinite(e.last_iterate).all():
                    f = Field(cfg.grid, e.last_iterate)
                break
            f = Field(cfg.grid, vals)
            t = step * cfg.time.dt
            if step % cfg.outputs.diag_every == 0 or step == n_steps:
                row = emit(step, rep)
                reason = blowup_guard(row, policy)
                if reason is not None:
                    terminal = {"event": reason, "time": t, "step": step}
            if step % cfg.outputs.snapshot_every == 0:
                snapshots.write_snapshot(f, t, out_dir / f"snap_{step:06d}.kps")

    if np.isfinite(f.values).all():
        snapshots.write_snapshot(f, t, out_dir / "snap_final.kps")
    meta = {
        "experiment": cfg.experiment,
        "kplab_version": "0.1.0",
        "grid": asdict(cfg.grid),
        "model": asdict(cfg.model),
        "scheme": {"kind": cfg.scheme.kind, "order": cfg.scheme.order,
                   "solver": cfg.scheme.solver,
                   "picard": asdict(cfg.scheme.picard),
                   "gmres": asdict(cfg.scheme.gmres)},
        "time": {"dt": cfg.time.dt, "n_steps": n_steps},
        "initial": {"state": cfg.initial_name, **cfg.initial_params},
        "zaitsev_derived": _zaitsev_metadata(cfg),
        "terminal_event": terminal,
        "wall_seconds": round(_time.time() - wall0, 3),
    }
    with open(out_dir / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, default=str)
    if not quiet:
        status = terminal["event"] if terminal else "completed"
        print(f"[{cfg.experiment}] {status} at t={t:.6g} "
              f"({meta['wall_seconds']}s) -> {out_dir}")
    return 3 if terminal else 0


def run_convergence(cfg, refine="y", sizes=None):
    """Grid-refinement sweep on an exact-solution (Zaitsev) config.

    Returns (samples, slope) with samples = [(h, l2_error_at_t_end), ...].
    """
    if "zaitsev" not in cfg.initial_name:
        raise ValidationError("convergence sweeps need a zaitsev initial state")
    p = cfg.initial_params
    zp = analytic.zaitsev_params(p["alpha"], p["delta"], p.get("beta_override"))
    sizes = sizes or ([100, 150, 200] if refine == "y" else [151, 301, 601])
    samples = []
    for n in sizes:
        g0 = cfg.grid
        grid = Grid2D(g0.Lx, g0.Ly, n if refine == "x" else g0.Nx,
                      n if refine == "y" else g0.Ny, g0.bc_x, g0.bc_y)
        st = make_stepper(grid, cfg.model, cfg.scheme, cfg.time.dt)
        f = analytic.initial_state(cfg.initial_name, grid, cfg.initial_params)
        # Galilean mean-free frame: subtracting the mean constant c0 and
        # shifting x by c0*t maps the wave to an exact zero-line-mass
        # solution, which is what the mass-zero-projecting schemes evolve.
        c0 = float(np.mean(f.values))
        f = Field(grid, f.values - c0)
        n_steps = cfg.time.steps()
        for _ in range(n_steps):
            vals, _rep = st.step(f.values)
            f = Field(grid, vals)
        t_end = n_steps * cfg.time.dt
        err = diagnostics.l2_error(
            f, lambda X, Y, t: analytic.zaitsev(zp, X + c0 * t, Y, t) - c0,
            t_end)
        h = grid.hx if refine == "x" else grid.hy
        samples.append((h, err))
    slope = diagnostics.convergence_order(samples)
    return samples, slope
