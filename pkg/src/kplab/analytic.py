"""Exact solutions and initial data for the KP experiments.

Zaitsev y-periodic traveling wave, KdV line-soliton, Gaussian-derivative
profiles and their perturbed variants, plus a registry of named initial
states sampled onto a Grid2D.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ExistenceViolated, MissingParam, UnknownState
from .field2d import Field


@dataclass(frozen=True)
class ZaitsevParams:
    alpha: float
    delta: float
    beta: float
    omega: float
    c: float


def zaitsev_params(alpha, delta, beta_override=None):
    """Derive (beta, omega, c) from (alpha, delta).

    beta_override replaces the derived beta (then the profile is no longer an
    exact solution, only an initial datum).
    """
    if alpha <= 0 or delta <= 0:
        raise ValueError("alpha and delta must be positive")
    if 3.0 * alpha**4 >= delta**2:
        raise ExistenceViolated(
            f"3*alpha^4 = {3 * alpha**4:.6g} must be < delta^2 = {delta**2:.6g}")
    beta = np.sqrt((delta**2 - 3.0 * alpha**4) / delta**2)
    if beta_override is not None:
        beta = float(beta_override)
    omega = (delta**2 + alpha**4) / alpha
    return ZaitsevParams(alpha, delta, beta, omega, omega / alpha)


def zaitsev(params, x, y, t=0.0):
    """12 a^2 (1 - b cosh(ax - wt) cos(dy)) / (cosh(ax - wt) - b cos(dy))^2."""
    th = params.alpha * np.asarray(x) - params.omega * t
    ch = np.cosh(th)
    cs = np.cos(params.delta * np.asarray(y))
    den = ch - params.beta * cs
    return 12.0 * params.alpha**2 * (1.0 - params.beta * ch * cs) / den**2


@dataclass(frozen=True)
class LineSolitonParams:
    p: int
    c: float

    @property
    def amplitude(self):
        return ((self.p + 1) * (self.p + 2) * self.c / 2.0) ** (1.0 / self.p)


def line_soliton(params, x, t=0.0):
    """KdV soliton amplitude * sech^(2/p)(p sqrt(c)/2 (x - ct))."""
    arg = 0.5 * params.p * np.sqrt(params.c) * (np.asarray(x) - params.c * t)
    return params.amplitude * np.cosh(arg) ** (-2.0 / params.p)


def _need(params, *keys):
    out = []
    for k in keys:
        if k not in params:
            raise MissingParam(f"initial state parameter {k!r} missing")
        out.append(params[k])
    return out[0] if len(out) == 1 else out


def initial_state(name, grid, params=None):
    """Sample a named initial datum onto the grid.

    Names: zaitsev, gaussian-packet, perturbed-zaitsev, perturbed-line,
    gaussian-xx.  See the shipped experiment configs for parameter sets.
    """
    params = dict(params or {})
    X, Y = grid.mesh()
    if name == "zaitsev":
        alpha, delta = _need(params, "alpha", "delta")
        zp = zaitsev_params(alpha, delta, params.get("beta_override"))
        vals = zaitsev(zp, X, Y, params.get("t", 0.0))
    elif name == "gaussian-packet":
        A, wx, wy = _need(params, "amplitude", "wx", "wy")
        vals = A * (1.0 - 2.0 * wx * X**2) * np.exp(-wx * X**2 - wy * Y**2)
    elif name == "perturbed-zaitsev":
        alpha, delta = _need(params, "alpha", "delta")
        zp = zaitsev_params(alpha, delta, params.get("beta_override"))
        xs = X + grid.Lx / 2.0
        vals = zaitsev(zp, xs, Y, 0.0) + 6.0 * xs * np.exp(-xs**2 - Y**2)
    elif name == "perturbed-line":
        amp = params.get("amplitude", 12.0)
        eps = params.get("eps", 0.4)
        vals = amp * np.cosh(X + eps * np.cos(2.0 * Y / grid.Ly)) ** -2.0
    elif name == "gaussian-xx":
        pref = params.get("prefactor", 3.0)
        vals = pref * (4.0 * X**2 - 2.0) * np.exp(-(X**2 + Y**2))
    else:
        raise UnknownState(f"unknown initial state {name!r}")
    if not np.isfinite(vals).all():
        raise ValueError(f"initial state {name!r} produced non-finite values")
    return Field(grid, vals)
