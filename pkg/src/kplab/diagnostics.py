"""Conserved-quantity functionals, error norms and convergence-order fits.

All integrals are uniform-weight Riemann sums on the periodic grid
(hx * hy quadrature weights).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSamples
from .field2d import Field, apply_along_x, apply_along_y


@dataclass
class DiagnosticsRow:
    step: int
    time: float
    mass: float
    l2: float
    linf: float
    energy: float
    max_xline_mass: float
    picard_iters: int = 0
    gmres_iters: int = 0

    CSV_HEADER = "step,time,mass,l2,linf,energy,max_xline_mass,picard_iters,gmres_iters"

    def csv_line(self):
        return (f"{self.step},{self.time:.12g},{self.mass:.16e},{self.l2:.16e},"
                f"{self.linf:.16e},{self.energy:.16e},{self.max_xline_mass:.16e},"
                f"{self.picard_iters},{self.gmres_iters}")


def mass(f):
    return float(np.sum(f.values)) * f.grid.hx * f.grid.hy


def l2_norm(f):
    return float(np.sqrt(np.sum(f.values**2) * f.grid.hx * f.grid.hy))


def linf_norm(f):
    return float(np.max(np.abs(f.values)))


def max_xline_mass(f):
    """Largest |sum_x u * hx| over the y-lines (mass-zero constraint monitor)."""
    return float(np.max(np.abs(np.sum(f.values, axis=1))) * f.grid.hx)


def energy(f, model, ops):
    """Quadrature of u^(p+2)/((p+1)(p+2)) - u_x^2/2 + lam (dx^-1 u_y)^2 / 2.

    ops must provide the run's own discretization: ops.dx_of(field),
    ops.dy_of(field), ops.antider_of(field).
    """
    p, lam = model.p, model.lam
    u = f.values
    ux = ops.dx_of(f).values
    wy = ops.antider_of(ops.dy_of(f)).values
    integrand = u ** (p + 2) / ((p + 1) * (p + 2)) - 0.5 * ux**2 + 0.5 * lam * wy**2
    return float(np.sum(integrand)) * f.grid.hx * f.grid.hy


def l2_error(f, exact, t=0.0):
    """L2 distance between the field and a pointwise exact(x, y, t)."""
    X, Y = f.grid.mesh()
    diff = f.values - exact(X, Y, t)
    return float(np.sqrt(np.sum(diff**2) * f.grid.hx * f.grid.hy))


def convergence_order(samples):
    """Least-squares slope of log(err) vs log(h) over (h, err) pairs."""
    samples = [(float(h), float(e)) for h, e in samples]
    if len(samples) < 2:
        raise DegenerateSamples("need at least two samples")
    if any(h <= 0 or e < 0 for h, e in samples):
        raise DegenerateSamples("h must be positive and err non-negative")
    if any(e == 0 for _, e in samples):
        raise DegenerateSamples("zero error cannot be log-fitted")
    lh = np.log([h for h, _ in samples])
    le = np.log([e for _, e in samples])
    if np.ptp(lh) == 0:
        raise DegenerateSamples("all grid spacings identical")
    slope = np.polyfit(lh, le, 1)[0]
    return float(slope)


def measure(f, step, time, model=None, ops=None, picard_iters=0, gmres_iters=0):
    """Assemble one diagnostics row; energy only when an operator set is given."""
    en = energy(f, model, ops) if ops is not None else 0.0
    return DiagnosticsRow(step, time, mass(f), l2_norm(f), linf_norm(f), en,
                          max_xline_mass(f), picard_iters, gmres_iters)
