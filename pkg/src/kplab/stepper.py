"""Implicit midpoint (Sanz-Serna) time advance for the three discretizations.

Each step solves the Crank-Nicolson system with the nonlinearity frozen by a
Picard fixed-point loop:

    (I + dt/2 L) U_{n+1} = (I - dt/2 L) U_n - dt/(p+1) D_x ((U_n+U^s)/2)^{p+1}

with L = D_xxx + lam * antider_x * D_yy.  The compact scheme solves the linear
system either directly (FFT in y reduces the block-circulant matrix to
per-mode bordered banded systems) or by preconditioned GMRES; the spectral
scheme is diagonal per mode; the mixed scheme solves one small banded complex
system per x-mode.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import compact, field2d
from .errors import GmresFailed, PicardDiverged
from .linalg import GmresParams, LinearMap, cn_diagonal, diagonal_preconditioner, gmres


@dataclass(frozen=True)
class ModelParams:
    p: int = 1
    lam: float = -1.0  # -1 = KP-I, +1 = KP-II

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("nonlinearity power p must be >= 1")
        if abs(self.lam) != 1.0:
            raise ValueError("lambda must be -1 (KP-I) or +1 (KP-II)")


@dataclass(frozen=True)
class PicardParams:
    tol: float = 1e-12
    max_iter: int = 50


@dataclass(frozen=True)
class SchemeConfig:
    kind: str = "compact"  # compact | spectral | mixed
    order: int = 6         # compact accuracy order (m, or m_y for mixed)
    picard: PicardParams = PicardParams()
    gmres: GmresParams = GmresParams()
    solver: str = "direct"  # compact linear solver: direct | gmres

    def __post_init__(self):
        if self.kind not in ("compact", "spectral", "mixed"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind != "spectral" and self.order not in (2, 4, 6):
            raise ValueError("compact accuracy order must be 2, 4 or 6")


@dataclass(frozen=True)
class TimeParams:
    dt: float
    t_end: float = None
    n_steps: int = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end is None and self.n_steps is None:
            raise ValueError("one of t_end / n_steps is required")

    def steps(self):
        if self.n_steps is not None:
            return self.n_steps
        return int(round(self.t_end / self.dt))


@dataclass
class StepReport:
    picard_iters: int = 0
    last_picard_delta: float = 0.0
    gmres_total_iters: int = 0
    max_gmres_residual: float = 0.0


def _relnorm(delta, ref):
    return np.linalg.norm(delta) / max(np.linalg.norm(ref), 1.0)


def picard_iterate(initial, linear_solve, nonlinear_rhs, tol, max_iter):
    """Generic fixed-point driver shared by the steppers.

    Iterates X <- linear_solve(nonlinear_rhs(X), X) until the relative update
    drops below tol.  Three consecutive growing updates, non-finite values or
    hitting max_iter raise PicardDiverged (the blow-up signal).
    """
    x = np.array(initial, copy=True)
    report = StepReport()
    prev_delta = np.inf
    grow = 0
    for it in range(1, max_iter + 1):
        x_new = linear_solve(nonlinear_rhs(x), x)
        report.picard_iters = it
        if not np.isfinite(x_new).all():
            raise PicardDiverged("non-finite iterate", last_iterate=x, report=report)
        delta = _relnorm(x_new - x, x)
        report.last_picard_delta = delta
        x = x_new
        if delta < tol:
            return x, report
        grow = grow + 1 if delta > prev_delta else 0
        if grow >= 3:
            raise PicardDiverged(f"update grew {grow} consecutive iterations",
                                 last_iterate=x, report=report)
        prev_delta = delta
    raise PicardDiverged(f"no convergence in {max_iter} iterations "
                         f"(last delta {report.last_picard_delta:.3e})",
                         last_iterate=x, report=report)


def _circulant_eigs(op):
    """Real eigenvalues of a symmetric circulant compact operator P^-1 Q."""
    p_col = op.P[:, 0].toarray().ravel()
    q_col = op.Q[:, 0].toarray().ravel()
    eig = np.fft.fft(q_col) / np.fft.fft(p_col)
    return eig.real


class CompactOps:
    """Operator bundle for the full-compact discretization (energy + stepping)."""

    def __init__(self, grid, order):
        self.grid = grid
        self.order = order
        bc_y = grid.bc_y if grid.bc_y != "periodic" else "periodic"
        self.dx = compact.build_operator(grid.Nx, grid.hx, 1, order, "periodic")
        self.dxxx = compact.build_operator(grid.Nx, grid.hx, 3, order, "periodic")
        self.dyy = compact.build_operator(grid.Ny, grid.hy, 2, order, bc_y)
        self.dy = compact.build_operator(grid.Ny, grid.hy, 1, order,
                                         "periodic" if bc_y == "periodic" else "dirichlet0")
        self.antider = compact.build_antiderivative(grid.Nx, grid.hx, order)

    def dx_of(self, f):
        return field2d.apply_along_x(self.dx, f)

    def dy_of(self, f):
        return field2d.apply_along_y(self.dy, f)

    def antider_of(self, f):
        return field2d.apply_along_x(self.antider, f)


class _BlockCirculantSolver:
    """Exact solve of the compact CN matrix via FFT in y.

    For periodic y the CN matrix is block circulant; per y-mode l it reduces
    to (I + dt/2 Dxxx + c_l antider) with c_l = lam dt/2 mu_l, solved as a
    bordered banded 2Nx x 2Nx real sparse system with the antiderivative
    unknowns appended.
    """

    def __init__(self, ops, dt, lam):
        grid = ops.grid
        nx, ny = grid.Nx, grid.Ny
        mu = _circulant_eigs(ops.dyy)[: ny // 2 + 1]
        P3, Q3 = ops.dxxx.P, ops.dxxx.Q
        Pb, Qb = ops.antider.Pbar, ops.antider.Qbar
        top_left = P3 + 0.5 * dt * Q3
        self._P3 = P3
        self._nx, self._ny = nx, ny
        # all per-mode systems factorized jointly as one block-diagonal matrix
        blocks = [sp.bmat([[top_left, (lam * 0.5 * dt * mu[l]) * P3], [-Pb, Qb]])
                  for l in range(ny // 2 + 1)]
        self._lu = splu(sp.block_diag(blocks, format="csc"))

    def solve(self, rhs):
        nx, ny = self._nx, self._ny
        nm = ny // 2 + 1
        rhat = np.fft.rfft(rhs, axis=0)
        top = rhat @ self._P3.T  # (nm, nx): P3 applied to each mode
        stacked = np.zeros((nm, 2 * nx, 2))
        stacked[:, :nx, 0] = top.real
        stacked[:, :nx, 1] = top.imag
        sol = self._lu.solve(stacked.reshape(nm * 2 * nx, 2))
        sol = sol.reshape(nm, 2 * nx, 2)
        out = sol[:, :nx, 0] + 1j * sol[:, :nx, 1]
        return np.fft.irfft(out, n=ny, axis=0)


class CompactStepper:
    """Full compact-scheme stepper (Nx odd, periodic in x)."""

    def __init__(self, grid, model, scheme, dt):
        self.grid, self.model, self.scheme, self.dt = grid, model, scheme, dt
        self.ops = CompactOps(grid, scheme.order)
        lam = model.lam
        if scheme.solver == "direct" and grid.bc_y == "periodic":
            self._direct = _BlockCirculantSolver(self.ops, dt, lam)
        else:
            self._direct = None
        diag = cn_diagonal(dt, lam, self.ops.dxxx.diagonal(),
                           self.ops.dyy.diagonal(), self.ops.antider.diagonal())
        self._precond = diagonal_preconditioner(diag)
        n = grid.Nx * grid.Ny
        self._amap = LinearMap(n, self._a_flat)

    def _l_apply(self, U):
        """L U = Dxxx_x U + lam Dyy_y antider_x U on (Ny, Nx) arrays."""
        ax = self.ops.dxxx.apply(U.T).T
        w = self.ops.antider.apply(U.T).T
        ay = self.ops.dyy.apply(w)
        return ax + self.model.lam * ay

    def a_apply(self, U):
        return U + 0.5 * self.dt * self._l_apply(U)

    def b_apply(self, U):
        return U - 0.5 * self.dt * self._l_apply(U)

    def _a_flat(self, v):
        return self.a_apply(v.reshape(self.grid.Ny, self.grid.Nx)).ravel()

    def step(self, U):
        """Advance one time step; U is the (Ny, Nx) state array."""
        dt, p = self.dt, self.model.p
        rhs0 = self.b_apply(U)
        gmres_report = {"iters": 0, "maxres": 0.0}

        def nonlinear_rhs(X):
            W = 0.5 * (U + X)
            return rhs0 - dt / (p + 1) * self.ops.dx.apply((W ** (p + 1)).T).T

        if self._direct is not None:
            def linear_solve(rhs, x_prev):
                return self._direct.solve(rhs)
        else:
            def linear_solve(rhs, x_prev):
                x, rep = gmres(self._amap, self._precond, rhs.ravel(),
                               self.scheme.gmres, x0=x_prev.ravel())
                if not rep.converged:
                    raise GmresFailed(
                        f"relative residual {rep.final_relative_residual:.3e}")
                gmres_report["iters"] += rep.iterations
                gmres_report["maxres"] = max(gmres_report["maxres"],
                                             rep.final_relative_residual)
                return x.reshape(self.grid.Ny, self.grid.Nx)

        xnew, report = picard_iterate(U, linear_solve, nonlinear_rhs,
                                      self.scheme.picard.tol,
                                      self.scheme.picard.max_iter)
        report.gmres_total_iters = gmres_report["iters"]
        report.max_gmres_residual = gmres_report["maxres"]
        return xnew, report


def _fft_wavenumbers(n, full_length):
    return np.fft.fftfreq(n, d=1.0 / n) * (2.0 * np.pi / full_length)


class SpectralOps:
    """Fourier derivative bundle used for diagnostics of spectral runs."""

    def __init__(self, grid):
        self.grid = grid
        self.kx = _fft_wavenumbers(grid.Nx, 2.0 * grid.Lx)
        self.ky = _fft_wavenumbers(grid.Ny, 2.0 * grid.Ly)
        self._kx_d1 = 1j * self.kx.copy()
        self._kx_d1[grid.Nx // 2] = 0.0
        self._ky_d1 = 1j * self.ky.copy()
        self._ky_d1[grid.Ny // 2] = 0.0
        inv = np.zeros(grid.Nx, dtype=complex)
        nz = self.kx != 0.0
        inv[nz] = 1.0 / (1j * self.kx[nz])
        inv[grid.Nx // 2] = 0.0
        self._kx_inv = inv

    def dx_of(self, f):
        out = np.fft.ifft(self._kx_d1 * np.fft.fft(f.values, axis=1), axis=1).real
        return field2d.Field(f.grid, out)

    def dy_of(self, f):
        out = np.fft.ifft(self._ky_d1[:, None] * np.fft.fft(f.values, axis=0), axis=0).real
        return field2d.Field(f.grid, out)

    def antider_of(self, f):
        out = np.fft.ifft(self._kx_inv * np.fft.fft(f.values, axis=1), axis=1).real
        return field2d.Field(f.grid, out)


class SpectralStepper:
    """Fully Fourier discretization; per-mode diagonal CN solve."""

    def __init__(self, grid, model, scheme, dt):
        self.grid, self.model, self.scheme, self.dt = grid, model, scheme, dt
        self.ops = SpectralOps(grid)
        kx = self.ops.kx[None, :]
        ky = self.ops.ky[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            sym = kx**3 - model.lam * ky**2 / kx
        sym[:, grid.Nx // 2] = 0.0
        sym[np.broadcast_to(kx == 0.0, sym.shape)] = 0.0
        self._num = 1.0 + 0.5j * dt * sym
        self._den = 1.0 - 0.5j * dt * sym
        nlf = 1j * dt * kx / (model.p + 1)
        nlf = np.broadcast_to(nlf, sym.shape).copy()
        nlf[:, grid.Nx // 2] = 0.0
        self._nlf = nlf

    def step(self, U):
        uhat0 = np.fft.fft2(U)
        uhat0[:, 0] = 0.0  # mass-zero constraint
        base = self._num * uhat0

        def nonlinear_rhs(X):
            W = 0.5 * (U + X)
            return np.fft.fft2(W ** (self.model.p + 1))

        def linear_solve(nhat, x_prev):
            uhat1 = (base - self._nlf * nhat) / self._den
            uhat1[:, 0] = 0.0
            return np.fft.ifft2(uhat1).real

        return picard_iterate(U, linear_solve, nonlinear_rhs,
                              self.scheme.picard.tol, self.scheme.picard.max_iter)


class MixedOps:
    """Fourier in x, compact in y; diagnostics use the same split."""

    def __init__(self, grid, order):
        self.grid = grid
        self._sp = SpectralOps(grid)
        bc_y = grid.bc_y
        self.dyy = compact.build_operator(grid.Ny, grid.hy, 2, order, bc_y)
        self.dy = compact.build_operator(
            grid.Ny, grid.hy, 1, order,
            "periodic" if bc_y == "periodic" else "dirichlet0")

    def dx_of(self, f):
        return self._sp.dx_of(f)

    def antider_of(self, f):
        return self._sp.antider_of(f)

    def dy_of(self, f):
        return field2d.apply_along_y(self.dy, f)


class MixedStepper:
    """FFT in x, compact order-m_y D_yy in y; direct banded complex solve per mode."""

    def __init__(self, grid, model, scheme, dt):
        self.grid, self.model, self.scheme, self.dt = grid, model, scheme, dt
        self.ops = MixedOps(grid, scheme.order)
        nx = grid.Nx
        self.kx = _fft_wavenumbers(nx, 2.0 * grid.Lx)[: nx // 2 + 1]
        P2 = sp.csc_matrix(self.ops.dyy.P, dtype=complex)
        Q2 = sp.csc_matrix(self.ops.dyy.Q, dtype=complex)
        self._P2 = P2
        self._lus = [None] * (nx // 2 + 1)
        self._bmats = [None] * (nx // 2 + 1)
        lam = model.lam
        for ki in range(1, nx // 2):  # k=0 projected away, Nyquist frozen
            k = self.kx[ki]
            a_lin = 0.5j * dt * k**3
            a_mix = 0.5j * dt * lam / k
            self._lus[ki] = splu(((1.0 - a_lin) * P2 - a_mix * Q2).tocsc())
            self._bmats[ki] = ((1.0 + a_lin) * P2 + a_mix * Q2).tocsr()

    def step(self, U):
        nx = self.grid.Nx
        p = self.model.p
        dt = self.dt
        uhat0 = np.fft.rfft(U, axis=1)
        uhat0[:, 0] = 0.0
        base = np.empty_like(uhat0)
        base[:, 0] = 0.0
        base[:, nx // 2] = uhat0[:, nx // 2]
        for ki in range(1, nx // 2):
            base[:, ki] = self._bmats[ki] @ uhat0[:, ki]

        def nonlinear_rhs(X):
            W = 0.5 * (U + X)
            return np.fft.rfft(W ** (p + 1), axis=1)

        def linear_solve(nhat, x_prev):
            out = np.empty_like(uhat0)
            out[:, 0] = 0.0
            out[:, nx // 2] = uhat0[:, nx // 2]
            for ki in range(1, nx // 2):
                k = self.kx[ki]
                rhs = base[:, ki] - (1j * dt * k / (p + 1)) * (self._P2 @ nhat[:, ki])
                out[:, ki] = self._lus[ki].solve(rhs)
            return np.fft.irfft(out, n=nx, axis=1)

        return picard_iterate(U, linear_solve, nonlinear_rhs,
                              self.scheme.picard.tol, self.scheme.picard.max_iter)


def make_stepper(grid, model, scheme, dt):
    cls = {"compact": CompactStepper, "spectral": SpectralStepper,
           "mixed": MixedStepper}[scheme.kind]
    return cls(grid, model, scheme, dt)


_CACHE = {}


def _cached(grid, model, scheme, dt):
    key = (grid, model, scheme, dt)
    if key not in _CACHE:
        _CACHE.clear()  # dt or grid change invalidates previous factorizations
        _CACHE[key] = make_stepper(grid, model, scheme, dt)
    return _CACHE[key]


def step_compact(f, model, scheme, dt):
    st = _cached(f.grid, model, scheme, dt)
    vals, rep = st.step(f.values)
    return field2d.Field(f.grid, vals), rep


def step_spectral(f, model, scheme, dt):
    st = _cached(f.grid, model, scheme, dt)
    vals, rep = st.step(f.values)
    return field2d.Field(f.grid, vals), rep


def step_mixed(f, model, scheme, dt):
    st = _cached(f.grid, model, scheme, dt)
    vals, rep = st.step(f.values)
    return field2d.Field(f.grid, vals), rep
