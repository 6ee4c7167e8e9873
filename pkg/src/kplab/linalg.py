"""Matrix-free restarted GMRES and the small direct-factorization helpers.

GMRES is right-preconditioned (the reported residual is the true residual),
with modified Gram-Schmidt Arnoldi and Givens rotations.  Dot products are
sequential numpy reductions, so single-threaded runs are bit-reproducible.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, SingularMatrix


@dataclass(frozen=True)
class LinearMap:
    dimension: int
    apply: object  # callable vector -> vector


@dataclass(frozen=True)
class GmresParams:
    rel_tol: float = 1e-10
    max_iter: int = 500
    restart: int = 60


@dataclass
class SolveReport:
    iterations: int
    final_relative_residual: float
    converged: bool


def gmres(A, precond_inv, b, params=GmresParams(), x0=None):
    """Solve A x = b; returns (x, SolveReport).

    precond_inv is a LinearMap applying M^-1 (or None for identity).  On
    non-convergence the best iterate is returned with converged=False.
    """
    n = A.dimension
    b = np.asarray(b, dtype=float)
    if b.shape[0] != n:
        raise DimensionMismatch(f"rhs length {b.shape[0]} vs dimension {n}")
    Minv = precond_inv.apply if precond_inv is not None else (lambda v: v)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    tol = params.rel_tol * bnorm
    total = 0
    while True:
        r = b - A.apply(x)
        beta = np.linalg.norm(r)
        if beta <= tol:
            return x, SolveReport(total, beta / bnorm, True)
        if total >= params.max_iter:
            return x, SolveReport(total, beta / bnorm, False)
        m = params.restart
        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        V[0] = r / beta
        g[0] = beta
        j = 0
        while j < m and total < params.max_iter:
            w = A.apply(Minv(V[j]))
            for i in range(j + 1):
                H[i, j] = np.dot(V[i], w)
                w -= H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            happy = H[j + 1, j] < 1e-14 * beta
            if not happy:
                V[j + 1] = w / H[j + 1, j]
            # apply accumulated Givens rotations to the new column
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            cs[j] = H[j, j] / denom
            sn[j] = H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j += 1
            if happy or abs(g[j]) <= tol:
                break
        y = sla.solve_triangular(H[:j, :j], g[:j], lower=False)
        x = x + Minv(V[:j].T @ y)
        # loop re-evaluates the true residual and restarts or exits


def cn_diagonal(dt, lam, dxxx_diag, dyy_diag, antider_diag):
    """Main diagonal of the Crank-Nicolson left-hand matrix
    I + (dt/2) I_y (x) D_xxx + lam (dt/2) D_yy (x) antider,
    assembled from the 1D operator diagonals (flat y-major ordering)."""
    ny = dyy_diag.shape[0]
    diag = 1.0 + 0.5 * dt * np.tile(dxxx_diag, ny)
    diag += lam * 0.5 * dt * np.outer(dyy_diag, antider_diag).ravel()
    return diag


def diagonal_preconditioner(diag, floor=1e-14):
    """LinearMap dividing by the diagonal; near-zero entries fall back to 1."""
    d = np.where(np.abs(diag) < floor, 1.0, diag)
    return LinearMap(d.shape[0], lambda v: v / d)


@dataclass
class BandedLU:
    ab: np.ndarray  # LAPACK gbtrf layout, 2*kl+ku+1 rows
    kl: int
    ku: int
    ipiv: np.ndarray


def banded_lu(ab, bands):
    """Factor a banded matrix given in scipy solve_banded layout
    ((ku+kl+1, n) array, diagonals top-down) with bands = (kl, ku)."""
    kl, ku = bands
    ab = np.asarray(ab, dtype=float)
    n = ab.shape[1]
    # expand to the gbtrf layout with kl extra rows of workspace on top
    work = np.zeros((2 * kl + ku + 1, n))
    work[kl:, :] = ab
    lu, ipiv, info = sla.lapack.dgbtrf(work, kl, ku)
    if info != 0:
        raise SingularMatrix(f"zero pivot at position {info}")
    scale = np.max(np.abs(ab))
    piv = np.abs(lu[kl + ku, :])
    if np.any(piv <= 1e-14 * scale):
        raise SingularMatrix("pivot below tolerance")
    return BandedLU(lu, kl, ku, ipiv)


def banded_solve(fac, rhs):
    rhs = np.asarray(rhs, dtype=float)
    b = rhs if rhs.ndim > 1 else rhs[:, None]
    x, info = sla.lapack.dgbtrs(fac.ab, fac.kl, fac.ku, b, fac.ipiv)
    if info != 0:
        raise SingularMatrix("banded back-substitution failed")
    return x[:, 0] if rhs.ndim == 1 else x


@dataclass
class DenseLU:
    lu: np.ndarray
    piv: np.ndarray


def dense_lu(mat):
    mat = np.asarray(mat, dtype=float)
    lu, piv = sla.lu_factor(mat, check_finite=False)
    scale = max(np.max(np.abs(mat)), 1e-300)
    if np.any(np.abs(np.diag(lu)) <= 1e-14 * scale):
        raise SingularMatrix("pivot below tolerance")
    return DenseLU(lu, piv)


def dense_solve(fac, rhs):
    return sla.lu_solve((fac.lu, fac.piv), rhs, check_finite=False)
