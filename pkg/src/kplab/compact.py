"""High-order compact (Pade) finite-difference operators in one dimension.

Implicit stencils P f^(k) = Q f on uniform grids, with periodic wrap or
one-sided boundary rows, plus the mass-zero-closed antiderivative obtained
by replacing the last rows of the first-derivative pair with ones.
Coefficients are kept as exact rationals until matrix build.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    DimensionMismatch,
    EvenGridSize,
    GridTooSmall,
    UnderdeterminedStencil,
    UnsupportedOrder,
)

# Interior coefficient sets (alpha, a, b) per (derivative_order, accuracy_order).
# The order-2 members are the stencil-minimal (b = 0, alpha = 0) classical schemes.
_COEFFS = {
    (1, 2): (Fraction(0), Fraction(1), Fraction(0)),
    (1, 4): (Fraction(1, 4), Fraction(3, 2), Fraction(0)),
    (1, 6): (Fraction(1, 3), Fraction(14, 9), Fraction(1, 9)),
    (2, 2): (Fraction(0), Fraction(1), Fraction(0)),
    (2, 4): (Fraction(1, 10), Fraction(6, 5), Fraction(0)),
    (2, 6): (Fraction(2, 11), Fraction(12, 11), Fraction(3, 11)),
    (3, 2): (Fraction(0), Fraction(1), Fraction(0)),
    # order-4 family is one-parameter; b = -1/2 keeps |alpha| < 1/2
    (3, 4): (Fraction(1, 4), Fraction(2), Fraction(-1, 2)),
    (3, 6): (Fraction(7, 16), Fraction(2), Fraction(-1, 8)),
}


@dataclass(frozen=True)
class CoefficientSet:
    derivative_order: int
    accuracy_order: int
    alpha: Fraction
    a: Fraction
    b: Fraction


def interior_coefficients(derivative_order, accuracy_order):
    """Return the exact-rational interior stencil weights."""
    key = (derivative_order, accuracy_order)
    if key not in _COEFFS:
        raise UnsupportedOrder(f"no coefficient set for derivative {derivative_order}, "
                               f"order {accuracy_order}")
    alpha, a, b = _COEFFS[key]
    return CoefficientSet(derivative_order, accuracy_order, alpha, a, b)


def order_condition_residuals(cs):
    """Taylor order-condition residuals for a coefficient set, as exact rationals.

    One entry per matching condition (consistency row first); all must be zero
    for the set to achieve its nominal accuracy.
    """
    k, m = cs.derivative_order, cs.accuracy_order
    alpha, a, b = cs.alpha, cs.a, cs.b
    res = [1 + 2 * alpha - (a + b)]
    for l in range(1, m // 2):
        lhs = Fraction(2) * alpha / factorial(2 * l)
        if k == 1:
            rhs = Fraction(a + 4**l * b, factorial(2 * l + 1))
        elif k == 2:
            rhs = Fraction(2) * (4**l * b + a) / factorial(2 * l + 2)
        else:
            rhs = (2 * a * (2 ** (2 * (l + 1)) - 1)
                   + Fraction(3, 4) * b * (3 ** (2 * (l + 1)) - 1)) / Fraction(factorial(2 * l + 3))
        res.append(lhs - rhs)
    return res


# RHS stencil offsets and weights (in units of 1/h^k) for each derivative order.
def _q_stencil(k, a, b):
    if k == 1:
        return {1: a / 2, -1: -a / 2, 2: b / 4, -2: -b / 4}
    if k == 2:
        return {0: -2 * a - b / 2, 1: a, -1: a, 2: b / 4, -2: b / 4}
    # third derivative
    c1 = a + Fraction(3, 8) * b
    return {2: a / 2, -2: -a / 2, 3: b / 8, -3: -b / 8, 1: -c1, -1: c1}


def _stencil_width(k, b):
    if k == 3:
        return 3 if b != 0 else 2
    return 2 if b != 0 else 1


def _circulant(n, stencil):
    """Sparse circulant matrix from an offset -> weight map."""
    mat = sp.lil_matrix((n, n))
    idx = np.arange(n)
    for off, w in stencil.items():
        if w == 0:
            continue
        mat[idx, (idx + off) % n] = float(w)
    return mat.tocsr()


def _banded(n, stencil, reflect=False):
    """Truncated-band matrix (zero ghosts); reflect=True mirrors ghosts inside."""
    mat = sp.lil_matrix((n, n))
    for i in range(n):
        for off, w in stencil.items():
            if w == 0:
                continue
            j = i + off
            if 0 <= j < n:
                mat[i, j] += float(w)
            elif reflect:
                jr = -j - 1 if j < 0 else 2 * n - 1 - j
                mat[i, jr] += float(w)
    return mat.tocsr()


@dataclass(frozen=True)
class BoundaryClosure:
    position: str  # "left" or "right"
    lhs_coeffs: list  # weights of f'_0, f'_1, ... (rationals)
    rhs_coeffs: list  # weights of f_0, f_1, ... scaled by 1/h (rationals)
    accuracy_order: int


def _solve_rational(A, rhs):
    """Gaussian elimination over Fraction; A is a square list-of-lists."""
    n = len(A)
    M = [row[:] + [rhs[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise UnderdeterminedStencil("singular Taylor moment system")
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def boundary_closure(derivative_order, accuracy_order, stencil_points):
    """One-sided first-derivative closure at the left edge.

    Solves the Taylor moment system so the scheme
    f'_0 + alpha f'_1 = (1/h) sum_j c_j f_j is exact on monomials up to
    x^accuracy_order.  With stencil_points > accuracy_order the implicit
    weight alpha is dropped (explicit one-sided difference).
    """
    if derivative_order != 1:
        raise UnsupportedOrder("one-sided closures only shipped for the first derivative")
    m, s = accuracy_order, stencil_points
    if s + 1 < m + 1:
        raise UnderdeterminedStencil(f"{s} stencil points cannot reach order {m}")
    use_alpha = s < m + 1
    ncoef = m + 1 - (1 if use_alpha else 0)  # number of rhs unknowns
    if ncoef > s:
        raise UnderdeterminedStencil(f"{s} stencil points cannot reach order {m}")
    # unknowns: [alpha?] + c_0..c_{ncoef-1};  equations q = 0..m:
    #   sum_j c_j j^q = delta_{q,1} + alpha q
    A, rhs = [], []
    for q in range(m + 1):
        row = []
        if use_alpha:
            row.append(Fraction(-q))
        row += [Fraction(j) ** q for j in range(ncoef)]
        A.append(row)
        rhs.append(Fraction(1) if q == 1 else Fraction(0))
    sol = _solve_rational(A, rhs)
    if use_alpha:
        alpha, coeffs = sol[0], sol[1:]
    else:
        alpha, coeffs = Fraction(0), sol
    coeffs = coeffs + [Fraction(0)] * (s - len(coeffs))
    return BoundaryClosure("left", [Fraction(1), alpha], coeffs, m)


@dataclass
class CompactOperator1D:
    """Banded matrix pair (P, Q) realizing one derivative; apply solves P y = Q f."""

    n_points: int
    h: float
    derivative_order: int
    accuracy_order: int
    bc: str
    P: sp.csr_matrix
    Q: sp.csr_matrix
    _lu: object = field(repr=False, default=None)
    _diag: np.ndarray = field(repr=False, default=None)

    def apply(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.n_points:
            raise DimensionMismatch(f"vector of length {f.shape[0]} vs operator size {self.n_points}")
        return self._lu.solve(self.Q @ f)

    # alias used by the 2D layer; f has shape (n_points, k)
    apply_columns = apply

    def dense(self):
        return self._lu.solve(self.Q.toarray())

    def diagonal(self):
        if self._diag is None:
            self._diag = np.diag(self.dense()).copy()
        return self._diag


def build_operator(n_points, h, derivative_order, accuracy_order, bc="periodic"):
    """Build a compact derivative operator.

    bc is one of "periodic", "onesided" (off-center first/last rows,
    first derivative only), "dirichlet0" (zero ghosts) or "neumann0"
    (reflected ghosts).
    """
    cs = interior_coefficients(derivative_order, accuracy_order)
    width = _stencil_width(derivative_order, cs.b)
    if n_points < 2 * width + 1:
        raise GridTooSmall(f"need at least {2 * width + 1} points, got {n_points}")
    if h <= 0:
        raise ValueError("h must be positive")
    pst = {0: Fraction(1), 1: cs.alpha, -1: cs.alpha}
    qst = _q_stencil(derivative_order, cs.a, cs.b)
    hk = h ** derivative_order
    if bc == "periodic":
        P = _circulant(n_points, pst)
        Q = _circulant(n_points, qst) / hk
    elif bc in ("dirichlet0", "neumann0"):
        reflect = bc == "neumann0"
        P = _banded(n_points, pst)
        Q = _banded(n_points, qst, reflect=reflect) / hk
    elif bc == "onesided":
        if derivative_order != 1:
            raise UnsupportedOrder("onesided rows only shipped for the first derivative")
        P = _banded(n_points, pst).tolil()
        Q = (_banded(n_points, qst) / hk).tolil()
        edge_order = min(accuracy_order, 4)
        cl = boundary_closure(1, edge_order, max(edge_order, 2))
        for row, sign in ((0, 1), (n_points - 1, -1)):
            P.rows[row], P.data[row] = [], []
            Q.rows[row], Q.data[row] = [], []
            for j, w in enumerate(cl.lhs_coeffs):
                P[row, row + sign * j] = float(w)
            for j, w in enumerate(cl.rhs_coeffs):
                Q[row, row + sign * j] = sign * float(w) / h
        P, Q = P.tocsr(), Q.tocsr()
    else:
        raise ValueError(f"unknown bc {bc!r}")
    op = CompactOperator1D(n_points, h, derivative_order, accuracy_order, bc,
                           P.tocsr(), Q.tocsr())
    op._lu = splu(sp.csc_matrix(P))
    return op


@dataclass
class AntiderivativeOperator1D:
    """Mass-zero-closed discrete antiderivative (Qbar)^-1 Pbar on odd-sized grids."""

    n_points: int
    h: float
    accuracy_order: int
    Pbar: sp.csr_matrix  # derivative-pair P with last row dropped from the relation
    Qbar: sp.csr_matrix  # derivative-pair Q with last row replaced by ones
    _lu: object = field(repr=False, default=None)
    _diag: np.ndarray = field(repr=False, default=None)

    def apply(self, fprime):
        fprime = np.asarray(fprime, dtype=float)
        if fprime.shape[0] != self.n_points:
            raise DimensionMismatch(
                f"vector of length {fprime.shape[0]} vs operator size {self.n_points}")
        g = self.Pbar @ fprime
        g[-1] = 0.0  # closure row imposes sum F_i = 0 regardless of input mean
        return self._lu.solve(g)

    apply_columns = apply

    def dense(self):
        eye = np.eye(self.n_points)
        g = self.Pbar @ eye
        g[-1, :] = 0.0
        return self._lu.solve(g)

    def diagonal(self):
        if self._diag is None:
            self._diag = np.diag(self.dense()).copy()
        return self._diag


def build_antiderivative(n_points, h, accuracy_order):
    """Antiderivative from the first-derivative pair with ones-rows closure."""
    if n_points % 2 == 0:
        raise EvenGridSize(
            f"antiderivative closure is singular for even N (N={n_points})")
    dop = build_operator(n_points, h, 1, accuracy_order, bc="periodic")
    Pbar = dop.P.tolil()
    Qbar = dop.Q.tolil()
    Pbar[n_points - 1, :] = 0.0  # last-row output overwritten by the closure
    Qbar[n_points - 1, :] = 1.0
    op = AntiderivativeOperator1D(n_points, h, accuracy_order,
                                  Pbar.tocsr(), Qbar.tocsr())
    op._lu = splu(sp.csc_matrix(Qbar))
    return op


def apply(op, f):
    """Functional form of op.apply."""
    return op.apply(f)


def apply_antiderivative(op, fprime):
    """Functional form of the antiderivative application."""
    return op.apply(fprime)
