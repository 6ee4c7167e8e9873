"""2D grid/state containers and Kronecker-structured operator application.

Fields are stored y-major, x-fastest: values[r, c] = u(x_c, y_r), flat index
r * Nx + c.  A 2D operator A_y (x) A_x is applied row/column-wise without
assembling the big matrix; a dense oracle is provided for small grids.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, TooLargeForDense

_DENSE_CAP = 4096


@dataclass(frozen=True)
class Grid2D:
    Lx: float
    Ly: float
    Nx: int
    Ny: int
    bc_x: str = "periodic"
    bc_y: str = "periodic"

    @property
    def hx(self):
        return 2.0 * self.Lx / self.Nx

    @property
    def hy(self):
        return 2.0 * self.Ly / self.Ny

    @property
    def x(self):
        return -self.Lx + self.hx * np.arange(self.Nx)

    @property
    def y(self):
        return -self.Ly + self.hy * np.arange(self.Ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y)  # X, Y with shape (Ny, Nx)


@dataclass
class Field:
    grid: Grid2D
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros((self.grid.Ny, self.grid.Nx))
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.Ny, self.grid.Nx):
            raise DimensionMismatch(
                f"field shape {self.values.shape} vs grid ({self.grid.Ny}, {self.grid.Nx})")

    def copy(self):
        return Field(self.grid, self.values.copy())

    def is_finite(self):
        return bool(np.isfinite(self.values).all())


def _apply_op(op, X):
    """Apply a 1D operator to the columns of X (shape (n, k))."""
    if op is None:
        return X
    if hasattr(op, "apply_columns"):
        return op.apply_columns(X)
    if hasattr(op, "apply"):
        return op.apply(X)
    return np.asarray(op) @ X


def apply_along_x(op, f):
    """(I_y (x) op) acting on the field: each y-row transformed independently."""
    out = _apply_op(op, f.values.T).T
    return Field(f.grid, out)


def apply_along_y(op, f):
    """(op (x) I_x) acting on the field: each x-column transformed independently."""
    out = _apply_op(op, f.values)
    return Field(f.grid, out)


def _dense_1d(op, n):
    if op is None:
        return np.eye(n)
    if hasattr(op, "dense"):
        return op.dense()
    return np.asarray(op, dtype=float)


def dense_assemble(op_x, op_y, grid):
    """Explicit (Ny*Nx)^2 matrix op_y (x) op_x; oracle for small grids only."""
    if grid.Nx * grid.Ny > _DENSE_CAP:
        raise TooLargeForDense(f"{grid.Nx * grid.Ny} unknowns exceed cap {_DENSE_CAP}")
    Mx = _dense_1d(op_x, grid.Nx)
    My = _dense_1d(op_y, grid.Ny)
    return np.kron(My, Mx)
