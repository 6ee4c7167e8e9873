"""kplab: a solver laboratory for the generalized Kadomtsev-Petviashvili
equations u_t + u_xxx + u^p u_x + lambda dx^-1 u_yy = 0."""

__version__ = "0.1.0"
