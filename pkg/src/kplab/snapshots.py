"""KPS1 binary snapshot format.

Header (little-endian): magic "KPS1", u32 version, u32 Nx, u32 Ny,
f64 Lx, f64 Ly, f64 time; payload Ny*Nx f64, y-major, x-fastest.
"""

import struct

import numpy as np

from .errors import BadMagic, TruncatedFile
from .field2d import Field, Grid2D

MAGIC = b"KPS1"
VERSION = 1
_HDR = struct.Struct("<4sIII ddd".replace(" ", ""))


def write_snapshot(f, t, path):
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_HDR.pack(MAGIC, VERSION, g.Nx, g.Ny, g.Lx, g.Ly, float(t)))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_snapshot(path, bc_x="periodic", bc_y="periodic"):
    with open(path, "rb") as fh:
        hdr = fh.read(_HDR.size)
        if len(hdr) < _HDR.size:
            raise TruncatedFile(f"{path}: header truncated")
        magic, version, nx, ny, lx, ly, t = _HDR.unpack(hdr)
        if magic != MAGIC:
            raise BadMagic(f"{path}: bad magic {magic!r}")
        payload = fh.read(ny * nx * 8 + 1)
    if len(payload) != ny * nx * 8:
        raise TruncatedFile(f"{path}: payload is {len(payload)} bytes, "
                            f"expected {ny * nx * 8}")
    vals = np.frombuffer(payload, dtype="<f8").reshape(ny, nx)
    grid = Grid2D(lx, ly, nx, ny, bc_x, bc_y)
    return Field(grid, vals.copy()), t
