"""Fourier-side diagonal operators: derivatives and the mass-zero antiderivative.

Wavenumbers use the FFT ordering (0, 1, ..., n/2-1, -n/2, ..., -1) scaled by
2*pi / period_length, where period_length is the full box length.  The
unmatched Nyquist mode is zeroed in odd-order symbols.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KplabError


class NotPowerOfTwo(KplabError):
    pass


def _check_pow2(n):
    if n < 2 or n & (n - 1):
        raise NotPowerOfTwo(f"n_modes must be a power of two, got {n}")


@dataclass(frozen=True)
class WavenumberGrid:
    n_modes: int
    period_length: float
    values: np.ndarray


@dataclass(frozen=True)
class InverseWavenumberGrid:
    n_modes: int
    values: np.ndarray  # 1/k entries, 0 at the zero and Nyquist modes


def wavenumbers(n_modes, period_length):
    _check_pow2(n_modes)
    if period_length <= 0:
        raise ValueError("period_length must be positive")
    k = np.fft.fftfreq(n_modes, d=1.0 / n_modes) * (2.0 * np.pi / period_length)
    k.flags.writeable = False
    return WavenumberGrid(n_modes, period_length, k)


def inverse_wavenumbers(w):
    """Entrywise reciprocal of the nonzero wavenumbers; the 1/i prefactor is
    carried by the caller."""
    inv = np.zeros_like(w.values)
    nz = w.values != 0.0
    inv[nz] = 1.0 / w.values[nz]
    inv[w.n_modes // 2] = 0.0  # unmatched Nyquist mode
    inv.flags.writeable = False
    return InverseWavenumberGrid(w.n_modes, inv)


def derivative_symbol(w, order):
    """(i k)^order with the Nyquist mode zeroed for odd orders."""
    sym = (1j * w.values) ** order
    if order % 2 == 1:
        sym[w.n_modes // 2] = 0.0
    return sym


_IMAG_TOL = 1e-12


def _real(out, scale):
    """Drop the imaginary part after asserting it is FFT roundoff.

    scale must include the symbol's amplification factor (max |sym|), since
    high-order derivatives amplify roundoff by that much.
    """
    resid = np.max(np.abs(out.imag))
    if resid > _IMAG_TOL * max(scale, 1.0):
        raise FloatingPointError(f"imaginary residue {resid:.3e} above tolerance")
    return out.real.copy()


def spectral_derivative(F, w, order):
    F = np.asarray(F, dtype=float)
    if F.shape[-1] != w.n_modes:
        raise DimensionMismatch(f"length {F.shape[-1]} vs {w.n_modes} modes")
    sym = derivative_symbol(w, order)
    out = np.fft.ifft(sym * np.fft.fft(F))
    amp = float(np.max(np.abs(sym)))
    return _real(out, float(np.max(np.abs(F), initial=0.0)) * max(amp, 1.0))


def spectral_antiderivative(F, w_inv):
    F = np.asarray(F, dtype=float)
    if F.shape[-1] != w_inv.n_modes:
        raise DimensionMismatch(f"length {F.shape[-1]} vs {w_inv.n_modes} modes")
    fhat = np.fft.fft(F)
    out = np.fft.ifft(fhat * w_inv.values / 1j)
    return _real(out, float(np.max(np.abs(F), initial=0.0)))


def project_mass_zero(F_hat):
    """Zero the k=0 mode (the mass-zero constraint); idempotent."""
    out = np.array(F_hat, copy=True)
    out[..., 0] = 0.0
    return out
