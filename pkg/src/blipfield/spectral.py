"""Signed position <-> momentum transforms and the regularization operator.

The discrete transform is the unitary lattice version of

    psi~_s(k) = (2 pi)^-1/2  int dx exp(-i s k x) psi_s(x)

so that sum |psi|^2 dx == sum |psi~|^2 dk to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .core import (
    NATURAL,
    BlipFieldError,
    BlipWavepacket,
    MomentumGrid,
    MomentumWavepacket,
    SpatialGrid,
    Units,
)

__all__ = [
    "CoincidenceError",
    "RegularizationSpec",
    "to_momentum",
    "to_position",
    "evaluate",
    "omega",
    "spectral_multiplier",
    "regularize",
    "kernel_realspace",
    "periodic_kernel",
]

_ISQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


class CoincidenceError(BlipFieldError):
    """The unregulated real-space kernel is singular at zero separation."""


@dataclass(frozen=True)
class RegularizationSpec:
    units: Units = field(default_factory=Units)
    epsilon: float = 0.0
    mode: str = "spectral"

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise BlipFieldError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.mode not in ("spectral", "realspace"):
            raise BlipFieldError(f"unknown regularization mode {self.mode!r}")
        if self.mode == "realspace" and self.epsilon == 0:
            raise BlipFieldError("realspace regularization needs epsilon > 0")


def _wrap_index(m: np.ndarray, n: int) -> np.ndarray:
    return np.mod(m, n)


def to_momentum(psi: BlipWavepacket) -> MomentumWavepacket:
    g = psi.grid
    kg = g.momentum()
    m = kg.m
    if psi.s == 1:
        f = np.fft.fft(psi.amp)
    else:
        f = np.fft.ifft(psi.amp) * g.n
    amp = f[_wrap_index(m, g.n)] * np.exp(-1j * psi.s * kg.k * g.x_min) * (g.dx * _ISQRT2PI)
    return MomentumWavepacket(kg, psi.s, psi.lam, amp)


def to_position(psit: MomentumWavepacket) -> BlipWavepacket:
    """Inverse of :func:`to_momentum`.  A plain spectrum (s=None) uses s=+1."""
    kg = psit.grid
    g = kg.spatial
    s = 1 if psit.s is None else psit.s
    spread = np.zeros(g.n, dtype=complex)
    spread[_wrap_index(kg.m, g.n)] = psit.amp * np.exp(1j * s * kg.k * g.x_min)
    if s == 1:
        out = np.fft.ifft(spread) * g.n
    else:
        out = np.fft.fft(spread)
    return BlipWavepacket(g, s, psit.lam, out * (kg.dk * _ISQRT2PI))


def evaluate(psit: MomentumWavepacket, x, phase=None) -> np.ndarray:
    """Band-limited interpolant of the position amplitude at arbitrary ``x``.

    ``phase`` optionally multiplies the spectrum first (used for
    evolution to a time at which ``x`` is not a grid point).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = 1 if psit.s is None else psit.s
    amp = psit.amp if phase is None else psit.amp * phase
    k = psit.grid.k
    return (np.exp(1j * s * np.outer(x, k)) @ amp) * (psit.grid.dk * _ISQRT2PI)


def omega(k, units: Units = NATURAL):
    """Field-amplitude scale sqrt(2 hbar |k| / (eps0 A c))."""
    return np.sqrt(units.omega0_sq * np.abs(k))


def spectral_multiplier(k, spec: RegularizationSpec) -> np.ndarray:
    mult = omega(k, spec.units)
    if spec.epsilon > 0:
        mult = mult * np.exp(-spec.epsilon * np.abs(k))
    return mult


def _kernel_const(units: Units) -> float:
    return math.sqrt(units.hbar / (4.0 * math.pi * units.eps0 * units.area * units.c))


def kernel_realspace(delta, units: Units = NATURAL, eps: float = 0.0):
    """Real-space regularization kernel.

    For eps == 0 this is -sqrt(hbar/(4 pi eps0 A c)) |delta|^-3/2 and
    delta == 0 raises CoincidenceError.  For eps > 0 it is the transform
    of sqrt(2 hbar|k|/(eps0 A c)) exp(-eps|k|), which is finite
    everywhere and tends to the eps == 0 form for |delta| >> eps.
    """
    d = np.asarray(delta, dtype=float)
    if eps < 0:
        raise BlipFieldError(f"eps must be >= 0, got {eps!r}")
    if eps == 0:
        if np.any(d == 0):
            raise CoincidenceError("kernel is singular at zero separation")
        out = -_kernel_const(units) * np.abs(d) ** -1.5
    else:
        omega0 = math.sqrt(units.omega0_sq)
        out = (omega0 * 0.5 / math.sqrt(math.pi)) * np.real((eps - 1j * d) ** -1.5)
    return float(out) if out.ndim == 0 else out


def periodic_kernel(grid: SpatialGrid, units: Units, eps: float, n_images: int = 4) -> np.ndarray:
    """Regulated kernel summed over periodic images, sampled at offsets j*dx.

    Offsets are wrapped into [-L/2, L/2).  Images |n| <= n_images are summed
    directly and the rest by a Hurwitz zeta tail of the |x|^-3/2 asymptote.
    """
    if eps <= 0:
        raise BlipFieldError("periodic kernel needs eps > 0")
    L = grid.length
    j = np.arange(grid.n)
    d = j * grid.dx
    d = np.where(d >= 0.5 * L, d - L, d)
    total = np.zeros(grid.n)
    for n in range(-n_images, n_images + 1):
        total += kernel_realspace(d + n * L, units, eps)
    q = n_images + 1
    total += -_kernel_const(units) * L**-1.5 * (zeta(1.5, q + d / L) + zeta(1.5, q - d / L))
    return total


def regularize(psi: BlipWavepacket, spec: RegularizationSpec = RegularizationSpec()) -> BlipWavepacket:
    """Apply the regularization operator.

    The returned container holds a field-amplitude density, not a
    probability amplitude; its norm carries no meaning.
    """
    if spec.mode == "spectral":
        psit = to_momentum(psi)
        return to_position(psit.replace(psit.amp * spectral_multiplier(psit.grid.k, spec)))
    kern = periodic_kernel(psi.grid, spec.units, spec.epsilon)
    out = np.fft.ifft(np.fft.fft(kern) * np.fft.fft(psi.amp)) * psi.grid.dx
    return psi.replace(amp=out)
