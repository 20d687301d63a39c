"""Units, grids, wavepackets and coherent-state coefficients.

Everything here is an immutable value.  Arrays stored on packets are
copied on construction and marked read-only so that a packet can be
shared freely between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BlipFieldError",
    "GridError",
    "ResolutionError",
    "BoundaryError",
    "LocalizationError",
    "Units",
    "NATURAL",
    "SpatialGrid",
    "MomentumGrid",
    "BlipWavepacket",
    "MomentumWavepacket",
    "gaussian_packet",
    "coherent_prefactor",
    "two_photon_weight",
    "coherent_coefficient",
    "support_interval",
    "is_localized",
]

POLARIZATIONS = ("H", "V")
LOCALIZATION_TOL = 1e-8


class BlipFieldError(ValueError):
    """Base class for precondition failures raised by this package."""


class GridError(BlipFieldError):
    pass


class ResolutionError(BlipFieldError):
    pass


class BoundaryError(BlipFieldError):
    pass


class LocalizationError(BlipFieldError):
    pass


@dataclass(frozen=True)
class Units:
    """Physical constants.  Natural units (all ones) by default."""

    hbar: float = 1.0
    c: float = 1.0
    eps0: float = 1.0
    area: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "eps0", "area"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise BlipFieldError(f"{name} must be finite and > 0, got {v!r}")

    @property
    def omega0_sq(self) -> float:
        """Squared field-amplitude scale 2*hbar/(eps0*A*c)."""
        return 2.0 * self.hbar / (self.eps0 * self.area * self.c)

    def as_dict(self) -> dict:
        return {"hbar": self.hbar, "c": self.c, "eps0": self.eps0, "area": self.area}


NATURAL = Units()


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid x_j = x_min + j*dx, j = 0..N-1.

    ``x_min`` defaults to -L/2.  Keep ``x_min/dx`` integral (the default
    does) if exact k -> -k reflection of signed transforms is needed.
    """

    length: float
    n: int
    x_min: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise GridError(f"grid length must be > 0, got {self.length!r}")
        if int(self.n) != self.n or self.n < 4 or not _is_pow2(int(self.n)):
            raise GridError(f"grid size must be a power of two >= 4, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.x_min is None:
            object.__setattr__(self, "x_min", -0.5 * self.length)

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x_max(self) -> float:
        """Right end of the periodic cell (exclusive)."""
        return self.x_min + self.length

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def index_of(self, x: float) -> float:
        """Fractional cell index of position ``x``."""
        return (x - self.x_min) / self.dx

    def momentum(self) -> "MomentumGrid":
        return MomentumGrid(self)


@dataclass(frozen=True)
class MomentumGrid:
    """Signed wavenumbers conjugate to a SpatialGrid.

    k_j = m_j * dk with m_j = -N/2+1, ..., N/2, i.e. the set
    (-pi/dx, pi/dx] in ascending order.
    """

    spatial: SpatialGrid

    @property
    def n(self) -> int:
        return self.spatial.n

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.spatial.length

    @property
    def m(self) -> np.ndarray:
        n = self.spatial.n
        return np.arange(-n // 2 + 1, n // 2 + 1)

    @property
    def k(self) -> np.ndarray:
        return self.dk * self.m

    def reflect(self, values: np.ndarray) -> np.ndarray:
        """Return ``values`` evaluated at -k (the Nyquist point maps to itself)."""
        return np.roll(np.asarray(values)[::-1], -1)


def _frozen_copy(a) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _check_sign(s):
    if s not in (1, -1):
        raise BlipFieldError(f"propagation sign must be +1 or -1, got {s!r}")


def _check_pol(lam):
    if lam not in POLARIZATIONS:
        raise BlipFieldError(f"polarization must be one of {POLARIZATIONS}, got {lam!r}")


@dataclass(frozen=True)
class BlipWavepacket:
    grid: SpatialGrid
    s: int
    lam: str
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_sign(self.s)
        _check_pol(self.lam)
        amp = _frozen_copy(self.amp)
        if amp.shape != (self.grid.n,):
            raise GridError(f"amplitude shape {amp.shape} does not match grid size {self.grid.n}")
        object.__setattr__(self, "amp", amp)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def norm_sq(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def mean_position(self) -> float:
        # periodic trapezoid: the x_min sample is shared with x_min + L
        x = self.grid.x.copy()
        x[0] += 0.5 * self.grid.length
        return float(np.sum(x * self.density) * self.grid.dx / (np.sum(self.density) * self.grid.dx))

    def replace(self, amp=None, s=None) -> "BlipWavepacket":
        return BlipWavepacket(
            self.grid,
            self.s if s is None else s,
            self.lam,
            self.amp if amp is None else amp,
        )


@dataclass(frozen=True)
class MomentumWavepacket:
    """Amplitudes over a MomentumGrid.

    ``s`` is +1/-1 for blip spectra and ``None`` for the plain spectrum
    used by the standard (positive-frequency) model.
    """

    grid: MomentumGrid
    s: int | None
    lam: str
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.s is not None:
            _check_sign(self.s)
        _check_pol(self.lam)
        amp = _frozen_copy(self.amp)
        if amp.shape != (self.grid.n,):
            raise GridError(f"amplitude shape {amp.shape} does not match grid size {self.grid.n}")
        object.__setattr__(self, "amp", amp)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2) * self.grid.dk)

    def mean_wavenumber(self) -> float:
        w = np.abs(self.amp) ** 2
        return float(np.sum(self.grid.k * w) * self.grid.dk / (np.sum(w) * self.grid.dk))

    def replace(self, amp) -> "MomentumWavepacket":
        return MomentumWavepacket(self.grid, self.s, self.lam, amp)


def gaussian_packet(
    grid: SpatialGrid,
    x0: float,
    sigma: float,
    k0: float = 0.0,
    s: int = 1,
    lam: str = "H",
) -> BlipWavepacket:
    """Normalized Gaussian with |psi|^2 of standard deviation ``sigma``.

    Raises ResolutionError if sigma <= 2*dx and BoundaryError if the
    6-sigma support touches the periodic boundary.
    """
    if not (sigma > 2.0 * grid.dx):
        raise ResolutionError(f"sigma={sigma} not resolvable on grid with dx={grid.dx}")
    if not (grid.x_min <= x0 < grid.x_max):
        raise BoundaryError(f"x0={x0} outside grid [{grid.x_min}, {grid.x_max})")
    if x0 - 6.0 * sigma < grid.x_min or x0 + 6.0 * sigma > grid.x_max - grid.dx:
        raise BoundaryError(f"packet support x0 +/- 6 sigma leaves the grid")
    x = grid.x
    amp = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * k0 * x)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * grid.dx)
    return BlipWavepacket(grid, s, lam, amp)


def coherent_coefficient(alpha: complex, n: int) -> complex:
    """c_n = exp(-|alpha|^2/2) alpha^n, the coherent-state number coefficient."""
    return math.exp(-abs(alpha) ** 2 / 2.0) * complex(alpha) ** n


def coherent_prefactor(alpha: complex) -> float:
    """Closed form of sum_n |c_{n+1}|^2 / (2^n n!) = |alpha|^2 exp(-|alpha|^2/2)."""
    a2 = abs(alpha) ** 2
    return a2 * math.exp(-a2 / 2.0)


def two_photon_weight(alpha: complex) -> float:
    """|c_2|^2 = exp(-|alpha|^2) |alpha|^4."""
    a2 = abs(alpha) ** 2
    return math.exp(-a2) * a2 * a2


def support_interval(psi: BlipWavepacket, tol: float = LOCALIZATION_TOL) -> tuple[float, float]:
    """Smallest [a, b] of grid points with at most tol/2 mass on each side."""
    w = psi.density * psi.grid.dx
    total = w.sum()
    if total == 0:
        raise LocalizationError("zero packet has no support")
    cum = np.cumsum(w)
    half = 0.5 * tol * total
    lo = int(np.searchsorted(cum, half, side="right"))
    hi = int(np.searchsorted(cum, total - half, side="left"))
    hi = min(hi, psi.grid.n - 1)
    x = psi.grid.x
    return float(x[lo]), float(x[hi])


def is_localized(psi: BlipWavepacket, tol: float = LOCALIZATION_TOL) -> bool:
    """True if all but ``tol`` of the mass sits in less than a quarter of the grid.

    Power-law tails (one-sided spectra) spread the tol-support over the
    whole periodic cell and fail this test.
    """
    a, b = support_interval(psi, tol)
    return (b - a) <= 0.25 * psi.grid.length
