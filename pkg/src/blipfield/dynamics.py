"""Time evolution and coherent-state expectation values.

Two propagators act on state amplitudes (Schroedinger picture):

* ``blip``: phase exp(-i k c t) on the s-signed spectrum, which is the
  rigid transport psi(x, t) = psi(x - s c t, 0);
* ``standard``: phase exp(-i |k| c t) on the plain spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    NATURAL,
    BlipFieldError,
    BlipWavepacket,
    LocalizationError,
    MomentumWavepacket,
    SpatialGrid,
    Units,
    is_localized,
    support_interval,
)
from .spectral import (
    RegularizationSpec,
    omega,
    regularize,
    spectral_multiplier,
    to_momentum,
    to_position,
)

__all__ = [
    "PROPAGATORS",
    "ModePair",
    "evolve",
    "plain_spectrum",
    "one_sided_packet",
    "light_cone_leakage",
    "mean_spectrum",
    "field_expectation",
    "energy_expectation",
    "mean_position",
    "LEAKAGE_SUPPORT_TOL",
]

PROPAGATORS = ("blip", "standard")
# mass allowed outside the light-cone origin; well below the 1e-10 leakage floor
LEAKAGE_SUPPORT_TOL = 1e-13


def _check_kind(kind: str):
    if kind not in PROPAGATORS:
        raise BlipFieldError(f"propagator must be one of {PROPAGATORS}, got {kind!r}")


def plain_spectrum(psi: BlipWavepacket) -> MomentumWavepacket:
    """Transform with the ordinary exp(-ikx) convention, ignoring the s tag."""
    pt = to_momentum(psi if psi.s == 1 else psi.replace(s=1))
    return MomentumWavepacket(pt.grid, None, pt.lam, pt.amp)


def _phase(k: np.ndarray, t: float, kind: str, units: Units) -> np.ndarray:
    if kind == "blip":
        return np.exp(-1j * k * units.c * t)
    return np.exp(-1j * np.abs(k) * units.c * t)


def evolve(psi, t: float, kind: str = "blip", units: Units = NATURAL):
    """Evolve a position or momentum packet by time ``t``.

    Returns the same type as the input.  Blip evolution of a position
    packet is an exact spectral shift by s*c*t.  Standard evolution of a
    BlipWavepacket works on its plain spectrum; the s tag is carried
    along untouched.
    """
    _check_kind(kind)
    if isinstance(psi, MomentumWavepacket):
        if kind == "blip" and psi.s is None:
            raise BlipFieldError("blip evolution needs a signed spectrum")
        return psi.replace(psi.amp * _phase(psi.grid.k, t, kind, units))
    if t == 0:
        return psi
    if kind == "blip":
        pt = to_momentum(psi)
        return to_position(pt.replace(pt.amp * _phase(pt.grid.k, t, kind, units)))
    pt = plain_spectrum(psi)
    out = to_position(pt.replace(pt.amp * _phase(pt.grid.k, t, kind, units)))
    return psi.replace(amp=out.amp)


def one_sided_packet(
    grid: SpatialGrid,
    k0: float,
    sigma_k: float,
    x0: float = 0.0,
    lam: str = "H",
) -> BlipWavepacket:
    """Packet whose plain spectrum is a Gaussian restricted to k > 0.

    Such a packet has power-law tails in position space and so is never
    localized when the spectrum has weight near k = 0.
    """
    kg = grid.momentum()
    k = kg.k
    amp = np.where(k > 0, np.exp(-((k - k0) ** 2) / (4.0 * sigma_k**2) - 1j * k * x0), 0.0)
    amp = amp / math.sqrt(np.sum(np.abs(amp) ** 2) * kg.dk)
    out = to_position(MomentumWavepacket(kg, None, lam, amp))
    return out


def light_cone_leakage(psi0: BlipWavepacket, t: float, kind: str = "blip", units: Units = NATURAL) -> float:
    """Probability found further than c*t + 3*dx from the initial support.

    Raises LocalizationError when ``psi0`` is not effectively localized.
    """
    _check_kind(kind)
    if not is_localized(psi0):
        raise LocalizationError("initial packet is not localized; its light cone is undefined")
    a, b = support_interval(psi0, LEAKAGE_SUPPORT_TOL)
    reach = units.c * abs(t) + 3.0 * psi0.grid.dx
    psi_t = evolve(psi0, t, kind, units)
    x = psi0.grid.x
    outside = (x < a - reach) | (x > b + reach)
    return float(np.sum(psi_t.density[outside]) * psi0.grid.dx)


def mean_position(psi: BlipWavepacket, t: float = 0.0, kind: str = "blip", units: Units = NATURAL) -> float:
    if not is_localized(psi):
        raise LocalizationError("mean position needs a localized packet")
    return evolve(psi, t, kind, units).mean_position()


@dataclass(frozen=True)
class ModePair:
    """Two narrow coherent packets at +k0 and -k0 standing in for sharp modes.

    The -k0 spectrum is the exact k -> -k reflection of the +k0 one.
    """

    grid: SpatialGrid
    k0: float
    alpha_pos: complex
    alpha_neg: complex
    sigma: float | None = None
    s: int = 1
    lam: str = "H"

    def __post_init__(self):
        if self.k0 == 0:
            raise BlipFieldError("mode pair needs k0 != 0")
        if self.sigma is None:
            object.__setattr__(self, "sigma", abs(self.k0) / 20.0)
        if self.sigma > abs(self.k0) / 20.0:
            raise BlipFieldError("mode width must satisfy sigma <= |k0|/20")
        if self.sigma < 2.0 * self.grid.momentum().dk:
            raise BlipFieldError("mode width not resolved by the momentum grid")

    def spectra(self) -> tuple[MomentumWavepacket, MomentumWavepacket]:
        kg = self.grid.momentum()
        g = np.exp(-((kg.k - self.k0) ** 2) / (4.0 * self.sigma**2))
        g = g / math.sqrt(np.sum(g**2) * kg.dk)
        pos = MomentumWavepacket(kg, self.s, self.lam, g)
        neg = MomentumWavepacket(kg, self.s, self.lam, kg.reflect(g))
        return pos, neg

    def single(self, which: str = "pos") -> "ModePair":
        """The pair with only one of its two modes excited."""
        if which == "pos":
            return ModePair(self.grid, self.k0, self.alpha_pos, 0.0, self.sigma, self.s, self.lam)
        return ModePair(self.grid, self.k0, 0.0, self.alpha_neg, self.sigma, self.s, self.lam)


def mean_spectrum(state, alpha: complex = 1.0) -> MomentumWavepacket:
    """Coherent-state mean of the annihilation operator in momentum space.

    ``state`` is a BlipWavepacket (mean alpha * psi~) or a ModePair
    (alpha_pos * g(k - k0) + alpha_neg * g(k + k0)); for a ModePair
    ``alpha`` is ignored.
    """
    if isinstance(state, ModePair):
        pos, neg = state.spectra()
        return pos.replace(state.alpha_pos * pos.amp + state.alpha_neg * neg.amp)
    if isinstance(state, MomentumWavepacket):
        return state.replace(alpha * state.amp)
    pt = to_momentum(state)
    return pt.replace(alpha * pt.amp)


def field_expectation(
    state,
    alpha: complex = 1.0,
    spec: RegularizationSpec = RegularizationSpec(),
    t: float = 0.0,
    kind: str = "blip",
) -> tuple[np.ndarray, np.ndarray]:
    """Expected (E_y, B_z) on the grid for the H polarization.

    The real field is Re<c R[a_s](x, t)> and B = (s/c) E.  With the
    standard propagator the same map is applied to the plain spectrum.
    """
    _check_kind(kind)
    units = spec.units
    f = mean_spectrum(state, alpha)
    if kind == "standard":
        f = MomentumWavepacket(f.grid, None, f.lam, f.amp)
    f = evolve(f, t, kind, units)
    if spec.mode == "spectral":
        field_amp = to_position(f.replace(f.amp * spectral_multiplier(f.grid.k, spec))).amp
    else:
        field_amp = regularize(to_position(f), spec).amp
    e = np.real(units.c * field_amp)
    s = 1 if f.s is None else f.s
    return e, (s / units.c) * e


def energy_expectation(state, alpha: complex = 1.0, units: Units = NATURAL) -> float:
    """Normal-ordered energy of the coherent state built on ``state``.

    (eps0 A c^2 / 4) int dk |Omega(k) f(k) + Omega(-k) conj f(-k)|^2,
    where f is the mean spectrum.  The zero-point part is excluded.
    """
    f = mean_spectrum(state, alpha)
    kg = f.grid
    w = omega(kg.k, units)
    integrand = np.abs(w * f.amp + w * np.conj(kg.reflect(f.amp))) ** 2
    return float(units.eps0 * units.area * units.c**2 / 4.0 * np.sum(integrand) * kg.dk)
