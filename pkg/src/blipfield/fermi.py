"""Beam-splitter / two-detector signalling experiment.

A packet starts left of a 50:50 beam splitter at the origin.  The
transmitted register (b, horizontal arm) feeds Detector 2 on
[L2, L2 + D]; the reflected register (c, vertical arm) feeds Detector 1
on [L1, L1 + D].  Both arms share the packet's coordinate, so a detector
window is just an interval of the packet grid.

Detection probabilities are computed in closed form for a coherent input
of amplitude alpha; no Fock state is ever built.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NATURAL,
    BlipFieldError,
    BlipWavepacket,
    Units,
    coherent_prefactor,
    support_interval,
    two_photon_weight,
)
from .dynamics import LEAKAGE_SUPPORT_TOL, PROPAGATORS, evolve, plain_spectrum
from .spectral import evaluate, to_momentum

__all__ = [
    "UndefinedConditionalError",
    "ExperimentGeometry",
    "ExperimentResult",
    "beam_split",
    "window_slice",
    "window_mass",
    "transition_amplitude",
    "p1_click",
    "p2_click",
    "causality_report",
    "sweep",
]


class UndefinedConditionalError(BlipFieldError):
    """Detector 2's conditional probability needs a nonzero Detector 1 rate."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BLIPFIELD_THREADS", "1")))
    except ValueError:
        return 1


def sweep(fn, items):
    """Map ``fn`` over ``items`` in order, using up to BLIPFIELD_THREADS threads."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ExperimentGeometry:
    L1: float
    L2: float
    width: float

    def __post_init__(self):
        if not (0 < self.L1 < self.L2):
            raise BlipFieldError(f"need 0 < L1 < L2, got L1={self.L1}, L2={self.L2}")
        if not self.width > 0:
            raise BlipFieldError(f"detector width must be > 0, got {self.width}")

    def check_grid(self, grid):
        if self.width <= 2.0 * grid.dx:
            raise BlipFieldError(f"detector width {self.width} not resolved by dx={grid.dx}")
        for lo in (self.L1, self.L2):
            if lo < grid.x_min or lo + self.width > grid.x_max - grid.dx:
                raise BlipFieldError(f"detector window [{lo}, {lo + self.width}] leaves the grid")


@dataclass(frozen=True)
class ExperimentResult:
    model: str
    t1: np.ndarray
    p1: np.ndarray
    t2: np.ndarray
    p2: np.ndarray
    ratio: np.ndarray
    ratio_spread: float
    early_t2: np.ndarray
    early_p2: np.ndarray
    early_click_mass: float
    causal_arrival: float
    formula_faithful_only: bool = False
    config: dict = field(default_factory=dict)


def beam_split(psi_in: BlipWavepacket) -> tuple[BlipWavepacket, BlipWavepacket]:
    """50:50 splitter a -> (b + i c)/sqrt(2): returns (psi_b, psi_c)."""
    r = 1.0 / math.sqrt(2.0)
    return psi_in.replace(amp=psi_in.amp * r), psi_in.replace(amp=psi_in.amp * (1j * r))


def window_slice(grid, lo: float, width: float) -> slice:
    """Cells covering [lo, lo + width], edges snapped outward to whole cells."""
    i0 = math.floor(grid.index_of(lo) + 1e-9)
    i1 = math.ceil(grid.index_of(lo + width) - 1e-9)
    return slice(max(i0, 0), min(i1, grid.n - 1) + 1)


def window_mass(psi: BlipWavepacket, lo: float, width: float) -> float:
    sl = window_slice(psi.grid, lo, width)
    return float(np.sum(psi.density[sl]) * psi.grid.dx)


def transition_amplitude(model: str, psi: BlipWavepacket, x, t: float, units: Units = NATURAL):
    """Amplitude to find the excitation at ``x`` at time ``t``.

    standard: (2 pi)^-1/2 sum_k exp(i(kx - c|k|t)) psi~(k) dk on the plain
    spectrum; blip: psi(x - s c t) from the signed spectrum.  Only the
    modulus enters the click probabilities, so the overall phase
    convention is immaterial.
    """
    if model not in PROPAGATORS:
        raise BlipFieldError(f"unknown model {model!r}")
    if model == "blip":
        pt = to_momentum(psi)
        phase = np.exp(-1j * pt.grid.k * units.c * t)
    else:
        pt = plain_spectrum(psi)
        phase = np.exp(-1j * np.abs(pt.grid.k) * units.c * t)
    out = evaluate(pt, x, phase)
    return complex(out[0]) if np.ndim(x) == 0 else out


def _register_mass(model, register, lo, width, t, units):
    if t < 0:
        raise BlipFieldError(f"detection time must be >= 0, got {t}")
    return window_mass(evolve(register, t, model, units), lo, width)


def p1_click(model: str, psi: BlipWavepacket, geometry: ExperimentGeometry, alpha: complex,
             t1: float, units: Units = NATURAL) -> float:
    """Probability that Detector 1 registers exactly one excitation at t1.

    Equals (1/2) C(alpha) int_{L1}^{L1+D} |A(y, t1)|^2 dy for the
    normalized packet amplitude A; only the c register is read.
    """
    geometry.check_grid(psi.grid)
    _, psi_c = beam_split(psi)
    return coherent_prefactor(alpha) * _register_mass(model, psi_c, geometry.L1, geometry.width, t1, units)


def p2_click(model: str, psi: BlipWavepacket, geometry: ExperimentGeometry, alpha: complex,
             t2: float, units: Units = NATURAL) -> float:
    """Conditional probability that Detector 2 clicks at t2 after a Detector 1 click.

    Equals (|c_2|^2/4) C(alpha)^-1 int_{L2}^{L2+D} |A(x, t2)|^2 dx; only
    the b register is read.
    """
    geometry.check_grid(psi.grid)
    pref = coherent_prefactor(alpha)
    if pref == 0:
        raise UndefinedConditionalError("alpha = 0: Detector 1 never clicks, conditional undefined")
    psi_b, _ = beam_split(psi)
    # the register carries |1/sqrt 2|^2 = 1/2 of the packet mass
    return two_photon_weight(alpha) / (2.0 * pref) * _register_mass(
        model, psi_b, geometry.L2, geometry.width, t2, units)


def causality_report(model: str, psi: BlipWavepacket, geometry: ExperimentGeometry, alpha: complex,
                     t1_samples, units: Units = NATURAL, n_early: int = 16) -> ExperimentResult:
    """Delayed-ratio and early-click diagnostics for one model.

    ratio = P2(t1 + (L2 - L1)/c) / P1(t1); its relative spread
    (max - min)/mean vanishes when packets move rigidly at c.
    ``early_click_mass`` is the largest P2 over ``n_early`` times before
    the front of the initial support could reach Detector 2.
    """
    t1 = np.asarray(sorted(float(t) for t in t1_samples))
    if t1.size < 3:
        raise BlipFieldError("need at least 3 t1 samples")
    if np.any(t1 < 0):
        raise BlipFieldError("t1 samples must be >= 0")
    geometry.check_grid(psi.grid)
    delay = (geometry.L2 - geometry.L1) / units.c
    t2 = t1 + delay
    p1 = np.array(sweep(lambda t: p1_click(model, psi, geometry, alpha, t, units), t1))
    p2 = np.array(sweep(lambda t: p2_click(model, psi, geometry, alpha, t, units), t2))
    if np.any(p1 <= 0):
        raise BlipFieldError("P1 vanishes at some t1 sample; ratio undefined")
    ratio = p2 / p1
    spread = float((ratio.max() - ratio.min()) / ratio.mean())

    _, front = support_interval(psi, LEAKAGE_SUPPORT_TOL)
    arrival = max((geometry.L2 - front) / units.c, 0.0)
    early_t2 = np.linspace(0.0, arrival, n_early, endpoint=False)
    early_p2 = np.array(sweep(lambda t: p2_click(model, psi, geometry, alpha, t, units), early_t2))
    early = float(early_p2.max()) if early_p2.size else 0.0

    return ExperimentResult(
        model=model,
        t1=t1,
        p1=p1,
        t2=t2,
        p2=p2,
        ratio=ratio,
        ratio_spread=spread,
        early_t2=early_t2,
        early_p2=early_p2,
        early_click_mass=early,
        causal_arrival=arrival,
        formula_faithful_only=abs(alpha) > 2,
    )
