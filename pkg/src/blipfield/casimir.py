"""Mirror images, zero-point kernels and Casimir energies/forces.

Cavity mirrors sit at x = -D/2 and x = +D/2.  An excitation at x inside
the cavity has images at x + 2nD (even number of reflections) and at
(2n - 1)D - x (odd number).  The electric field picks up -1 per
reflection, the magnetic field +1.

The D-independent free-field zero-point energy (the m = 0 image term) is
divergent.  It is never evaluated; results only carry a flag saying it
was split off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import NATURAL, BlipFieldError, BlipWavepacket, Units
from .spectral import evaluate, kernel_realspace, omega, to_momentum

__all__ = [
    "CavityDomainError",
    "RegulatorError",
    "CavitySpec",
    "CasimirResult",
    "image_positions_1d",
    "kernel1d",
    "kernel3d",
    "richardson_limit",
    "kernel_limit",
    "zeta_partial",
    "casimir_1d",
    "casimir_3d",
    "regulated_casimir_energy",
    "folded_amplitude",
    "folded_field_profile",
    "image_tail_bound",
    "appendix_c_oracle",
]


class CavityDomainError(BlipFieldError):
    pass


class RegulatorError(BlipFieldError):
    pass


@dataclass(frozen=True)
class CavitySpec:
    D: float
    n_img: int = 8
    m_max: int = 1_000_000
    eps: float = 0.0
    units: Units = field(default_factory=Units)

    def __post_init__(self):
        if not (math.isfinite(self.D) and self.D > 0):
            raise BlipFieldError(f"cavity width must be > 0, got {self.D!r}")
        if int(self.n_img) != self.n_img or self.n_img < 1:
            raise BlipFieldError(f"n_img must be an integer >= 1, got {self.n_img!r}")
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise BlipFieldError(f"m_max must be an integer >= 1, got {self.m_max!r}")
        if not (math.isfinite(self.eps) and self.eps >= 0):
            raise RegulatorError(f"eps must be >= 0, got {self.eps!r}")
        if self.eps > 0 and not self.eps < self.D / 10:
            raise RegulatorError(f"eps={self.eps} must be < D/10={self.D / 10}")
        object.__setattr__(self, "n_img", int(self.n_img))
        object.__setattr__(self, "m_max", int(self.m_max))


@dataclass(frozen=True)
class CasimirResult:
    """Finite D-dependent zero-point correction and the force it implies.

    In 3D ``energy_correction`` is per unit area and ``force`` is a
    pressure.  ``divergent_free_part`` records that the free-field term
    was split off symbolically.
    """

    dim: int
    D: float
    m_max: int
    energy_correction: float
    force: float
    truncation_error_estimate: float
    divergent_free_part: bool = True

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "D": self.D,
            "m_max": self.m_max,
            "energy_correction": self.energy_correction,
            "force": self.force,
            "truncation_error_estimate": self.truncation_error_estimate,
            "divergent_free_part": self.divergent_free_part,
        }


def image_positions_1d(x: float, n: int, D: float) -> tuple[float, float]:
    """(even image x + 2nD, odd image (2n - 1)D - x) of an interior point."""
    if not abs(x) < D / 2:
        raise CavityDomainError(f"x={x} is not inside the cavity (-{D / 2}, {D / 2})")
    return x + 2 * n * D, (2 * n - 1) * D - x


def _check_eps(eps):
    if not eps > 0:
        raise RegulatorError(f"regulator must be > 0, got {eps!r}")


def kernel1d(delta, eps: float):
    """4 int dk |k| exp(-eps|k|) exp(ik delta) = 8 (eps^2 - delta^2)/(eps^2 + delta^2)^2."""
    _check_eps(eps)
    d2 = np.asarray(delta, dtype=float) ** 2
    e2 = eps * eps
    out = 8.0 * (e2 - d2) / (e2 + d2) ** 2
    return float(out) if out.ndim == 0 else out


def kernel3d(delta, eps: float):
    """(16/9) int d^3k |k| exp(-eps|k|) exp(ik.delta), a function of |delta| only.

    Closed form (16/9)(4 pi/|delta|) Im[2/(eps - i|delta|)^3]; at
    delta = 0 the limit 16/9 * 4 pi * 6/eps^4 is returned.
    """
    _check_eps(eps)
    d = np.abs(np.asarray(delta, dtype=float))
    safe = np.where(d == 0, 1.0, d)
    val = (16.0 / 9.0) * (4.0 * math.pi / safe) * np.imag(2.0 / (eps - 1j * safe) ** 3)
    out = np.where(d == 0, (16.0 / 9.0) * 4.0 * math.pi * 6.0 / eps**4, val)
    return float(out) if out.ndim == 0 else out


def richardson_limit(h, values, power: float = 1.0) -> float:
    """Extrapolate values(h) to h -> 0 by Neville's polynomial scheme in h**power."""
    x = np.asarray(h, dtype=float) ** power
    p = list(np.asarray(values, dtype=float))
    n = len(p)
    if n == 0 or len(x) != n:
        raise BlipFieldError("need matching, non-empty h and value sequences")
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (x[i] * p[i + 1] - x[i + level] * p[i]) / (x[i] - x[i + level])
    return float(p[0])


def kernel_limit(kernel, delta: float, ladder=(1e-2, 1e-3, 1e-4), power: float = 1.0) -> float:
    """Richardson estimate of kernel(delta, eps) as eps -> 0 along ``ladder``."""
    return richardson_limit(ladder, [kernel(delta, e) for e in ladder], power)


def zeta_partial(p: int, m_max: int) -> tuple[float, float]:
    """(sum_{m=1}^{m_max} m^-p + integral tail, tail) with tail = m_max^(1-p)/(p-1)."""
    m = np.arange(1, m_max + 1, dtype=float)
    partial = math.fsum(m ** (-p))
    tail = m_max ** (1 - p) / (p - 1)
    return partial + tail, tail


def _check_mmax(spec: CavitySpec):
    if spec.m_max < 10:
        raise BlipFieldError(f"m_max must be >= 10, got {spec.m_max}")


def casimir_1d(spec: CavitySpec) -> CasimirResult:
    """E = -(hbar c / 2 pi D) sum m^-2,  F = -dE/dD = -(hbar c / 2 pi D^2) sum m^-2."""
    _check_mmax(spec)
    u = spec.units
    total, tail = zeta_partial(2, spec.m_max)
    pref = u.hbar * u.c / (2.0 * math.pi * spec.D)
    return CasimirResult(
        dim=1,
        D=spec.D,
        m_max=spec.m_max,
        energy_correction=-pref * total,
        force=-pref / spec.D * total,
        truncation_error_estimate=pref * tail,
    )


def casimir_3d(spec: CavitySpec) -> CasimirResult:
    """E/A = -(hbar c / 8 pi^2 D^3) sum m^-4,  F/A = -(3 hbar c / 8 pi^2 D^4) sum m^-4."""
    _check_mmax(spec)
    u = spec.units
    total, tail = zeta_partial(4, spec.m_max)
    pref = u.hbar * u.c / (8.0 * math.pi**2 * spec.D**3)
    return CasimirResult(
        dim=3,
        D=spec.D,
        m_max=spec.m_max,
        energy_correction=-pref * total,
        force=-3.0 * pref / spec.D * total,
        truncation_error_estimate=pref * tail,
    )


def regulated_casimir_energy(dim: int, D: float, eps: float, m_max: int = 100_000,
                             units: Units = NATURAL) -> float:
    """Cavity energy correction from the regulated image kernels at finite eps.

    1D: (hbar c / 8 pi) D sum_{m != 0} kernel1d(2mD, eps)
    3D: (9 hbar c / 2 (4 pi)^3) D sum_{m != 0} kernel3d(2mD, eps), per area.
    The m = 0 (free-field) term is excluded.  Tends to the casimir_1d/3d
    energy as eps -> 0.
    """
    m = np.arange(1, m_max + 1, dtype=float)
    hc = units.hbar * units.c
    if dim == 1:
        terms = kernel1d(2 * m * D, eps)
        tail = -8.0 / (4.0 * D**2) / m_max  # -8/(2mD)^2 summed past m_max
        return hc / (8 * math.pi) * D * 2.0 * (math.fsum(terms) + tail)
    if dim == 3:
        terms = kernel3d(2 * m * D, eps)
        tail = -128.0 * math.pi / (9.0 * 16.0 * D**4) / (3.0 * m_max**3)
        return 9.0 * hc / (2.0 * (4 * math.pi) ** 3) * D * 2.0 * (math.fsum(terms) + tail)
    raise BlipFieldError(f"dimension must be 1 or 3, got {dim!r}")


# --- folded field profiles -------------------------------------------------

def _cavity_points(D: float, n_points: int) -> np.ndarray:
    h = D / n_points
    return -D / 2 + (np.arange(n_points) + 0.5) * h


def _check_inside(psi: BlipWavepacket, D: float, tol: float = 1e-8):
    x = psi.grid.x
    out = np.abs(x) >= D / 2
    leaked = float(np.sum(psi.density[out]) * psi.grid.dx)
    total = psi.norm_sq()
    if total > 0 and leaked > tol * total:
        raise CavityDomainError(f"packet mass {leaked:.3g} lies outside the cavity")


def folded_amplitude(psi: BlipWavepacket, D: float, y, t: float = 0.0, units: Units = NATURAL) -> np.ndarray:
    """Mean blip amplitude at interior points ``y`` after time ``t``.

    sum_n psi(y + 2nD - s c t) + psi((2n - 1)D - y - s c t), with psi
    taken as zero outside the cavity.
    """
    _check_inside(psi, D)
    y = np.asarray(y, dtype=float)
    shift = psi.s * units.c * t
    n_lo = math.floor((shift - D) / (2 * D)) - 1
    n_hi = math.ceil((shift + D) / (2 * D)) + 1
    pts = []
    for n in range(n_lo, n_hi + 1):
        pts.append(y + 2 * n * D - shift)
        pts.append((2 * n - 1) * D - y - shift)
    pts = np.concatenate(pts)
    inside = np.abs(pts) < D / 2
    vals = np.zeros(pts.shape, dtype=complex)
    if np.any(inside):
        vals[inside] = evaluate(to_momentum(psi), pts[inside])
    return vals.reshape(-1, y.size).sum(axis=0)


def _observable_sign(observable: str) -> float:
    if observable == "E":
        return -1.0
    if observable == "B":
        return 1.0
    raise BlipFieldError(f"observable must be 'E' or 'B', got {observable!r}")


def folded_field_profile(
    psi: BlipWavepacket,
    alpha: complex,
    spec: CavitySpec,
    t: float = 0.0,
    observable: str = "E",
    n_points: int | None = None,
    method: str = "images",
    span: str = "cavity",
) -> tuple[np.ndarray, np.ndarray]:
    """Expected E or B inside the cavity from the image-summed regulated field.

    ``method='images'`` sums images n = -n_img..n_img of both families
    directly; ``method='periodic'`` evaluates the untruncated image sum
    as a 2D-periodic spectral convolution.  ``span='period'`` also returns
    the image-extended field on (D/2, 3D/2).  Sample points are cell
    centres of ``n_points`` cells across the cavity (default: enough for
    four samples per regulator length).
    """
    if spec.eps <= 0:
        raise RegulatorError("folded profiles need a regulator eps > 0")
    sign = _observable_sign(observable)
    D, u = spec.D, spec.units
    if n_points is None:
        n_points = max(64, int(2 ** math.ceil(math.log2(4 * D / spec.eps))))
    y = _cavity_points(D, n_points)
    h = D / n_points
    phi = folded_amplitude(psi, D, y, t, u)
    x = y if span == "cavity" else np.concatenate([y, D - y[::-1]])
    # E = Re<c R[a]>,  B = (s/c) times the same with +1 image signs
    pref = u.c if observable == "E" else float(psi.s)

    if method == "images":
        total = np.zeros(x.size, dtype=complex)
        src = alpha * phi * h
        for n in range(-spec.n_img, spec.n_img + 1):
            even = kernel_realspace(x[:, None] - y[None, :] + 2 * n * D, u, spec.eps)
            odd = kernel_realspace(x[:, None] + y[None, :] + (2 * n - 1) * D, u, spec.eps)
            total += (even + sign * odd) @ src
        return x, np.real(pref * total)

    if method == "periodic":
        source = np.concatenate([phi, sign * phi[::-1]])
        k = 2 * math.pi * np.fft.fftfreq(2 * n_points, h)
        mult = omega(k, u) * np.exp(-spec.eps * np.abs(k))
        conv = np.fft.ifft(mult * np.fft.fft(alpha * source))
        vals = np.real(pref * conv)
        return x, vals[: n_points] if span == "cavity" else vals
    raise BlipFieldError(f"unknown method {method!r}")


def image_tail_bound(psi: BlipWavepacket, alpha: complex, spec: CavitySpec, n_from: int,
                     observable: str = "E", n_points: int | None = None, t: float = 0.0) -> float:
    """Upper bound on the field from images with |n| > n_from.

    Each dropped image lies at least (2|n| - 1)D from any interior point,
    and |R_eps(d)| <= sqrt(2) K |d|^-3/2, so the four families beyond
    n_from contribute at most 4 sqrt(2) K |alpha| pref int|phi| sum (2nD - D)^-3/2.
    """
    D, u = spec.D, spec.units
    if n_points is None:
        n_points = max(64, int(2 ** math.ceil(math.log2(4 * D / spec.eps))))
    y = _cavity_points(D, n_points)
    phi = folded_amplitude(psi, D, y, t, u)
    mass = float(np.sum(np.abs(phi)) * D / n_points)
    K = math.sqrt(u.hbar / (4 * math.pi * u.eps0 * u.area * u.c))
    pref = u.c if observable == "E" else 1.0
    n = np.arange(n_from + 1, 1_000_001, dtype=float)
    series = math.fsum((2 * n * D - D) ** -1.5) + 2.0 / math.sqrt(2 * 1_000_000 * D)
    return 4.0 * math.sqrt(2.0) * K * abs(alpha) * pref * mass * series


# --- index-substitution oracle ----------------------------------------------

def _gauss(a, b):
    return np.exp(-a * a - b * b)


def appendix_c_oracle(D: float, n_trunc: int, quadrature_points: int = 40) -> float:
    """Relative gap between the double image sum and its reduced single sum.

    LHS = sum_{n,m} int_cav int_cav [G(x + x' + (2n-1)D, x + x' + (2m-1)D)
                                     + G(x - x' + 2nD, x - x' + 2mD)]
    RHS = sum_m int_{-(2N+1)D}^{(2N+1)D} dx int_cav dx' G(x - x', x - x' + 2mD)
    with G(a, b) = exp(-a^2 - b^2) and |n|, |m| <= N.  All integrals use
    Gauss-Legendre rules on cells of width D (halves at the RHS ends).
    """
    if n_trunc < 1:
        raise BlipFieldError("n_trunc must be >= 1")
    nodes, weights = np.polynomial.legendre.leggauss(quadrature_points)

    def rule(a, b):
        return 0.5 * (b - a) * nodes + 0.5 * (a + b), 0.5 * (b - a) * weights

    xc, wc = rule(-D / 2, D / 2)
    X, Xp = np.meshgrid(xc, xc, indexing="ij")
    W = np.outer(wc, wc)
    ns = range(-n_trunc, n_trunc + 1)

    lhs_terms = []
    for n in ns:
        for m in ns:
            odd = _gauss(X + Xp + (2 * n - 1) * D, X + Xp + (2 * m - 1) * D)
            even = _gauss(X - Xp + 2 * n * D, X - Xp + 2 * m * D)
            lhs_terms.append(float(np.sum(W * (odd + even))))
    lhs = math.fsum(lhs_terms)

    edge = (2 * n_trunc + 1) * D
    cells = [(j * D - D / 2, j * D + D / 2) for j in range(-2 * n_trunc, 2 * n_trunc + 1)]
    cells = [(-edge, -edge + D / 2)] + cells + [(edge - D / 2, edge)]
    rhs_terms = []
    for a, b in cells:
        xs, ws = rule(a, b)
        Xr, Xpr = np.meshgrid(xs, xc, indexing="ij")
        Wr = np.outer(ws, wc)
        for m in ns:
            rhs_terms.append(float(np.sum(Wr * _gauss(Xr - Xpr, Xr - Xpr + 2 * m * D))))
    rhs = math.fsum(rhs_terms)
    return abs(lhs - rhs) / abs(rhs)
