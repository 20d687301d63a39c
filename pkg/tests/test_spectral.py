import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blipfield.core import BlipWavepacket, SpatialGrid, BlipFieldError, Units, gaussian_packet
from blipfield.spectral import (
    CoincidenceError,
    RegularizationSpec,
    evaluate,
    kernel_realspace,
    omega,
    regularize,
    to_momentum,
    to_position,
)
from oracles import singular_tail

G = SpatialGrid(64.0, 1024)


def random_packet(seed, s=1):
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=G.n) + 1j * rng.normal(size=G.n)
    return BlipWavepacket(G, s, "H", amp)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.sampled_from([1, -1]))
def test_parseval_and_round_trip(seed, s):
    psi = random_packet(seed, s)
    pt = to_momentum(psi)
    assert pt.norm_sq() == pytest.approx(psi.norm_sq(), rel=1e-12)
    back = to_position(pt)
    assert back.s == s
    assert np.max(np.abs(back.amp - psi.amp)) < 1e-12 * np.max(np.abs(psi.amp))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_sign_flip_reflects_spectrum(seed):
    psi = random_packet(seed)
    plus = to_momentum(psi).amp
    minus = to_momentum(psi.replace(s=-1)).amp
    assert np.max(np.abs(minus - G.momentum().reflect(plus))) < 1e-12 * np.max(np.abs(plus))


def test_gaussian_spectrum_centre():
    psi = gaussian_packet(G, 0.0, 1.0, k0=5.0)
    assert to_momentum(psi).mean_wavenumber() == pytest.approx(5.0, abs=1e-12)
    assert to_momentum(psi.replace(s=-1)).mean_wavenumber() == pytest.approx(-5.0, abs=1e-12)


def test_evaluate_interpolates_grid_points():
    psi = gaussian_packet(G, 1.0, 1.0, k0=2.0)
    pt = to_momentum(psi)
    idx = np.arange(400, 600, 7)
    assert np.max(np.abs(evaluate(pt, G.x[idx]) - psi.amp[idx])) < 1e-12
    # between grid points the band-limited interpolant matches the analytic packet
    x = 0.3 + G.dx / 3
    exact = psi.amp[np.argmin(np.abs(G.x - 0.3))] * np.exp(-((x - 1) ** 2 - (G.x[np.argmin(np.abs(G.x - 0.3))] - 1) ** 2) / 4
                                                          + 2j * (x - G.x[np.argmin(np.abs(G.x - 0.3))]))
    assert abs(evaluate(pt, x)[0] - exact) < 1e-10


def test_kernel_realspace_forms():
    u = Units()
    assert kernel_realspace(1.0) == pytest.approx(-math.sqrt(1 / (4 * math.pi)))
    assert kernel_realspace(4.0) == pytest.approx(kernel_realspace(1.0) / 8)
    with pytest.raises(CoincidenceError):
        kernel_realspace(np.array([0.0, 1.0]))
    # eps > 0 is finite at coincidence and tends to the eps = 0 form far away
    assert math.isfinite(kernel_realspace(0.0, u, 0.1))
    # first-order approach: relative gap ~ (3/2) eps / delta
    assert kernel_realspace(20.0, u, 1e-3) == pytest.approx(kernel_realspace(20.0), rel=2e-3 / 20)
    assert omega(2.0) == pytest.approx(2.0)


def test_regularization_spec_validation():
    with pytest.raises(BlipFieldError):
        RegularizationSpec(epsilon=-1)
    with pytest.raises(BlipFieldError):
        RegularizationSpec(mode="realspace")
    with pytest.raises(BlipFieldError):
        RegularizationSpec(mode="wavelet", epsilon=1)


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_realspace_matches_spectral(eps):
    psi = gaussian_packet(G, 0.0, 1.0, k0=3.0)
    a = regularize(psi, RegularizationSpec(epsilon=eps)).amp
    b = regularize(psi, RegularizationSpec(epsilon=eps, mode="realspace")).amp
    assert np.linalg.norm(a - b) / np.linalg.norm(a) < 1e-8


def test_regularized_tail_matches_singular_kernel():
    # far from the packet the spectral multiplier acts as the |x|^-3/2 kernel
    g = SpatialGrid(2048.0, 16384)
    sigma = 1.0
    psi = gaussian_packet(g, 0.0, sigma)
    field = regularize(psi).amp.real

    def amp(y):
        return (2 * math.pi * sigma**2) ** -0.25 * math.exp(-y * y / (4 * sigma**2))

    for x in (10.0, 12.0, 15.0):
        ref = singular_tail(x, amp, -8 * sigma, 8 * sigma)
        got = field[int(round(g.index_of(x)))]
        assert got == pytest.approx(ref, rel=0.03)


def test_regularize_is_linear():
    a, b = random_packet(1), random_packet(2)
    spec = RegularizationSpec(epsilon=0.1)
    lhs = regularize(a.replace(amp=a.amp + 2j * b.amp), spec).amp
    rhs = regularize(a, spec).amp + 2j * regularize(b, spec).amp
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * np.max(np.abs(lhs))
