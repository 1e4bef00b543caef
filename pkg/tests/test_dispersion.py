import numpy as np
import pytest
from scipy.signal import fftconvolve
from scipy.special import airy

from zkstrip.dispersion import (
    airy_kernel_2d,
    omega_2d,
    omega_k,
    propagate_2d,
    propagate_mode,
    sigma_k,
    space_time_spectrum,
)
from zkstrip.errors import NumericError
from zkstrip.forcing import linear_trace
from zkstrip.solver import l2_norm
from zkstrip.transverse import StripGeometry, TransverseModes, forward_transverse, inverse_transverse


def test_dispersion_examples(default_geom):
    assert omega_k(1.0, 1, default_geom) == pytest.approx(1.0)
    assert omega_k(2.0, 2, default_geom) == pytest.approx(8.0 + 3.0 * 2.0)
    assert sigma_k(1, default_geom) == 0.0
    assert sigma_k(2, default_geom) == -3.0
    # the strip relation is the plane relation at eta = k pi / B
    assert omega_2d(1.5, 3.0, 1.0) == pytest.approx(omega_k(1.5, 3, default_geom))


def test_propagate_zero_time_and_plane_wave(small_geom):
    g = small_geom
    u = np.cos(np.pi / g.L * 3 * g.x)
    assert np.array_equal(propagate_mode(u, 2, 0.0, g), u)
    xi = 3 * np.pi / g.L
    got = propagate_mode(u, 2, 0.7, g)
    assert np.allclose(got, np.cos(xi * g.x + 0.7 * omega_k(xi, 2, g)), atol=1e-12)
    with pytest.raises(NumericError):
        propagate_2d(np.full((g.K, g.Nx), np.nan), 1.0, g)


def test_airy_kernel_reduces_to_airy_function():
    # integrating A over y collapses eta to 0: (2 pi)^-1 int e^{i(x xi + xi^3)} dxi
    y = np.linspace(-30, 30, 3001)
    for x in (-1.0, 0.0, 1.0):
        value, _ = airy_kernel_2d(x, y, nodes=256, tol=1e-6)
        exact = 3 ** (-1 / 3) * airy(3 ** (-1 / 3) * x)[0]
        assert np.trapezoid(value, y).real == pytest.approx(exact, rel=1e-8)


def test_airy_kernel_even_in_y():
    x = np.array([-3.0, 0.5, 2.0])
    a, _ = airy_kernel_2d(x, 1.7)
    b, _ = airy_kernel_2d(x, -1.7)
    assert np.allclose(a, b, rtol=1e-12)


def test_propagator_matches_airy_convolution():
    # wide strip, centred Gaussian: walls and wrap-around are negligible at t = 1
    geom = StripGeometry(B=40.0, a=0.0, K=96, L=40.0, Nx=256, Ny=256)
    yc = 20.0

    def bump(X, Y):
        return np.exp(-(X**2 + (Y - yc) ** 2))

    u0 = forward_transverse(bump(geom.x[:, None], geom.y[None, :]), geom).coefficients.T
    u1 = inverse_transverse(TransverseModes(propagate_2d(u0, 1.0, geom).T, geom))
    h = geom.dx
    ax = np.arange(-51, 52) * h
    ay = np.arange(-32, 33) * h
    kernel, _ = airy_kernel_2d(ax[:, None], ay[None, :], nodes=384, tol=1e-8)
    gx = np.arange(-16, 17) * h
    conv = fftconvolve(kernel, bump(gx[:, None], gx[None, :] + yc), mode="same") * h * h
    ix = np.searchsorted(geom.x, ax)
    iy = np.rint((yc + ay) / geom.dy).astype(int) - 1
    ref = u1[np.ix_(ix, iy)]
    mask = (np.abs(ax) < 8)[:, None] & (np.abs(ay) < 6)[None, :]
    err = np.linalg.norm((ref - conv.real)[mask]) / np.linalg.norm(ref[mask])
    assert err <= 1e-3
    assert np.abs(conv.imag).max() < 1e-12


def test_linear_trace_against_direct_sum(small_geom, rng):
    g = small_geom
    u0 = np.exp(-((g.x - 3.0) ** 2))[None, :] * rng.standard_normal((g.K, 1))
    t = np.linspace(0, 1, 11)
    tr = linear_trace(u0, t, g).modes
    direct = np.array([[propagate_mode(u0[k], k + 1, tn, g)[g.x0_index] for k in range(g.K)] for tn in t])
    assert np.allclose(tr, direct, atol=1e-12)


def test_spectrum_plancherel(small_geom, rng):
    g = small_geom
    u = rng.standard_normal((32, g.K, g.Nx))
    dt = 0.05
    spec = space_time_spectrum(u, dt, g)
    lhs = np.sum(np.abs(spec.values) ** 2) * spec.dxi * spec.dtau / (2 * np.pi) ** 2
    assert lhs == pytest.approx(np.sum(u**2) * g.dx * dt, rel=1e-12)
    half = space_time_spectrum(u, dt, g, half=True)
    lhs_half = np.sum(half.multiplicity[None, :, None] * np.abs(half.values) ** 2) * half.dxi * half.dtau / (2 * np.pi) ** 2
    assert lhs_half == pytest.approx(lhs, rel=1e-12)


def test_propagator_is_unitary_on_random_data(small_geom, rng):
    u = rng.standard_normal((small_geom.K, small_geom.Nx))
    assert l2_norm(propagate_2d(u, 2.3, small_geom), small_geom) == pytest.approx(l2_norm(u, small_geom), rel=1e-13)
