import math

import numpy as np
import pytest
from scipy.integrate import quad

from zkstrip.integrator import (
    delta_hat,
    exp_integrate,
    free_evolution_hat,
    from_hat,
    phi_functions,
    to_hat,
    trace_from_hat,
)
from zkstrip.dispersion import propagate_2d
from zkstrip.transverse import StripGeometry


def phi_quad(m, z):
    f = lambda th, part: part(np.exp((1 - th) * z) * th ** (m - 1) / math.factorial(m - 1))
    return quad(f, 0, 1, args=(np.real,))[0] + 1j * quad(f, 0, 1, args=(np.imag,))[0]


@pytest.mark.parametrize("z", [1e-3j, 0.5 + 0.2j, 3j, -7.0, 40j])
def test_phi_functions(z):
    phis = phi_functions(np.array([z]), 4)
    for m, value in enumerate(phis, start=1):
        assert value[0] == pytest.approx(phi_quad(m, z), rel=1e-10, abs=1e-13)


def one_bin_geom():
    return StripGeometry(K=1, L=10.0, Nx=8, Ny=4)


def exact_duhamel(omega, src, t):
    def part(s, fn):
        return fn(np.exp(1j * omega * (t - s)) * src(s))

    return quad(part, 0, t, args=(np.real,), limit=200)[0] + 1j * quad(part, 0, t, args=(np.imag,), limit=200)[0]


def solve_single(src, omega, nt, T=1.0, order=4):
    geom = one_bin_geom()
    dt = T / (nt - 1)
    t = dt * np.arange(nt)
    s = np.zeros((nt, 1, geom.Nx // 2 + 1), dtype=complex)
    s[:, 0, 1] = src(t)
    om = np.zeros((1, geom.Nx // 2 + 1))
    om[0, 1] = omega
    return exp_integrate(s, dt, geom, order=order, omega=om)[:, 0, 1], t


def test_cubic_source_is_exact():
    src = lambda t: 1.0 - 2.0 * t + 0.5 * t**2 + 3.0 * t**3
    got, t = solve_single(src, 25.0, 9)
    exact = np.array([exact_duhamel(25.0, src, tn) for tn in t])
    assert np.allclose(got, exact, atol=1e-12)


@pytest.mark.parametrize("order,expected", [(4, 4.0), (2, 2.0)])
def test_convergence_order(order, expected):
    src = lambda t: np.cos(7 * t)
    ref = exact_duhamel(30.0, src, 1.0)
    errs = [abs(solve_single(src, 30.0, n + 1, order=order)[0][-1] - ref) for n in (32, 64)]
    assert np.log2(errs[0] / errs[1]) == pytest.approx(expected, abs=0.3)


def test_free_evolution_matches_propagator(small_geom, rng):
    u0 = rng.standard_normal((small_geom.K, small_geom.Nx))
    t = np.array([0.0, 0.3, 1.1])
    got = from_hat(free_evolution_hat(to_hat(u0), t, small_geom), small_geom)
    for n, tn in enumerate(t):
        assert np.allclose(got[n], propagate_2d(u0, tn, small_geom), atol=1e-12)


def test_homogeneous_step_is_exact(small_geom, rng):
    u0 = rng.standard_normal((small_geom.K, small_geom.Nx))
    nt, dt = 9, 0.125
    out = exp_integrate(np.zeros((nt, small_geom.K, small_geom.Nx // 2 + 1)), dt, small_geom, initial=to_hat(u0))
    assert np.allclose(from_hat(out[-1], small_geom), propagate_2d(u0, 1.0, small_geom), atol=1e-12)


def test_trace_and_delta(small_geom, rng):
    u = rng.standard_normal((3, small_geom.K, small_geom.Nx))
    assert np.allclose(trace_from_hat(to_hat(u), small_geom), u[..., small_geom.x0_index], atol=1e-13)
    d = from_hat(delta_hat(small_geom), small_geom)
    assert np.sum(d) * small_geom.dx == pytest.approx(1.0)
    assert np.argmax(d) == small_geom.x0_index
    assert delta_hat(small_geom)[-1] == 0.0
