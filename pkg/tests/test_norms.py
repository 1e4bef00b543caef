import numpy as np
import pytest

from zkstrip.dispersion import omega_k, propagate_2d, space_time_spectrum
from zkstrip.norms import (
    BourgainParams,
    energy_norm,
    extend_in_time,
    hs_t_l2y_norm,
    restriction_norm,
    x0b_norm,
    y0b_norm,
    zb_norm,
)

DT = 0.05
NT = 64


def single_bin(geom, k, j, m):
    """Complex plane wave in mode k on one (xi, tau) bin of the FFT grid."""
    xi0 = np.pi * j / geom.L
    tau0 = 2 * np.pi * m / (NT * DT)
    t = DT * np.arange(NT)
    u = np.zeros((NT, geom.K, geom.Nx), dtype=complex)
    u[:, k - 1, :] = np.exp(1j * (xi0 * geom.x[None, :] + tau0 * t[:, None]))
    return u, xi0, tau0


def test_x_norm_single_bin(small_geom):
    u, xi0, tau0 = single_bin(small_geom, 2, 5, 3)
    om = omega_k(xi0, 2, small_geom)
    assert abs(om) >= 1.0
    p = BourgainParams(b=0.45, alpha=0.6)
    rep = x0b_norm(space_time_spectrum(u, DT, small_geom), p)
    expected = (1 + abs(tau0 - om)) ** (2 * p.b) * 2 * small_geom.L * NT * DT
    assert rep.total == pytest.approx(expected, rel=1e-12)
    assert rep.low == pytest.approx(0.0, abs=1e-20 * expected)


def test_y_norm_single_bin(small_geom):
    u, xi0, tau0 = single_bin(small_geom, 2, 4, -2)
    assert abs(omega_k(xi0, 2, small_geom)) >= 1.0
    mod = 1 + abs(tau0 - omega_k(xi0, 2, small_geom))
    p = BourgainParams()
    rep = y0b_norm(space_time_spectrum(u, DT, small_geom), p)
    L2 = 2 * small_geom.L
    assert rep.high == pytest.approx(mod ** (-2 * p.b) * L2 * NT * DT, rel=1e-12)
    assert rep.third == pytest.approx(mod**-2 * L2, rel=1e-12)


def test_low_dispersion_region_uses_tau_weight(small_geom):
    u, xi0, tau0 = single_bin(small_geom, 1, 1, 2)
    assert abs(omega_k(xi0, 1, small_geom)) < 1.0
    p = BourgainParams(b=0.45, alpha=0.6)
    rep = x0b_norm(space_time_spectrum(u, DT, small_geom), p)
    assert rep.high == pytest.approx(0.0, abs=1e-20)
    assert rep.low == pytest.approx((1 + tau0) ** (2 * p.alpha) * 2 * small_geom.L * NT * DT, rel=1e-12)


def test_x_reduces_to_l2(small_geom, rng):
    u = rng.standard_normal((NT, small_geom.K, small_geom.Nx))
    p = BourgainParams(s=0.0, b=0.0, alpha=0.0)
    l2 = np.sqrt(np.sum(u**2) * small_geom.dx * DT)
    for half in (False, True):
        rep = x0b_norm(space_time_spectrum(u, DT, small_geom, half=half), p)
        assert rep.norm == pytest.approx(l2, rel=1e-12)
        assert rep.high + rep.low == rep.total


def test_x_monotone_in_b(small_geom, rng):
    u = rng.standard_normal((NT, small_geom.K, small_geom.Nx))
    spec = space_time_spectrum(u, DT, small_geom, half=True)
    values = [x0b_norm(spec, BourgainParams(b=b, alpha=0.6)).total for b in np.linspace(0, 0.5, 11)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_hs_norm_of_tone(small_geom):
    t = DT * np.arange(NT)
    tau0 = 2 * np.pi * 5 / (NT * DT)
    modes = np.zeros((NT, small_geom.K), dtype=complex)
    modes[:, 0] = np.exp(1j * tau0 * t)
    for s in (-1 / 3, 0.0, 1 / 3):
        assert hs_t_l2y_norm(modes, DT, s) == pytest.approx((1 + tau0) ** s * np.sqrt(NT * DT), rel=1e-12)


def test_energy_norm_closed_form(small_geom):
    xi0 = 3 * np.pi / small_geom.L
    u = np.zeros((NT, small_geom.K, small_geom.Nx))
    u[:, 2, :] = np.cos(xi0 * small_geom.x)
    expected = np.sqrt((NT - 1) * DT * (xi0**2 + small_geom.lam[2]) * small_geom.L)
    assert energy_norm(u, DT, small_geom) == pytest.approx(expected, rel=1e-12)
    assert energy_norm(u[:1], DT, small_geom) == 0.0


def test_zb_is_sum(small_geom, rng):
    u = rng.standard_normal((NT, small_geom.K, small_geom.Nx))
    p = BourgainParams()
    x = x0b_norm(space_time_spectrum(u, DT, small_geom), p).norm
    assert zb_norm(u, DT, small_geom, p) == pytest.approx(x + energy_norm(u, DT, small_geom), rel=1e-12)


def free_solution(geom):
    u0 = np.zeros((geom.K, geom.Nx))
    u0[0] = np.exp(-((geom.x / 2) ** 2))
    t = DT * np.arange(NT)
    return np.stack([propagate_2d(u0, tn, geom) for tn in t])


def test_extension_keeps_window(small_geom):
    u = free_solution(small_geom)
    for strategy in ("zero", "reflection", "cutoff"):
        ext = extend_in_time(u, DT, small_geom, strategy, n_ext=20)
        assert ext.shape[0] == NT + 40
        assert np.array_equal(ext[20 : 20 + NT], u)
    with pytest.raises(ValueError):
        extend_in_time(u, DT, small_geom, "mirror")


def test_restriction_picks_smallest(small_geom):
    u = free_solution(small_geom)
    res = restriction_norm(u, DT, small_geom)
    assert res.value == min(res.candidates.values())
    # free evolution continued smoothly beats the jump of the zero extension
    assert res.candidates["cutoff"] < res.candidates["zero"]
    with_energy = restriction_norm(u, DT, small_geom, include_energy=True)
    assert with_energy.value == pytest.approx(res.value + energy_norm(u, DT, small_geom))


def test_restriction_warns_outside_window(small_geom):
    u = free_solution(small_geom)
    with pytest.warns(UserWarning):
        restriction_norm(u, DT, small_geom, BourgainParams(b=0.7))
    assert BourgainParams().admissible
    assert not BourgainParams(b=0.3).admissible
