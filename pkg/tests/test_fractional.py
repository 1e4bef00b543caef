import math

import numpy as np
import pytest

from zkstrip.errors import OrderError
from zkstrip.forcing import smoothstep
from zkstrip.fractional import (
    causal_multiplier,
    frac_fourier_multiplier,
    gamma_ratio_constant,
    power_symbol,
    rl_integral,
)

GAMMAS = (1 / 3, 1 / 2, 2 / 3, 1.0)


def closed_form(mu, gamma, t):
    return math.gamma(mu + 1) / math.gamma(mu + gamma + 1) * t ** (mu + gamma)


def rel_err(n, gamma, mu):
    t = np.linspace(0, 1, n + 1)
    got = rl_integral(t**mu, gamma, 1.0 / n)
    exact = closed_form(mu, gamma, t)
    return np.linalg.norm(got - exact) / np.linalg.norm(exact)


@pytest.mark.parametrize("gamma", GAMMAS)
@pytest.mark.parametrize("mu", [0, 1])
def test_exact_for_linear_data(gamma, mu):
    assert rel_err(64, gamma, mu) < 1e-12


@pytest.mark.parametrize("gamma", GAMMAS)
def test_second_order_for_quadratic(gamma):
    e1, e2 = rel_err(128, gamma, 2), rel_err(256, gamma, 2)
    assert np.log2(e1 / e2) == pytest.approx(2.0, abs=0.15)


def test_semigroup():
    n = 1024
    dt = 1.0 / n
    t = dt * np.arange(n + 1)
    h = np.cos(3 * t) + t
    for g, b in ((1 / 3, 2 / 3), (1 / 2, 1 / 3), (2 / 3, 1.0)):
        lhs = rl_integral(rl_integral(h, b, dt), g, dt)
        rhs = rl_integral(h, g + b, dt)
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) <= 1e-3


def test_gamma_one_is_cumulative_trapezoid():
    t = np.linspace(0, 2, 201)
    h = np.sin(t)
    from scipy.integrate import cumulative_trapezoid

    assert np.allclose(rl_integral(h, 1.0, t[1]), cumulative_trapezoid(h, t, initial=0), atol=1e-14)


def test_order_error():
    with pytest.raises(OrderError):
        rl_integral(np.ones(8), -2 / 3, 0.1)
    with pytest.raises(OrderError):
        rl_integral(np.ones(8), 0.0, 0.1)


def test_power_symbol_examples():
    tau = np.array([-2.0, 0.0, 1.0])
    assert np.allclose(power_symbol(tau, 0.0), 1.0)
    assert np.allclose(power_symbol(tau, 1.0), 1j * tau)
    two_thirds = power_symbol(np.array([1.0]), 2 / 3)[0]
    assert two_thirds == pytest.approx(np.exp(1j * np.pi / 3))
    neg = power_symbol(tau, -2 / 3)
    assert np.isfinite(neg).all() and neg[1] == pytest.approx((0.5j) ** (-2 / 3))
    spec = np.ones(3)
    assert np.allclose(frac_fourier_multiplier(spec, 1.0, tau), 1j * tau)


def test_gamma_ratio_constant():
    # Gamma(4/3) = Gamma(1/3) / 3
    value = math.gamma(1 / 3) / 3 / math.gamma(2 / 3)
    assert gamma_ratio_constant() == pytest.approx(value, rel=1e-14)
    assert 0.659 < value < 0.66


def test_causal_multiplier_matches_time_domain():
    # symbol s^{-gamma} on the damped contour is I_gamma
    n = 512
    dt = 1.0 / n
    t = dt * np.arange(n + 1)
    h = np.sin(5 * t) * t
    for gamma in (1 / 3, 2 / 3):
        got = causal_multiplier(h, lambda tau, eps: (eps + 1j * tau) ** (-gamma), dt).real
        ref = rl_integral(h, gamma, dt)
        assert np.linalg.norm(got - ref) / np.linalg.norm(ref) <= 1e-2


def test_causal_multiplier_is_causal():
    n = 256
    dt = 1.0 / n
    # smooth switch-on at t = 1/2; a jump would ring across the whole window
    h = smoothstep((dt * np.arange(n) - 0.5) / 0.1)
    out = causal_multiplier(h, lambda tau, eps: (eps + 1j * tau) ** (-1 / 3), dt).real
    assert np.abs(out[: n // 2 - 4]).max() < 1e-5 * np.abs(out).max()
