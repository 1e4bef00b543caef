"""Riemann-Liouville fractional integrals and (i tau)^gamma multipliers."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as gamma_fn

from .errors import OrderError

__all__ = [
    "rl_integral",
    "frac_fourier_multiplier",
    "power_symbol",
    "causal_multiplier",
    "gamma_ratio_constant",
]


@lru_cache(maxsize=64)
def _product_weights(gamma: float, n: int):
    """Product-trapezoid weights for I_gamma on n+1 uniform nodes.

    Returns the convolution stencil w[m] and the start-node weights a0[m]
    (both already divided by Gamma(gamma + 2)); exact for piecewise-linear h.
    """
    m = np.arange(n + 1, dtype=float)
    g1 = gamma + 1.0
    w = np.empty(n + 1)
    w[0] = 1.0
    w[1:] = (m[1:] + 1.0) ** g1 - 2.0 * m[1:] ** g1 + (m[1:] - 1.0) ** g1
    a0 = np.zeros(n + 1)
    a0[1:] = (m[1:] - 1.0) ** g1 - (m[1:] - gamma - 1.0) * m[1:] ** gamma
    c = 1.0 / gamma_fn(gamma + 2.0)
    w *= c
    a0 *= c
    w.setflags(write=False)
    a0.setflags(write=False)
    return w, a0


def rl_integral(h, gamma: float, dt: float, axis: int = -1):
    """I_gamma[h](t_n) = 1/Gamma(gamma) int_0^{t_n} (t_n - s)^(gamma-1) h(s) ds.

    ``h`` is sampled at t_n = n dt, n = 0..N-1, along ``axis``.  The kernel
    singularity is integrated exactly on each panel against the linear
    interpolant of h, so the rule is exact for piecewise-linear data and
    second-order accurate for smooth data.
    """
    if not gamma > 0:
        raise OrderError(f"time-domain RL integral needs gamma > 0, got {gamma}; use the multiplier form")
    h = np.moveaxis(np.asarray(h), axis, -1)
    n = h.shape[-1]
    w, a0 = _product_weights(float(gamma), n - 1)
    if n > 64:
        conv = fftconvolve(h, np.broadcast_to(w, h.shape[:-1] + w.shape), axes=-1)[..., :n]
    else:
        conv = np.apply_along_axis(lambda v: np.convolve(v, w)[:n], -1, h)
    # the j=0 node carries a0 instead of the interior stencil value
    out = conv + (a0 - w) * h[..., :1]
    out[..., 0] = 0.0
    out = out * dt**gamma
    return np.moveaxis(out, -1, axis)


def power_symbol(tau, gamma: float, damping: float = 0.0, zero_bin: str = "default", tau_min=None):
    """Samples of (i tau)^gamma, or (damping + i tau)^gamma when damping > 0.

    Principal branch: (i tau)^gamma = |tau|^gamma exp(i pi gamma sgn(tau) / 2).
    With damping == 0 the tau = 0 bin follows ``zero_bin``: ``"default"``
    sets 0 for gamma > 0 and (i tau_min / 2)^gamma for gamma < 0.
    """
    tau = np.asarray(tau, dtype=float)
    if gamma == 0:
        return np.ones(tau.shape, dtype=complex)
    if damping > 0:
        return np.power(damping + 1j * tau, gamma)
    if tau.ndim == 0:
        return power_symbol(tau[None], gamma, damping, zero_bin, tau_min)[0]
    zero = tau == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(tau) ** gamma * np.exp(0.5j * np.pi * gamma * np.sign(tau))
    if np.any(zero):
        if zero_bin != "default":
            raise ValueError(f"unknown zero-bin rule {zero_bin!r}")
        if gamma > 0:
            out[zero] = 0.0
        else:
            if tau_min is None:
                nonzero = np.abs(tau[~zero])
                tau_min = nonzero.min() if nonzero.size else 1.0
            out[zero] = (0.5j * tau_min) ** gamma
    return out


def frac_fourier_multiplier(spectrum, gamma: float, tau, damping: float = 0.0, axis: int = -1):
    """Multiply a temporal spectrum by (i tau)^gamma along ``axis``."""
    spectrum = np.moveaxis(np.asarray(spectrum), axis, -1)
    return np.moveaxis(spectrum * power_symbol(tau, gamma, damping), -1, axis)


def causal_multiplier(h, symbol, dt: float, damping_factor: float = 20.0, pad: int = 2, axis: int = -1):
    """Apply a causal temporal Fourier multiplier to samples on t_n = n dt.

    ``symbol(tau, damping)`` must return the multiplier evaluated at the
    complex frequency tau - i*damping, i.e. its Laplace symbol at
    s = damping + i tau.  The input is zero-padded by ``pad`` and weighted
    by exp(-damping t) before the FFT, so images from the periodic window
    are suppressed by exp(-damping_factor).  The unpaired Nyquist bin is
    dropped so real input gives real output.  Returns samples on the input
    grid.
    """
    h = np.moveaxis(np.asarray(h), axis, -1)
    n = h.shape[-1]
    nfft = pad * n
    period = nfft * dt
    eps = damping_factor / period
    t = dt * np.arange(nfft)
    tau = 2.0 * np.pi * np.fft.fftfreq(nfft, d=dt)
    weight = np.exp(-eps * t)
    spec = np.fft.fft(h * weight[:n], n=nfft, axis=-1)
    if nfft % 2 == 0:
        spec[..., nfft // 2] = 0.0
    out = np.fft.ifft(spec * symbol(tau, eps), axis=-1)[..., :n] / weight[:n]
    return np.moveaxis(out, -1, axis)


def gamma_ratio_constant() -> float:
    """C_Gamma = Gamma(4/3) / Gamma(2/3), approximately 0.6594."""
    value = float(gamma_fn(4.0 / 3.0) / gamma_fn(2.0 / 3.0))
    assert value < 1.0
    return value
