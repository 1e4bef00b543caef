"""Dispersion relations and the linear ZK group in multiplier and kernel form.

Mode stacks are arrays whose last two axes are (mode k, x-node); any
leading axes (time, samples) are broadcast.  The linear group acts on the
k-th mode as multiplication by exp(i t omega_k(xi)) in longitudinal
Fourier space, which is the sign that makes

    u_t + a u_x + u_xxx + u_xyy = 0

hold for propagated data (checked by the PDE-residual tests).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, NumericError
from .transverse import StripGeometry, _check_mode

__all__ = [
    "omega_2d",
    "omega_k",
    "sigma_k",
    "omega_table",
    "propagation_omega",
    "propagate_mode",
    "propagate_2d",
    "airy_kernel_2d",
    "ModeSpectrum",
    "space_time_spectrum",
]


def omega_2d(xi, eta, a):
    """Whole-plane dispersion relation xi^3 + xi eta^2 - a xi."""
    xi = np.asarray(xi, dtype=float)
    return xi**3 + xi * np.asarray(eta, dtype=float) ** 2 - a * xi


def omega_k(xi, k, geom: StripGeometry):
    """Per-mode dispersion xi^3 + (lambda_k - a) xi."""
    k = _check_mode(k, geom)
    lam = (k * np.pi / geom.B) ** 2
    xi = np.asarray(xi, dtype=float)
    return xi**3 + (lam - geom.a) * xi


def sigma_k(k, geom: StripGeometry):
    """Eigenvalue a - lambda_k of the transverse operator a + d_y^2."""
    k = _check_mode(k, geom)
    return geom.a - (k * np.pi / geom.B) ** 2


def omega_table(geom: StripGeometry, xi=None) -> np.ndarray:
    """omega_k(xi) for every retained mode, shape (K, len(xi))."""
    xi = geom.xi if xi is None else np.asarray(xi, dtype=float)
    return xi[None, :] ** 3 + (geom.lam - geom.a)[:, None] * xi[None, :]


def propagation_omega(geom: StripGeometry, real: bool = False) -> np.ndarray:
    """Phase rates used by the discrete group, shape (K, Nx) or (K, Nx//2+1).

    The unpaired Nyquist bin is held fixed (rate 0) so that real data stay
    real and the discrete group is exactly unitary for any input.
    """
    xi = 2.0 * np.pi * np.fft.rfftfreq(geom.Nx, d=geom.dx) if real else geom.xi
    om = omega_table(geom, xi)
    nyq = geom.Nx // 2 if not real else xi.size - 1
    om[:, nyq] = 0.0
    return om


def _require_finite(u):
    if not np.all(np.isfinite(u)):
        raise NumericError("non-finite values in propagator input")


def propagate_mode(u_k, k, dt: float, geom: StripGeometry):
    """Apply S_k(dt) to samples of a single mode on the x-grid (last axis)."""
    u_k = np.asarray(u_k)
    _require_finite(u_k)
    if dt == 0:
        return u_k.copy()
    k = int(_check_mode(k, geom))
    phase = np.exp(1j * dt * propagation_omega(geom)[k - 1])
    out = np.fft.ifft(np.fft.fft(u_k, axis=-1) * phase, axis=-1)
    return out.real if np.isrealobj(u_k) else out


def propagate_2d(u0, t: float, geom: StripGeometry):
    """Apply S(t) to a mode stack (..., K, Nx); modes evolve independently."""
    u0 = np.asarray(u0)
    _require_finite(u0)
    if t == 0:
        return u0.copy()
    phase = np.exp(1j * t * propagation_omega(geom))
    out = np.fft.ifft(np.fft.fft(u0, axis=-1) * phase, axis=-1)
    return out.real if np.isrealobj(u0) else out


def airy_kernel_2d(x, y, nodes: int = 256, tol: float = 1e-10):
    """Two-dimensional Airy function A(x, y), the inverse transform of
    exp(i xi^3) exp(i xi eta^2) with the (2 pi)^-2 normalization.

    The eta integral is a Fresnel integral done in closed form; the
    remaining xi integral is rotated onto the rays arg xi = pi/6 and 5 pi/6
    where exp(i xi^3) decays like exp(-r^3).  Gauss-Legendre with ``nodes``
    and ``2 * nodes`` points gives the value and its error estimate.

    Returns ``(value, error_estimate)`` with the broadcast shape of x, y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    xb = np.broadcast_to(x, shape).reshape(-1, 1)
    yb = np.broadcast_to(y, shape).reshape(-1, 1)

    # r^3 - |x| r / 2 >= 45 at the truncation radius
    xmax = float(np.max(np.abs(xb))) if xb.size else 0.0
    R = 4.0
    while R**3 - 0.5 * xmax * R < 45.0:
        R *= 1.25

    def ray_quadrature(n):
        s, w = np.polynomial.legendre.leggauss(n)
        smax = np.sqrt(R)
        s = 0.5 * smax * (s + 1.0)
        w = 0.5 * smax * w
        r = s**2
        total = np.zeros(xb.shape[0], dtype=complex)
        for direction, sign in ((np.exp(1j * np.pi / 6), 1.0), (np.exp(5j * np.pi / 6), -1.0)):
            xi = r * direction
            # r = s^2 and dr = 2 s ds; the sqrt(1/xi) singularity cancels against s
            fresnel = np.sqrt(np.pi / (-1j * direction)) * np.exp(-1j * yb**2 / (4.0 * xi))
            integrand = np.exp(1j * xb * xi + 1j * xi**3) * fresnel * 2.0
            total += sign * direction * (integrand @ w)
        return total / (2.0 * np.pi) ** 2

    coarse = ray_quadrature(nodes)
    fine = ray_quadrature(2 * nodes)
    err = np.abs(fine - coarse)
    scale = np.maximum(np.abs(fine), 1e-300)
    if np.any(err > tol * np.maximum(scale, 1.0)):
        raise AccuracyError(
            f"Airy kernel quadrature error {err.max():.3g} above tolerance {tol:g}",
            estimate=float(err.max()),
        )
    return fine.reshape(shape), err.reshape(shape)


@dataclass
class ModeSpectrum:
    """Space-time spectrum u_hat_k(xi, tau), values of shape (K, Nxi, Ntau).

    Values approximate the continuous transform int e^{-i(x xi + t tau)} u dx dt,
    so Riemann sums use the measure dxi dtau / (2 pi)^2.  With ``half`` the
    xi axis holds only xi >= 0 (real fields); ``multiplicity`` carries the
    weight of each stored column in sums over the full plane.
    """

    values: np.ndarray
    xi: np.ndarray
    tau: np.ndarray
    geometry: StripGeometry = field(repr=False)
    half: bool = False

    @property
    def dxi(self) -> float:
        return float(abs(self.xi[1] - self.xi[0]))

    @property
    def dtau(self) -> float:
        return float(abs(self.tau[1] - self.tau[0]))

    @property
    def omega(self) -> np.ndarray:
        return omega_table(self.geometry, self.xi)

    @property
    def multiplicity(self) -> np.ndarray:
        m = np.ones(self.xi.size)
        if self.half:
            m[1:] = 2.0
            if self.geometry.Nx % 2 == 0:
                m[-1] = 1.0
        return m

    def scaled(self, c) -> "ModeSpectrum":
        return ModeSpectrum(self.values * c, self.xi, self.tau, self.geometry, self.half)


def space_time_spectrum(u, dt: float, geom: StripGeometry, pad: int = 1, half: bool = False) -> ModeSpectrum:
    """Transform a mode stack u[n, k, j] sampled at t_n = t_0 + n dt.

    ``pad`` zero-pads the time axis by that factor before the FFT.  With
    ``half`` (real input only) just the xi >= 0 columns are kept.
    """
    u = np.asarray(u)
    nt = u.shape[0]
    ntau = nt * pad
    if half:
        if np.iscomplexobj(u):
            raise ValueError("half spectra need real input")
        xfft = np.fft.rfft(u, axis=-1)
        xi = 2.0 * np.pi * np.fft.rfftfreq(geom.Nx, d=geom.dx)
    else:
        xfft = np.fft.fft(u, axis=-1)
        xi = geom.xi.copy()
    values = np.fft.fft(xfft, n=ntau, axis=0) * (geom.dx * dt)
    values = np.moveaxis(values, 0, -1)
    tau = 2.0 * np.pi * np.fft.fftfreq(ntau, d=dt)
    return ModeSpectrum(values, xi, tau, geom, half)
