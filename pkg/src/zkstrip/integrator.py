"""Exponential time integration of per-mode forced linear ZK equations.

Fields in this module are real mode stacks u[n, k, j] (time, mode, x-node)
or their half-spectra u_hat[n, k, m] from ``numpy.fft.rfft`` along x.  In
half-spectrum space mode k obeys

    d/dt u_hat = i omega_k u_hat + s_hat(t),

which the integrator solves exactly between nodes for a source given by
its polynomial interpolant in t.
"""
from __future__ import annotations

from math import factorial

import numpy as np

from .dispersion import propagation_omega
from .transverse import StripGeometry

__all__ = [
    "to_hat",
    "from_hat",
    "phi_functions",
    "exp_integrate",
    "free_evolution_hat",
    "delta_hat",
    "trace_weights",
    "trace_from_hat",
    "rxi",
]


def rxi(geom: StripGeometry) -> np.ndarray:
    """Nonnegative angular frequencies of the rfft layout."""
    return 2.0 * np.pi * np.fft.rfftfreq(geom.Nx, d=geom.dx)


def to_hat(u):
    return np.fft.rfft(np.asarray(u), axis=-1)


def from_hat(u_hat, geom: StripGeometry):
    return np.fft.irfft(u_hat, n=geom.Nx, axis=-1)


def phi_functions(z, order: int = 2):
    """phi_1(z), ..., phi_order(z) with phi_m(z) = sum_j z^j / (j + m)!.

    phi_1 = (e^z - 1)/z and phi_{m+1} = (phi_m - 1/m!)/z; the Taylor series
    is used for |z| < 1 where the recursion cancels.
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1.0
    zz = np.where(small, 1.0, z)
    closed = [(np.exp(zz) - 1.0) / zz]
    for m in range(1, order):
        closed.append((closed[-1] - 1.0 / factorial(m)) / zz)
    out = []
    for m in range(1, order + 1):
        series = np.zeros_like(z)
        zj = np.ones_like(z)
        for j in range(30):
            series += zj / factorial(j + m)
            zj = zj * z
        out.append(np.where(small, series, closed[m - 1]))
    return out


def _lagrange_weights(nodes, phis, h):
    """Step weights for a source interpolated through ``nodes`` (in steps).

    int_0^h e^{(h - s) A} p(s) ds = h sum_m c_m m! phi_{m+1}(hA) for
    p(theta h) = sum_m c_m theta^m.
    """
    nodes = np.asarray(nodes, dtype=float)
    weights = []
    for j, xj in enumerate(nodes):
        others = np.delete(nodes, j)
        coeffs = np.poly(others)[::-1] / np.prod(xj - others)  # ascending powers
        w = sum(coeffs[m] * factorial(m) * phis[m] for m in range(len(nodes)))
        weights.append(h * w)
    return weights


def exp_integrate(src_hat, dt: float, geom: StripGeometry, initial=None, order: int = 4, omega=None):
    """Solve the forced mode equations from u_hat(0) = ``initial`` (default 0).

    ``src_hat`` has shape (nt, K, Nx//2+1).  On each step the source is
    replaced by its interpolant (linear for ``order`` 2, cubic through four
    neighbouring nodes for ``order`` 4) and the step is integrated exactly,
    so there is no step-size restriction from omega.  ``omega`` overrides
    the phase rates (broadcast against the mode axis).
    """
    src_hat = np.asarray(src_hat)
    nt = src_hat.shape[0]
    if omega is None:
        omega = propagation_omega(geom, real=True)
    z = 1j * omega * dt
    E = np.exp(z)
    out = np.empty(src_hat.shape, dtype=complex)
    out[0] = 0.0 if initial is None else initial
    if order == 2 or nt < 4:
        phis = phi_functions(z, 2)
        w0, w1 = _lagrange_weights([0, 1], phis, dt)
        for n in range(nt - 1):
            out[n + 1] = E * out[n] + w0 * src_hat[n] + w1 * src_hat[n + 1]
        return out
    if order != 4:
        raise ValueError(f"order must be 2 or 4, got {order}")
    phis = phi_functions(z, 4)
    first = _lagrange_weights([0, 1, 2, 3], phis, dt)
    inner = _lagrange_weights([-1, 0, 1, 2], phis, dt)
    last = _lagrange_weights([-2, -1, 0, 1], phis, dt)
    for n in range(nt - 1):
        if n == 0:
            w, base = first, 0
        elif n == nt - 2:
            w, base = last, n - 2
        else:
            w, base = inner, n - 1
        acc = E * out[n]
        for j in range(4):
            acc = acc + w[j] * src_hat[base + j]
        out[n + 1] = acc
    return out


def free_evolution_hat(u0_hat, t, geom: StripGeometry):
    """exp(i t_n omega) u0_hat for every t_n; returns shape (len(t), K, M)."""
    omega = propagation_omega(geom, real=True)
    t = np.asarray(t, dtype=float)
    return np.exp(1j * t[:, None, None] * omega[None]) * np.asarray(u0_hat)[None]


def delta_hat(geom: StripGeometry) -> np.ndarray:
    """Half-spectrum of the band-limited unit-mass delta at the x=0 node.

    The Nyquist coefficient is dropped: that bin does not propagate, so
    forcing it would accumulate int f dt there.
    """
    m = np.arange(geom.Nx // 2 + 1)
    out = np.where(m % 2 == 0, 1.0, -1.0) / geom.dx
    out[-1] = 0.0
    return out


def trace_weights(geom: StripGeometry) -> np.ndarray:
    """Weights w with u(x=0) = Re(sum_m w_m u_hat_m) for real fields."""
    n = geom.Nx
    m = np.arange(n // 2 + 1)
    c = np.full(m.shape, 2.0)
    c[0] = 1.0
    c[-1] = 1.0
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    return c * sign / n


def trace_from_hat(u_hat, geom: StripGeometry):
    """Values at the x=0 node, shape u_hat.shape[:-1]."""
    return np.real(np.asarray(u_hat) @ trace_weights(geom))
