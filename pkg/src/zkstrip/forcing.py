"""Boundary forcing: the map from wavemaker data g to the Dirac source f.

Mode k of the linear problem forced by delta_0(x) f_k(t) has an x=0 trace
whose symbol is inverted by

    M(k, tau) = (i tau)^{4/3} / ((i tau)^{2/3} - C_Gamma sigma_k),
    f_hat_k  = M(k, tau) a_hat_k(tau) / (C_cal Gamma(2/3)),

where a_k are the sine coefficients of the corrected data g1.  Boundary
series carry time on axis 0 and modes on axis 1.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .dispersion import propagation_omega, sigma_k
from .errors import (
    ConfigError,
    DimensionError,
    DivergentSeriesError,
    SingularMultiplierError,
)
from .fractional import causal_multiplier, gamma_ratio_constant, power_symbol, rl_integral
from .integrator import delta_hat, exp_integrate, trace_from_hat, trace_weights
from .transverse import StripGeometry, forward_transverse, inverse_transverse, TransverseModes

__all__ = [
    "BoundaryData",
    "ForcingMultiplier",
    "RegularityReport",
    "Calibration",
    "linear_trace",
    "corrected_boundary",
    "forcing_multiplier",
    "multiplier_table",
    "ratio_field",
    "forcing_from_boundary",
    "neumann_series_forcing",
    "forcing_regularity",
    "calibrate_forcing_constant",
    "delta_response_trace",
    "TraceInverse",
    "trace_inverse",
    "reference_wavemaker",
    "smoothstep",
]

ROLES = ("raw", "extended", "trace", "corrected", "forcing")
C_GAMMA = gamma_ratio_constant()
G23 = float(gamma_fn(2.0 / 3.0))


def smoothstep(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = (x >= 1.0).astype(float)
    mid = (x > 0) & (x < 1)
    e0 = np.exp(-1.0 / x[mid])
    e1 = np.exp(-1.0 / (1.0 - x[mid]))
    out[mid] = e0 / (e0 + e1)
    return out


@dataclass
class BoundaryData:
    """Sine coefficients a_k(t_n), t_n = n dt, stored as modes[n, k-1]."""

    modes: np.ndarray
    dt: float
    geometry: StripGeometry = field(repr=False)
    role: str = "raw"
    source: Optional["BoundaryData"] = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.modes = np.asarray(self.modes)
        if self.modes.ndim != 2 or self.modes.shape[1] != self.geometry.K:
            raise DimensionError(f"boundary modes must have shape (nt, {self.geometry.K}), got {self.modes.shape}")
        if self.role not in ROLES:
            raise ValueError(f"unknown boundary role {self.role!r}")
        if not self.dt > 0:
            raise ConfigError(f"time step must be positive, got {self.dt}")

    @property
    def nt(self) -> int:
        return self.modes.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.nt)

    @classmethod
    def from_samples(cls, g, dt: float, geom: StripGeometry, role: str = "raw") -> "BoundaryData":
        """Project samples g[n, j] on the interior y-grid onto the sine modes."""
        return cls(forward_transverse(np.asarray(g), geom).coefficients, dt, geom, role)

    @classmethod
    def zeros(cls, nt: int, dt: float, geom: StripGeometry, role: str = "raw") -> "BoundaryData":
        return cls(np.zeros((nt, geom.K)), dt, geom, role)

    def samples(self) -> np.ndarray:
        return inverse_transverse(TransverseModes(self.modes, self.geometry))

    def head(self, n: int) -> "BoundaryData":
        return BoundaryData(self.modes[:n].copy(), self.dt, self.geometry, self.role, self.source, dict(self.meta))

    def with_modes(self, modes, role: str | None = None, **meta) -> "BoundaryData":
        return BoundaryData(modes, self.dt, self.geometry, role or self.role, self, {**self.meta, **meta})


def _trace_full(u0, t, geom: StripGeometry):
    uh = np.fft.fft(u0, axis=-1)
    omega = propagation_omega(geom)
    sign = np.where(np.arange(geom.Nx) % 2 == 0, 1.0, -1.0) / geom.Nx
    phase = np.exp(1j * np.asarray(t)[:, None, None] * omega[None])
    return (phase * uh[None]) @ sign


def linear_trace(u0_ext, t, geom: StripGeometry) -> BoundaryData:
    """x=0 trace of the free evolution S(t) u0_ext at the times ``t``.

    ``u0_ext`` is a mode stack (K, Nx) on the periodic box; ``t`` must be a
    uniform grid starting at 0.
    """
    if geom.x[geom.x0_index] != 0.0:
        raise ConfigError("x=0 is not a node of the longitudinal grid")
    u0 = np.asarray(u0_ext)
    if u0.shape != (geom.K, geom.Nx):
        raise DimensionError(f"initial data must have shape {(geom.K, geom.Nx)}, got {u0.shape}")
    t = np.asarray(t, dtype=float)
    dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    if np.iscomplexobj(u0):
        values = _trace_full(u0, t, geom)
    else:
        omega = propagation_omega(geom, real=True)
        uh = np.fft.rfft(u0, axis=-1)
        phase = np.exp(1j * t[:, None, None] * omega[None])
        values = np.real((phase * uh[None]) @ trace_weights(geom))
    return BoundaryData(values, dt, geom, "trace")


def corrected_boundary(g_ext: BoundaryData, trace: BoundaryData) -> BoundaryData:
    """g1 = g_ext - trace, the data the forcing has to reproduce."""
    if g_ext.modes.shape != trace.modes.shape or not np.isclose(g_ext.dt, trace.dt, rtol=1e-12, atol=0):
        raise DimensionError(
            f"grid mismatch: {g_ext.modes.shape} at dt={g_ext.dt} vs {trace.modes.shape} at dt={trace.dt}"
        )
    return BoundaryData(g_ext.modes - trace.modes, g_ext.dt, g_ext.geometry, "corrected", g_ext)


def forcing_multiplier(k, tau, geom: StripGeometry, damping: float = 0.0):
    """M(k, tau); with ``damping`` > 0 it is evaluated at s = damping + i tau.

    On the real line the principal branch of ``power_symbol`` is used and the
    tau=0 bin returns 0.  A vanishing denominator with nonzero numerator
    raises :class:`SingularMultiplierError`.
    """
    sig = np.asarray(sigma_k(k, geom), dtype=float)
    tau = np.asarray(tau, dtype=float)
    if damping > 0:
        s = damping + 1j * tau
        num = s ** (4.0 / 3.0)
        den = s ** (2.0 / 3.0) - C_GAMMA * sig
    else:
        num = power_symbol(tau, 4.0 / 3.0)
        den = power_symbol(tau, 2.0 / 3.0) - C_GAMMA * sig
    num, den = np.broadcast_arrays(num, den)
    scale = np.maximum(1.0, np.abs(C_GAMMA * sig))
    tiny = np.abs(den) <= 1e-14 * scale
    singular = tiny & (np.abs(num) > 0)
    if np.any(singular):
        idx = np.argwhere(singular)[0]
        kk = np.broadcast_to(np.asarray(k), singular.shape)[tuple(idx)]
        tt = np.broadcast_to(tau, singular.shape)[tuple(idx)]
        raise SingularMultiplierError(int(kk), float(tt))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(tiny, 0.0, num / np.where(tiny, 1.0, den))
    return out


def ratio_field(k, tau, geom: StripGeometry):
    """r_k(tau) = C_Gamma sigma_k (i tau)^{-2/3}, the Neumann-series ratio."""
    return C_GAMMA * np.asarray(sigma_k(k, geom))[..., None] * power_symbol(tau, -2.0 / 3.0)


@dataclass
class ForcingMultiplier:
    """M(k, tau) tabulated on a (k, tau) grid with its series ratio."""

    values: np.ndarray
    tau: np.ndarray
    C_cal: float
    ratio: np.ndarray


def multiplier_table(geom: StripGeometry, tau, C_cal: float = 1.0) -> ForcingMultiplier:
    k = np.arange(1, geom.K + 1)
    tau = np.asarray(tau, dtype=float)
    values = forcing_multiplier(k[:, None], tau[None, :], geom)
    return ForcingMultiplier(values, tau, C_cal, ratio_field(k, tau, geom))


def _end_window(t, horizon: float | None):
    """1 up to 1.25 horizon, smooth decay to 0 at 2 horizon (or the grid end)."""
    if horizon is None:
        return np.ones_like(t)
    start = 1.25 * horizon
    stop = min(2.0 * horizon, float(t[-1]))
    if stop <= start:
        return np.ones_like(t)
    return 1.0 - smoothstep((t - start) / (stop - start))


def forcing_from_boundary(
    g1: BoundaryData,
    C_cal: float,
    horizon: float | None = None,
    damping_factor: float = 20.0,
    pad: int = 2,
) -> BoundaryData:
    """Forcing f from corrected boundary data by the multiplier M.

    The multiplier is realized causally on the damped contour (see
    :func:`~zkstrip.fractional.causal_multiplier`).  With ``horizon`` the
    data are tapered beyond 1.25 horizon; outputs on [0, horizon] do not
    depend on the taper.  The discarded imaginary residue is reported in
    ``meta["imag_residue"]``.
    """
    geom = g1.geometry
    k = np.arange(1, geom.K + 1)[:, None]
    h = (g1.modes * _end_window(g1.t, horizon)[:, None]).T

    def symbol(tau, eps):
        return forcing_multiplier(k, tau[None, :], geom, damping=eps) / (C_cal * G23)

    out = causal_multiplier(h, symbol, g1.dt, damping_factor=damping_factor, pad=pad).T
    real_norm = np.linalg.norm(out.real)
    residue = float(np.linalg.norm(out.imag) / real_norm) if real_norm > 0 else 0.0
    if residue > 1e-8:
        warnings.warn(f"forcing imaginary residue {residue:.2e} exceeds 1e-8", stacklevel=2)
    return BoundaryData(
        out.real,
        g1.dt,
        geom,
        "forcing",
        g1,
        {"imag_residue": residue, "C_cal": C_cal, "method": "multiplier"},
    )


def _active_modes(modes) -> np.ndarray:
    norms = np.linalg.norm(modes, axis=0)
    top = norms.max() if norms.size else 0.0
    return np.nonzero(norms > 1e-14 * top)[0] if top > 0 else np.array([], dtype=int)


def neumann_series_forcing(
    g1: BoundaryData,
    C_cal: float,
    n_max: int = 20,
    horizon: float | None = None,
    damping_factor: float = 20.0,
    pad: int = 2,
) -> BoundaryData:
    """Forcing f by the truncated geometric series in the time domain.

    f_k = sum_{n=0}^{n_max} (C_Gamma sigma_k)^n I_{2/3}^n I_{-2/3} a_k / (C_cal Gamma(2/3)).
    I_{-2/3} is applied in multiplier form; I_{2/3}^n I_{-2/3} = I_{2(n-1)/3}
    for n >= 1 is applied with the time-domain quadrature.  Refuses with
    :class:`DivergentSeriesError` if sup |r_k(tau)| >= 1 over the nonzero bins
    of the padded tau-grid for any mode carrying data.  The tail bound
    r^(n_max+1) / (1 - r) is stored in ``meta["truncation_bound"]``.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    geom = g1.geometry
    nfft = pad * g1.nt
    tau_min = 2.0 * np.pi / (nfft * g1.dt)
    sig = geom.sigma
    r_sup = C_GAMMA * np.abs(sig) * tau_min ** (-2.0 / 3.0)
    active = _active_modes(g1.modes)
    for idx in active:
        if r_sup[idx] >= 1.0:
            raise DivergentSeriesError(int(idx + 1), float(tau_min), float(r_sup[idx]))
    r = float(r_sup[active].max()) if active.size else 0.0

    h = g1.modes * _end_window(g1.t, horizon)[:, None]
    out = np.zeros_like(h, dtype=float)
    if active.size:
        ha = h[:, active]
        d23 = causal_multiplier(
            ha.T, lambda tau, eps: (eps + 1j * tau) ** (2.0 / 3.0), g1.dt, damping_factor, pad
        ).real.T
        acc = d23.copy()
        ratio = C_GAMMA * sig[active]
        for n in range(1, n_max + 1):
            if n == 1:
                term = ha
            else:
                term = rl_integral(ha, 2.0 * (n - 1) / 3.0, g1.dt, axis=0)
            acc = acc + ratio**n * term
        out[:, active] = acc
    out /= C_cal * G23
    bound = r ** (n_max + 1) / (1.0 - r) if r < 1 else np.inf
    return BoundaryData(
        out,
        g1.dt,
        geom,
        "forcing",
        g1,
        {"C_cal": C_cal, "method": "neumann", "n_max": n_max, "sup_ratio": r, "truncation_bound": bound},
    )


@dataclass
class RegularityReport:
    """Discrete sides of the weighted H^{-1/3} bound for the forcing.

    left  = sum_k k^2 int <tau>^{-2/3} |M|^2 |a_hat_k|^2 dtau / 2 pi
    right = sum_k k^2 int <tau>^{2/3} |a_hat_k|^2 dtau / 2 pi
    """

    left: float
    right: float
    c: float
    forcing_norm: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.left))

    @property
    def ratio(self) -> float:
        return self.left / self.right if self.right > 0 else 0.0

    @property
    def holds(self) -> bool:
        return self.left <= self.c * self.right * (1.0 + 1e-12)


def forcing_regularity(f: BoundaryData, c: float = 4.0 / 3.0, pad: int = 2) -> RegularityReport:
    """Evaluate both sides of the forcing regularity bound.

    ``c`` = 4/3 = 1/sin^2(pi/3) bounds |M|^2 / |tau|^{4/3} for every real
    sigma.  The data a_k are taken from ``f.source``; ``forcing_norm`` is the
    H^{-1/3}_t L^2_y norm of f itself.
    """
    from .norms import hs_t_l2y_norm

    if f.source is None:
        raise ValueError("forcing carries no source boundary data")
    a = f.source
    geom = f.geometry
    nfft = pad * a.nt
    spec = np.fft.fft(a.modes, n=nfft, axis=0) * a.dt
    tau = 2.0 * np.pi * np.fft.fftfreq(nfft, d=a.dt)
    dtau = 2.0 * np.pi / (nfft * a.dt)
    k = np.arange(1, geom.K + 1)
    M = forcing_multiplier(k[None, :], tau[:, None], geom)
    br = 1.0 + np.abs(tau)[:, None]
    w = (k**2)[None, :] * np.abs(spec) ** 2 * dtau / (2.0 * np.pi)
    left = float(np.sum(br ** (-2.0 / 3.0) * np.abs(M) ** 2 * w))
    right = float(np.sum(br ** (2.0 / 3.0) * w))
    report = RegularityReport(left, right, c, hs_t_l2y_norm(f.modes, f.dt, -1.0 / 3.0, pad=pad))
    if not report.holds:
        raise AssertionError(f"regularity bound violated: {left:.6g} > {c} * {right:.6g}")
    return report


def delta_response_trace(f: BoundaryData, nt: int | None = None) -> np.ndarray:
    """x=0 trace of the linear solution forced by delta_0(x) f(t), u(0)=0."""
    geom = f.geometry
    n = f.nt if nt is None else nt
    src = f.modes[:n, :, None] * delta_hat(geom)[None, None, :]
    return trace_from_hat(exp_integrate(src, f.dt, geom), geom)


def _trace_matrix(geom: StripGeometry, k: int, nt: int, dt: float, chunk: int = 128) -> np.ndarray:
    """Matrix A[n, j]: x=0 trace at t_n of the mode-k delta response to f = e_j."""
    dh = delta_hat(geom)
    omega = propagation_omega(geom, real=True)[k - 1][None, :]
    A = np.empty((nt, nt))
    for start in range(0, nt, chunk):
        cols = np.arange(start, min(start + chunk, nt))
        src = np.zeros((nt, cols.size, dh.size), dtype=complex)
        src[cols, np.arange(cols.size), :] = dh
        A[:, cols] = trace_from_hat(exp_integrate(src, dt, geom, omega=omega), geom)
    return A


@dataclass
class TraceInverse:
    """Exact inverse of the discrete f -> trace map on [0, T] per mode.

    ``apply(h)`` returns f with f(0) = 0 whose discrete delta response has
    x=0 trace h at t_1..t_N (h(0) must be 0 for compatible data).
    """

    geometry: StripGeometry
    dt: float
    nt: int
    factors: dict

    def apply(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        out = np.zeros_like(h)
        for k, (lu, piv) in self.factors.items():
            out[1:, k] = _lu_solve((lu, piv), h[1:, k])
        return out


def _lu_solve(factor, rhs):
    from scipy.linalg import lu_solve

    return lu_solve(factor, rhs)


def trace_inverse(geom: StripGeometry, nt: int, dt: float, modes=None) -> TraceInverse:
    """Factor the discrete trace map for the given modes (default all)."""
    from scipy.linalg import lu_factor

    modes = range(geom.K) if modes is None else modes
    factors = {}
    for k in modes:
        A = _trace_matrix(geom, k + 1, nt, dt)
        factors[int(k)] = lu_factor(A[1:, 1:])
    return TraceInverse(geom, dt, nt, factors)


def reference_wavemaker(t, tau0: float = 10.0, ramp: float = 0.3):
    """Smoothly switched-on tone used for calibration."""
    t = np.asarray(t, dtype=float)
    return smoothstep(t / ramp) * np.sin(tau0 * t)


@dataclass
class Calibration:
    C_cal: float
    mismatch: float
    mode: int


def calibrate_forcing_constant(
    geom: StripGeometry,
    T: float = 1.0,
    Nt: int = 256,
    mode: int = 1,
    tau0: float = 10.0,
    ramp: float = 0.3,
    damping_factor: float = 20.0,
    pad: int = 2,
) -> Calibration:
    """Least-squares C_cal from one forced linear solve at C_cal = 1.

    The trace tr produced with C_cal = 1 should equal g / C_cal, so the
    minimizer of ||tr / C - g|| over 1/C gives C = <tr, tr> / <tr, g>.
    ``mismatch`` is the relative L^2 trace error after calibration.
    """
    from .solver import extend_boundary

    dt = T / Nt
    modes = np.zeros((Nt + 1, geom.K))
    modes[:, mode - 1] = reference_wavemaker(dt * np.arange(Nt + 1), tau0, ramp)
    g = BoundaryData(modes, dt, geom)
    g_ext = extend_boundary(g, T)
    f = forcing_from_boundary(g_ext, 1.0, horizon=T, damping_factor=damping_factor, pad=pad)
    tr = delta_response_trace(f, Nt + 1)[:, mode - 1]
    target = modes[:, mode - 1]
    C = float(np.dot(tr, tr) / np.dot(tr, target))
    mismatch = float(np.linalg.norm(tr / C - target) / np.linalg.norm(target))
    return Calibration(C, mismatch, mode)
