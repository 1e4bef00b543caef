"""Discrete modified Bourgain norms and the companion boundary and energy norms.

All space-time integrals are Riemann sums on the FFT grid of a
:class:`~zkstrip.dispersion.ModeSpectrum` with measure dxi dtau / (2 pi)^2.
With that normalization X^{0,0} with alpha = 0 is exactly the discrete
L^2_{x,y,t} norm of the sampled field (Plancherel plus Parseval in y).

Weights use <x> = 1 + |x| at bin centres.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dispersion import ModeSpectrum, propagation_omega, space_time_spectrum
from .transverse import StripGeometry

__all__ = [
    "BourgainParams",
    "NormReport",
    "x0b_norm",
    "y0b_norm",
    "hs_t_l2y_norm",
    "energy_norm",
    "zb_norm",
    "extend_in_time",
    "restriction_norm",
    "RestrictionResult",
    "EXTENSIONS",
]


def bracket(x):
    return 1.0 + np.abs(x)


@dataclass(frozen=True)
class BourgainParams:
    """Exponents of the modified X^{s,b} / Y^{s,b} norms."""

    s: float = 0.0
    b: float = 0.45
    alpha: float = 0.6

    @property
    def admissible(self) -> bool:
        return 3 / 8 < self.b < 1 / 2 and 1 / 2 < self.alpha < 2 / 3


@dataclass
class NormReport:
    """Squared contributions of a norm evaluation.

    ``total`` is the squared norm and always equals the sum of the parts;
    ``norm`` is its square root.
    """

    high: float = 0.0
    low: float = 0.0
    third: float = 0.0
    energy: float = 0.0
    params: BourgainParams = field(default_factory=BourgainParams)
    kind: str = "X"

    @property
    def total(self) -> float:
        return self.high + self.low + self.third + self.energy

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.total))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "high": self.high,
            "low": self.low,
            "third": self.third,
            "energy": self.energy,
            "total": self.total,
            "norm": self.norm,
            "s": self.params.s,
            "b": self.params.b,
            "alpha": self.params.alpha,
        }


_WEIGHT_CACHE: dict = {}


def _weights(spec: ModeSpectrum, p: BourgainParams, kind: str):
    """Region-split weights on the spectrum grid, cached per grid and params."""
    key = (kind, spec.geometry, spec.half, spec.xi.size, spec.tau.size, spec.dtau, p)
    hit = _WEIGHT_CACHE.get(key)
    if hit is not None:
        return hit
    omega = spec.omega[:, :, None]
    high = np.abs(omega) >= 1.0
    tau = spec.tau[None, None, :]
    modulation = bracket(tau - omega)
    spatial = _spatial_weight(spec, p.s)
    mult = spec.multiplicity[None, :, None]
    if kind == "X":
        w = np.where(high, modulation ** (2.0 * p.b), 0.0), np.where(high, 0.0, bracket(tau) ** (2.0 * p.alpha))
        w = tuple(wi * spatial * mult for wi in w)
    else:
        w = (
            np.where(high, modulation ** (-2.0 * p.b), 0.0) * spatial * mult,
            np.where(high, 0.0, bracket(tau) ** (-2.0 * (1.0 - p.alpha))) * spatial * mult,
            np.where(high, np.sqrt(spatial) / modulation, 0.0),
        )
    if len(_WEIGHT_CACHE) > 16:
        _WEIGHT_CACHE.clear()
    _WEIGHT_CACHE[key] = w
    return w


def _spatial_weight(spec: ModeSpectrum, s: float):
    if s == 0:
        return 1.0
    lam = spec.geometry.lam[:, None, None]
    return bracket(3.0 * spec.xi[None, :, None] ** 2 + lam) ** (2.0 * s)


def x0b_norm(spec: ModeSpectrum, p: BourgainParams = BourgainParams()) -> NormReport:
    """Modified X^{s,b} norm with the low-dispersion region |omega_k| < 1."""
    mass = np.abs(spec.values) ** 2
    w_high, w_low = _weights(spec, p, "X")
    measure = spec.dxi * spec.dtau / (2.0 * np.pi) ** 2
    hi = float(np.sum(w_high * mass) * measure)
    lo = float(np.sum(w_low * mass) * measure)
    return NormReport(high=hi, low=lo, params=p, kind="X")


def y0b_norm(spec: ModeSpectrum, p: BourgainParams = BourgainParams()) -> NormReport:
    """Three-term Y^{s,b} norm for Duhamel source terms."""
    absval = np.abs(spec.values)
    w_high, w_low, w_third = _weights(spec, p, "Y")
    measure = spec.dxi * spec.dtau / (2.0 * np.pi) ** 2
    mass = absval**2
    hi = float(np.sum(w_high * mass) * measure)
    lo = float(np.sum(w_low * mass) * measure)
    inner = np.sum(w_third * absval, axis=-1) * spec.dtau / (2.0 * np.pi)
    third = float(np.sum(spec.multiplicity[None, :] * inner**2) * spec.dxi / (2.0 * np.pi))
    return NormReport(high=hi, low=lo, third=third, params=p, kind="Y")


def hs_t_l2y_norm(modes, dt: float, s: float, pad: int = 1) -> float:
    """H^s_t L^2_y norm of boundary data given as modes[n, k] on t_n = n dt."""
    modes = np.asarray(modes)
    n = modes.shape[0]
    spec = np.fft.fft(modes, n=n * pad, axis=0) * dt
    tau = 2.0 * np.pi * np.fft.fftfreq(n * pad, d=dt)
    dtau = 2.0 * np.pi / (n * pad * dt)
    total = np.sum(bracket(tau)[:, None] ** (2.0 * s) * np.abs(spec) ** 2) * dtau / (2.0 * np.pi)
    return float(np.sqrt(total))


def energy_norm(u, dt: float, geom: StripGeometry) -> float:
    """(int_0^T ||grad u(t)||^2_{L^2} dt)^{1/2} for a mode stack u[n, k, j].

    d_x is spectral, d_y acts on mode k as multiplication by sqrt(lambda_k);
    the time integral is the trapezoid rule over the samples.
    """
    u = np.asarray(u)
    uh = np.fft.fft(u, axis=-1)
    grad2 = (geom.xi**2)[None, None, :] + geom.lam[None, :, None]
    # Parseval on the x-grid: dx * sum |u_j|^2 = dx / Nx * sum |u_hat|^2
    per_time = np.sum(grad2 * np.abs(uh) ** 2, axis=(1, 2)) * geom.dx / geom.Nx
    if per_time.shape[0] == 1:
        return 0.0
    w = np.full(per_time.shape[0], dt)
    w[0] = w[-1] = 0.5 * dt
    return float(np.sqrt(np.sum(w * per_time)))


def zb_norm(u, dt: float, geom: StripGeometry, p: BourgainParams = BourgainParams(), pad: int = 1) -> float:
    """Sum norm X^{0,b} + L^2_T H^1 of a mode stack taken as given in time."""
    spec = space_time_spectrum(u, dt, geom, pad=pad)
    return x0b_norm(spec, p).norm + energy_norm(u, dt, geom)


def _taper(n: int) -> np.ndarray:
    """Smooth C-infinity decay from 1 to 0 over n samples (first sample 1)."""
    x = np.arange(n) / max(n, 1)
    out = np.zeros(n)
    inside = x < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        a = np.exp(-1.0 / np.where(x > 0, x, np.inf))
        b = np.exp(-1.0 / np.where(x < 1, 1.0 - x, np.inf))
    out[inside] = b[inside] / (a[inside] + b[inside])
    return out


EXTENSIONS = ("zero", "reflection", "cutoff")


def _free_orbit(u0, times, geom: StripGeometry):
    """S(t) u0 for every t in ``times``, shape (len(times), K, Nx)."""
    phase = np.exp(1j * np.asarray(times)[:, None, None] * propagation_omega(geom)[None])
    out = np.fft.ifft(phase * np.fft.fft(u0, axis=-1)[None], axis=-1)
    return out.real if np.isrealobj(u0) else out


def extend_in_time(u, dt: float, geom: StripGeometry, strategy: str, n_ext: int | None = None):
    """Extend u[n, k, j] on [0, T] to [-T_e, T + T_e] by one family member.

    * ``zero``: zero outside [0, T].
    * ``reflection``: even reflection about t=0 and t=T with a smooth decay.
    * ``cutoff``: free linear evolution from the end states, windowed by the
      same smooth decay.

    Returns the extended stack; the original occupies rows n_ext..n_ext+N-1.
    """
    u = np.asarray(u)
    n = u.shape[0]
    n_ext = n - 1 if n_ext is None else n_ext
    decay = _taper(n_ext + 1)[1:]  # decay[m] applies at m+1 steps outside
    shape = (n_ext,) + u.shape[1:]
    if strategy == "zero":
        before = np.zeros(shape, dtype=u.dtype)
        after = np.zeros(shape, dtype=u.dtype)
    elif strategy == "reflection":
        idx = np.arange(1, n_ext + 1)
        before = u[np.minimum(idx, n - 1)][::-1]
        after = u[np.maximum(n - 1 - idx, 0)]
        before = before * decay[::-1, None, None]
        after = after * decay[:, None, None]
    elif strategy == "cutoff":
        steps = dt * np.arange(1, n_ext + 1)
        after = _free_orbit(u[-1], steps, geom) * decay[:, None, None]
        before = _free_orbit(u[0], -steps[::-1], geom) * decay[::-1, None, None]
    else:
        raise ValueError(f"unknown extension strategy {strategy!r}; choose from {EXTENSIONS}")
    return np.concatenate([before, u, after], axis=0)


@dataclass
class RestrictionResult:
    """Upper bound on a restriction (quotient) norm over an extension family."""

    value: float
    strategy: str
    candidates: dict


def restriction_norm(
    u,
    dt: float,
    geom: StripGeometry,
    p: BourgainParams = BourgainParams(),
    strategies=EXTENSIONS,
    include_energy: bool = False,
    n_ext: int | None = None,
) -> RestrictionResult:
    """Smallest X^{0,b} norm over the configured extensions of u on [0, T].

    This bounds the quotient norm from above; it is not the infimum.  With
    ``include_energy`` the L^2_T H^1 part over [0, T] is added, giving a Z^b_T
    upper bound.
    """
    candidates = {}
    for strategy in strategies:
        ext = extend_in_time(u, dt, geom, strategy, n_ext=n_ext)
        spec = space_time_spectrum(ext, dt, geom, half=not np.iscomplexobj(ext))
        candidates[strategy] = x0b_norm(spec, p).norm
    best = min(candidates, key=candidates.get)
    value = candidates[best]
    if include_energy:
        value += energy_norm(u, dt, geom)
    if not p.admissible:
        warnings.warn(f"Bourgain parameters {p} outside the window 3/8 < b < 1/2, 1/2 < alpha < 2/3", stacklevel=2)
    return RestrictionResult(value=value, strategy=best, candidates=candidates)
