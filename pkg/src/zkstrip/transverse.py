"""Sine-basis machinery on the transverse interval (0, B).

The strip carries homogeneous Dirichlet walls at y=0 and y=B, so every
field is expanded in the orthonormal basis

    e_k(y) = sqrt(2/B) sin(k pi y / B),   lambda_k = (k pi / B)^2.

Transverse samples live on the interior nodes y_j = j B / Ny, j=1..Ny-1,
where the DST-I is exactly orthogonal for all retained modes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

from .errors import ConfigError, DimensionError

__all__ = [
    "StripGeometry",
    "TransverseModes",
    "eigenvalue",
    "basis_eval",
    "forward_transverse",
    "inverse_transverse",
    "triple_product_tensor",
]


@dataclass(frozen=True)
class StripGeometry:
    """Physical and grid parameters of the truncated half-strip problem.

    The longitudinal direction is the periodic box [-L, L) with Nx nodes;
    node Nx//2 sits exactly at x=0.
    """

    B: float = np.pi
    a: float = 1.0
    K: int = 16
    L: float = 40.0
    Nx: int = 256
    Ny: int = 64

    def __post_init__(self):
        if not self.B > 0:
            raise ConfigError(f"strip width B must be positive, got {self.B}")
        if not self.L > 0:
            raise ConfigError(f"box half-width L must be positive, got {self.L}")
        if self.K < 1:
            raise ConfigError(f"mode count K must be >= 1, got {self.K}")
        if self.Nx < 4 or self.Nx & (self.Nx - 1):
            raise ConfigError(f"Nx must be a power of two >= 4, got {self.Nx}")
        if self.Ny < 2 * self.K + 1:
            raise ConfigError(f"Ny={self.Ny} must be >= 2K+1={2 * self.K + 1}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.Nx

    @property
    def dy(self) -> float:
        return self.B / self.Ny

    @property
    def x0_index(self) -> int:
        return self.Nx // 2

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.Nx)

    @cached_property
    def y(self) -> np.ndarray:
        return self.dy * np.arange(1, self.Ny)

    @cached_property
    def xi(self) -> np.ndarray:
        """Longitudinal angular frequencies in numpy FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.Nx, d=self.dx)

    @cached_property
    def lam(self) -> np.ndarray:
        """Eigenvalues lambda_1..lambda_K."""
        k = np.arange(1, self.K + 1)
        return (k * np.pi / self.B) ** 2

    @cached_property
    def sigma(self) -> np.ndarray:
        """sigma_k = a - lambda_k for k=1..K."""
        return self.a - self.lam

    def with_(self, **changes) -> "StripGeometry":
        params = dict(B=self.B, a=self.a, K=self.K, L=self.L, Nx=self.Nx, Ny=self.Ny)
        params.update(changes)
        return StripGeometry(**params)

    def refined(self, factor: int = 2) -> "StripGeometry":
        """Same physical box with ``factor`` times the x and y resolution."""
        return self.with_(Nx=self.Nx * factor, Ny=self.Ny * factor)


@dataclass
class TransverseModes:
    """Coefficients c_k = <u, e_k>, k=1..K, along the last axis."""

    coefficients: np.ndarray
    geometry: StripGeometry = field(repr=False)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients)
        if self.coefficients.shape[-1] != self.geometry.K:
            raise DimensionError(
                f"expected {self.geometry.K} modes on the last axis, "
                f"got shape {self.coefficients.shape}"
            )

    def energy(self) -> np.ndarray:
        """Sum_k |c_k|^2, i.e. the L2(0,B) norm squared by Parseval."""
        return np.sum(np.abs(self.coefficients) ** 2, axis=-1)


def _check_mode(k, geom: StripGeometry):
    k = np.asarray(k)
    if np.any(k < 1) or np.any(k > geom.K):
        raise IndexError(f"mode index {k} outside 1..{geom.K}")
    return k


def eigenvalue(k, geom: StripGeometry):
    """Return lambda_k = (k pi / B)^2."""
    k = _check_mode(k, geom)
    return (k * np.pi / geom.B) ** 2


def basis_eval(k, geom: StripGeometry, y):
    """Evaluate e_k(y); positions outside [0, B] are rejected."""
    k = _check_mode(k, geom)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > geom.B):
        raise ValueError(f"y must lie in [0, {geom.B}]")
    return np.sqrt(2.0 / geom.B) * np.sin(k * np.pi * y / geom.B)


def forward_transverse(samples, geom: StripGeometry) -> TransverseModes:
    """Project samples on the interior y-grid (last axis) onto e_1..e_K."""
    samples = np.asarray(samples)
    if samples.shape[-1] != geom.Ny - 1:
        raise DimensionError(
            f"expected {geom.Ny - 1} interior y-samples on the last axis, got {samples.shape}"
        )
    # scipy's DST-I carries a factor 2 relative to sum_j u_j sin(k pi j / Ny)
    coeffs = scipy.fft.dst(samples, type=1, axis=-1)[..., : geom.K]
    coeffs = coeffs * (0.5 * geom.dy * np.sqrt(2.0 / geom.B))
    return TransverseModes(coeffs, geom)


def inverse_transverse(modes: TransverseModes) -> np.ndarray:
    """Synthesize sum_k c_k e_k(y_j) on the interior y-grid."""
    geom = modes.geometry
    c = modes.coefficients
    padded = np.zeros(c.shape[:-1] + (geom.Ny - 1,), dtype=c.dtype)
    padded[..., : geom.K] = c
    # idst type 1 divides by 2 Ny; undo so the result is the plain sine sum
    out = scipy.fft.idst(padded, type=1, axis=-1) * geom.Ny
    return out * np.sqrt(2.0 / geom.B)


def triple_product_tensor(geom: StripGeometry) -> np.ndarray:
    """Exact Galerkin tensor T[j, l, k] = integral_0^B e_j e_l e_k dy.

    Used to project products of two sine series back onto the basis without
    transverse quadrature error.
    """
    K = geom.K
    idx = np.arange(1, K + 1)
    j = idx[:, None, None]
    l = idx[None, :, None]
    k = idx[None, None, :]

    def sine_integral(m):
        # integral_0^B sin(m pi y / B) dy for integer m (any sign)
        m = np.asarray(m)
        out = np.zeros(m.shape)
        odd = np.abs(m) % 2 == 1
        out[odd] = 2.0 * geom.B / (np.pi * m[odd])
        return out

    # sin A sin B sin C = (sin(-A+B+C) + sin(A-B+C) + sin(A+B-C) - sin(A+B+C)) / 4
    total = (
        sine_integral(-j + l + k)
        + sine_integral(j - l + k)
        + sine_integral(j + l - k)
        - sine_integral(j + l + k)
    ) / 4.0
    return total * (2.0 / geom.B) ** 1.5
