"""Sampled ratio statistics for the linear and bilinear estimates.

Each check draws random inputs from a seed, evaluates left / right of the
inequality on a coarse desk-scale grid and records the ratio.  Inputs are
continuous functions (parameters drawn from the seed, then evaluated on the
grid), so the same seed gives the same function on a refined grid and the
ratio can be compared across resolutions.

The time window is the periodic interval [-2T, 2T) on which the cutoff
theta_T is supported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dispersion import propagation_omega, space_time_spectrum
from .errors import ConfigError
from .integrator import exp_integrate, from_hat, to_hat, delta_hat
from .norms import BourgainParams, _free_orbit, energy_norm, hs_t_l2y_norm, x0b_norm, y0b_norm
from .solver import cutoff_theta, l2_norm, nonlinearity
from .transverse import StripGeometry, basis_eval

__all__ = [
    "EstimateConfig",
    "RatioSweep",
    "GridStudy",
    "ESTIMATES",
    "check_group_estimate",
    "check_delta_forcing",
    "check_duhamel_yx",
    "check_trace_estimate",
    "check_bilinear",
    "check_strichartz_embedding",
    "run_sweep",
    "grid_study",
]

COARSE = StripGeometry(B=np.pi, a=1.0, K=4, L=20.0, Nx=64, Ny=16)


@dataclass(frozen=True)
class EstimateConfig:
    """Grid and exponents for a sweep.

    ``band`` is the largest |xi| of the random inputs; it is a physical
    quantity and stays fixed under refinement.
    """

    geometry: StripGeometry = COARSE
    T: float = 1.0
    nt: int = 128
    params: BourgainParams = BourgainParams()
    band: float = 1.5

    def __post_init__(self):
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.nt < 16 or self.nt % 2:
            raise ConfigError(f"nt must be even and >= 16, got {self.nt}")
        if self.band * self.geometry.dx >= np.pi / 3:
            raise ConfigError("input band exceeds a third of the grid band")

    @property
    def dt(self) -> float:
        return 4.0 * self.T / self.nt

    @cached_property
    def t(self) -> np.ndarray:
        return -2.0 * self.T + self.dt * np.arange(self.nt)

    @property
    def zero_index(self) -> int:
        return self.nt // 2

    @cached_property
    def theta(self) -> np.ndarray:
        return cutoff_theta(self.t, self.T)

    def refined(self, factor: int = 2) -> "EstimateConfig":
        return EstimateConfig(self.geometry.refined(factor), self.T, self.nt * factor, self.params, self.band)


@dataclass
class RatioSweep:
    """Per-sample ratios left / right of one estimate."""

    estimate: str
    seeds: list
    ratios: np.ndarray
    params: BourgainParams
    T: float
    grid: tuple = ()
    kinds: list = field(default_factory=list)

    @property
    def samples(self) -> int:
        return len(self.seeds)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.samples else 0.0

    @property
    def argmax_seed(self):
        return self.seeds[int(np.argmax(self.ratios))] if self.samples else None

    @property
    def median(self) -> float:
        return float(np.median(self.ratios)) if self.samples else 0.0

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.ratios)) and np.all(self.ratios >= 0))

    def records(self):
        for seed, kind, r in zip(self.seeds, self.kinds, self.ratios):
            yield {
                "estimate_id": self.estimate,
                "seed": seed,
                "ratio": float(r),
                "kind": kind,
                "b": self.params.b,
                "alpha": self.params.alpha,
                "T": self.T,
            }


# ---------------------------------------------------------------------------
# random continuous inputs

KINDS = ("gaussian", "packet", "rough")


def _box_frequency(rng, geom: StripGeometry, lo: float, hi: float) -> float:
    """A frequency pi m / L of the periodic box drawn from [lo, hi]."""
    m_lo = int(np.ceil(lo * geom.L / np.pi))
    m_hi = max(int(np.floor(hi * geom.L / np.pi)), m_lo)
    return np.pi * rng.integers(m_lo, m_hi + 1) / geom.L


def _wrap(x, L):
    return (x + L) % (2.0 * L) - L


class _Draw:
    """Seed-determined parameters, evaluated on any grid of the same box."""

    def __init__(self, seed: int, cfg: EstimateConfig, kinds=KINDS):
        rng = np.random.default_rng(seed)
        geom = cfg.geometry
        K = geom.K
        self.kind = kinds[int(rng.integers(len(kinds)))]
        self.amp = rng.standard_normal(K) / (1.0 + np.arange(K))
        self.x0 = rng.uniform(-geom.L / 4, geom.L / 4, K)
        self.width = rng.uniform(1.0, 2.5, K)
        self.phase = rng.uniform(0, 2 * np.pi, K)
        self.xi0 = np.array([_box_frequency(rng, geom, 0.3, cfg.band) for _ in range(K)])
        self.detune = np.where(rng.random(K) < 0.5, 0.0, rng.uniform(-20.0, 20.0, K))
        self.nu = rng.uniform(-10.0, 10.0, K)
        nm = int(np.floor(cfg.band * geom.L / np.pi))
        nj = 8
        self.m = np.arange(1, nm + 1)
        self.cx = rng.standard_normal((K, nm, 2)) / np.sqrt(nm)
        self.j = np.arange(-nj, nj + 1)
        self.ct = rng.standard_normal((K, nm, self.j.size)) / np.sqrt(nm * self.j.size)
        self.pt = rng.uniform(0, 2 * np.pi, (K, nm, self.j.size))

    def initial(self, geom: StripGeometry):
        """u0[k, j] on the box."""
        x = geom.x
        out = np.zeros((geom.K, geom.Nx))
        for k in range(geom.K):
            env = np.exp(-(_wrap(x - self.x0[k], geom.L) / self.width[k]) ** 2)
            if self.kind == "gaussian":
                out[k] = self.amp[k] * env
            elif self.kind == "packet":
                out[k] = self.amp[k] * env * np.cos(self.xi0[k] * x + self.phase[k])
            else:
                arg = np.pi * self.m[:, None] * x[None] / geom.L
                c = self.cx[k]
                out[k] = c[:, 0] @ np.cos(arg) + c[:, 1] @ np.sin(arg)
        return out

    def signal(self, t, k: int):
        """A smooth scalar time signal for mode k, before windowing."""
        if self.kind == "rough":
            nu = 2.0 * np.pi * self.j / (len(t) * (t[1] - t[0]))
            return np.sum(self.ct[k, 0][:, None] * np.cos(nu[:, None] * t[None] + self.pt[k, 0][:, None]), axis=0)
        return self.amp[k] * np.cos(self.nu[k] * t + self.phase[k])

    def spacetime(self, cfg: EstimateConfig):
        """w[n, k, j] compactly supported in the time window."""
        geom = cfg.geometry
        x, t = geom.x, cfg.t
        lam = geom.lam
        out = np.zeros((t.size, geom.K, geom.Nx))
        for k in range(geom.K):
            if self.kind == "gaussian":
                env = np.exp(-(_wrap(x - self.x0[k], geom.L) / self.width[k]) ** 2)
                out[:, k] = np.outer(self.signal(t, k), env)
            elif self.kind == "packet":
                xi0 = self.xi0[k]
                om = xi0**3 + (lam[k] - geom.a) * xi0
                cg = 3.0 * xi0**2 + lam[k] - geom.a
                X = _wrap(x[None] - self.x0[k] + cg * t[:, None], geom.L)
                env = np.exp(-(X / self.width[k]) ** 2)
                out[:, k] = self.amp[k] * env * np.cos(xi0 * x[None] + (om + self.detune[k]) * t[:, None] + self.phase[k])
            else:
                nu = 2.0 * np.pi * self.j / (4.0 * cfg.T)
                ex = np.exp(1j * np.pi * self.m[:, None] * x[None] / geom.L)  # (nm, Nx)
                et = (self.ct[k] * np.exp(1j * self.pt[k])) @ np.exp(1j * nu[:, None] * t[None])  # (nm, nt)
                wave = np.real(et.T @ ex)
                out[:, k] = wave
        return out * cfg.theta[:, None, None]

    def boundary(self, cfg: EstimateConfig):
        """f[n, k] compactly supported in the time window."""
        t = cfg.t
        out = np.stack([self.signal(t, k) for k in range(cfg.geometry.K)], axis=1)
        if self.kind == "gaussian":
            out = out * np.exp(-((t[:, None] - self.x0[None] / cfg.geometry.L) / 0.5) ** 2)
        return out * cfg.theta[:, None]


# ---------------------------------------------------------------------------
# two-sided Duhamel on the window


def _duhamel_two_sided(src_hat, cfg: EstimateConfig):
    """int_0^t S(t - t') src dt' at every node of [-2T, 2T), half-spectra in."""
    geom = cfg.geometry
    n0 = cfg.zero_index
    omega = propagation_omega(geom, real=True)
    fwd = exp_integrate(src_hat[n0:], cfg.dt, geom)
    # backward in time: r = -t solves d/dr v = -i omega v - src(-r)
    bwd = exp_integrate(-src_hat[n0::-1], cfg.dt, geom, omega=-omega)
    return np.concatenate([bwd[:0:-1], fwd], axis=0)


def _x_norm(u, cfg: EstimateConfig) -> float:
    spec = space_time_spectrum(u, cfg.dt, cfg.geometry, half=True)
    return x0b_norm(spec, cfg.params).norm


def _y_norm(w, cfg: EstimateConfig) -> float:
    spec = space_time_spectrum(w, cfg.dt, cfg.geometry, half=True)
    return y0b_norm(spec, cfg.params).norm


def _l4_norm(u, cfg: EstimateConfig) -> float:
    geom = cfg.geometry
    k = np.arange(1, geom.K + 1)
    basis = basis_eval(k[:, None], geom, geom.y[None, :])  # (K, Ny - 1)
    phys = np.tensordot(np.swapaxes(u, 1, 2), basis, axes=1)  # (nt, Nx, Ny - 1)
    sq = phys * phys
    return float((np.sum(sq * sq) * geom.dx * geom.dy * cfg.dt) ** 0.25)


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def group_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||theta S(t) u0||_X / ||u0||_{L^2}."""
    u0 = scale * draw.initial(cfg.geometry)
    u = _free_orbit(u0, cfg.t, cfg.geometry) * cfg.theta[:, None, None]
    return _ratio(_x_norm(u, cfg), l2_norm(u0, cfg.geometry))


def delta_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||theta int S delta_0 f||_X / ||f||_{H^{-1/3}_t L^2_y}."""
    f = scale * draw.boundary(cfg)
    src = f[:, :, None] * delta_hat(cfg.geometry)[None, None, :]
    u = from_hat(_duhamel_two_sided(src, cfg), cfg.geometry) * cfg.theta[:, None, None]
    return _ratio(_x_norm(u, cfg), hs_t_l2y_norm(f, cfg.dt, -1.0 / 3.0))


def duhamel_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||theta int S w||_X / ||w||_Y."""
    w = scale * draw.spacetime(cfg)
    u = from_hat(_duhamel_two_sided(to_hat(w), cfg), cfg.geometry) * cfg.theta[:, None, None]
    return _ratio(_x_norm(u, cfg), _y_norm(w, cfg))


def trace_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||theta (int S h)|_{x=0}||_{H^{1/3}_t L^2_y} / ||h||_Y."""
    h = scale * draw.spacetime(cfg)
    u = from_hat(_duhamel_two_sided(to_hat(h), cfg), cfg.geometry)
    tr = u[:, :, cfg.geometry.x0_index] * cfg.theta[:, None]
    return _ratio(hs_t_l2y_norm(tr, cfg.dt, 1.0 / 3.0), _y_norm(h, cfg))


def bilinear_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||d_x(v^2)||_Y / ||v||_Z^2."""
    v = scale * draw.spacetime(cfg)
    n = -2.0 * nonlinearity(v, cfg.geometry)
    z = _x_norm(v, cfg) + energy_norm(v, cfg.dt, cfg.geometry)
    return _ratio(_y_norm(n, cfg), z**2)


def strichartz_ratio(draw: _Draw, cfg: EstimateConfig, scale: float = 1.0) -> float:
    """||v||_{L^4_{x,y,t}} / ||v||_{X^{0,b}}."""
    v = scale * draw.spacetime(cfg)
    return _ratio(_l4_norm(v, cfg), _x_norm(v, cfg))


ESTIMATES = {
    "group": group_ratio,
    "delta": delta_ratio,
    "duhamel": duhamel_ratio,
    "trace": trace_ratio,
    "bilinear": bilinear_ratio,
    "strichartz": strichartz_ratio,
}


def _validate(estimate: str, cfg: EstimateConfig):
    if estimate not in ESTIMATES:
        raise ConfigError(f"unknown estimate id {estimate!r}; choose from {sorted(ESTIMATES)}")
    p = cfg.params
    if estimate == "bilinear" and not p.admissible:
        raise ConfigError(f"bilinear estimate needs 3/8 < b < 1/2 and 1/2 < alpha < 2/3, got {p}")
    if estimate == "strichartz" and not p.b > 3 / 8:
        raise ConfigError(f"Strichartz embedding needs b > 3/8, got b={p.b}")


def run_sweep(estimate: str, samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0, seeds=None) -> RatioSweep:
    """Ratios for seeds seed0, seed0+1, ... (or an explicit ``seeds`` list)."""
    _validate(estimate, cfg)
    seeds = list(range(seed0, seed0 + samples)) if seeds is None else list(seeds)
    fn = ESTIMATES[estimate]
    ratios, kinds = [], []
    for seed in seeds:
        draw = _Draw(seed, cfg)
        kinds.append(draw.kind)
        ratios.append(fn(draw, cfg))
    g = cfg.geometry
    return RatioSweep(estimate, seeds, np.array(ratios, dtype=float), cfg.params, cfg.T, (g.Nx, g.Ny, g.K, cfg.nt), kinds)


def check_group_estimate(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("group", samples, cfg, seed0)


def check_delta_forcing(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("delta", samples, cfg, seed0)


def check_duhamel_yx(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("duhamel", samples, cfg, seed0)


def check_trace_estimate(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("trace", samples, cfg, seed0)


def check_bilinear(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("bilinear", samples, cfg, seed0)


def check_strichartz_embedding(samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0) -> RatioSweep:
    return run_sweep("strichartz", samples, cfg, seed0)


@dataclass
class GridStudy:
    """The same seeds on a grid and on its refinement."""

    coarse: RatioSweep
    fine: RatioSweep
    threshold: float = 0.25

    @property
    def growth(self) -> float:
        if self.coarse.max_ratio == 0:
            return 0.0
        return self.fine.max_ratio / self.coarse.max_ratio - 1.0

    @property
    def flagged(self) -> bool:
        return not (self.coarse.finite and self.fine.finite) or self.growth > self.threshold


def grid_study(estimate: str, samples: int, cfg: EstimateConfig = EstimateConfig(), seed0: int = 0, factor: int = 2) -> GridStudy:
    coarse = run_sweep(estimate, samples, cfg, seed0)
    fine = run_sweep(estimate, samples, cfg.refined(factor), seeds=coarse.seeds)
    return GridStudy(coarse, fine)
