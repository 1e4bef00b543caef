"""Half-strip ZK solver by Picard iteration of the whole-box integral equation.

    u = S(t) u0_ext + int_0^t S(t-t') delta_0 f dt' - 1/2 int_0^t S(t-t') d_x(u^2) dt'

on the periodic box [-L, L) over [0, T].  The forcing f is built from the
wavemaker so that the linear part attains g at x = 0.  Fields are real mode
stacks values[n, k, j].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, ConvergenceError, DimensionError, NumericError
from .forcing import (
    BoundaryData,
    calibrate_forcing_constant,
    corrected_boundary,
    forcing_from_boundary,
    linear_trace,
    neumann_series_forcing,
    smoothstep,
    trace_inverse,
)
from .integrator import (
    delta_hat,
    exp_integrate,
    free_evolution_hat,
    from_hat,
    rxi,
    to_hat,
    trace_from_hat,
)
from .dispersion import propagation_omega
from .norms import BourgainParams, energy_norm, hs_t_l2y_norm, restriction_norm
from .transverse import StripGeometry, TransverseModes, inverse_transverse, triple_product_tensor

__all__ = [
    "SolverConfig",
    "SpaceTimeField",
    "PicardReport",
    "Solution",
    "extend_initial",
    "extend_boundary",
    "cutoff_theta",
    "duhamel_inhomogeneous",
    "duhamel_delta",
    "nonlinearity",
    "linear_solution",
    "picard_solve",
    "solve_with_halving",
    "restrict",
    "pde_residual",
    "Residual",
    "l2_norm",
    "lipschitz_ratio",
    "zb_value",
]

FORCING_METHODS = ("multiplier", "neumann", "discrete")
BoundaryInput = Union[None, BoundaryData, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class SolverConfig:
    geometry: StripGeometry = field(default_factory=StripGeometry)
    T: float = 1.0
    Nt: int = 256
    params: BourgainParams = field(default_factory=BourgainParams)
    picard_tol: float = 1e-10
    picard_max: int = 30
    dealias: bool = True
    nonlinear: bool = True
    mollifier_width: float = 0.25
    C_cal: Optional[float] = None
    damping_factor: float = 20.0
    pad: int = 2
    forcing: str = "multiplier"

    def __post_init__(self):
        if self.forcing not in FORCING_METHODS:
            raise ConfigError(f"forcing must be one of {FORCING_METHODS}, got {self.forcing!r}")
        if not self.T > 0:
            raise ConfigError(f"horizon T must be positive, got {self.T}")
        if self.Nt < 16:
            raise ConfigError(f"Nt must be >= 16, got {self.Nt}")
        if not self.picard_tol > 0:
            raise ConfigError(f"picard_tol must be positive, got {self.picard_tol}")
        if self.picard_max < 1:
            raise ConfigError(f"picard_max must be >= 1, got {self.picard_max}")

    @property
    def dt(self) -> float:
        return self.T / self.Nt

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.Nt + 1)

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


@dataclass
class SpaceTimeField:
    """Real mode stack values[n, k, j] at t_n = n dt on x-nodes x_start.."""

    values: np.ndarray
    dt: float
    geometry: StripGeometry = field(repr=False)
    x_start: int = 0

    @property
    def nt(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.nt)

    @property
    def x(self) -> np.ndarray:
        return self.geometry.x[self.x_start : self.x_start + self.values.shape[-1]]

    def physical(self) -> np.ndarray:
        """Samples on (t, x, interior y) nodes."""
        vals = np.moveaxis(self.values, 1, -1)
        return inverse_transverse(TransverseModes(vals, self.geometry))

    def trace(self) -> np.ndarray:
        """Mode coefficients at the x=0 node, shape (nt, K)."""
        idx = self.geometry.x0_index - self.x_start
        if not 0 <= idx < self.values.shape[-1]:
            raise DimensionError("field does not contain the x=0 node")
        return self.values[:, :, idx]


def l2_norm(u, geom: StripGeometry) -> float:
    """L^2_{x,y} norm of a mode stack (K, Nx) on the box."""
    return float(np.sqrt(geom.dx * np.sum(np.abs(np.asarray(u)) ** 2)))


def _bump(x):
    out = np.zeros_like(x, dtype=float)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def extend_initial(u0, geom: StripGeometry, width: float = 0.25):
    """Whole-box extension of half-strip data u0 (K, Nx); x < 0 values are ignored.

    The zero extension is mollified with a C-infinity bump of half-width
    ``width`` and blended back to u0 outside |x| <= 2 width, so data
    supported in x > 2 width are returned unchanged.
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (geom.K, geom.Nx):
        raise DimensionError(f"initial data must have shape {(geom.K, geom.Nx)}, got {u0.shape}")
    x = geom.x
    half = np.where(x >= 0, u0, 0.0)
    if width < 2.0 * geom.dx:
        return half
    kern = _bump(x / width)
    kern = np.roll(kern, -geom.x0_index)
    kern /= kern.sum()
    moll = np.fft.irfft(np.fft.rfft(half, axis=-1) * np.fft.rfft(kern), n=geom.Nx, axis=-1)
    chi = 1.0 - smoothstep((np.abs(x) - width) / width)
    return chi * moll + (1.0 - chi) * half


def extend_boundary(g: BoundaryData, T: float) -> BoundaryData:
    """Extend g from [0, T] to [0, 2T] by C^2 reflection with smooth decay.

    Beyond T the data continue as 6 g(T-s) - 8 g(T-2s) + 3 g(T-3s) times a
    C-infinity taper that vanishes at s = T/3; zero afterwards.  The ratio
    C_2 of H^{1/3}_t L^2_y norms (extended over zero-padded) is stored in
    ``meta["C2"]``.
    """
    nt = g.nt - 1
    if not math.isclose(nt * g.dt, T, rel_tol=1e-9):
        raise DimensionError(f"boundary grid covers {nt * g.dt}, expected T={T}")
    out = np.zeros((2 * nt + 1, g.geometry.K))
    out[: nt + 1] = g.modes
    third = nt // 3
    if third > 0:
        m = np.arange(1, third + 1)
        refl = 6.0 * g.modes[nt - m] - 8.0 * g.modes[nt - 2 * m] + 3.0 * g.modes[nt - 3 * m]
        taper = 1.0 - smoothstep(m / third)
        out[nt + 1 : nt + third + 1] = refl * taper[:, None]
    base = hs_t_l2y_norm(np.concatenate([g.modes, np.zeros((nt, g.geometry.K))]), g.dt, 1.0 / 3.0)
    ext = hs_t_l2y_norm(out, g.dt, 1.0 / 3.0)
    c2 = ext / base if base > 0 else 1.0
    return BoundaryData(out, g.dt, g.geometry, "extended", g, {"C2": c2})


def cutoff_theta(t, T: float):
    """theta(t / T): 1 on [-T, T], 0 outside [-2T, 2T], smooth in between."""
    s = np.abs(np.asarray(t, dtype=float)) / T
    return 1.0 - smoothstep(s - 1.0)


def _linear_apply(w, dt, geom, initial=None):
    w = np.asarray(w)
    if np.iscomplexobj(w):
        return _linear_apply(w.real, dt, geom, initial) + 1j * _linear_apply(w.imag, dt, geom, initial)
    return from_hat(exp_integrate(to_hat(w), dt, geom, initial), geom)


def duhamel_inhomogeneous(w, dt: float, geom: StripGeometry):
    """int_0^{t_n} S(t_n - t') w(t') dt' for a mode stack w[n, k, j].

    Exact propagation between nodes with w interpolated by cubics in t'.
    """
    w = np.asarray(w)
    if w.ndim != 3 or w.shape[1:] != (geom.K, geom.Nx):
        raise DimensionError(f"source must have shape (nt, {geom.K}, {geom.Nx}), got {w.shape}")
    return _linear_apply(w, dt, geom)


def duhamel_delta(f: BoundaryData, nt: int | None = None):
    """int_0^{t_n} S(t_n - t') delta_0(x) f(t') dt' on the first ``nt`` nodes."""
    geom = f.geometry
    n = f.nt if nt is None else nt
    modes = f.modes[:n]
    if np.iscomplexobj(modes):
        re = duhamel_delta(f.with_modes(modes.real), n)
        im = duhamel_delta(f.with_modes(modes.imag), n)
        return re + 1j * im
    src = modes[:, :, None] * delta_hat(geom)[None, None, :]
    return from_hat(exp_integrate(src, f.dt, geom), geom)


def _dealias_mask(geom: StripGeometry) -> np.ndarray:
    m = np.arange(geom.Nx // 2 + 1)
    return (m <= geom.Nx // 3).astype(float)


@lru_cache(maxsize=16)
def _tensor(geom: StripGeometry) -> np.ndarray:
    K = geom.K
    return triple_product_tensor(geom).reshape(K * K, K)


def _nonlinear_hat(v_hat, geom: StripGeometry, dealias: bool = True, chunk: int = 32):
    """Half-spectrum of -1/2 d_x(v^2) projected onto the K sine modes."""
    mask = _dealias_mask(geom) if dealias else 1.0
    v = from_hat(v_hat * mask, geom)
    K = geom.K
    tensor = _tensor(geom)
    prod = np.empty_like(v)
    for start in range(0, v.shape[0], chunk):
        vc = np.swapaxes(v[start : start + chunk], 1, 2)  # (n, Nx, K)
        outer = (vc[..., :, None] * vc[..., None, :]).reshape(-1, K * K)
        prod[start : start + chunk] = np.swapaxes((outer @ tensor).reshape(vc.shape), 1, 2)
    return -0.5j * rxi(geom) * to_hat(prod) * mask


def nonlinearity(v, geom: StripGeometry, dealias: bool = True):
    """-1/2 d_x(v^2) for a real mode stack (..., K, Nx).

    The transverse product is projected exactly onto e_1..e_K with the
    triple-product tensor; d_x is spectral with 2/3-rule dealiasing of the
    factor and the result.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NumericError("non-finite values in nonlinearity input")
    lead = v.shape[:-2]
    flat = v.reshape((-1, geom.K, geom.Nx))
    out = from_hat(_nonlinear_hat(to_hat(flat), geom, dealias), geom)
    return out.reshape(lead + (geom.K, geom.Nx))


@dataclass(frozen=True)
class PicardReport:
    increments: tuple
    ratios: tuple
    rho_hat: float
    M_hat: float
    r: float
    converged: bool
    iterations: int
    T: float
    C_cal: float
    halvings: int = 0
    beta_hat: Optional[float] = None
    history: tuple = ()
    solution_norm: float = 0.0
    message: str = ""

    @property
    def in_ball(self) -> bool:
        return self.solution_norm <= self.r * (1.0 + 1e-12)

    def as_dict(self) -> dict:
        return {
            "increments": list(self.increments),
            "ratios": list(self.ratios),
            "rho_hat": self.rho_hat,
            "M_hat": self.M_hat,
            "r": self.r,
            "converged": self.converged,
            "iterations": self.iterations,
            "T": self.T,
            "C_cal": self.C_cal,
            "halvings": self.halvings,
            "beta_hat": self.beta_hat,
            "history": [list(h) for h in self.history],
            "solution_norm": self.solution_norm,
            "in_ball": self.in_ball,
            "message": self.message,
        }


@dataclass
class Solution:
    whole: SpaceTimeField
    boundary: BoundaryData
    forcing: BoundaryData
    u0_ext: np.ndarray
    C_cal: float
    nonlinear: bool = True
    dealias: bool = True

    @property
    def restricted(self) -> SpaceTimeField:
        return restrict(self.whole)

    def boundary_error(self) -> float:
        """||u(0, y, t) - g||_{L^2_{y,t}} / ||g|| over [0, T]."""
        g = self.boundary.modes
        scale = np.linalg.norm(g)
        diff = np.linalg.norm(self.whole.trace() - g)
        return float(diff / scale) if scale > 0 else float(diff)


def restrict(v: SpaceTimeField) -> SpaceTimeField:
    """The part of a whole-box field on x >= 0."""
    start = v.geometry.x0_index
    if v.x_start != 0:
        raise DimensionError("field is already restricted")
    return SpaceTimeField(v.values[:, :, start:].copy(), v.dt, v.geometry, start)


@lru_cache(maxsize=32)
def _calibration(geom: StripGeometry, T: float, Nt: int, damping_factor: float, pad: int) -> float:
    return calibrate_forcing_constant(geom, T, Nt, damping_factor=damping_factor, pad=pad).C_cal


def _boundary_on_grid(boundary: BoundaryInput, cfg: SolverConfig) -> BoundaryData:
    geom = cfg.geometry
    t = cfg.t
    if boundary is None:
        return BoundaryData.zeros(cfg.Nt + 1, cfg.dt, geom)
    if isinstance(boundary, BoundaryData):
        if boundary.nt == cfg.Nt + 1 and math.isclose(boundary.dt, cfg.dt, rel_tol=1e-12):
            return boundary
        if boundary.t[-1] < t[-1] * (1 - 1e-12):
            raise DimensionError("boundary data do not cover the horizon")
        spline = CubicSpline(boundary.t, boundary.modes, axis=0)
        return BoundaryData(spline(t), cfg.dt, geom)
    modes = np.asarray(boundary(t), dtype=float)
    return BoundaryData(modes, cfg.dt, geom)


def zb_value(u, dt: float, geom: StripGeometry, p: BourgainParams) -> float:
    """Z^b_T upper bound: restriction X^{0,b} norm plus the energy norm."""
    return restriction_norm(u, dt, geom, p, include_energy=True).value


@lru_cache(maxsize=8)
def _trace_inverse(geom: StripGeometry, nt: int, dt: float):
    return trace_inverse(geom, nt, dt)


def linear_solution(u0, boundary: BoundaryInput, cfg: SolverConfig):
    """Linear part S(t) u0_ext + delta-forced Duhamel term, with its pieces.

    Returns (L_hat, u0_ext, g, f, C_cal) with L_hat the half-spectrum stack
    on [0, T].  ``cfg.forcing`` selects the multiplier, the Neumann series or
    the exact inverse of the discrete trace map ("discrete", no C_cal).
    """
    geom = cfg.geometry
    u0 = np.zeros((geom.K, geom.Nx)) if u0 is None else np.asarray(u0, dtype=float)
    u0_ext = extend_initial(u0, geom, cfg.mollifier_width)
    g = _boundary_on_grid(boundary, cfg)
    n = cfg.Nt + 1
    if cfg.forcing == "discrete":
        C_cal = float("nan")
        trace = linear_trace(u0_ext, cfg.t, geom)
        g1 = corrected_boundary(g, trace)
        f_modes = _trace_inverse(geom, n, cfg.dt).apply(g1.modes)
        f = BoundaryData(f_modes, cfg.dt, geom, "forcing", g1, {"method": "discrete"})
    else:
        C_cal = cfg.C_cal if cfg.C_cal is not None else _calibration(geom, cfg.T, cfg.Nt, cfg.damping_factor, cfg.pad)
        g_ext = extend_boundary(g, cfg.T)
        trace = linear_trace(u0_ext, g_ext.t, geom)
        g1 = corrected_boundary(g_ext, trace)
        if cfg.forcing == "neumann":
            f = neumann_series_forcing(g1, C_cal, horizon=cfg.T, damping_factor=cfg.damping_factor, pad=cfg.pad)
        else:
            f = forcing_from_boundary(g1, C_cal, horizon=cfg.T, damping_factor=cfg.damping_factor, pad=cfg.pad)
    L_hat = free_evolution_hat(to_hat(u0_ext), cfg.t, geom)
    src = f.modes[:n, :, None] * delta_hat(geom)[None, None, :]
    L_hat = L_hat + exp_integrate(src, cfg.dt, geom)
    return L_hat, u0_ext, g, f, C_cal


def picard_solve(u0, boundary: BoundaryInput, cfg: SolverConfig):
    """Picard iteration from the linear part; returns (Solution, PicardReport).

    ``u0`` is a mode stack (K, Nx) on the box (only x >= 0 is used);
    ``boundary`` is None, a :class:`BoundaryData` on [0, T] or a callable
    t -> modes[n, k].  Increments are measured in the Z^b_T upper bound.
    Raises :class:`ConvergenceError` carrying the report when the iteration
    does not converge.
    """
    geom = cfg.geometry
    p = cfg.params
    L_hat, u0_ext, g, f, C_cal = linear_solution(u0, boundary, cfg)
    L = from_hat(L_hat, geom)
    M_hat = zb_value(L, cfg.dt, geom, p)
    n = cfg.Nt + 1
    dh = delta_hat(geom)[None, None, :]
    f_corr = None
    v_hat = L_hat
    increments, ratios = [], []
    converged = False
    message = ""
    floor = 1e-13 * M_hat
    it = 0
    for it in range(1, cfg.picard_max + 1):
        if cfg.nonlinear and M_hat > 0:
            dn = exp_integrate(_nonlinear_hat(v_hat, geom, cfg.dealias), cfg.dt, geom)
            if cfg.forcing == "discrete":
                # re-balance the forcing so the nonlinear term adds no trace
                df = _trace_inverse(geom, n, cfg.dt).apply(trace_from_hat(dn, geom))
                dn = dn - exp_integrate(df[:, :, None] * dh, cfg.dt, geom)
                f_corr = df
            v_new = L_hat + dn
        else:
            v_new = L_hat
        diff = from_hat(v_new - v_hat, geom)
        if not np.all(np.isfinite(diff)):
            message = "non-finite iterate"
            break
        inc = zb_value(diff, cfg.dt, geom, p) if np.any(diff) else 0.0
        increments.append(inc)
        v_hat = v_new
        if len(increments) >= 2 and increments[-2] > floor:
            ratios.append(increments[-1] / increments[-2])
        if inc <= cfg.picard_tol * M_hat or inc == 0.0:
            converged = True
            break
        if len(ratios) >= 2 and ratios[-1] >= 1.0 and ratios[-2] >= 1.0:
            message = "contraction factor >= 1 sustained"
            break
        if inc > 1e6 * max(M_hat, 1e-300):
            message = "iterates diverge"
            break
    else:
        message = f"no convergence within {cfg.picard_max} iterations"
    rho = max(ratios) if ratios else 0.0
    if converged and rho >= 1.0:
        converged = False
        message = "final increment small but measured contraction factor >= 1"
    whole = SpaceTimeField(from_hat(v_hat, geom), cfg.dt, geom)
    if f_corr is not None:
        f = f.with_modes(f.modes[:n] - f_corr)
    norm = zb_value(whole.values, cfg.dt, geom, p) if converged else float("nan")
    report = PicardReport(
        increments=tuple(increments),
        ratios=tuple(ratios),
        rho_hat=float(rho),
        M_hat=float(M_hat),
        r=2.0 * float(M_hat),
        converged=converged,
        iterations=it,
        T=cfg.T,
        C_cal=float(C_cal),
        history=((cfg.T, float(rho)),),
        solution_norm=float(norm),
        message=message,
    )
    if not converged:
        raise ConvergenceError(f"Picard iteration failed at T={cfg.T}: {message}", report)
    return Solution(whole, g, f, u0_ext, C_cal, cfg.nonlinear, cfg.dealias), report


def _fit_beta(history):
    pts = [(T, rho) for T, rho in history if rho > 0 and np.isfinite(rho)]
    if len({T for T, _ in pts}) < 2:
        return None
    logT = np.log([T for T, _ in pts])
    logr = np.log([rho for _, rho in pts])
    return float(np.polyfit(logT, logr, 1)[0])


def solve_with_halving(u0, boundary: BoundaryInput, cfg: SolverConfig, max_halvings: int = 6):
    """Retry :func:`picard_solve` with T halved (Nt fixed) until it converges.

    The returned report records the (T, rho_hat) history and the slope
    beta_hat of log rho_hat against log T when at least two horizons were
    tried.  Raises :class:`ConvergenceError` after ``max_halvings`` failures.
    """
    history = []
    current = cfg
    for halving in range(max_halvings + 1):
        try:
            sol, rep = picard_solve(u0, boundary, current)
        except ConvergenceError as exc:
            history.append((current.T, exc.report.rho_hat))
            if halving == max_halvings:
                rep = replace(exc.report, halvings=halving, history=tuple(history), beta_hat=_fit_beta(history))
                raise ConvergenceError(f"no convergence after {max_halvings} halvings", rep) from exc
            current = current.with_(T=current.T / 2.0)
            continue
        history.append((current.T, rep.rho_hat))
        rep = replace(rep, halvings=halving, history=tuple(history), beta_hat=_fit_beta(history))
        return sol, rep
    raise AssertionError("unreachable")


def measure_beta(u0, boundary: BoundaryInput, cfg: SolverConfig, levels: int = 4):
    """Empirical exponent in rho_hat ~ T^beta from solves at T, T/2, ..."""
    history = []
    for j in range(levels):
        _, rep = picard_solve(u0, boundary, cfg.with_(T=cfg.T / 2**j))
        history.append((rep.T, rep.rho_hat))
    return _fit_beta(history), tuple(history)


@dataclass(frozen=True)
class Residual:
    absolute: float
    relative: float


def pde_residual(
    sol: Solution,
    x_layer: float = 1.0,
    t_layer: int = 2,
    source=None,
    method: str = "split",
) -> Residual:
    """Discrete residual of u_t + a u_x + u_xxx + u_xyy + u u_x = 0 on x > x_layer.

    The band-limited source delta_0 f of the solve is part of the equation.
    Spatial derivatives are spectral.  The time derivative uses 4th-order
    central differences.  With ``method="split"`` the free evolution
    S(t) u0_ext is differentiated exactly and only the remainder is
    differenced; ``"direct"`` differences the whole field.  ``source``
    (a mode stack w[n, k, j]) is an extra known right-hand side.  Nodes
    within ``t_layer`` steps of t = 0 and t = T are skipped.
    """
    field_ = sol.whole
    geom = field_.geometry
    dt = field_.dt
    u_hat = to_hat(field_.values)
    nt = u_hat.shape[0]
    lo = max(t_layer, 2)
    hi = nt - max(t_layer, 2)
    if hi <= lo:
        raise DimensionError("too few time nodes for the residual stencil")
    omega = propagation_omega(geom, real=True)[None]
    c = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * dt)
    if method == "split":
        free = free_evolution_hat(to_hat(sol.u0_ext), field_.t, geom)
        rem = u_hat - free
    elif method == "direct":
        free = None
        rem = u_hat
    else:
        raise ValueError(f"unknown residual method {method!r}")
    d_rem = sum(c[i] * rem[lo - 2 + i : hi - 2 + i] for i in range(5))
    tail = d_rem - 1j * omega * rem[lo:hi]
    du = d_rem if free is None else d_rem + 1j * omega * free[lo:hi]
    rhs = sol.forcing.modes[lo:hi, :, None] * delta_hat(geom)[None, None, :]
    if sol.nonlinear:
        rhs = rhs + _nonlinear_hat(u_hat[lo:hi], geom, sol.dealias)
    if source is not None:
        rhs = rhs + to_hat(np.asarray(source)[lo:hi])
    res = from_hat(tail - rhs, geom)
    ut = from_hat(du, geom)
    mask = geom.x > x_layer
    num = float(np.sqrt(np.sum(res[..., mask] ** 2) * geom.dx * dt))
    den = float(np.sqrt(np.sum(ut[..., mask] ** 2) * geom.dx * dt))
    return Residual(num, num / den if den > 0 else 0.0)


def lipschitz_ratio(sol_a: Solution, sol_b: Solution, cfg: SolverConfig) -> float:
    """||u_a - u_b||_{Z^b} / (||u0_a - u0_b||_{L^2} + ||g_a - g_b||_{H^{1/3}_t L^2_y})."""
    geom = cfg.geometry
    du = sol_a.whole.values - sol_b.whole.values
    lhs = zb_value(du, cfg.dt, geom, cfg.params)
    du0 = l2_norm(sol_a.u0_ext - sol_b.u0_ext, geom)
    dg = hs_t_l2y_norm(sol_a.boundary.modes - sol_b.boundary.modes, cfg.dt, 1.0 / 3.0)
    rhs = du0 + dg
    return lhs / rhs if rhs > 0 else 0.0
