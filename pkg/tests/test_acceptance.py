"""Acceptance criteria 1-12 at desk scale (Nx=256, Ny=64, K=16, Nt=256).

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from conftest import record
from zkstrip.config import boundary_data, initial_data, load_config
from zkstrip.dispersion import propagate_2d
from zkstrip.estimates import ESTIMATES, EstimateConfig, grid_study
from zkstrip.forcing import (
    BoundaryData,
    C_GAMMA,
    forcing_from_boundary,
    multiplier_table,
    neumann_series_forcing,
    ratio_field,
    reference_wavemaker,
)
from zkstrip.fractional import rl_integral
from zkstrip.norms import BourgainParams, x0b_norm
from zkstrip.dispersion import space_time_spectrum
from zkstrip.solver import (
    SolverConfig,
    extend_boundary,
    l2_norm,
    duhamel_delta,
    lipschitz_ratio,
    pde_residual,
    picard_solve,
    solve_with_halving,
)
from zkstrip.transverse import StripGeometry

pytestmark = pytest.mark.acceptance


def check(criterion, ok, detail):
    record(criterion, bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def demo():
    return load_config("demo")


def single_mode_wave(geom, mode, tau0=6.0, ramp=0.4, amp=1.0):
    def g(t):
        m = np.zeros((t.size, geom.K))
        m[:, mode - 1] = amp * reference_wavemaker(t, tau0, ramp)
        return m

    return g


def test_c01_unitarity_and_group_law(default_geom):
    rng = np.random.default_rng(1)
    u0 = rng.standard_normal((default_geom.K, default_geom.Nx))
    n0 = l2_norm(u0, default_geom)
    times = np.linspace(-1.0, 1.0, 5)
    norm_err = group_err = 0.0
    for t in times:
        st = propagate_2d(u0, t, default_geom)
        norm_err = max(norm_err, abs(l2_norm(st, default_geom) - n0) / n0)
        for s in times:
            both = propagate_2d(u0, t + s, default_geom)
            comp = propagate_2d(propagate_2d(u0, s, default_geom), t, default_geom)
            group_err = max(group_err, l2_norm(both - comp, default_geom) / n0)
    check(1, norm_err <= 1e-10 and group_err <= 1e-10, f"L2 drift {norm_err:.2e}, group law {group_err:.2e}")


def test_c02_mode_decoupling(default_geom):
    mode = 3
    cfg = SolverConfig(geometry=default_geom, nonlinear=False)
    u0 = np.zeros((default_geom.K, default_geom.Nx))
    u0[mode - 1] = np.exp(-(((default_geom.x - 8.0) / 1.5) ** 2))
    sol, _ = picard_solve(u0, single_mode_wave(default_geom, mode, amp=0.1), cfg)
    energy = np.sum(sol.whole.values**2, axis=(0, 2))
    leak = (energy.sum() - energy[mode - 1]) / energy.sum()
    check(2, leak <= 1e-12, f"energy outside mode {mode}: {leak:.2e}")


def test_c03_fractional_oracles():
    worst_exact, orders = 0.0, []
    for g in (1 / 3, 1 / 2, 2 / 3, 1.0):
        errs = {}
        for mu in (0, 1, 2):
            for n in (128, 256):
                t = np.linspace(0, 1, n + 1)
                exact = math.gamma(mu + 1) / math.gamma(mu + g + 1) * t ** (mu + g)
                got = rl_integral(t**mu, g, 1.0 / n)
                errs[mu, n] = np.linalg.norm(got - exact) / np.linalg.norm(exact)
        # mu = 0, 1 are reproduced exactly by the product-trapezoid rule
        worst_exact = max(worst_exact, errs[0, 256], errs[1, 256])
        orders.append(math.log2(errs[2, 128] / errs[2, 256]))
    n = 1024
    dt = 1.0 / n
    t = dt * np.arange(n + 1)
    h = np.cos(3 * t) + t
    semi = max(
        np.linalg.norm(rl_integral(rl_integral(h, b, dt), g, dt) - rl_integral(h, g + b, dt))
        / np.linalg.norm(rl_integral(h, g + b, dt))
        for g, b in ((1 / 3, 2 / 3), (1 / 2, 1 / 2), (2 / 3, 1 / 3), (1 / 3, 1.0))
    )
    ok = worst_exact < 1e-12 and min(orders) > 1.85 and max(orders) < 2.15 and semi <= 1e-3
    check(3, ok, f"linear data err {worst_exact:.1e}, observed orders {min(orders):.2f}..{max(orders):.2f}, semigroup {semi:.1e}")


def test_c04_multiplier_law():
    geom = StripGeometry(K=64, Ny=129)
    tau = np.logspace(0, 4, 2001)
    tau = np.concatenate([-tau[::-1], tau])
    k = np.arange(1, 65)[:, None]
    M = np.abs(multiplier_table(geom, tau).values)
    band = M * (np.abs(tau) ** (2 / 3) + k**2) / np.abs(tau) ** (4 / 3)
    cg = float(gamma_fn(4 / 3) / gamma_fn(2 / 3))
    ok = 0.5 <= band.min() and band.max() <= 2.0 and abs(cg - 0.659) < 1e-3 and cg < 1 and cg == C_GAMMA
    check(4, ok, f"band [{band.min():.3f}, {band.max():.3f}], C_Gamma {cg:.4f}")


def test_c05_boundary_recovery():
    errors = []
    for factor in (1, 2):
        geom = StripGeometry().refined(factor) if factor > 1 else StripGeometry()
        cfg = SolverConfig(geometry=geom, Nt=256 * factor, nonlinear=False)
        # a wavemaker different from the calibration tone
        sol, _ = picard_solve(None, single_mode_wave(geom, 1), cfg)
        errors.append(sol.boundary_error())
    ok = errors[0] <= 5e-2 and errors[1] < errors[0]
    check(5, ok, f"trace error {errors[0]:.2e} -> {errors[1]:.2e} under doubling")


def test_c06_neumann_duality():
    geom = StripGeometry(a=0.6)
    T, Nt = 1.0, 256
    dt = T / Nt
    t = dt * np.arange(Nt + 1)
    modes = np.zeros((Nt + 1, geom.K))
    modes[:, 0] = reference_wavemaker(t)
    g1 = extend_boundary(BoundaryData(modes, dt, geom), T)
    tau = 2 * np.pi * np.fft.fftfreq(2 * g1.nt, d=dt)
    sup_r = float(np.abs(ratio_field(np.array([1]), tau[tau != 0], geom)).max())
    f_m = forcing_from_boundary(g1, 0.25, horizon=T).modes
    f_n = neumann_series_forcing(g1, 0.25, n_max=20, horizon=T).modes
    rel = np.linalg.norm(f_n - f_m) / np.linalg.norm(f_m)
    check(6, sup_r <= 0.5 and rel <= 1e-3, f"sup|r_1| {sup_r:.3f}, relative difference {rel:.1e}")


def test_c07_picard_contraction(demo):
    cfg = demo.solver
    u0 = initial_data(demo)
    g = boundary_data(demo)
    _, small = picard_solve(u0, g, cfg)
    inc = np.array(small.increments)
    geometric = bool(np.all(np.diff(inc) < 0)) and all(r < 0.5 for r in small.ratios)
    _, tenfold = solve_with_halving(10 * u0, g.with_modes(10 * g.modes, "raw"), cfg, demo.max_halvings)
    # a far larger amplitude that needs the halving schedule
    _, stress = solve_with_halving(1e4 * u0, g.with_modes(1e4 * g.modes, "raw"), cfg, demo.max_halvings)
    ok = small.rho_hat < 0.5 and geometric and tenfold.rho_hat < 1 and stress.rho_hat < 1 and stress.halvings >= 1
    check(
        7,
        ok,
        f"rho {small.rho_hat:.1e} (amp 1e-3), {tenfold.rho_hat:.1e} (x10, {tenfold.halvings} halvings), "
        f"{stress.rho_hat:.2f} (x1e4, T={stress.T:g} after {stress.halvings} halving(s))",
    )


def test_c08_linear_limit(demo):
    cfg = demo.solver.with_(nonlinear=False)
    u0 = initial_data(demo)
    g = boundary_data(demo)
    sol, _ = picard_solve(u0, g, cfg)
    # rebuilt from the FFT propagator and the delta-forced Duhamel term
    free = np.stack([propagate_2d(sol.u0_ext, t, cfg.geometry) for t in cfg.t])
    direct = free + duhamel_delta(sol.forcing, cfg.Nt + 1)
    err = np.abs(sol.whole.values - direct).max() / np.abs(direct).max()
    check(8, err <= 1e-10, f"max relative difference {err:.1e}")


def test_c09_estimate_sweeps():
    parts, ok = [], True
    for name in sorted(ESTIMATES):
        study = grid_study(name, 100, EstimateConfig())
        ok &= study.coarse.finite and study.fine.finite and study.growth <= 0.25
        parts.append(f"{name} {study.coarse.max_ratio:.4g} ({study.growth:+.1%})")
    check(9, ok, "100 seeds, max ratio (growth): " + ", ".join(parts))


def test_c10_lipschitz(demo):
    cfg = demo.solver
    geom = cfg.geometry
    u0 = initial_data(demo)
    g = boundary_data(demo)
    du = np.zeros_like(u0)
    du[1] = np.exp(-(((geom.x - 10.0) / 2.0) ** 2))
    dg = np.zeros_like(g.modes)
    dg[:, 0] = np.sin(5 * g.t) * np.minimum(g.t / 0.3, 1) ** 4
    ratios = []
    for scale in (1.0, 0.5):
        a, _ = picard_solve(scale * u0, g.with_modes(scale * g.modes, "raw"), cfg)
        b, _ = picard_solve(scale * (u0 + 1e-4 * du), g.with_modes(scale * (g.modes + 1e-4 * dg), "raw"), cfg)
        ratios.append(lipschitz_ratio(a, b, cfg))
    spread = max(ratios) / min(ratios)
    check(10, spread <= 2.0, f"Lambda {ratios[0]:.4f} -> {ratios[1]:.4f} under halving (x{spread:.4f})")


def test_c11_norm_reductions(default_geom):
    rng = np.random.default_rng(3)
    dt = 1 / 256
    u = rng.standard_normal((64, default_geom.K, default_geom.Nx))
    spec = space_time_spectrum(u, dt, default_geom, half=True)
    x = x0b_norm(spec, BourgainParams(s=0.0, b=0.0, alpha=0.0)).norm
    l2 = np.sqrt(np.sum(u**2) * default_geom.dx * dt)
    rel = abs(x - l2) / l2
    bs = np.linspace(0.0, 0.6, 13)
    values = [x0b_norm(spec, BourgainParams(b=b, alpha=0.6)).total for b in bs]
    monotone = all(b2 >= b1 for b1, b2 in zip(values, values[1:]))
    check(11, rel <= 1e-12 and monotone, f"|X - L2| / L2 = {rel:.1e}, monotone in b over {bs.size} values: {monotone}")


def test_c12_pde_residual(demo):
    res = []
    for factor in (1, 2):
        c = demo.scaled(factor)
        sol, rep = picard_solve(initial_data(c), boundary_data(c), c.solver)
        assert rep.converged
        res.append(pde_residual(sol).relative)
    check(12, res[0] <= 1e-4 and res[1] < res[0], f"relative residual {res[0]:.2e} -> {res[1]:.2e} under doubling")
