"""Command-line entry point: ``zkstrip solve | verify | forcing | norms``.

Exit codes: 0 ok, 2 configuration or input error, 3 Picard non-convergence
after the halving schedule, 4 flagged estimate sweep, 5 singular multiplier.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import scipy.fft

from .config import boundary_data, boundary_from_container, initial_data, load_config, parse_config
from .dispersion import space_time_spectrum
from .errors import ConfigError, ConvergenceError, DivergentSeriesError, FormatError, SingularMultiplierError
from .estimates import ESTIMATES, grid_study, run_sweep
from .forcing import (
    corrected_boundary,
    forcing_from_boundary,
    forcing_regularity,
    linear_trace,
    multiplier_table,
    neumann_series_forcing,
)
from .io import RunManifest, geometry_from_header, geometry_header, read_container, write_container, write_csv
from .norms import BourgainParams, energy_norm, restriction_norm, x0b_norm, y0b_norm
from .solver import (
    _calibration,
    extend_boundary,
    extend_initial,
    l2_norm,
    pde_residual,
    solve_with_halving,
)
from .transverse import TransverseModes, inverse_transverse

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_FLAGGED, EXIT_SINGULAR = 0, 2, 3, 4, 5
SWEEP_COLUMNS = ("estimate_id", "seed", "ratio", "kind", "b", "alpha", "T")


def _global_options(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=d(None), help='run config (JSON); "demo" selects the bundled demo')
    parser.add_argument("--out-dir", default=d("zkstrip-out"), help="directory for all outputs")
    parser.add_argument("--seed", type=int, default=d(None), help="override the config seed")
    parser.add_argument("--threads", type=int, default=d(1), help="FFT worker budget")
    parser.add_argument("--resolution-scale", type=int, default=d(1), help="multiply Nx, Ny and Nt by this factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zkstrip", description="Zakharov-Kuznetsov half-strip solver and estimate harness")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the forced problem and write fields and reports")
    _global_options(p, suppress=True)

    p = sub.add_parser("verify", help="run one estimate ratio sweep")
    _global_options(p, suppress=True)
    p.add_argument("estimate", help=f"one of {sorted(ESTIMATES)}")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--no-refine", action="store_true", help="skip the grid-doubling comparison")

    p = sub.add_parser("forcing", help="compute the forcing for boundary data")
    _global_options(p, suppress=True)
    p.add_argument("boundary_file", nargs="?", help="boundary container (axes t, k); default: config wavemaker")
    p.add_argument("--n-max", type=int, default=20, help="Neumann series truncation")

    p = sub.add_parser("norms", help="evaluate all norms of a stored field")
    _global_options(p, suppress=True)
    p.add_argument("field_file")
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else parse_config("{}", "<defaults>")
    if args.resolution_scale < 1:
        raise ConfigError(f"--resolution-scale must be >= 1, got {args.resolution_scale}")
    if args.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    cfg = cfg.scaled(args.resolution_scale)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"--seed must be nonnegative, got {args.seed}")
        cfg.seed = args.seed
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _field_header(geom, dt, **extra):
    return dict(geometry=geometry_header(geom), dt=dt, **extra)


# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    scfg = cfg.solver
    geom = scfg.geometry
    manifest = RunManifest(out / "manifest.json", "solve", cfg.raw, [cfg.seed], args.threads)
    manifest.set("resolution_scale", args.resolution_scale)
    u0 = initial_data(cfg)
    g = boundary_data(cfg)
    t0 = time.perf_counter()
    try:
        sol, rep = solve_with_halving(u0, g, scfg, cfg.max_halvings)
    except ConvergenceError as exc:
        manifest.timing("solve_s", time.perf_counter() - t0)
        (out / "picard_report.json").write_text(json.dumps(exc.report.as_dict(), indent=2, sort_keys=True) + "\n")
        manifest.output("picard_report", out / "picard_report.json")
        manifest.report("picard", exc.report.as_dict())
        manifest.finish("nonconverged", EXIT_CONVERGENCE)
        print(f"zkstrip solve: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    manifest.timing("solve_s", time.perf_counter() - t0)
    dt = sol.whole.dt
    restricted = sol.restricted
    files = {
        "solution": write_container(
            out / "solution.zkf", restricted.values, ("t", "k", "x"), **_field_header(geom, dt, x_start=geom.x0_index, region="x>=0")
        ),
        "whole": write_container(out / "whole.zkf", sol.whole.values, ("t", "k", "x"), **_field_header(geom, dt, x_start=0, region="box")),
        "boundary": write_container(out / "boundary.zkf", sol.boundary.modes, ("t", "k"), **_field_header(geom, dt, role="raw")),
        "forcing": write_container(
            out / "forcing.zkf", sol.forcing.modes[: sol.whole.nt], ("t", "k"), **_field_header(geom, dt, role="forcing")
        ),
    }
    (out / "picard_report.json").write_text(json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n")
    files["picard_report"] = out / "picard_report.json"
    res = pde_residual(sol) if sol.whole.nt > 8 else None
    u0_half = np.where(geom.x >= 0, u0, 0.0)
    n0 = l2_norm(u0_half, geom)
    diag = {
        "boundary_error": sol.boundary_error(),
        "pde_residual_abs": res.absolute if res else None,
        "pde_residual_rel": res.relative if res else None,
        "C_cal": sol.C_cal,
        "forcing_method": scfg.forcing,
        "C1_initial_extension": l2_norm(sol.u0_ext, geom) / n0 if n0 > 0 else None,
        "T_used": rep.T,
        "converged": rep.converged,
    }
    (out / "diagnostics.json").write_text(json.dumps(diag, indent=2, sort_keys=True) + "\n")
    files["diagnostics"] = out / "diagnostics.json"
    tr = sol.whole.trace()
    rows = (
        {"t": float(t), "k": k + 1, "u_trace": float(tr[n, k]), "g": float(sol.boundary.modes[n, k])}
        for n, t in enumerate(sol.whole.t)
        for k in range(geom.K)
    )
    files["trace_csv"] = write_csv(out / "trace.csv", rows, ("t", "k", "u_trace", "g"))
    phys = inverse_transverse(TransverseModes(restricted.values[-1].T, geom))  # (x, y)
    xs = restricted.x
    rows = ({"x": float(xs[i]), "y": float(y), "u": float(phys[i, j])} for i in range(xs.size) for j, y in enumerate(geom.y))
    files["snapshot_csv"] = write_csv(out / "snapshot_final.csv", rows, ("x", "y", "u"))
    for name, path in files.items():
        manifest.output(name, path)
    manifest.report("picard", rep.as_dict())
    manifest.report("diagnostics", diag)
    manifest.set("C_cal", sol.C_cal)
    manifest.finish("complete", EXIT_OK)
    print(
        f"converged={rep.converged} iterations={rep.iterations} rho_hat={rep.rho_hat:.3g} "
        f"T={rep.T:g} boundary_error={diag['boundary_error']:.3g}"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.estimate not in ESTIMATES:
        raise ConfigError(f"unknown estimate id {args.estimate!r}; choose from {sorted(ESTIMATES)}")
    if args.samples < 0:
        raise ConfigError(f"--samples must be >= 0, got {args.samples}")
    cfg = _load(args)
    out = _out_dir(args)
    ecfg = cfg.estimates
    manifest = RunManifest(out / "manifest.json", f"verify {args.estimate}", cfg.raw, list(range(cfg.seed, cfg.seed + args.samples)), args.threads)
    t0 = time.perf_counter()
    if args.no_refine:
        sweep = run_sweep(args.estimate, args.samples, ecfg, cfg.seed)
        fine, growth, flagged = None, None, not sweep.finite
    else:
        study = grid_study(args.estimate, args.samples, ecfg, cfg.seed)
        sweep, fine, growth, flagged = study.coarse, study.fine, study.growth, study.flagged
    manifest.timing("sweep_s", time.perf_counter() - t0)
    manifest.output("sweep", write_csv(out / "sweep.csv", sweep.records(), SWEEP_COLUMNS))
    if fine is not None:
        manifest.output("sweep_refined", write_csv(out / "sweep_refined.csv", fine.records(), SWEEP_COLUMNS))
    summary = {
        "estimate_id": args.estimate,
        "samples": sweep.samples,
        "max_ratio": sweep.max_ratio,
        "argmax_seed": sweep.argmax_seed,
        "median": sweep.median,
        "finite": sweep.finite,
        "refined_max_ratio": fine.max_ratio if fine is not None else None,
        "growth": growth,
        "flagged": flagged,
        "grid": list(sweep.grid),
    }
    (out / "verify_report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    manifest.output("report", out / "verify_report.json")
    manifest.report("sweep", summary)
    code = EXIT_FLAGGED if flagged else EXIT_OK
    manifest.finish("flagged" if flagged else "complete", code)
    g = "" if growth is None else f" growth={growth:+.3f}"
    print(f"{args.estimate}: samples={sweep.samples} max_ratio={sweep.max_ratio:.4g}{g} flagged={flagged}")
    return code


def cmd_forcing(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    scfg = cfg.solver
    geom = scfg.geometry
    manifest = RunManifest(out / "manifest.json", "forcing", cfg.raw, [cfg.seed], args.threads)
    if args.boundary_file:
        values, header = read_container(args.boundary_file)
        g = boundary_from_container(values, header, geom)
    else:
        g = boundary_data(cfg)
    T = (g.nt - 1) * g.dt
    Nt = g.nt - 1
    if Nt < 16:
        raise ConfigError(f"boundary data need at least 17 time samples, got {g.nt}")
    C_cal = scfg.C_cal if scfg.C_cal is not None else _calibration(geom, T, Nt, scfg.damping_factor, scfg.pad)
    u0_ext = extend_initial(initial_data(cfg), geom, scfg.mollifier_width)
    g_ext = extend_boundary(g, T)
    g1 = corrected_boundary(g_ext, linear_trace(u0_ext, g_ext.t, geom))
    f = forcing_from_boundary(g1, C_cal, horizon=T, damping_factor=scfg.damping_factor, pad=scfg.pad)
    nfft = scfg.pad * g1.nt
    tau = 2.0 * np.pi * np.fft.fftfreq(nfft, d=g1.dt)
    table = multiplier_table(geom, tau, C_cal)
    report = {"C_cal": C_cal, "T": T, "Nt": Nt, "imag_residue": f.meta.get("imag_residue")}
    try:
        fn = neumann_series_forcing(g1, C_cal, n_max=args.n_max, horizon=T, damping_factor=scfg.damping_factor, pad=scfg.pad)
        scale = np.linalg.norm(f.modes[: g.nt])
        diff = np.linalg.norm(fn.modes[: g.nt] - f.modes[: g.nt])
        report["neumann"] = {
            "applicable": True,
            "relative_difference": diff / scale if scale > 0 else diff,
            "sup_ratio": fn.meta.get("sup_ratio"),
            "truncation_bound": fn.meta.get("truncation_bound"),
        }
    except DivergentSeriesError as exc:
        report["neumann"] = {"applicable": False, "reason": str(exc), "k": exc.k, "tau": exc.tau}
    try:
        reg = forcing_regularity(f)
        report["regularity"] = {"left": reg.left, "right": reg.right, "ratio": reg.ratio, "c": reg.c, "holds": reg.holds}
    except AssertionError as exc:
        report["regularity"] = {"holds": False, "message": str(exc)}
    manifest.output("forcing", write_container(out / "forcing.zkf", f.modes, ("t", "k"), **_field_header(geom, f.dt, role="forcing", C_cal=C_cal)))
    rows = ({"t": float(t), "k": k + 1, "f": float(f.modes[n, k])} for n, t in enumerate(f.t) for k in range(geom.K))
    manifest.output("forcing_csv", write_csv(out / "forcing.csv", rows, ("t", "k", "f")))
    M = table.values
    rows = (
        {"k": k + 1, "tau": float(tau[j]), "re": float(M[k, j].real), "im": float(M[k, j].imag), "abs": float(abs(M[k, j]))}
        for k in range(geom.K)
        for j in np.argsort(tau)
    )
    manifest.output("multiplier_csv", write_csv(out / "multiplier.csv", rows, ("k", "tau", "re", "im", "abs")))
    (out / "forcing_report.json").write_text(json.dumps(report, indent=2, sort_keys=True, default=float) + "\n")
    manifest.output("report", out / "forcing_report.json")
    manifest.report("forcing", report)
    manifest.finish("complete", EXIT_OK)
    reg = report["regularity"]
    print(f"C_cal={C_cal:.6g} regularity ratio={reg.get('ratio', float('nan')):.4g} holds={reg['holds']} neumann={report['neumann']['applicable']}")
    return EXIT_OK


def _embed(values, header, geom):
    """Place a stored (t, k, x) field into the full box (zero elsewhere)."""
    if header.get("axes") != ["t", "k", "x"] or values.ndim != 3:
        raise FormatError(f"field container must have axes ['t', 'k', 'x'], got {header.get('axes')}")
    start = int(header.get("x_start", 0))
    nt, K, nx = values.shape
    if K != geom.K or start < 0 or start + nx > geom.Nx:
        raise FormatError(f"field shape {values.shape} with x_start={start} does not fit geometry {geometry_header(geom)}")
    if start == 0 and nx == geom.Nx:
        return values
    full = np.zeros((nt, K, geom.Nx), dtype=values.dtype)
    full[:, :, start : start + nx] = values
    return full


def cmd_norms(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    values, header = read_container(args.field_file)
    geom = geometry_from_header(header)
    dt = header.get("dt")
    if not isinstance(dt, (int, float)) or not dt > 0:
        raise FormatError(f"{args.field_file}: header needs a positive 'dt'")
    u = _embed(values, header, geom)
    base = cfg.solver.params
    p = BourgainParams(
        s=base.s if args.s is None else args.s,
        b=base.b if args.b is None else args.b,
        alpha=base.alpha if args.alpha is None else args.alpha,
    )
    manifest = RunManifest(out / "manifest.json", "norms", {"config": cfg.raw, "field": str(args.field_file), "params": p}, [], args.threads)
    spec = space_time_spectrum(u, dt, geom, half=not np.iscomplexobj(u))
    X = x0b_norm(spec, p)
    Y = y0b_norm(spec, p)
    E = energy_norm(u, dt, geom)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        R = restriction_norm(u, dt, geom, p)
    l2 = float(np.sqrt(np.sum(np.abs(u) ** 2) * geom.dx * dt))
    rows = [
        dict(quantity="X", **_norm_row(X)),
        dict(quantity="Y", **_norm_row(Y)),
        dict(quantity="energy", high=0.0, low=0.0, third=0.0, energy=E**2, total=E**2, norm=E),
        dict(quantity="Z", high=X.high, low=X.low, third=0.0, energy=E**2, total=(X.norm + E) ** 2, norm=X.norm + E),
        dict(quantity="X_restriction_bound", high=0.0, low=0.0, third=0.0, energy=0.0, total=R.value**2, norm=R.value),
        dict(quantity="L2", high=0.0, low=0.0, third=0.0, energy=0.0, total=l2**2, norm=l2),
    ]
    for r in rows:
        r.update(s=p.s, b=p.b, alpha=p.alpha)
    cols = ("quantity", "high", "low", "third", "energy", "total", "norm", "s", "b", "alpha")
    manifest.output("norms", write_csv(out / "norms.csv", rows, cols))
    summary = {r["quantity"]: r["norm"] for r in rows}
    summary.update(restriction_strategy=R.strategy, restriction_candidates=R.candidates, admissible=p.admissible)
    (out / "norms.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    manifest.output("report", out / "norms.json")
    manifest.report("norms", summary)
    manifest.finish("complete", EXIT_OK)
    print(" ".join(f"{r['quantity']}={r['norm']:.6g}" for r in rows))
    return EXIT_OK


def _norm_row(rep):
    return dict(high=rep.high, low=rep.low, third=rep.third, energy=rep.energy, total=rep.total, norm=rep.norm)


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "forcing": cmd_forcing, "norms": cmd_norms}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        with scipy.fft.set_workers(args.threads if args.threads and args.threads > 0 else 1):
            return COMMANDS[args.command](args)
    except (ConfigError, FormatError) as exc:
        print(f"zkstrip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularMultiplierError as exc:
        print(f"zkstrip {args.command}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
