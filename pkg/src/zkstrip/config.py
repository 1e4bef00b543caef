"""Run configuration: JSON text with units in the key names.

Every section and key is optional; missing keys take the defaults below.
Unknown keys and invalid values are rejected with the line of the
offending key.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError
from .estimates import EstimateConfig
from .forcing import BoundaryData, reference_wavemaker
from .norms import BourgainParams
from .solver import FORCING_METHODS, SolverConfig
from .transverse import StripGeometry

__all__ = ["DEFAULTS", "RunConfig", "load_config", "parse_config", "demo_config_path", "initial_data", "boundary_data"]

DEFAULTS = {
    "geometry": {
        "strip_width_B": float(np.pi),
        "transport_a": 1.0,
        "modes_K": 16,
        "box_halfwidth_L": 40.0,
        "grid_Nx": 256,
        "grid_Ny": 64,
    },
    "time": {"horizon_T": 1.0, "steps_Nt": 256},
    "bourgain": {"s": 0.0, "b": 0.45, "alpha": 0.6},
    "picard": {"tol": 1e-10, "max_iter": 30, "max_halvings": 6, "nonlinear": True, "dealias": True},
    "forcing": {"method": "multiplier", "C_cal": None, "damping_factor": 20.0, "pad": 2},
    "extension": {"mollifier_width_x": 0.25},
    "initial": [],
    "boundary": [],
    "boundary_file": None,
    "estimates": {
        "modes_K": 4,
        "box_halfwidth_L": 20.0,
        "grid_Nx": 64,
        "grid_Ny": 16,
        "steps_nt": 128,
        "horizon_T": 1.0,
        "band_xi": 1.5,
    },
    "seed": 0,
}

INITIAL_KEYS = {"mode": 1, "amplitude": 0.0, "center_x": 8.0, "width_x": 1.5, "carrier_xi": 0.0}
BOUNDARY_KEYS = {"mode": 1, "amplitude": 0.0, "tone_tau": 10.0, "ramp_t": 0.3}


_GEOMETRY_MESSAGES = (
    ("strip width", "strip_width_B"),
    ("box half-width", "box_halfwidth_L"),
    ("mode count", "modes_K"),
    ("Nx", "grid_Nx"),
    ("Ny", "grid_Ny"),
)


def demo_config_path() -> Path:
    return Path(str(resources.files("zkstrip") / "data" / "demo.json"))


@dataclass
class RunConfig:
    raw: dict
    solver: SolverConfig
    estimates: EstimateConfig
    initial: list
    boundary: list
    boundary_file: str | None
    max_halvings: int
    seed: int
    base_dir: Path = field(default_factory=Path.cwd)

    def scaled(self, factor: int) -> "RunConfig":
        """Multiply Nx, Ny and Nt by ``factor`` (box and horizon unchanged)."""
        if factor == 1:
            return self
        geom = self.solver.geometry.refined(factor)
        solver = self.solver.with_(geometry=geom, Nt=self.solver.Nt * factor)
        out = copy.copy(self)
        out.solver = solver
        return out


class _Locator:
    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def error(self, key: str, message: str) -> ConfigError:
        for i, line in enumerate(self.lines, start=1):
            if f'"{key}"' in line:
                return ConfigError(f"{self.source}:{i}: {message}")
        return ConfigError(f"{self.source}: {message}")


def _merge(section: str, given, defaults: dict, loc: _Locator) -> dict:
    if not isinstance(given, dict):
        raise loc.error(section, f"section {section!r} must be an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise loc.error(unknown[0], f"unknown key {unknown[0]!r} in section {section!r}; allowed: {sorted(defaults)}")
    out = dict(defaults)
    out.update(given)
    return out


def _number(sec: dict, key: str, loc: _Locator, kind=float, positive=False, allow_none=False):
    v = sec[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise loc.error(key, f"{key!r} must be a number, got {v!r}")
    if kind is int and float(v) != int(v):
        raise loc.error(key, f"{key!r} must be an integer, got {v!r}")
    v = kind(v)
    if positive and not v > 0:
        raise loc.error(key, f"{key!r} must be positive, got {v!r}")
    return v


def _entries(name: str, given, keys: dict, loc: _Locator, K: int) -> list:
    if not isinstance(given, list):
        raise loc.error(name, f"{name!r} must be a list of objects")
    out = []
    for item in given:
        sec = _merge(name, item, keys, loc)
        mode = _number(sec, "mode", loc, int)
        if not 1 <= mode <= K:
            raise loc.error("mode", f"mode {mode} outside 1..{K}")
        for key in keys:
            if key != "mode":
                _number(sec, key, loc, positive=key in ("width_x", "ramp_t"))
        out.append(sec)
    return out


def parse_config(text: str, source: str = "<config>", base_dir: Path | None = None) -> RunConfig:
    """Parse and validate config text; errors carry ``source:line``."""
    try:
        given = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    loc = _Locator(text, source)
    if not isinstance(given, dict):
        raise ConfigError(f"{source}:1: top level must be an object")
    unknown = sorted(set(given) - set(DEFAULTS))
    if unknown:
        raise loc.error(unknown[0], f"unknown section {unknown[0]!r}; allowed: {sorted(DEFAULTS)}")
    raw = copy.deepcopy(DEFAULTS)
    for name in ("geometry", "time", "bourgain", "picard", "forcing", "extension", "estimates"):
        raw[name] = _merge(name, given.get(name, {}), DEFAULTS[name], loc)
    g, tm, bp, pc, fc, ex, es = (raw[n] for n in ("geometry", "time", "bourgain", "picard", "forcing", "extension", "estimates"))
    try:
        geom = StripGeometry(
            B=_number(g, "strip_width_B", loc, positive=True),
            a=_number(g, "transport_a", loc),
            K=_number(g, "modes_K", loc, int, positive=True),
            L=_number(g, "box_halfwidth_L", loc, positive=True),
            Nx=_number(g, "grid_Nx", loc, int, positive=True),
            Ny=_number(g, "grid_Ny", loc, int, positive=True),
        )
    except ConfigError as exc:
        if str(exc).startswith(source):
            raise
        msg = str(exc)
        key = next((k for prefix, k in _GEOMETRY_MESSAGES if msg.startswith(prefix)), "geometry")
        raise loc.error(key, msg) from exc
    params = BourgainParams(s=_number(bp, "s", loc), b=_number(bp, "b", loc), alpha=_number(bp, "alpha", loc))
    method = fc["method"]
    if method not in FORCING_METHODS:
        raise loc.error("method", f"forcing method must be one of {FORCING_METHODS}, got {method!r}")
    for key in ("nonlinear", "dealias"):
        if not isinstance(pc[key], bool):
            raise loc.error(key, f"{key!r} must be true or false")
    try:
        solver = SolverConfig(
            geometry=geom,
            T=_number(tm, "horizon_T", loc, positive=True),
            Nt=_number(tm, "steps_Nt", loc, int, positive=True),
            params=params,
            picard_tol=_number(pc, "tol", loc, positive=True),
            picard_max=_number(pc, "max_iter", loc, int, positive=True),
            dealias=pc["dealias"],
            nonlinear=pc["nonlinear"],
            mollifier_width=_number(ex, "mollifier_width_x", loc),
            C_cal=_number(fc, "C_cal", loc, positive=True, allow_none=True),
            damping_factor=_number(fc, "damping_factor", loc, positive=True),
            pad=_number(fc, "pad", loc, int, positive=True),
            forcing=method,
        )
        egeom = StripGeometry(
            B=geom.B,
            a=geom.a,
            K=_number(es, "modes_K", loc, int, positive=True),
            L=_number(es, "box_halfwidth_L", loc, positive=True),
            Nx=_number(es, "grid_Nx", loc, int, positive=True),
            Ny=_number(es, "grid_Ny", loc, int, positive=True),
        )
        estimates = EstimateConfig(
            egeom,
            T=_number(es, "horizon_T", loc, positive=True),
            nt=_number(es, "steps_nt", loc, int, positive=True),
            params=params,
            band=_number(es, "band_xi", loc, positive=True),
        )
    except ConfigError as exc:
        if str(exc).startswith(source):
            raise
        raise ConfigError(f"{source}: {exc}") from exc
    raw["initial"] = _entries("initial", given.get("initial", []), INITIAL_KEYS, loc, geom.K)
    raw["boundary"] = _entries("boundary", given.get("boundary", []), BOUNDARY_KEYS, loc, geom.K)
    bfile = given.get("boundary_file")
    if bfile is not None and not isinstance(bfile, str):
        raise loc.error("boundary_file", "boundary_file must be a path string or null")
    raw["boundary_file"] = bfile
    seed = given.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise loc.error("seed", f"seed must be a nonnegative integer, got {seed!r}")
    raw["seed"] = seed
    halvings = _number(pc, "max_halvings", loc, int)
    if halvings < 0:
        raise loc.error("max_halvings", "max_halvings must be >= 0")
    return RunConfig(
        raw=raw,
        solver=solver,
        estimates=estimates,
        initial=raw["initial"],
        boundary=raw["boundary"],
        boundary_file=bfile,
        max_halvings=halvings,
        seed=seed,
        base_dir=base_dir or Path.cwd(),
    )


def load_config(path) -> RunConfig:
    """Read a config file; ``"demo"`` selects the bundled demo."""
    path = demo_config_path() if str(path) == "demo" else Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_config(text, str(path), path.parent)


def initial_data(cfg: RunConfig, geom: StripGeometry | None = None) -> np.ndarray:
    """u0[k, j]: sum of Gaussian (optionally modulated) bumps per entry."""
    geom = geom or cfg.solver.geometry
    x = geom.x
    u0 = np.zeros((geom.K, geom.Nx))
    for e in cfg.initial:
        bump = np.exp(-(((x - e["center_x"]) / e["width_x"]) ** 2)) * np.cos(e["carrier_xi"] * x)
        u0[e["mode"] - 1] += e["amplitude"] * bump
    return u0


def boundary_data(cfg: RunConfig, solver: SolverConfig | None = None):
    """Wavemaker g as BoundaryData on [0, T], from entries or a container file."""
    from .io import geometry_from_header, read_container

    solver = solver or cfg.solver
    geom = solver.geometry
    if cfg.boundary_file is not None:
        path = Path(cfg.boundary_file)
        if not path.is_absolute():
            path = cfg.base_dir / path
        values, header = read_container(path)
        return boundary_from_container(values, header, geom)
    t = solver.t
    modes = np.zeros((t.size, geom.K))
    for e in cfg.boundary:
        modes[:, e["mode"] - 1] += e["amplitude"] * reference_wavemaker(t, e["tone_tau"], e["ramp_t"])
    return BoundaryData(modes, solver.dt, geom)


def boundary_from_container(values, header: dict, geom: StripGeometry) -> BoundaryData:
    if header.get("axes") != ["t", "k"] or values.ndim != 2:
        raise FormatError(f"boundary container must have axes ['t', 'k'], got {header.get('axes')}")
    if values.shape[1] != geom.K:
        raise FormatError(f"boundary container has {values.shape[1]} modes, geometry has K={geom.K}")
    if np.iscomplexobj(values):
        raise FormatError("boundary container must be real")
    dt = header.get("dt")
    if not isinstance(dt, (int, float)) or not dt > 0:
        raise FormatError("boundary container header needs a positive 'dt'")
    return BoundaryData(values, float(dt), geom, header.get("role", "raw"))
