"""Persistence: binary field containers, CSV tables and the run manifest.

Container layout::

    b"ZKSTRIP1"                  8-byte magic
    uint64 little-endian        header length in bytes
    header                      UTF-8 JSON (shape, axes, grids, dtype, ...)
    payload                     little-endian float64, C order

Complex arrays are stored with a trailing axis of length 2 (real, imag).
"""
from __future__ import annotations

import csv
import json
import os
import platform
import struct
import time
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .transverse import StripGeometry

__all__ = [
    "MAGIC",
    "write_container",
    "read_container",
    "geometry_header",
    "geometry_from_header",
    "write_csv",
    "read_csv",
    "RunManifest",
    "to_jsonable",
]

MAGIC = b"ZKSTRIP1"


def to_jsonable(obj):
    """Plain JSON types for dataclasses, numpy scalars and arrays."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def geometry_header(geom: StripGeometry) -> dict:
    return {"B": geom.B, "a": geom.a, "K": geom.K, "L": geom.L, "Nx": geom.Nx, "Ny": geom.Ny}


def geometry_from_header(header: dict) -> StripGeometry:
    try:
        g = header["geometry"]
        return StripGeometry(B=float(g["B"]), a=float(g["a"]), K=int(g["K"]), L=float(g["L"]), Nx=int(g["Nx"]), Ny=int(g["Ny"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"container header lacks a valid geometry: {exc}") from exc


def write_container(path, values, axes, **header) -> Path:
    """Write ``values`` with named ``axes`` and extra JSON ``header`` fields."""
    values = np.asarray(values)
    if len(axes) != values.ndim:
        raise ValueError(f"{len(axes)} axis names for a {values.ndim}-d array")
    is_complex = np.iscomplexobj(values)
    data = np.stack([values.real, values.imag], axis=-1) if is_complex else values
    head = {
        "format": "zkstrip-field",
        "version": 1,
        "shape": list(values.shape),
        "axes": list(axes),
        "dtype": "float64",
        "endianness": "little",
        "complex": bool(is_complex),
    }
    head.update(to_jsonable(header))
    blob = json.dumps(head, sort_keys=True).encode("utf-8")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
    return path


def read_container(path):
    """Return (values, header) from a container file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    if raw[:8] != MAGIC:
        raise FormatError(f"{path}: not a zkstrip container (bad magic)")
    if len(raw) < 16:
        raise FormatError(f"{path}: truncated header")
    (n,) = struct.unpack("<Q", raw[8:16])
    try:
        header = json.loads(raw[16 : 16 + n].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: corrupt JSON header ({exc})") from exc
    shape = tuple(header.get("shape", ()))
    full = shape + ((2,) if header.get("complex") else ())
    payload = raw[16 + n :]
    expected = 8 * int(np.prod(full, dtype=np.int64))
    if len(payload) != expected:
        raise FormatError(f"{path}: payload has {len(payload)} bytes, header implies {expected}")
    data = np.frombuffer(payload, dtype="<f8").reshape(full).astype(float)
    if header.get("complex"):
        data = data[..., 0] + 1j * data[..., 1]
    return data, header


def write_csv(path, rows, columns) -> Path:
    """Write dict rows with a header row in the given column order."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class RunManifest:
    """JSON manifest rewritten atomically after every update."""

    def __init__(self, path, command: str, config: dict, seeds=(), threads: int = 1):
        from . import __version__

        self.path = Path(path)
        self.data = {
            "command": command,
            "status": "running",
            "config": to_jsonable(config),
            "seeds": list(seeds),
            "threads": threads,
            "versions": {
                "zkstrip": __version__,
                "numpy": np.__version__,
                "scipy": _scipy_version(),
                "python": platform.python_version(),
            },
            "timings": {},
            "outputs": {},
            "reports": {},
        }
        self._t0 = time.perf_counter()
        self.write()

    def write(self):
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(to_jsonable(self.data), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, self.path)

    def output(self, name: str, path):
        self.data["outputs"][name] = Path(path).name
        self.write()

    def report(self, name: str, value):
        self.data["reports"][name] = to_jsonable(value)
        self.write()

    def timing(self, name: str, seconds: float):
        self.data["timings"][name] = round(float(seconds), 6)

    def set(self, key: str, value):
        self.data[key] = to_jsonable(value)
        self.write()

    def finish(self, status: str = "complete", exit_code: int = 0):
        self.data["status"] = status
        self.data["exit_code"] = exit_code
        self.timing("total_s", time.perf_counter() - self._t0)
        self.write()


def _scipy_version():
    import scipy

    return scipy.__version__
