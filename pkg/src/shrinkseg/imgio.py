"""Bit-exact interchange: PGM images, CSV grids and traces, JSON configs.

Float grids serialize through repr(), whose shortest round-trip form
reads back bit-identically, so u and v survive disk without
quantization. Every writer goes through a temp-then-rename step so a
crashed run never leaves a truncated artifact behind.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .admm import AdmmParams
from .decompose import IterationTrace, OuterParams, TraceRow
from .energy import ModelParams
from .grid import Array, as_grid
from .potential import PowerPotential
from .synth import EPS_POS, Disk, PhantomSpec, Rect

TRACE_HEADER = "k,F,increment,support_size,min_nonzero_grad,inner_iters"


def _atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("ascii"))


# ---------------------------------------------------------------------------
# PGM


def _read_pgm_header(data: bytes):
    """Magic, width, height, maxval; '#' comments allowed between tokens."""
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        return data[start:pos]

    magic = token()
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"unsupported magic {magic!r}, want P2 or P5")
    width, height, maxval = int(token()), int(token()), int(token())
    if maxval not in (255, 65535):
        raise ValueError(f"unsupported maxval {maxval}")
    pos += 1  # single whitespace byte separates header from raster
    return magic, width, height, maxval, pos


def read_image(path) -> Array:
    """Read a PGM file into an n x n grid of intensities in [0, 1]."""
    data = Path(path).read_bytes()
    magic, width, height, maxval, pos = _read_pgm_header(data)
    if width != height:
        raise ValueError(f"non-square image: {width}x{height}")
    count = width * height
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
        raster = data[pos : pos + count * dtype.itemsize]
        if len(raster) != count * dtype.itemsize:
            raise ValueError("truncated PGM raster")
        samples = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    else:
        samples = np.array(data[pos:].split()[:count], dtype=np.float64)
        if samples.size != count:
            raise ValueError("truncated PGM raster")
    if samples.min() < 0 or samples.max() > maxval:
        raise ValueError("sample outside [0, maxval]")
    return (samples / maxval).reshape(height, width)


def write_image(grid: Array, path) -> None:
    """Clamp to [0,1], quantize round-half-up to bytes, write binary PGM."""
    grid = as_grid(grid, "grid")
    n = grid.shape[0]
    clamped = np.clip(grid, 0.0, 1.0)
    quantized = np.floor(clamped * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{n} {n}\n255\n".encode("ascii")
    _atomic_write_bytes(path, header + quantized.tobytes())


# ---------------------------------------------------------------------------
# CSV grids, labels, traces


def write_float_grid(grid: Array, path) -> None:
    grid = as_grid(grid, "grid")
    lines = [",".join(repr(x) for x in row) for row in grid.tolist()]
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_float_grid(path) -> Array:
    rows: list[list[float]] = []
    with open(path, "r", encoding="ascii") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"bad float at row {lineno}, column {colno}: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ValueError("empty grid file")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValueError(f"ragged row {lineno}: {len(row)} cells, want {width}")
    return as_grid(np.array(rows), "grid")


def write_labels(labels: Array, path) -> None:
    labels = np.asarray(labels)
    lines = [",".join(str(int(x)) for x in row) for row in labels.tolist()]
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_labels(path) -> Array:
    rows = []
    with open(path, "r", encoding="ascii") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([int(c) for c in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"bad label at row {lineno}: {exc}") from None
    if not rows:
        raise ValueError("empty label file")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValueError(f"ragged row {lineno}: {len(row)} cells, want {width}")
    return np.array(rows, dtype=np.int64)


def label_image(labels: Array, k: int) -> Array:
    """Render phase i at intensity i/k for PGM output."""
    return np.asarray(labels, dtype=np.float64) / k


def write_trace(trace: IterationTrace, path) -> None:
    lines = [TRACE_HEADER]
    for row in trace:
        lines.append(
            f"{row.k},{row.energy!r},{row.increment!r},"
            f"{row.support_size},{row.min_nonzero_grad!r},{row.inner_iters}"
        )
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace(path) -> IterationTrace:
    """Parse a trace CSV; max_grad is not serialized and reads as nan."""
    with open(path, "r", encoding="ascii") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"bad trace header, want {TRACE_HEADER!r}")
    rows = []
    for line in lines[1:]:
        k, energy, increment, support_size, min_nz, inner = line.split(",")
        rows.append(
            TraceRow(
                k=int(k),
                energy=float(energy),
                increment=float(increment),
                support_size=int(support_size),
                min_nonzero_grad=float(min_nz),
                inner_iters=int(inner),
                max_grad=math.nan,
            )
        )
    return IterationTrace(tuple(rows))


# ---------------------------------------------------------------------------
# Log-domain transform


def to_log_domain(f: Array) -> Array:
    """Clamp to [EPS_POS, 1], then take the natural log."""
    f = as_grid(f, "f")
    return np.log(np.clip(f, EPS_POS, 1.0))


def from_log_domain(g: Array) -> Array:
    return np.exp(as_grid(g, "g"))


# ---------------------------------------------------------------------------
# Run configuration


@dataclass(frozen=True)
class RunConfig:
    """Tunable weights plus solver and pipeline settings for one run.

    alpha and beta have no defaults on purpose: they are per-image
    tuning knobs. JSON uses the key "K" for the phase count.
    """

    alpha: float
    beta: float
    gamma: float = 1e-8
    rho: float = 1e-8
    p: float = 0.5
    r: float = 10.0
    tol_in: float = 1e-4
    tol_out: float = 1e-4
    maxit_in: int = 100
    maxit_out: int = 10
    k: int = 2
    log_domain: bool = False
    seed: int = 0

    def model_params(self) -> ModelParams:
        return ModelParams(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            potential=PowerPotential(self.p),
        )

    def outer_params(self) -> OuterParams:
        return OuterParams(
            rho=self.rho, tol_out=self.tol_out, maxit_out=self.maxit_out
        )

    def admm_params(self) -> AdmmParams:
        return AdmmParams(r=self.r, tol_in=self.tol_in, maxit_in=self.maxit_in)


_CONFIG_KEYS = {("K" if f.name == "k" else f.name): f.name for f in fields(RunConfig)}
_INT_FIELDS = {"maxit_in", "maxit_out", "k", "seed"}


def config_from_dict(payload: dict) -> RunConfig:
    unknown = sorted(set(payload) - set(_CONFIG_KEYS))
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    kwargs = {}
    for key, value in payload.items():
        name = _CONFIG_KEYS[key]
        if name == "log_domain":
            if not isinstance(value, bool):
                raise ValueError(f"log_domain must be boolean, got {value!r}")
        elif name in _INT_FIELDS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"{key} must be an integer, got {value!r}")
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{key} must be a number, got {value!r}")
            value = float(value)
        kwargs[name] = value
    missing = {"alpha", "beta"} - set(kwargs)
    if missing:
        raise ValueError(f"missing required config keys: {sorted(missing)}")
    config = RunConfig(**kwargs)
    config.model_params()
    config.outer_params()
    config.admm_params()
    if config.k < 2:
        raise ValueError(f"K must be at least 2, got {config.k}")
    return config


def config_to_dict(config: RunConfig) -> dict:
    payload = asdict(config)
    payload["K"] = payload.pop("k")
    return payload


def write_report(payload: dict, path) -> None:
    _atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def read_run_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict):
        raise ValueError("config must be a JSON object")
    return config_from_dict(payload)


def write_run_config(config: RunConfig, path) -> None:
    _atomic_write_text(path, json.dumps(config_to_dict(config), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Phantom specs


def _shape_to_dict(shape) -> dict:
    if isinstance(shape, Disk):
        return {"type": "disk", **asdict(shape)}
    if isinstance(shape, Rect):
        return {"type": "rect", **asdict(shape)}
    raise ValueError(f"unknown shape {shape!r}")


def _shape_from_dict(payload: dict):
    kind = payload.get("type")
    rest = {key: value for key, value in payload.items() if key != "type"}
    if kind == "disk":
        return Disk(**rest)
    if kind == "rect":
        return Rect(**rest)
    raise ValueError(f"unknown shape type {kind!r}")


def phantom_spec_to_dict(spec: PhantomSpec) -> dict:
    payload = asdict(spec)
    payload["shapes"] = [_shape_to_dict(s) for s in spec.shapes]
    payload["phase_values"] = list(spec.phase_values)
    return payload


def phantom_spec_from_dict(payload: dict) -> PhantomSpec:
    if not isinstance(payload, dict):
        raise ValueError("phantom spec must be a JSON object")
    known = {f.name for f in fields(PhantomSpec)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ValueError(f"unknown phantom spec keys: {unknown}")
    kwargs = dict(payload)
    kwargs["phase_values"] = tuple(payload.get("phase_values", ()))
    kwargs["shapes"] = tuple(_shape_from_dict(s) for s in payload.get("shapes", []))
    return PhantomSpec(**kwargs)


def write_phantom_spec(spec: PhantomSpec, path) -> None:
    _atomic_write_text(path, json.dumps(phantom_spec_to_dict(spec), indent=2) + "\n")


def read_phantom_spec(path) -> PhantomSpec:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    return phantom_spec_from_dict(payload)
