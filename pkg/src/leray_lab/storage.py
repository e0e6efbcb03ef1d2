"""File formats: snapshots, trajectories, diagnostics CSV, run manifests,
and the versioned JSON run configuration.

Snapshots are a JSON header line followed by the raw little-endian
complex128 coefficient payload. The diagnostics CSV has the fixed column
order t, l2, dl2_1..dl2_m, residual, criterion, sqrt_t_dl2 with floats
printed to 17 significant digits so re-reading round-trips exactly.
Config parsing is fail-closed: unknown keys are errors.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .grid import Grid, make_grid
from .solver import (
    ConfigError,
    DiagnosticsSeries,
    InitialCondition,
    SnapshotPlan,
    SolverConfig,
    TrajectoryStore,
)

SNAPSHOT_MAGIC = "leray-lab-snapshot"
SNAPSHOT_VERSION = 1
CONFIG_VERSION = 1

FLOAT_FMT = "%.17g"


# -- snapshots -------------------------------------------------------------


def write_snapshot(path, grid: Grid, t: float, nu: float, coeff: np.ndarray, seed=None):
    """Self-describing spectral snapshot: JSON header + raw payload."""
    path = Path(path)
    header = {
        "format": SNAPSHOT_MAGIC,
        "version": SNAPSHOT_VERSION,
        "grid": grid.to_dict(),
        "t": t,
        "nu": nu,
        "seed": seed,
        "dtype": "<c16",
        "shape": list(coeff.shape),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(coeff, dtype="<c16").tobytes())


def read_snapshot(path):
    """Returns (grid, t, nu, coeff). Raises ConfigError on corrupt files."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"snapshot file not found: {path}")
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"corrupt snapshot header in {path}: {exc}") from exc
        if header.get("format") != SNAPSHOT_MAGIC:
            raise ConfigError(f"{path} is not a snapshot file")
        if header.get("version") != SNAPSHOT_VERSION:
            raise ConfigError(f"unsupported snapshot version {header.get('version')}")
        g = header["grid"]
        grid = make_grid(
            g["dim"], g["resolution"], g["box_length"], g["dealias_fraction"]
        )
        shape = tuple(header["shape"])
        payload = fh.read()
    expected = int(np.prod(shape)) * 16
    if len(payload) != expected:
        raise ConfigError(
            f"corrupt snapshot payload in {path}: {len(payload)} bytes, "
            f"expected {expected}"
        )
    coeff = np.frombuffer(payload, dtype="<c16").reshape(shape).copy()
    return grid, float(header["t"]), float(header["nu"]), coeff


def save_trajectory(directory, trajectory: TrajectoryStore, seed=None):
    """Write one snapshot pair (velocity, advection) per stored time."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, t in enumerate(trajectory.times):
        u_name = f"u_{i:05d}.snap"
        q_name = f"q_{i:05d}.snap"
        write_snapshot(directory / u_name, trajectory.grid, float(t), trajectory.nu,
                       trajectory.u_coeffs[i], seed=seed)
        write_snapshot(directory / q_name, trajectory.grid, float(t), trajectory.nu,
                       trajectory.q_coeffs[i], seed=seed)
        entries.append({"t": float(t), "u": u_name, "q": q_name})
    index = {
        "format": "leray-lab-trajectory",
        "version": SNAPSHOT_VERSION,
        "grid": trajectory.grid.to_dict(),
        "nu": trajectory.nu,
        "snapshots": entries,
    }
    with open(directory / "trajectory.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)


def load_trajectory(directory) -> TrajectoryStore:
    directory = Path(directory)
    index_path = directory / "trajectory.json"
    if not index_path.exists():
        raise ConfigError(f"no trajectory.json in {directory}")
    with open(index_path) as fh:
        index = json.load(fh)
    if index.get("format") != "leray-lab-trajectory":
        raise ConfigError(f"{index_path} is not a trajectory index")
    g = index["grid"]
    grid = make_grid(g["dim"], g["resolution"], g["box_length"], g["dealias_fraction"])
    times, u_coeffs, q_coeffs = [], [], []
    for entry in index["snapshots"]:
        gu, tu, nu_u, cu = read_snapshot(directory / entry["u"])
        gq, tq, _, cq = read_snapshot(directory / entry["q"])
        if gu != grid or gq != grid:
            raise ConfigError("snapshot grids are inconsistent with the index")
        if abs(tu - entry["t"]) > 1e-12 or abs(tq - entry["t"]) > 1e-12:
            raise ConfigError("snapshot times are inconsistent with the index")
        times.append(entry["t"])
        u_coeffs.append(cu)
        q_coeffs.append(cq)
    return TrajectoryStore(
        grid=grid,
        nu=float(index["nu"]),
        times=np.asarray(times),
        u_coeffs=u_coeffs,
        q_coeffs=q_coeffs,
    )


# -- diagnostics CSV --------------------------------------------------------


def series_columns(m_max: int) -> list[str]:
    return (
        ["t", "l2"]
        + [f"dl2_{m}" for m in range(1, m_max + 1)]
        + ["residual", "criterion", "sqrt_t_dl2"]
    )


def write_series_csv(path, series: DiagnosticsSeries):
    path = Path(path)
    cols = series_columns(series.m_max)
    lines = [",".join(cols)]
    for i in range(len(series.t)):
        row = [FLOAT_FMT % series.t[i], FLOAT_FMT % series.l2[i]]
        row += [FLOAT_FMT % series.dl2[m][i] for m in range(series.m_max)]
        row.append(FLOAT_FMT % series.residual[i])
        row.append(str(int(series.criterion[i])))
        row.append(FLOAT_FMT % series.sqrt_t_dl2[i])
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def read_series_csv(path, nu: float | None = None, dim: int | None = None) -> DiagnosticsSeries:
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    m_max = sum(1 for name in header if name.startswith("dl2_"))
    if header != series_columns(m_max):
        raise ConfigError(f"unexpected CSV columns in {path}: {header}")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return DiagnosticsSeries(
        t=data[:, 0],
        l2=data[:, 1],
        dl2=data[:, 2 : 2 + m_max].T.copy(),
        residual=data[:, 2 + m_max],
        criterion=data[:, 3 + m_max].astype(bool),
        sqrt_t_dl2=data[:, 4 + m_max],
        nu=float(nu) if nu is not None else float("nan"),
        dim=int(dim) if dim is not None else 0,
    )


# -- run manifest -----------------------------------------------------------


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int | None
    version: str
    wall_time_s: float
    outputs: list

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "outputs": list(self.outputs),
        }


def canonical_hash(payload: dict) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


def write_manifest(path, command: str, config_payload: dict, seed, outputs, started: float):
    manifest = RunManifest(
        command=command,
        config_hash=canonical_hash(config_payload),
        seed=seed,
        version=__version__,
        wall_time_s=time.time() - started,
        outputs=[str(p) for p in outputs],
    )
    with open(path, "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
    return manifest


# -- run configuration ------------------------------------------------------


def _require_keys(mapping: dict, allowed: set, context: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {context}; allowed: {sorted(allowed)}"
        )


def config_from_dict(payload: dict) -> SolverConfig:
    """Parse and validate a run configuration dictionary (fail-closed)."""
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {
        "schema_version",
        "grid",
        "nu",
        "dt",
        "cfl_target",
        "t_end",
        "initial",
        "sample_every",
        "m_max",
        "linear_only",
        "snapshots",
    }
    _require_keys(payload, allowed, "config root")
    if payload.get("schema_version") != CONFIG_VERSION:
        raise ConfigError(
            f"config schema_version must be {CONFIG_VERSION}, "
            f"got {payload.get('schema_version')!r}"
        )
    for key in ("grid", "nu", "t_end", "initial"):
        if key not in payload:
            raise ConfigError(f"config is missing required key {key!r}")

    gspec = payload["grid"]
    _require_keys(
        gspec, {"dim", "resolution", "box_length", "dealias_fraction"}, "config grid"
    )
    try:
        grid = make_grid(
            int(gspec["dim"]),
            int(gspec["resolution"]),
            float(gspec.get("box_length", 2.0 * np.pi)),
            float(gspec.get("dealias_fraction", 2.0 / 3.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc

    ispec = payload["initial"]
    _require_keys(ispec, {"kind", "seed", "energy", "peak_k", "path"}, "config initial")
    try:
        initial = InitialCondition(
            kind=ispec.get("kind"),
            seed=None if ispec.get("seed") is None else int(ispec["seed"]),
            energy=None if ispec.get("energy") is None else float(ispec["energy"]),
            peak_k=None if ispec.get("peak_k") is None else float(ispec["peak_k"]),
            path=ispec.get("path"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid initial condition: {exc}") from exc

    snapshots = None
    if payload.get("snapshots") is not None:
        sspec = payload["snapshots"]
        _require_keys(sspec, {"t_start", "t_end", "count"}, "config snapshots")
        try:
            snapshots = SnapshotPlan(
                float(sspec["t_start"]), float(sspec["t_end"]), int(sspec["count"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid snapshot plan: {exc}") from exc

    try:
        return SolverConfig(
            grid=grid,
            nu=float(payload["nu"]),
            t_end=float(payload["t_end"]),
            initial=initial,
            dt=None if payload.get("dt") is None else float(payload["dt"]),
            cfl_target=float(payload.get("cfl_target", 0.4)),
            sample_every=int(payload.get("sample_every", 1)),
            m_max=int(payload.get("m_max", 3)),
            linear_only=bool(payload.get("linear_only", False)),
            snapshots=snapshots,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc


def load_config(path) -> tuple[SolverConfig, dict]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(payload), payload
