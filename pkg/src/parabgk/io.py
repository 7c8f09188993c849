"""CSV artifacts: moment snapshots, convergence log, timing report.

Floats are written with repr, the shortest digit string that round-trips to
the same double, so identical runs produce byte-identical files and readers
recover the exact values.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .grid import SpatialGrid
from .moments import MomentField
from .parareal import ConvergenceRecord

__all__ = [
    "TimingReport",
    "write_snapshots",
    "read_snapshot",
    "write_convergence",
    "read_convergence",
    "write_timing",
]

SNAPSHOT_HEADER = ["x", "rho", "ux", "uy", "uz", "theta"]
CONVERGENCE_HEADER = ["k", "error", "seconds"]


@dataclass
class TimingReport:
    """Measured costs of one comparison run, all in seconds."""

    iterations: list[float] = field(default_factory=list)
    t_lift: float = 0.0
    t_kin: float = 0.0
    t_proj: float = 0.0
    t_fluid: float = 0.0
    fine_seconds: float | None = None
    fluid_seconds: float | None = None
    parareal_seconds: float | None = None
    speedup: float | None = None
    k_opt: int | None = None


def write_snapshots(snapshots: list[MomentField], space: SpatialGrid,
                    out_dir: str | Path) -> list[Path]:
    """One snap_NNNNN.csv per coarse time, one row per cell."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for n, U in enumerate(snapshots):
        path = out_dir / f"snap_{n:05d}.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(SNAPSHOT_HEADER)
            for i in range(U.n_x):
                writer.writerow([repr(float(space.centers[i])),
                                 repr(float(U.rho[i])),
                                 repr(float(U.u[i, 0])),
                                 repr(float(U.u[i, 1])),
                                 repr(float(U.u[i, 2])),
                                 repr(float(U.theta[i]))])
        paths.append(path)
    return paths


def read_snapshot(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of one snapshot file as float arrays keyed by header name."""
    with Path(path).open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[float(cell) for cell in row] for row in reader]
    data = np.asarray(rows)
    return {name: data[:, j] for j, name in enumerate(header)}


def write_convergence(records: list[ConvergenceRecord],
                      out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "convergence.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CONVERGENCE_HEADER)
        for rec in records:
            writer.writerow([rec.k, repr(rec.error), repr(rec.seconds)])
    return path


def read_convergence(path: str | Path) -> list[ConvergenceRecord]:
    with Path(path).open(newline="") as handle:
        reader = csv.reader(handle)
        next(reader)
        return [ConvergenceRecord(int(k), float(err), float(sec))
                for k, err, sec in reader]


def write_timing(report: TimingReport, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "timing.json"
    path.write_text(json.dumps(asdict(report), indent=2) + "\n")
    return path
