"""CSV/JSON serialization of trajectories, scans and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from cyclelab.integrate import IntegrationStats, IntegratorConfig, Termination, Trajectory
from cyclelab.models import VARIABLES, ModelInstance, make_model

TRAJECTORY_HEADER = ["t", "y", "w", "f"]
SCAN_HEADER_TAIL = ["y*", "w*", "f*", "re1", "im1", "re2", "im2", "re3", "im3", "class"]
TRAJECTORY_SCHEMA = "cyclelab.trajectory/1"


def fmt_num(x: float) -> str:
    """Shortest round-trip decimal; integral values drop the trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    mask = traj.model.mask
    for t, x in zip(traj.times, traj.states):
        writer.writerow([fmt_num(t)] + [fmt_num(v) if name in mask else "" for name, v in zip(VARIABLES, x)])
    return buf.getvalue()


def parse_trajectory_csv(text: str) -> tuple[np.ndarray, np.ndarray, frozenset[str]]:
    """Return ``(times, states, present_variables)`` from trajectory CSV text."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != TRAJECTORY_HEADER:
        raise ValueError(f"trajectory CSV header must be {','.join(TRAJECTORY_HEADER)}, got {header}")
    times, states = [], []
    present: set[str] = set()
    for row in reader:
        if not row:
            continue
        times.append(float(row[0]))
        state = []
        for name, cell in zip(VARIABLES, row[1:4]):
            if cell == "":
                state.append(0.0)
            else:
                present.add(name)
                state.append(float(cell))
        states.append(state)
    return np.array(times), np.array(states, dtype=float).reshape(-1, 3), frozenset(present)


def trajectory_sidecar(traj: Trajectory, x0: dict, t_end: float, version: str) -> dict:
    return {
        "schema": TRAJECTORY_SCHEMA,
        "version": version,
        "model": traj.model.kind.value,
        "params": traj.model.param_dict(),
        "initial": x0,
        "t_end": t_end,
        "config": traj.config.to_dict(),
        "terminated": traj.terminated.value,
        "stats": traj.stats.to_dict(),
        "n_samples": len(traj),
    }


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json") if path.suffix == ".csv" else Path(str(path) + ".json")


def load_trajectory(csv_path: Path, model: ModelInstance | None = None) -> Trajectory:
    """Rebuild a trajectory from its CSV and (when ``model`` is not given) its JSON sidecar."""
    times, states, _ = parse_trajectory_csv(Path(csv_path).read_text())
    meta = {}
    side = sidecar_path(Path(csv_path))
    if side.exists():
        meta = json.loads(side.read_text())
    if model is None:
        if not meta:
            raise ValueError(f"no sidecar {side} and no model given")
        model = make_model(meta["model"], meta["params"])
    cfg = IntegratorConfig(**{k: v for k, v in meta.get("config", {}).items()}) if meta else IntegratorConfig()
    status = Termination(meta.get("terminated", "completed"))
    return Trajectory(times, states, model, status, IntegrationStats(), cfg)


def eigen_cells(e) -> list[str]:
    cells = []
    for z in (e.padded() if e is not None else (None, None, None)):
        cells += ["", ""] if z is None else [fmt_num(z.real), fmt_num(z.imag)]
    return cells


def scan_csv(scan) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([scan.parameter] + SCAN_HEADER_TAIL)
    mask = scan.base.mask
    for row in scan.rows:
        if row.fixed_point is not None:
            fp = [fmt_num(row.fixed_point[v]) if v in mask else "" for v in VARIABLES]
        else:
            fp = ["", "", ""]
        cls = row.stability.value if row.interior else "non_interior"
        eig = eigen_cells(row.eigen if row.interior else None)
        writer.writerow([fmt_num(row.value)] + fp + eig + [cls])
    return buf.getvalue()


def json_dumps(doc) -> str:
    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return None
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.generic):
            return clean(o.item())
        return o

    return json.dumps(clean(doc), indent=2, sort_keys=False) + "\n"
