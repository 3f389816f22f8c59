"""Checkpoints and time-series output for the coupled solver.

Every text file starts with ``#`` comment lines carrying the package
version, a hash of the run configuration and a parameter echo, followed by a
mandatory comma-separated column header.  Floats are written with ``%.17g``
so identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from importlib import metadata
from pathlib import Path

import numpy as np

from ..tensors import from_vec5, to_vec5
from .coupled import EnergyReport, FieldState
from .params import FlowParams
from .spectral import SpectralGrid

FLOAT_FORMAT = "%.17g"
TIME_SERIES_COLUMNS = (
    "t", "total", "kinetic", "bulk", "elastic", "e2",
    "viscous", "closure", "rotational", "translational", "dissipation",
    "min_margin", "max_speed",
)
CHECKPOINT_COLUMNS = ("i", "j", "q0", "q1", "q2", "q3", "q4", "vx", "vy")


def package_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0+unknown"


def config_hash(config: dict) -> str:
    """Short SHA-256 of the canonical JSON form of ``config``."""
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def header_lines(config: dict):
    return [
        f"# artifact {package_version()}",
        f"# config_hash {config_hash(config)}",
        f"# params {json.dumps(config, sort_keys=True, default=str)}",
    ]


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FORMAT % float(x)
    return str(x)


def write_csv(path, columns, rows, config: dict):
    """Write ``rows`` (iterables matching ``columns``) with the standard header."""
    buf = io.StringIO()
    buf.write("\n".join(header_lines(config)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def read_csv(path):
    """``(comment_lines, columns, rows_as_str)`` of a file written by :func:`write_csv`."""
    lines = Path(path).read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = list(csv.reader(body))
    return comments, reader[0], reader[1:]


def energy_row(rep: EnergyReport):
    return (
        rep.t, rep.total, rep.kinetic, rep.bulk, rep.elastic, rep.e2,
        rep.viscous, rep.closure, rep.rotational, rep.translational, rep.dissipation,
        rep.min_margin, rep.max_speed,
    )


class TimeSeriesWriter:
    """Append energy reports and flush them as one CSV."""

    def __init__(self, path, config: dict):
        self.path = path
        self.config = config
        self.rows = []

    def append(self, rep: EnergyReport):
        self.rows.append(energy_row(rep))

    def write(self):
        return write_csv(self.path, TIME_SERIES_COLUMNS, self.rows, self.config)


# checkpoints ------------------------------------------------------------

def _meta(state: FieldState, p: FlowParams):
    g = state.grid
    return {
        "nx": g.nx, "ny": g.ny, "lx": g.lx, "ly": g.ly,
        "t": state.t, "steps": state.steps, "freeze_velocity": state.freeze_velocity,
        "params": p.as_dict(),
    }


def save_checkpoint(path, state: FieldState, p: FlowParams, fmt_="npz", config=None):
    """Write the state as ``npz`` (binary) or ``csv`` (row-major cell records).

    Both formats carry dims, box, parameters and time.  ``Q`` is stored as its
    five traceless-basis coordinates.
    """
    path = Path(path)
    meta = _meta(state, p)
    q5 = to_vec5(state.q)
    if fmt_ == "npz":
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(json.dumps(meta, sort_keys=True)), q5=q5, v=state.v)
        return path
    if fmt_ != "csv":
        raise ValueError("checkpoint format must be 'npz' or 'csv'")
    g = state.grid
    rows = []
    for i in range(g.nx):
        for j in range(g.ny):
            rows.append((i, j, *q5[i, j], *state.v[i, j]))
    cfg = dict(config or {})
    cfg["checkpoint"] = meta
    write_csv(path, CHECKPOINT_COLUMNS, rows, cfg)
    return path


def load_checkpoint(path):
    """Return ``(state, params)`` from either checkpoint format."""
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as data:
            meta = json.loads(str(data["meta"]))
            q5, v = data["q5"], data["v"]
    else:
        comments, cols, rows = read_csv(path)
        params_line = next(c for c in comments if c.startswith("# params "))
        meta = json.loads(params_line[len("# params "):])["checkpoint"]
        arr = np.array(rows, dtype=float)
        nx, ny = meta["nx"], meta["ny"]
        q5 = arr[:, 2:7].reshape(nx, ny, 5)
        v = arr[:, 7:9].reshape(nx, ny, 2)
    grid = SpectralGrid(meta["nx"], meta["ny"], meta["lx"], meta["ly"])
    state = FieldState(
        grid=grid, q=from_vec5(q5), v=np.array(v, dtype=float), t=meta["t"],
        steps=meta["steps"], freeze_velocity=meta["freeze_velocity"],
    )
    return state, FlowParams(**meta["params"])
