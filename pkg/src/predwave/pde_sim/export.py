"""Snapshot CSV and sampled-history archives."""
from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import Field

FLOAT_FMT = "%.17g"


def write_snapshot(path: str | os.PathLike, f: Field, x: np.ndarray) -> Path:
    """Write one field as CSV with header ``x,u,v``."""
    path = Path(path)
    data = np.column_stack([x, f.u, f.v])
    np.savetxt(path, data, delimiter=",", header="x,u,v", comments="", fmt=FLOAT_FMT)
    return path


def read_snapshot(path: str | os.PathLike, t: float = 0.0) -> tuple[np.ndarray, Field]:
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    if header != ["x", "u", "v"]:
        raise ValueError(f"{path}: expected header x,u,v, got {header}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], Field(t, data[:, 1], data[:, 2])


def write_history(path: str | os.PathLike, history: Iterable[Field]) -> Path:
    history = list(history)
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(fh, t=np.array([f.t for f in history]),
                 u=np.stack([f.u for f in history]), v=np.stack([f.v for f in history]))
    return path


def read_history(path: str | os.PathLike) -> list[Field]:
    with np.load(path) as z:
        return [Field(float(t), u, v) for t, u, v in zip(z["t"], z["u"], z["v"])]
