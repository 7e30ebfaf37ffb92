"""CSV files for designs and search traces."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .grid import GridSpace, coords
from .privacy import Design

log = logging.getLogger(__name__)

SNAP_TOL = 1e-9


class MalformedInput(ValueError):
    pass


def write_design_csv(path, design: Design, space: GridSpace, indices: bool = True):
    """Rows of real coordinates (12 significant digits) plus exact level indices."""
    X = design.as_array(space.d)
    C = coords(space, X)
    header = [f"x{i + 1}" for i in range(space.d)]
    if indices:
        header += [f"idx{i + 1}" for i in range(space.d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for c, x in zip(C, X):
            row = [f"{v:.12g}" for v in c]
            if indices:
                row += [str(int(v)) for v in x]
            w.writerow(row)


def read_design_csv(path, space: GridSpace) -> Tuple[np.ndarray, List[str]]:
    """Level indices of the points in a design CSV and any snapping warnings.

    Index columns win when present; otherwise coordinates are snapped to the
    nearest grid level, with a warning for values more than 1e-9 off-grid.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise MalformedInput(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    d = space.d
    xcols = [f"x{i + 1}" for i in range(d)]
    icols = [f"idx{i + 1}" for i in range(d)]
    if header[:d] != xcols:
        raise MalformedInput(f"{path}: header must start with {','.join(xcols)}, got {','.join(header)}")
    has_idx = all(c in header for c in icols)
    warnings = []
    out = []
    for lineno, r in enumerate(rows[1:], 2):
        try:
            x = np.array([float(r[header.index(c)]) for c in xcols])
            idx = [int(r[header.index(c)]) for c in icols] if has_idx else None
        except (ValueError, IndexError):
            raise MalformedInput(f"{path}:{lineno}: cannot parse row {r}") from None
        if idx is None:
            real = (x + 1.0) * (space.L - 1) / 2.0
            idx = np.rint(real).astype(int)
            if np.any(np.abs(coords(space, idx) - x) > SNAP_TOL):
                warnings.append(f"{path}:{lineno}: off-grid coordinates {x.tolist()} snapped")
        idx = np.asarray(idx)
        if np.any(idx < 0) or np.any(idx >= space.L):
            raise MalformedInput(f"{path}:{lineno}: point {x.tolist()} outside [-1, 1]^{d}")
        out.append(idx)
    for w in warnings:
        log.warning(w)
    return np.array(out, dtype=np.int64).reshape(-1, d), warnings


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_rows(path) -> Tuple[List[str], List[List[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise MalformedInput(f"{path}: empty file")
    return [h.strip() for h in rows[0]], rows[1:]


def read_trace_csv(path) -> np.ndarray:
    """Trace rows ``(elapsed, best_value, restart_flag)`` as a float array."""
    header, rows = read_rows(path)
    want = ["elapsed", "best_value", "restart"]
    if header[:3] != want:
        raise MalformedInput(f"{path}: trace header must be {','.join(want)}")
    try:
        return np.array([[float(v) for v in r[:3]] for r in rows]).reshape(-1, 3)
    except ValueError:
        raise MalformedInput(f"{path}: non-numeric trace row") from None


def read_coordinates(path) -> np.ndarray:
    """Real coordinate columns ``x1..xd`` of any design CSV, without a grid."""
    header, rows = read_rows(path)
    xcols = [i for i, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    if not xcols:
        raise MalformedInput(f"{path}: no x1..xd columns")
    try:
        return np.array([[float(r[i]) for i in xcols] for r in rows]).reshape(-1, len(xcols))
    except (ValueError, IndexError):
        raise MalformedInput(f"{path}: cannot parse coordinates") from None


def stem(path) -> str:
    return Path(path).stem
