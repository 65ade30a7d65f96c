"""CSV tables and plain-text field dumps.

Field dump format: a sequence of blocks, each introduced by a header line

    # torusns-field d=<d> N=<N> kind=<kind>

followed by one value per line in row-major order of the block's array.
``kind`` is ``cell``, ``staggered-<i>`` (faces of direction ``i``) or
``tensor`` (a ``(d, d, N, ..., N)`` array).  Values use 17 significant
digits, so every binary64 number round-trips exactly.
"""

from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .mesh import Mesh
from .state import FluidState

_HEADER = re.compile(r"#\s*torusns-field\s+d=(\d+)\s+N=(\d+)\s+kind=(\S+)\s*$")


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def parse_value(s: str):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format_value(v) for v in r])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[parse_value(v) for v in r] for r in rows[1:]]


def _block_shape(m: Mesh, kind: str):
    if kind == "cell" or kind.startswith("staggered-"):
        return m.shape
    if kind == "tensor":
        return (m.dim, m.dim) + m.shape
    raise ValueError(f"unknown field kind {kind!r}")


def dump_fields(path, m: Mesh, blocks) -> Path:
    """Write ``[(kind, array), ...]`` blocks."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for kind, arr in blocks:
            arr = np.asarray(arr, dtype=float)
            if arr.shape != _block_shape(m, kind):
                raise ValueError(f"block {kind!r} has shape {arr.shape}")
            fh.write(f"# torusns-field d={m.dim} N={m.n} kind={kind}\n")
            fh.writelines(format(float(v), ".17g") + "\n" for v in arr.ravel())
    return path


def load_fields(path):
    """Inverse of `dump_fields`; returns ``(mesh, [(kind, array), ...])``."""
    blocks = []
    m = None
    kind, vals = None, []

    def flush():
        if kind is not None:
            blocks.append((kind, np.array(vals, dtype=float).reshape(_block_shape(m, kind))))

    for line in Path(path).read_text().splitlines():
        hdr = _HEADER.match(line)
        if hdr:
            flush()
            d, n, kind = int(hdr.group(1)), int(hdr.group(2)), hdr.group(3)
            if m is None:
                m = Mesh(d, n)
            elif (m.dim, m.n) != (d, n):
                raise ValueError("blocks on different meshes")
            vals = []
        elif line.strip() and not line.startswith("#"):
            vals.append(float(line))
    flush()
    return m, blocks


def dump_state(path, state: FluidState) -> Path:
    """Checkpoint: density as ``cell``; velocity as ``staggered-i`` (MAC) or ``cell`` blocks (FV)."""
    m = state.mesh
    blocks = [("cell", state.rho)]
    for i in range(m.dim):
        blocks.append((f"staggered-{i}" if state.staggered else "cell", state.vel[i]))
    path = dump_fields(path, m, blocks)
    with Path(path).open("a") as fh:
        fh.write(f"# time {format(float(state.t), '.17g')}\n")
    return path


def load_state(path) -> FluidState:
    m, blocks = load_fields(path)
    t = 0.0
    for line in Path(path).read_text().splitlines():
        if line.startswith("# time "):
            t = float(line.split()[2])
    if len(blocks) != m.dim + 1:
        raise ValueError("checkpoint must hold density and every velocity component")
    staggered = blocks[1][0].startswith("staggered-")
    vel = np.stack([b[1] for b in blocks[1:]])
    return FluidState(m, blocks[0][1], vel, t, staggered)
