"""CSV writers with a pinned, byte-reproducible format."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

SNAPSHOT_HEADER = ("population", "k", "x", "value")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def particle_rows(ensemble):
    """(population, k, x, w) rows; k counts from 1 within each population."""
    for i in range(2):
        for k, (x, w) in enumerate(zip(ensemble.positions[i], ensemble.weights[i]), start=1):
            yield (i + 1, k, x, w)


def fem_rows(state):
    for i, u in enumerate((state.u1, state.u2)):
        for k, (x, v) in enumerate(zip(state.nodes, u), start=1):
            yield (i + 1, k, x, v)


def write_particles(path, ensemble):
    _write(path, SNAPSHOT_HEADER, particle_rows(ensemble))


def write_fem(path, state):
    _write(path, SNAPSHOT_HEADER, fem_rows(state))


def write_report(path, rows, columns):
    _write(path, columns, ([row[c] for c in columns] for row in rows))


def read_snapshot(path):
    """Inverse of the snapshot writers: returns {population: (k, x, value) arrays}."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    out = {}
    for pop in (1, 2):
        sel = data[data[:, 0] == pop] if data.size else np.zeros((0, 4))
        out[pop] = (sel[:, 1].astype(int), sel[:, 2], sel[:, 3])
    return out
