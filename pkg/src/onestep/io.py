"""CSV / JSON formats for distributions and tables, plus atomic file writes.

Grid densities serialize as ``z,value`` rows at the cell midpoints or as
``{"lower", "upper", "values"}``; discrete distributions as ``atom,mass``
rows or ``{"atoms", "masses"}``.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path as FsPath

import numpy as np

from .dist import DiscreteDist, Distribution, GridDensity
from .errors import ConfigError, ShapeError


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_atomic(path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the permissions a plain open() would
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def table_to_csv(header, rows) -> str:
    """Header row plus data rows, RFC 4180 quoting, floats written round-trippably."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_csv_table(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ShapeError("empty CSV")
    return rows[0], rows[1:]


def read_csv_columns(path) -> dict:
    """Read a CSV file into ``{column: array}``, numeric columns as float."""
    header, rows = read_csv_table(FsPath(path).read_text())
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def distribution_to_csv(P: Distribution) -> str:
    if isinstance(P, GridDensity):
        return table_to_csv(["z", "value"], zip(P.support, P.values))
    return table_to_csv(["atom", "mass"], zip(P.atoms.tolist(), P.masses))


def distribution_from_csv(text: str) -> Distribution:
    header, rows = read_csv_table(text)
    header = [h.strip() for h in header]
    if header == ["z", "value"]:
        z = np.array([float(r[0]) for r in rows])
        v = np.array([float(r[1]) for r in rows])
        if z.size < 2:
            raise ShapeError("a grid density needs at least 2 rows")
        dz = (z[-1] - z[0]) / (z.size - 1)
        if not np.allclose(np.diff(z), dz, rtol=1e-9, atol=0):
            raise ShapeError("z column is not a uniform midpoint grid")
        # bounds are snapped so a written-then-read grid compares equal to the original
        lower = float(f"{z[0] - dz / 2:.12g}")
        upper = float(f"{z[-1] + dz / 2:.12g}")
        return GridDensity(v, lower, upper)
    if header == ["atom", "mass"]:
        atoms = [r[0] for r in rows]
        try:
            atoms = [float(a) if "." in a or "e" in a.lower() else int(a) for a in atoms]
        except ValueError:
            pass
        return DiscreteDist([float(r[1]) for r in rows], atoms)
    raise ShapeError(f"unrecognised distribution CSV header {header}")


def distribution_to_json(P: Distribution) -> str:
    if isinstance(P, GridDensity):
        obj = {"lower": P.lower, "upper": P.upper, "values": P.values.tolist()}
    else:
        obj = {"atoms": P.atoms.tolist(), "masses": P.masses.tolist()}
    return json.dumps(obj)


def distribution_from_json(text: str) -> Distribution:
    obj = json.loads(text)
    if {"lower", "upper", "values"} <= obj.keys():
        return GridDensity(obj["values"], obj["lower"], obj["upper"])
    if {"atoms", "masses"} <= obj.keys():
        return DiscreteDist(obj["masses"], obj["atoms"])
    raise ShapeError(f"unrecognised distribution JSON keys {sorted(obj)}")


def load_distribution(path) -> Distribution:
    path = FsPath(path)
    if not path.exists():
        raise ConfigError(f"distribution file {path} does not exist")
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return distribution_from_json(text)
    return distribution_from_csv(text)
