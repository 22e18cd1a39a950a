"""Plain-text file formats for eigenvalue lists, potentials and reports.

Eigenvalue files hold lambda (never its square root).  The CSV flavour is::

    # problem=dd
    # potential=exp
    k,lambda
    1,4.8966693799676910

Lines starting with ``#`` carry ``key=value`` metadata.  A file ending in
``.json`` uses the same fields as a JSON object instead.  Numbers are written
with 17 significant digits and keys in a fixed order, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .forward import BoundaryCondition, Spectrum

PI = math.pi
PROBLEMS = {"dd": "DD", "dn": "DN", "robin": "Robin"}


def fmt(v) -> str:
    """17 significant digits, '.' decimal separator."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="")


@dataclass
class EigenvalueFile:
    problem: str
    eigenvalues: np.ndarray
    start: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.problem = str(self.problem).lower()
        if self.problem not in PROBLEMS:
            raise InputError(f"problem must be one of {sorted(PROBLEMS)}, got {self.problem!r}")
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size < 1:
            raise InputError("an eigenvalue file needs at least one value")
        if not np.all(np.isfinite(ev)):
            raise InputError("eigenvalues must be finite")
        if np.any(np.diff(ev) <= 0):
            raise InputError("eigenvalues must be strictly increasing")
        self.eigenvalues = ev
        if self.start is None:
            self.start = 1 if self.problem == "dd" else 0
        if self.problem == "robin":
            for key in ("h", "H"):
                if key in self.metadata:
                    self.metadata[key] = float(self.metadata[key])

    @property
    def bc(self) -> BoundaryCondition:
        if self.problem == "dd":
            return BoundaryCondition.dd()
        if self.problem == "dn":
            return BoundaryCondition.dn()
        # completion never needs h, H; they are kept only for oracle runs
        return BoundaryCondition.robin(self.metadata.get("h", 0.0), self.metadata.get("H", 0.0))

    def spectrum(self) -> Spectrum:
        return Spectrum(self.bc, self.eigenvalues, self.start)

    @classmethod
    def from_spectrum(cls, spec: Spectrum, **metadata):
        problem = {v: k for k, v in PROBLEMS.items()}[spec.bc.kind]
        meta = dict(metadata)
        if spec.bc.kind == "Robin":
            meta.setdefault("h", spec.bc.h)
            meta.setdefault("H", spec.bc.H)
        return cls(problem, np.array(spec.eigenvalues), spec.start, meta)

    def to_text(self, json_format: bool = False) -> str:
        idx = np.arange(self.start, self.start + self.eigenvalues.size)
        meta = {k: self.metadata[k] for k in sorted(self.metadata)}
        if json_format:
            obj = {"problem": self.problem, "start": int(self.start), "metadata": meta,
                   "eigenvalues": [float(fmt(v)) for v in self.eigenvalues]}
            return json.dumps(obj, indent=2, sort_keys=True) + "\n"
        lines = [f"# problem={self.problem}"]
        for k, v in meta.items():
            lines.append(f"# {k}={fmt(v) if isinstance(v, float) else v}")
        lines.append("k,lambda")
        lines += [f"{int(k)},{fmt(v)}" for k, v in zip(idx, self.eigenvalues)]
        return "\n".join(lines) + "\n"

    def write(self, path):
        _write_text(path, self.to_text(str(path).lower().endswith(".json")))

    @classmethod
    def read(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        if path.suffix.lower() == ".json":
            return cls._from_json(text, path)
        return cls._from_csv(text, path)

    @classmethod
    def _from_json(cls, text, path):
        try:
            obj = json.loads(text)
            return cls(obj["problem"], obj["eigenvalues"], obj.get("start"),
                       dict(obj.get("metadata", {})))
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: malformed eigenvalue file ({exc})") from None

    @classmethod
    def _from_csv(cls, text, path):
        meta = {}
        body = []
        for line in text.splitlines():
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                key, sep, val = s[1:].partition("=")
                if sep:
                    meta[key.strip()] = val.strip()
                continue
            body.append(s)
        problem = meta.pop("problem", None)
        if problem is None:
            raise InputError(f"{path}: missing '# problem=...' line")
        if not body or body[0].replace(" ", "").lower() != "k,lambda":
            raise InputError(f"{path}: expected header 'k,lambda'")
        try:
            rows = [(int(r[0]), float(r[1])) for r in csv.reader(body[1:])]
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}: bad data row ({exc})") from None
        if not rows:
            raise InputError(f"{path}: no eigenvalues")
        ks = np.array([r[0] for r in rows])
        if np.any(np.diff(ks) != 1):
            raise InputError(f"{path}: indices must be consecutive")
        for key in ("h", "H", "tolerance"):
            if key in meta:
                try:
                    meta[key] = float(meta[key])
                except ValueError:
                    raise InputError(f"{path}: bad value for {key}") from None
        return cls(problem, [r[1] for r in rows], int(ks[0]), meta)


@dataclass
class PotentialFile:
    x: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.q.shape or self.x.size < 2:
            raise InputError("potential file needs two matching columns with >= 2 rows")
        if np.any(np.diff(self.x) <= 0):
            raise InputError("x must be strictly increasing")
        if self.x[0] < -1e-12 or self.x[-1] > PI + 1e-12:
            raise InputError("x must lie within [0, pi]")

    def to_text(self) -> str:
        rows = [f"{fmt(a)},{fmt(b)}" for a, b in zip(self.x, self.q)]
        return "x,q\n" + "\n".join(rows) + "\n"

    def write(self, path):
        _write_text(path, self.to_text())

    @classmethod
    def read(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        lines = [s.strip() for s in text.splitlines() if s.strip() and not s.startswith("#")]
        if not lines or lines[0].replace(" ", "").lower() != "x,q":
            raise InputError(f"{path}: expected header 'x,q'")
        try:
            data = np.array([[float(v) for v in r] for r in csv.reader(lines[1:])])
        except ValueError as exc:
            raise InputError(f"{path}: bad data row ({exc})") from None
        if data.ndim != 2 or data.shape[1] != 2:
            raise InputError(f"{path}: expected two columns")
        return cls(data[:, 0], data[:, 1])


def table_text(header, columns) -> str:
    """CSV text with the given header and equal-length columns (ints, strings or floats)."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(str(v) if isinstance(v, (int, np.integer, str)) else fmt(v)
                           for v in row) + "\n")
    return buf.getvalue()


def write_table(path, header, columns):
    _write_text(path, table_text(header, columns))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else fmt(v)
    return obj


def write_json(path, obj):
    _write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
