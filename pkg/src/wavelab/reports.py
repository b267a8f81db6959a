"""Verification reports and sampled curves, with CSV/JSON writers.

Both writers are deterministic: keys are sorted, floats are printed with
17 significant digits, and nothing time-dependent is recorded.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

REPORT_KEYS = ("check", "tolerance", "max_residual", "worst_points", "truncation", "pass")


def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return v
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def dumps(payload: Any) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass
class VerificationReport:
    """Outcome of one numerical check.

    ``passed`` is ``max_residual < tolerance`` unless ``exact`` is set, in
    which case it is ``max_residual == 0``.  Lower-bound checks store
    ``bound - value`` as the residual with tolerance 0.
    """

    check: str
    tolerance: float
    max_residual: float
    worst_points: list = field(default_factory=list)
    truncation: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    exact: bool = False

    @property
    def passed(self) -> bool:
        if math.isnan(self.max_residual):
            return False
        if self.exact:
            return self.max_residual == 0
        return self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "worst_points": self.worst_points,
            "truncation": self.truncation,
            "pass": self.passed,
            "grid": self.grid,
            "details": self.details,
            "exact": self.exact,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.check}: max_residual={self.max_residual:.3e} tol={self.tolerance:.1e}"


def worst_points(x, residual, k: int = 5) -> list:
    """The k points with the largest residual, as ``[x, residual]`` pairs."""
    x = np.asarray(x, dtype=float).ravel()
    residual = np.asarray(residual, dtype=float).ravel()
    if residual.size == 0:
        return []
    order = np.argsort(-residual, kind="stable")[:k]
    return [[float(x[i]), float(residual[i])] for i in order]


def from_residuals(check: str, x, residual, tolerance: float, **kwargs) -> VerificationReport:
    residual = np.abs(np.asarray(residual))
    worst = float(np.max(residual)) if residual.size else 0.0
    return VerificationReport(check, tolerance, worst, worst_points(x, residual), **kwargs)


@dataclass
class SampledFunction:
    """A curve sampled on a strictly increasing uniform grid."""

    grid: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same shape")
        if self.grid.size > 1:
            steps = np.diff(self.grid)
            if np.any(steps <= 0):
                raise ValueError("grid must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
                raise ValueError("grid must be uniform")

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.is_complex:
            writer.writerow(["x", "re", "im"])
            for x, v in zip(self.grid, self.values):
                writer.writerow([fmt_float(x), fmt_float(v.real), fmt_float(v.imag)])
        else:
            writer.writerow(["x", "value"])
            for x, v in zip(self.grid, self.values):
                writer.writerow([fmt_float(x), fmt_float(v)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        payload = {"metadata": self.metadata, "x": [fmt_float(v) for v in self.grid]}
        if self.is_complex:
            payload["re"] = [fmt_float(v) for v in self.values.real]
            payload["im"] = [fmt_float(v) for v in self.values.imag]
        else:
            payload["value"] = [fmt_float(v) for v in self.values]
        return payload

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write(self, path: Path, fmt: str = "csv") -> Path:
        path = Path(path)
        text = self.to_csv() if fmt == "csv" else self.to_json()
        path.write_text(text, encoding="utf-8")
        return path

    @classmethod
    def read_csv(cls, path: Path) -> "SampledFunction":
        with open(path, encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        header, body = rows[0], rows[1:]
        data = np.array([[float(v) for v in row] for row in body])
        if header == ["x", "re", "im"]:
            return cls(data[:, 0], data[:, 1] + 1j * data[:, 2])
        return cls(data[:, 0], data[:, 1])
