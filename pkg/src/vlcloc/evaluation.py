"""Prediction error distances, accuracy rates and Table-2 style reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

__all__ = [
    "DEFAULT_THRESHOLDS",
    "TABLE2_ORDER",
    "ErrorSample",
    "EvalReport",
    "ped",
    "ped_array",
    "accuracy_rate",
    "accuracy_curve",
    "render_report",
    "parse_markdown",
    "parse_csv",
]

DEFAULT_THRESHOLDS = (0.1, 0.3, 0.5, 0.7, 0.9)

TABLE2_ORDER = (
    "VLC-81 with SVM",
    "VLC-4 with SVM",
    "WiFi with SVM",
    "VLC-81 with NN",
    "VLC-4 with NN",
    "WiFi with NN",
    "VLC-81 with KNN",
    "VLC-4 with KNN",
    "WiFi with KNN",
    "Classic VLC",
    "Classic WiFi",
)


@dataclass(frozen=True)
class ErrorSample:
    predicted: tuple
    truth: tuple

    @property
    def error(self) -> float:
        return ped(self.predicted, self.truth)


def ped(predicted, truth) -> float:
    """Euclidean distance between a predicted and a true planar position."""
    (px, py), (tx, ty) = predicted, truth
    values = (px, py, tx, ty)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("positions must be finite")
    return math.hypot(px - tx, py - ty)


def ped_array(predicted: np.ndarray, truth: np.ndarray) -> np.ndarray:
    predicted = np.asarray(predicted, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if predicted.shape != truth.shape:
        raise ValueError(f"shape mismatch {predicted.shape} vs {truth.shape}")
    return np.hypot(predicted[..., 0] - truth[..., 0], predicted[..., 1] - truth[..., 1])


def accuracy_rate(errors: Sequence[float], threshold: float) -> float:
    """Fraction of errors strictly below ``threshold``."""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValueError("error list is empty")
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    return float(np.count_nonzero(errors < threshold)) / errors.size


def _check_thresholds(thresholds: Sequence[float]) -> List[float]:
    t = [float(v) for v in thresholds]
    if not t:
        raise ValueError("no thresholds given")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ValueError(f"thresholds must be strictly increasing, got {t}")
    return t


def accuracy_curve(errors: Sequence[float], thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> List[float]:
    t = _check_thresholds(thresholds)
    return [accuracy_rate(errors, v) for v in t]


@dataclass
class EvalReport:
    """Accuracy per (method, threshold).

    ``failed`` lists methods that could not be evaluated; they render as
    marked rows with no numbers.
    """

    thresholds: List[float] = field(default_factory=lambda: list(DEFAULT_THRESHOLDS))
    rows: Dict[str, List[float]] = field(default_factory=dict)
    n_samples: Dict[str, int] = field(default_factory=dict)
    scenario_hash: str = ""
    failed: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.thresholds = _check_thresholds(self.thresholds)

    def add(self, method: str, errors: Sequence[float]) -> List[float]:
        row = accuracy_curve(errors, self.thresholds)
        self.rows[method] = row
        self.n_samples[method] = int(np.size(errors))
        return row

    def mark_failed(self, method: str, reason: str) -> None:
        self.failed[method] = reason

    def methods(self) -> List[str]:
        present = set(self.rows) | set(self.failed)
        ordered = [m for m in TABLE2_ORDER if m in present]
        return ordered + sorted(present - set(TABLE2_ORDER))

    def validate(self) -> None:
        for m, row in self.rows.items():
            if len(row) != len(self.thresholds):
                raise ValueError(f"{m}: {len(row)} entries for {len(self.thresholds)} thresholds")
            if any(not 0 <= a <= 1 for a in row):
                raise ValueError(f"{m}: accuracy outside [0, 1]")
            if any(b < a for a, b in zip(row, row[1:])):
                raise ValueError(f"{m}: accuracies decrease with threshold")


def _col(t: float) -> str:
    return f"ped_{t:g}"


def render_report(report: EvalReport, fmt: str = "csv") -> str:
    """Render as ``csv`` or ``markdown``; accuracies with three decimals."""
    report.validate()
    methods = report.methods()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", *(_col(t) for t in report.thresholds), "n_samples"])
        for m in methods:
            if m in report.rows:
                w.writerow([m, *(f"{a:.3f}" for a in report.rows[m]), report.n_samples.get(m, 0)])
            else:
                w.writerow([m, *("FAILED" for _ in report.thresholds), 0])
        return buf.getvalue()
    if fmt == "markdown":
        head = ["Methods \\ PEDs", *(f"{t:g} m" for t in report.thresholds)]
        lines = ["| " + " | ".join(head) + " |", "|" + "|".join(["---"] + [":---:"] * len(report.thresholds)) + "|"]
        for m in methods:
            cells = [f"{a:.3f}" for a in report.rows[m]] if m in report.rows else ["FAILED"] * len(report.thresholds)
            lines.append("| " + " | ".join([m, *cells]) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def parse_markdown(text: str) -> EvalReport:
    """Inverse of ``render_report(..., "markdown")`` (numbers at three decimals)."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip().startswith("|")]
    if len(lines) < 2:
        raise ValueError("no markdown table found")
    head = [c.strip() for c in lines[0].strip("|").split("|")]
    thresholds = [float(c.split()[0]) for c in head[1:]]
    rep = EvalReport(thresholds=thresholds)
    for ln in lines[2:]:
        cells = [c.strip() for c in ln.strip("|").split("|")]
        if cells[1] == "FAILED":
            rep.mark_failed(cells[0], "")
        else:
            rep.rows[cells[0]] = [float(c) for c in cells[1:]]
    return rep


def parse_csv(text: str) -> EvalReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "method":
        raise ValueError("not a report CSV")
    thresholds = [float(c[len("ped_"):]) for c in rows[0][1:-1]]
    rep = EvalReport(thresholds=thresholds)
    for r in rows[1:]:
        if r[1] == "FAILED":
            rep.mark_failed(r[0], "")
        else:
            rep.rows[r[0]] = [float(c) for c in r[1:-1]]
            rep.n_samples[r[0]] = int(r[-1])
    return rep


def comparison_annex(report: EvalReport, reference: Optional[Dict[str, List[float]]] = None) -> str:
    """VLC-4 vs WiFi ordering per algorithm, side by side with reference values."""
    lines = ["| Algorithm | threshold | VLC-4 | WiFi | ordering | reference ordering |",
             "|---|---:|---:|---:|---|---|"]
    for alg in ("SVM", "NN", "KNN"):
        a, b = f"VLC-4 with {alg}", f"WiFi with {alg}"
        for i, t in enumerate(report.thresholds):
            va = report.rows.get(a, [math.nan] * len(report.thresholds))[i]
            vb = report.rows.get(b, [math.nan] * len(report.thresholds))[i]
            ref = ""
            if reference and a in reference and b in reference and t in DEFAULT_THRESHOLDS:
                j = DEFAULT_THRESHOLDS.index(t)
                ref = _order(reference[a][j], reference[b][j])
            lines.append(f"| {alg} | {t:g} | {va:.3f} | {vb:.3f} | {_order(va, vb)} | {ref} |")
    return "\n".join(lines) + "\n"


def _order(a: float, b: float) -> str:
    if math.isnan(a) or math.isnan(b):
        return "n/a"
    if a > b:
        return "VLC-4 > WiFi"
    if a < b:
        return "VLC-4 < WiFi"
    return "tie"
