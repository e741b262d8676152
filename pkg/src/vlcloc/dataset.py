"""Fingerprint campaigns over the receiver grid, CSV persistence, subsampling."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .channel import ChannelParams, rss_matrix
from .geometry import Anchor, normals_array, receiver_grid_array, sample_orientation
from .scenario import Scenario

log = logging.getLogger(__name__)

__all__ = [
    "FingerprintDataset",
    "DatasetFormatError",
    "EmptyDatasetError",
    "row_rng",
    "generate_run",
    "generate_campaign",
    "save_csv",
    "load_csv",
    "subsample",
    "concat",
]

META_COLUMNS = ("run_id", "rx_index", "x", "y", "z", "tilt", "azimuth")


class DatasetFormatError(ValueError):
    pass


class EmptyDatasetError(DatasetFormatError):
    pass


@dataclass
class FingerprintDataset:
    """RSS fingerprints (dBm) with their true planar positions.

    ``features`` is ``(rows, n_anchors)``, ``targets`` is ``(rows, 2)``; the
    remaining per-row arrays carry run/receiver identity and orientation.
    """

    features: np.ndarray
    targets: np.ndarray
    run_id: np.ndarray
    rx_index: np.ndarray
    z: np.ndarray
    tilt: np.ndarray
    azimuth: np.ndarray
    anchors: List[Anchor] = field(default_factory=list)
    channel: Optional[ChannelParams] = None
    scenario: Optional[dict] = None
    scenario_hash: str = ""

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        n = len(self.features)
        if self.features.ndim != 2 or self.targets.shape != (n, 2):
            raise ValueError(f"features {self.features.shape} and targets {self.targets.shape} disagree")
        for name in ("run_id", "rx_index"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.int64))
        for name in ("z", "tilt", "azimuth"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        for name in ("run_id", "rx_index", "z", "tilt", "azimuth"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have one entry per row")
        if not (np.isfinite(self.features).all() and np.isfinite(self.targets).all()):
            raise ValueError("dataset contains non-finite entries")
        if self.anchors and len(self.anchors) != self.features.shape[1]:
            raise ValueError("anchor manifest does not match feature columns")

    def __len__(self) -> int:
        return len(self.features)

    @property
    def n_anchors(self) -> int:
        return self.features.shape[1]

    def take(self, idx) -> "FingerprintDataset":
        idx = np.asarray(idx)
        return FingerprintDataset(
            self.features[idx], self.targets[idx], self.run_id[idx], self.rx_index[idx],
            self.z[idx], self.tilt[idx], self.azimuth[idx],
            anchors=self.anchors, channel=self.channel, scenario=self.scenario,
            scenario_hash=self.scenario_hash,
        )

    def manifest(self) -> dict:
        return {
            "anchors": [a.to_dict() for a in self.anchors],
            "channel": self.channel.to_dict() if self.channel is not None else None,
            "scenario": self.scenario,
            "scenario_hash": self.scenario_hash,
            "n_rows": len(self),
        }

    def equals(self, other: "FingerprintDataset", atol: float = 0.0) -> bool:
        arrays = ("features", "targets", "run_id", "rx_index", "z", "tilt", "azimuth")
        return all(
            getattr(self, a).shape == getattr(other, a).shape
            and np.allclose(getattr(self, a), getattr(other, a), rtol=0, atol=atol)
            for a in arrays
        )


def row_rng(base_seed: int, run_id: int, rx_index: int) -> np.random.Generator:
    """Independent stream for one campaign row, keyed by its identity."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, run_id, rx_index]))


def generate_run(scenario: Scenario, run_id: int) -> FingerprintDataset:
    """One fingerprint per grid receiver, in grid order, with fresh orientations."""
    if not 0 <= run_id < scenario.n_runs:
        raise ValueError(f"run_id {run_id} outside [0, {scenario.n_runs})")
    anchors = scenario.anchors()
    positions = receiver_grid_array(scenario.room, scenario.grid_spacing, scenario.rx_height)
    n = len(positions)
    tilt = np.empty(n)
    azimuth = np.empty(n)
    eps = np.empty((n, len(anchors)))
    for r in range(n):
        rng = row_rng(scenario.base_seed, run_id, r)
        o = sample_orientation(rng, scenario.orientation_mode, scenario.max_angle, scenario.fixed_tilt)
        tilt[r], azimuth[r] = o.tilt, o.azimuth
        eps[r] = rng.standard_normal(len(anchors))
    features = rss_matrix(positions, normals_array(tilt, azimuth), anchors, scenario.channel, eps)
    return FingerprintDataset(
        features, positions[:, :2].copy(), np.full(n, run_id), np.arange(n), positions[:, 2].copy(),
        tilt, azimuth, anchors=anchors, channel=scenario.channel, scenario=scenario.to_dict(),
        scenario_hash=scenario.digest(),
    )


def concat(parts: Sequence[FingerprintDataset]) -> FingerprintDataset:
    if not parts:
        raise EmptyDatasetError("nothing to concatenate")
    first = parts[0]
    return FingerprintDataset(
        np.vstack([p.features for p in parts]), np.vstack([p.targets for p in parts]),
        *(np.concatenate([getattr(p, a) for p in parts]) for a in ("run_id", "rx_index", "z", "tilt", "azimuth")),
        anchors=first.anchors, channel=first.channel, scenario=first.scenario,
        scenario_hash=first.scenario_hash,
    )


def generate_campaign(scenario: Scenario, n_jobs: int = 1) -> FingerprintDataset:
    """All runs of ``scenario`` stacked in run order.

    Rows are seeded by identity, so the output does not depend on ``n_jobs``.
    """
    runs = range(scenario.n_runs)
    if n_jobs > 1 and scenario.n_runs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda r: generate_run(scenario, r), runs))
    else:
        parts = [generate_run(scenario, r) for r in runs]
    return concat(parts)


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".manifest.json")


def save_csv(ds: FingerprintDataset, path) -> Path:
    """Write ``ds`` as CSV (12 significant digits) plus a sibling manifest JSON."""
    path = Path(path)
    header = list(META_COLUMNS) + [f"rss_{i}" for i in range(ds.n_anchors)]
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(ds)):
            vals = [str(int(ds.run_id[i])), str(int(ds.rx_index[i]))]
            vals += [f"{v:.12g}" for v in (ds.targets[i, 0], ds.targets[i, 1], ds.z[i], ds.tilt[i], ds.azimuth[i])]
            vals += [f"{v:.12g}" for v in ds.features[i]]
            fh.write(",".join(vals) + "\n")
    manifest_path(path).write_text(json.dumps(ds.manifest(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_csv(path) -> FingerprintDataset:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise EmptyDatasetError(f"{path}: empty dataset file")
        header = [h.strip() for h in header]
        for col in META_COLUMNS:
            if col not in header:
                raise DatasetFormatError(f"{path}: missing column {col!r}")
        rss_cols = [h for h in header if h.startswith("rss_")]
        expected = [f"rss_{i}" for i in range(len(rss_cols))]
        if not rss_cols:
            raise DatasetFormatError(f"{path}: missing column 'rss_0'")
        if rss_cols != expected:
            missing = sorted(set(expected) - set(rss_cols))
            raise DatasetFormatError(f"{path}: missing column {missing[0] if missing else rss_cols!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            rows.append(row)
    if not rows:
        raise EmptyDatasetError(f"{path}: dataset has a header but no rows")
    data = np.array(rows, dtype=float)
    col = {h: i for i, h in enumerate(header)}

    anchors, channel, scenario, digest = [], None, None, ""
    mpath = manifest_path(path)
    if mpath.exists():
        m = json.loads(mpath.read_text(encoding="utf-8"))
        anchors = [Anchor.from_dict(a) for a in m.get("anchors", [])]
        channel = ChannelParams.from_dict(m["channel"]) if m.get("channel") else None
        scenario, digest = m.get("scenario"), m.get("scenario_hash", "")
    else:
        log.warning("no manifest next to %s; anchor positions unknown", path)

    return FingerprintDataset(
        data[:, [col[c] for c in expected]],
        data[:, [col["x"], col["y"]]],
        data[:, col["run_id"]].astype(np.int64), data[:, col["rx_index"]].astype(np.int64),
        data[:, col["z"]], data[:, col["tilt"]], data[:, col["azimuth"]],
        anchors=anchors, channel=channel, scenario=scenario, scenario_hash=digest,
    )


def subsample(ds: FingerprintDataset, max_rows: int, seed: int = 0) -> FingerprintDataset:
    """Uniform row subset without replacement, kept in original row order."""
    if max_rows < 1:
        raise ValueError(f"max_rows must be >= 1, got {max_rows}")
    if max_rows >= len(ds):
        return ds
    idx = np.sort(np.random.default_rng(seed).choice(len(ds), size=max_rows, replace=False))
    return ds.take(idx)
