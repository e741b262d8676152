"""Command-line entry point: ``vlcloc {generate,fit,evaluate,reproduce-table2,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Sequence

from .dataset import DatasetFormatError, generate_campaign, load_csv, save_csv
from .estimators.localizer import KINDS, EstimatorSpec, fit
from .estimators.serialize import load_model, save_model
from .evaluation import DEFAULT_THRESHOLDS, EvalReport, comparison_annex, ped_array, render_report
from .scenario import SCHEMA_VERSION, Scenario, load_scenario, preset
from .table2 import DEFAULT_TEST_SEED, DEFAULT_TRAIN_SEED, REPORTED_TABLE, SCALES, reproduce_table2

log = logging.getLogger("vlcloc")

ENV_OUT = "VLCLOC_OUT"
ENV_THREADS = "VLCLOC_THREADS"


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _thresholds(text: Optional[str], cfg: Optional[dict] = None) -> List[float]:
    if not text and cfg and cfg.get("thresholds"):
        text = ",".join(str(v) for v in cfg["thresholds"])
    if not text:
        return list(DEFAULT_THRESHOLDS)
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad --thresholds {text!r}", 2) from None
    if not vals or any(b <= a for a, b in zip(vals, vals[1:])) or vals[0] <= 0:
        raise CliError(f"--thresholds must be positive and strictly increasing, got {text!r}", 2)
    return vals


def _out_dir(args) -> Path:
    out = Path(os.environ.get(ENV_OUT) or args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", 2) from None
    return out


def _threads(args) -> int:
    n = args.threads if args.threads is not None else int(os.environ.get(ENV_THREADS, "1"))
    if n < 1:
        raise CliError("--threads must be >= 1", 2)
    return n


def _load_run_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.is_file():
        raise CliError(f"run config not found: {p}", 2)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid run config {p}: {exc}", 2) from None


def _scenario(args, cfg: dict) -> Scenario:
    path = args.scenario or cfg.get("scenario")
    if path:
        p = Path(path)
        if not p.is_file():
            raise CliError(f"scenario file not found: {p}", 2)
        try:
            sc = load_scenario(p)
        except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
            raise CliError(f"invalid scenario {p}: {exc}", 2) from None
    else:
        sc = preset(args.preset)
    try:
        return sc.with_overrides(n_runs=args.runs, grid_spacing=args.grid_spacing)
    except ValueError as exc:
        raise CliError(str(exc), 2) from None


def _load_dataset(path):
    p = Path(path)
    if not p.is_file():
        raise CliError(f"dataset not found: {p}", 2)
    try:
        return load_csv(p)
    except DatasetFormatError as exc:
        raise CliError(str(exc), 2) from None


def cmd_generate(args) -> int:
    cfg = _load_run_config(args.config)
    sc = _scenario(args, cfg)
    out = _out_dir(args)
    train_seed = args.seed if args.seed is not None else cfg.get("train_seed", DEFAULT_TRAIN_SEED)
    test_seed = args.test_seed if args.test_seed is not None else cfg.get("test_seed", DEFAULT_TEST_SEED)
    if train_seed == test_seed:
        raise CliError("train and test seeds must differ", 2)
    threads = _threads(args)
    print(f"scenario {sc.name}: {sc.n_runs} runs x {sc.grid_size} receivers, {len(sc.anchors())} anchors "
          f"(schema v{SCHEMA_VERSION})")
    for split, seed in (("train", train_seed), ("test", test_seed)):
        ds = generate_campaign(sc.with_overrides(base_seed=seed), n_jobs=threads)
        path = save_csv(ds, out / f"{split}.csv")
        print(f"{split}: {len(ds)} rows x {ds.n_anchors} features -> {path}")
    (out / "scenario.json").write_text(sc.to_json() + "\n", encoding="utf-8")
    return 0


def _specs(args, cfg: dict, snap: Optional[float]) -> List[EstimatorSpec]:
    raw = []
    if args.estimator:
        raw = [{"kind": k} for k in args.estimator]
    elif cfg.get("estimators"):
        raw = cfg["estimators"]
    else:
        raw = [{"kind": k} for k in ("knn", "mlp", "svr")]
    specs = []
    for d in raw:
        d = dict(d)
        if snap and d.get("snap") is None:
            d["snap"] = snap
        try:
            specs.append(EstimatorSpec.from_dict(d))
        except (TypeError, ValueError) as exc:
            raise CliError(f"invalid estimator spec {d}: {exc}", 2) from None
    return specs


def _grid_spacing(ds) -> Optional[float]:
    if ds.scenario:
        return float(ds.scenario.get("receivers", {}).get("spacing", 0.1))
    return None


def cmd_fit(args) -> int:
    cfg = _load_run_config(args.config)
    out = _out_dir(args)
    train = _load_dataset(args.train or out / "train.csv")
    snap = _grid_spacing(train) if (args.snap_grid or cfg.get("snap_grid")) else None
    seed = args.seed if args.seed is not None else cfg.get("fit_seed", 0)
    models_dir = out / "models"
    status = 0
    for spec in _specs(args, cfg, snap):
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                model = fit(spec, train, seed=seed)
            for w in caught:
                log.warning("%s: %s", spec.label, w.message)
        except Exception as exc:  # noqa: BLE001 - reported, exit code set
            log.error("%s fit failed: %s", spec.label, exc)
            status = 1
            continue
        paths = save_model(model, models_dir, f"model_{spec.kind}")
        print(f"{spec.label}: trained on {model.n_train_rows} rows -> {', '.join(p.name for p in paths)}")
        for axis, d in model.diagnostics.items():
            print(f"  {axis}: " + ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in d.items()))
    return status


def _model_groups(models_dir: Path, kinds: Optional[Sequence[str]]) -> dict:
    groups = {}
    for kind in KINDS:
        if kinds and kind not in kinds:
            continue
        paths = sorted(models_dir.glob(f"model_{kind}_*.json"))
        if paths:
            groups[kind] = paths
    return groups


def _method_label(spec: EstimatorSpec, test) -> str:
    if spec.kind.startswith("classic"):
        return spec.label
    room = (test.scenario or {}).get("name", "scenario")
    return f"{room} with {spec.label}"


def cmd_evaluate(args) -> int:
    out = _out_dir(args)
    test = _load_dataset(args.test or out / "test.csv")
    models_dir = Path(args.models) if args.models else out / "models"
    groups = _model_groups(models_dir, args.estimator)
    if not groups:
        raise CliError(f"no model files found in {models_dir}", 2)
    report = EvalReport(thresholds=_thresholds(args.thresholds, _load_run_config(args.config)),
                        scenario_hash=test.scenario_hash)
    for kind, paths in groups.items():
        model = load_model(paths)
        if model.estimator.n_features_in_ != test.n_anchors:
            raise CliError(f"{kind} model expects {model.estimator.n_features_in_} features, "
                           f"test set has {test.n_anchors}", 1)
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            pred = model.predict(test.features)
        report.add(_method_label(model.spec, test), ped_array(pred, test.targets))
    _write_report(report, out, "report")
    print(render_report(report, "markdown"), end="")
    return 0


def _write_report(report: EvalReport, out: Path, stem: str) -> None:
    (out / f"{stem}.csv").write_text(render_report(report, "csv"), encoding="utf-8")
    (out / f"{stem}.md").write_text(render_report(report, "markdown"), encoding="utf-8")


def cmd_reproduce_table2(args) -> int:
    cfg = _load_run_config(args.config)
    out = _out_dir(args)
    train_seed = args.seed if args.seed is not None else cfg.get("train_seed", DEFAULT_TRAIN_SEED)
    test_seed = args.test_seed if args.test_seed is not None else cfg.get("test_seed", DEFAULT_TEST_SEED)
    if args.scenario:
        raise CliError("reproduce-table2 uses the built-in rooms; --scenario is not supported here", 2)
    res = reproduce_table2(scale=args.scale, train_seed=train_seed, test_seed=test_seed,
                           thresholds=_thresholds(args.thresholds, cfg), n_jobs=_threads(args),
                           n_runs=args.runs, grid_spacing=args.grid_spacing)
    report = res.report
    _write_report(report, out, "table2")
    annex = comparison_annex(report, REPORTED_TABLE)
    (out / "table2_annex.md").write_text(annex, encoding="utf-8")
    (out / "table2_diagnostics.json").write_text(
        json.dumps({"scenario_hash": report.scenario_hash, "failed": report.failed, "methods": res.diagnostics},
                   indent=2, sort_keys=True, default=float) + "\n", encoding="utf-8")
    print(render_report(report, "markdown"), end="")
    for label, seconds in res.timings.items():
        log.info("%-20s %.1fs", label, seconds)
    return 1 if report.failed else 0


def _parse_param(text: str):
    if "=" not in text:
        raise CliError(f"--param must look like name=v1,v2,..., got {text!r}", 2)
    name, values = text.split("=", 1)
    parsed = []
    for v in values.split(","):
        try:
            parsed.append(json.loads(v))
        except json.JSONDecodeError:
            parsed.append(v)
    return name.strip(), parsed


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    train = _load_dataset(args.train or out / "train.csv")
    test = _load_dataset(args.test or out / "test.csv")
    kind = (args.estimator or ["knn"])[0]
    report = EvalReport(thresholds=_thresholds(args.thresholds), scenario_hash=test.scenario_hash)
    grid = [_parse_param(p) for p in (args.param or [])]
    combos = [{}]
    for name, values in grid:
        combos = [{**c, name: v} for c in combos for v in values]
    seed = args.seed if args.seed is not None else 0
    for params in combos:
        spec = EstimatorSpec(kind=kind, params=params)
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            model = fit(spec, train, seed=seed)
            pred = model.predict(test.features)
        label = spec.label + "".join(f" {k}={v}" for k, v in params.items())
        report.add(label, ped_array(pred, test.targets))
    _write_report(report, out, "sweep")
    print(render_report(report, "markdown"), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vlcloc", description="RSS fingerprint localization simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        sp.add_argument("--config", help="run configuration JSON")
        sp.add_argument("--out", default="out", help=f"output directory (env {ENV_OUT} overrides)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int, help=f"parallelism degree (env {ENV_THREADS})")
        if scenario:
            sp.add_argument("--scenario", help="scenario JSON file")
            sp.add_argument("--runs", type=int)
            sp.add_argument("--grid-spacing", type=float)

    g = sub.add_parser("generate", help="generate train/test fingerprint CSVs")
    common(g)
    g.add_argument("--preset", default="vlc81", choices=["vlc81", "vlc4", "wifi"])
    g.add_argument("--test-seed", type=int)
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", help="fit estimators on a training CSV")
    common(f, scenario=False)
    f.add_argument("--train")
    f.add_argument("--estimator", action="append", choices=KINDS)
    f.add_argument("--snap-grid", action="store_true", help="snap predictions to the receiver grid")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("evaluate", help="evaluate fitted models on a test CSV")
    common(e, scenario=False)
    e.add_argument("--test")
    e.add_argument("--models")
    e.add_argument("--estimator", action="append", choices=KINDS)
    e.add_argument("--thresholds", help="comma-separated PED thresholds in metres")
    e.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("reproduce-table2", help="run all eleven methods and emit the accuracy table")
    common(r)
    r.add_argument("--scale", choices=sorted(SCALES), default="desk")
    r.add_argument("--test-seed", type=int)
    r.add_argument("--thresholds")
    r.set_defaults(func=cmd_reproduce_table2)

    s = sub.add_parser("sweep", help="accuracy over a hyperparameter grid")
    common(s, scenario=False)
    s.add_argument("--train")
    s.add_argument("--test")
    s.add_argument("--estimator", action="append", choices=KINDS)
    s.add_argument("--param", action="append", help="name=v1,v2,... (repeatable)")
    s.add_argument("--thresholds")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
