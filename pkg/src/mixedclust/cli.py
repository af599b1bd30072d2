"""Command-line front end: ``mixedclust {cluster,synth,eval,bench}``.

Exit status is 0 on success, 1 on usage, I/O or validation problems and 2
when an internal invariant is breached.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .bench import (TABLES, VARIANCES, SynthConfig, classification_rate, gen_mixed,
                    information_gain, report_csv, run_setting)
from .cluster import ClusterResult, run_clustering
from .config import ClusterConfig
from .dataset import DataError, SchemaError, read_dataset, read_schema, serialize

log = logging.getLogger("mixedclust")

SEED_ENV = "MIXEDCLUST_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _read_labels(path: Path, column: str) -> dict[int, int]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "row_id" not in reader.fieldnames or column not in reader.fieldnames:
        raise UsageError(f"{path}: expected columns row_id,{column}")
    out = {}
    for rec in reader:
        try:
            rid, lab = int(rec["row_id"]), int(rec[column])
        except (TypeError, ValueError):
            raise UsageError(f"{path}: non-integer entry {rec}") from None
        if rid in out:
            raise UsageError(f"{path}: duplicate row_id {rid}")
        out[rid] = lab
    return out


# ---------------------------------------------------------------- cluster

def _load_config_file(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    # a run manifest nests the effective settings under "config"
    return dict(doc["config"]) if isinstance(doc.get("config"), dict) else doc


def build_config(args) -> tuple[ClusterConfig, int]:
    base = _load_config_file(Path(args.config)) if args.config else {}
    seed = args.seed if args.seed is not None else None
    if seed is None and not {"null.seed", "calib.seed"} & set(base):
        seed = _default_seed()
    overrides = dict(
        bins=args.bins, alpha=args.alpha, calib_B=args.calib_B, null_mode=args.null_mode,
        null_size=args.null_size, jump_factor=args.jump_factor, membership=args.membership,
        min_cluster_size=args.min_cluster_size, threads=args.threads,
        threshold_fixed=args.threshold,
    )
    if seed is not None:
        overrides.update(null_seed=seed, calib_seed=seed)
    if args.continuous_minus_one:
        overrides["continuous_minus_one"] = True
    try:
        cfg = ClusterConfig.from_dict(base, **overrides)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None
    return cfg, cfg.null_seed


def write_diagnostics(result: ClusterResult, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for rec in result.iterations:
        tag = f"iter{rec.iteration:03d}"
        _write(out / f"{tag}_hd.csv", _csv_text(
            ["j", "U_j", "eps_j"],
            [[j, int(u), _num(e)] for j, (u, e) in enumerate(zip(rec.U, rec.eps))]))
        _write(out / f"{tag}_ed.csv", _csv_text(
            ["bin", "lower", "upper", "V_j", "nu_j"],
            [[j + 1, _num(rec.edges[j]), _num(rec.edges[j + 1]), int(v), _num(nu)]
             for j, (v, nu) in enumerate(zip(rec.V, rec.nu))]))
        k = len(rec.sorted_ed)
        _write(out / f"{tag}_cdf.csv", _csv_text(
            ["rank", "distance", "cdf"],
            [[i + 1, _num(d), _num((i + 1) / k)] for i, d in enumerate(rec.sorted_ed)]))
        summary.append([
            rec.iteration, rec.n_remaining, rec.center_row, _num(rec.score), _num(rec.threshold),
            int(rec.significant), rec.stat.r_c, rec.stat.r_d,
            "" if rec.R_c is None else rec.R_c, "" if rec.R_d is None else _num(rec.R_d),
            _num(rec.stat.chi_c), _num(rec.stat.chi_d), _num(rec.stat.chi_w), rec.n_members,
        ])
    _write(out / "iterations.csv", _csv_text(
        ["iteration", "n_remaining", "center_row", "chi_w_max", "threshold", "significant",
         "r_c", "r_d", "R_c", "R_d", "chi_c", "chi_d", "chi_w", "n_members"], summary))


def check_partition(result: ClusterResult):
    seen = np.concatenate([c.members for c in result.clusters] + [result.unassigned])
    if seen.size != result.n or not np.array_equal(np.sort(seen), np.arange(result.n)):
        raise AssertionError("clusters and unassigned rows do not partition the input")


def cmd_cluster(args) -> int:
    schema_path, input_path = Path(args.schema), Path(args.input)
    if not schema_path.is_file():
        raise UsageError(f"schema file not found: {schema_path}")
    if not input_path.is_file():
        raise UsageError(f"input file not found: {input_path}")
    try:
        schema = read_schema(schema_path)
    except SchemaError as exc:
        raise UsageError(f"{schema_path}: {exc}") from None
    try:
        ds = read_dataset(input_path, schema)
    except DataError as exc:
        raise UsageError(f"{input_path}: {exc}") from None
    cfg, seed = build_config(args)

    result = run_clustering(ds, cfg)
    check_partition(result)
    labels = result.labels()
    out = Path(args.out)
    _write(out, _csv_text(["row_id", "cluster_label"], [[i, int(k)] for i, k in enumerate(labels)]))
    manifest = {
        "tool": "mixedclust",
        "version": __version__,
        "command": "cluster",
        "input": str(input_path),
        "schema": str(schema_path),
        "out": str(out),
        "seed": seed,
        "config": cfg.to_dict(),
        "n": ds.n,
        "clusters_found": len(result.clusters),
        "unassigned": int(result.unassigned.size),
    }
    manifest_path = Path(args.manifest) if args.manifest else out.with_name(out.stem + ".manifest.json")
    _write(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if args.diagnostics:
        write_diagnostics(result, Path(args.diagnostics))
    print(f"{len(result.clusters)} cluster(s), {result.unassigned.size} unassigned row(s) -> {out}")
    return 0


# ---------------------------------------------------------------- synth

def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {text!r}") from None
    return sizes


def cmd_synth(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.table1:
        sizes = TABLES[1]
    elif args.sizes:
        sizes = _parse_sizes(args.sizes)
    else:
        raise UsageError("synth needs --table1 or --sizes")
    if args.k is not None and args.k != len(sizes):
        raise UsageError(f"--k {args.k} disagrees with {len(sizes)} size(s)")
    sigma2 = args.sigma2 if args.sigma2 is not None else 0.25
    try:
        cfg = SynthConfig(p=args.p, q=args.q, sizes=sizes, sigma2=sigma2,
                          center_gap=args.center_gap, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ld = gen_mixed(cfg)
    out = Path(args.out_dir)
    _write(out / "data.csv", serialize(ld.data))
    _write(out / "truth.csv", _csv_text(["row_id", "true_label"], [[i, int(t)] for i, t in enumerate(ld.truth)]))
    _write(out / "schema.json", ld.data.schema.to_json())
    print(f"wrote {ld.data.n} rows in {cfg.K} cluster(s) to {out}")
    return 0


# ---------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    pred = _read_labels(Path(args.labels), "cluster_label")
    truth = _read_labels(Path(args.truth), "true_label")
    if set(pred) != set(truth):
        raise UsageError(f"row_id sets differ between {args.labels} and {args.truth}")
    ids = sorted(truth)
    t = np.array([truth[i] for i in ids])
    p = np.array([pred[i] for i in ids])
    try:
        cr, ig = classification_rate(t, p), information_gain(t, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = _csv_text(["metric", "value"], [["CR", f"{cr:.6f}"], ["IG", f"{ig:.6f}"]])
    print(f"CR={cr:.6f} IG={ig:.6f}")
    if args.out:
        _write(Path(args.out), text)
    return 0


# ---------------------------------------------------------------- bench

def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    tables = [int(t) for t in args.tables.split(",")] if args.tables else sorted(TABLES)
    variances = [float(v) for v in args.variances.split(",")] if args.variances else list(VARIANCES)
    for t in tables:
        if t not in TABLES:
            raise UsageError(f"unknown table {t}; choose from {sorted(TABLES)}")
    try:
        cfg = ClusterConfig(calib_B=args.calib_B, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for t in tables:
        for v in variances:
            log.info("table %d, sigma2=%g: %d replicate(s)", t, v, args.replicates)
            rows.extend(run_setting(t, v, args.replicates, replace(cfg), seed=seed,
                                    per_portion=args.per_portion))
    report = report_csv(rows)
    _write(Path(args.out), report)
    print(report, end="")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedclust", description="Chi-square based clustering of mixed-type data.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log each iteration")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="cluster a CSV dataset")
    c.add_argument("--input", required=True)
    c.add_argument("--schema", required=True)
    c.add_argument("--out", required=True, help="labels CSV (row_id, cluster_label)")
    c.add_argument("--seed", type=int, help=f"null and calibration seed (default: ${SEED_ENV} or 0)")
    c.add_argument("--config", help="JSON of dotted config keys, or a previous run manifest")
    c.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    c.add_argument("--diagnostics", metavar="DIR", help="write per-iteration curve CSVs here")
    c.add_argument("--bins", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--calib-B", dest="calib_B", type=int)
    c.add_argument("--threshold", type=float, help="fixed critical value (skips calibration)")
    c.add_argument("--null-mode", choices=("uniform-box", "permute"))
    c.add_argument("--null-size", type=int)
    c.add_argument("--jump-factor", type=float)
    c.add_argument("--membership", choices=("and", "or"))
    c.add_argument("--min-cluster-size", type=int)
    c.add_argument("--continuous-minus-one", action="store_true")
    c.add_argument("--threads", type=int)
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("synth", help="generate a labelled synthetic dataset")
    s.add_argument("--table1", action="store_true", help="sizes 100/75/25")
    s.add_argument("--k", type=int)
    s.add_argument("--sizes", help="comma-separated cluster sizes")
    s.add_argument("--sigma2", type=float)
    s.add_argument("--p", type=int, default=10)
    s.add_argument("--q", type=int, default=10)
    s.add_argument("--center-gap", type=float, default=3.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="score labels against truth")
    e.add_argument("--labels", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="sweep the synthetic table settings")
    b.add_argument("--replicates", type=int, default=50)
    b.add_argument("--tables", help="subset, e.g. 1,2")
    b.add_argument("--variances", help="subset, e.g. 0.25,0.5")
    b.add_argument("--calib-B", dest="calib_B", type=int, default=199)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--per-portion", action="store_true", help="also score categorical-only and continuous-only runs")
    b.add_argument("--seed", type=int)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    log.debug("backend %s", BACKEND)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mixedclust: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"mixedclust: error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"mixedclust: invariant breach: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
