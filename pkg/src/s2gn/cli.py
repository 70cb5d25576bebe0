"""Command-line front end: ``s2gn {transform,featurize,classify,bench}``.

Exit codes: 0 success, 1 pipeline error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .classify import EvalConfig, ForestConfig, evaluate, rimp
from .dataset_io import (
    Dataset,
    DatasetError,
    export_edge_lists,
    import_edge_lists,
    load_tu_dataset,
    read_features_csv,
    write_features_csv,
    write_report_json,
    write_text_atomic,
)
from .features import ATTRIBUTE_NAMES
from .pipeline import (
    FeaturizeConfig,
    bench_construction,
    default_threads,
    featurize_graphs,
    reduce_to_original_dim,
)
from .sampling import STRATEGY_TAGS, SamplingStrategy
from .seeding import derive_rng
from .sgn import s2gn

DATA_ENV = "S2GN_DATA_DIR"
log = logging.getLogger("s2gn")


class UsageError(Exception):
    pass


def _csv_choice(values, allowed, cast=str):
    out = []
    for v in values or []:
        for part in str(v).split(","):
            part = part.strip().lower()
            if not part:
                continue
            item = cast(part)
            if item not in allowed:
                raise UsageError(f"invalid choice {part!r}; expected one of {list(allowed)}")
            if item not in out:
                out.append(item)
    return out


def resolve_dataset(name: str, data_dir: str | None) -> Dataset:
    """A dataset is either a TU directory (``<dir>/<NAME>_A.txt`` ...) or an
    edge-list export directory with ``index.json``."""
    path = Path(name)
    if not path.is_dir():
        base = Path(data_dir or os.environ.get(DATA_ENV, "data"))
        path = base / name
    if not path.is_dir():
        raise UsageError(f"dataset directory not found: {path}")
    if (path / "index.json").is_file():
        graphs, labels, prov = import_edge_lists(path)
        labels = [-1 if lab is None else lab for lab in labels]
        return Dataset(prov.get("dataset", path.name), graphs, labels)
    stem = path.name
    if not (path / f"{stem}_A.txt").is_file():
        found = sorted(path.glob("*_A.txt"))
        if len(found) != 1:
            raise UsageError(f"no TU dataset files found in {path}")
        stem = found[0].name[: -len("_A.txt")]
    return load_tu_dataset(path, stem)


def _check_pq(args) -> None:
    if args.p <= 0 or args.q <= 0:
        raise UsageError("--p and --q must be positive")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_transform(args) -> int:
    strategies = _csv_choice(args.strategy, STRATEGY_TAGS) or list(STRATEGY_TAGS)
    orders = sorted(_csv_choice(args.order, (1, 2), int) or [1, 2])
    _check_pq(args)
    ds = resolve_dataset(args.dataset, args.data_dir)
    out = _out_dir(args)
    start = time.perf_counter()
    for tag in strategies:
        strategy = SamplingStrategy.from_tag(tag, args.p, args.q)
        per_order = {h: [] for h in orders}
        for i, g in enumerate(ds.graphs):
            res = s2gn(g, strategy, orders[-1], derive_rng(args.seed, "transform", tag, i))
            chain = (g,) + res.stage_graphs
            for h in orders:
                per_order[h].append(chain[min(h, res.achieved_order)])
        for h in orders:
            export_edge_lists(
                per_order[h], out / f"{tag}{h}", ds.class_labels,
                provenance={"dataset": ds.name, "strategy": str(strategy), "order": h,
                            "seed": args.seed},
            )
    print(f"{ds.name}: transformed {len(ds)} graphs in {time.perf_counter() - start:.3f} s")
    return 0


def cmd_featurize(args) -> int:
    strategies = _csv_choice(args.strategies, STRATEGY_TAGS)
    if args.strategies is None:
        strategies = list(STRATEGY_TAGS)
    orders = sorted(_csv_choice(args.orders, (1, 2), int) or [1, 2])
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    _check_pq(args)
    ds = resolve_dataset(args.dataset, args.data_dir)
    cfg = FeaturizeConfig(tuple(strategies), tuple(orders), args.repeats, args.p, args.q, args.seed)
    out = _out_dir(args)
    start = time.perf_counter()
    table = featurize_graphs(ds.graphs, cfg, args.threads)
    write_features_csv(table.original, ds.class_labels, list(ATTRIBUTE_NAMES),
                       out / "features_original.csv")
    if args.no_pca:
        fused, cols = table.fused, table.fused_columns
    else:
        fused = reduce_to_original_dim(table.fused, args.pca_dim)
        cols = [f"pc{i + 1}" for i in range(fused.shape[1])]
    write_features_csv(fused, ds.class_labels, cols, out / "features_fused.csv")
    n_degraded = sum(table.degraded)
    print(f"{ds.name}: {len(ds)} graphs, fused blocks {cfg.blocks()} -> {len(cols)} columns "
          f"in {time.perf_counter() - start:.1f} s"
          + (f" ({n_degraded} graphs never reached a requested order)" if n_degraded else ""))
    return 0


def cmd_classify(args) -> int:
    try:
        eval_cfg = EvalConfig(args.test_fraction, args.repetitions, not args.unstratified,
                              args.f1_averaging, args.seed)
        forest_cfg = ForestConfig(n_trees=args.trees, max_depth=args.max_depth, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _out_dir(args)
    runs = []
    if args.original:
        runs.append(("original", args.original))
    runs.append((args.pipeline, args.features))
    results = {}
    for pipeline, path in runs:
        if not Path(path).is_file():
            raise UsageError(f"features file not found: {path}")
        x, y, _ = read_features_csv(path)
        report = evaluate(x, y, eval_cfg, forest_cfg, args.pca_dim_per_fold)
        results[pipeline] = report
        print(f"{pipeline}: F1 = {100 * report.mean_f1:.2f} +- {100 * report.std_f1:.2f} % "
              f"({eval_cfg.repetitions} repetitions, {report.wall_time:.1f} s)")
    base = results.get("original")
    for pipeline, report in results.items():
        r = None
        if base is not None and pipeline != "original":
            r = rimp(report.mean_f1, base.mean_f1)
            print(f"RIMP {pipeline} vs original: {100 * r:.2f} %")
        write_report_json(report.to_json(args.dataset_name, pipeline, r),
                          out / f"report_{pipeline}.json")
    return 0


def cmd_bench(args) -> int:
    strategies = _csv_choice(args.strategies, STRATEGY_TAGS) or list(STRATEGY_TAGS)
    _check_pq(args)
    ds = resolve_dataset(args.dataset, args.data_dir)
    out = _out_dir(args)
    res = bench_construction(ds.graphs, ds.name, strategies, args.p, args.q, args.seed)
    write_report_json(res.to_json(), out / "bench.json")
    md = res.to_markdown()
    write_text_atomic(out / "bench.md", md + "\n")
    print(md)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="s2gn", description="S2GN construction, featurisation and classification")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, dataset=True):
        if dataset:
            p.add_argument("--dataset", required=True,
                           help="dataset name under --data-dir, or a dataset directory")
            p.add_argument("--data-dir", default=None,
                           help=f"root of TU datasets (default ${DATA_ENV} or ./data)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        p.add_argument("--threads", type=int, default=default_threads())
        p.add_argument("--p", type=float, default=4.0, help="biased walk return parameter")
        p.add_argument("--q", type=float, default=1.0, help="biased walk in-out parameter")

    p = sub.add_parser("transform", help="export S2GN edge lists per strategy and order")
    common(p)
    p.add_argument("--strategy", action="append", help="rw, bw, ls, st (repeatable or comma list)")
    p.add_argument("--order", action="append", help="1 and/or 2")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("featurize", help="original and fused attribute CSVs")
    common(p)
    p.add_argument("--strategies", action="append")
    p.add_argument("--orders", action="append")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--no-pca", action="store_true", help="write the raw fused columns")
    p.add_argument("--pca-dim", type=int, default=len(ATTRIBUTE_NAMES))
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("classify", help="repeated-holdout Random Forest evaluation")
    common(p, dataset=False)
    p.add_argument("--features", required=True, help="features CSV to evaluate")
    p.add_argument("--original", help="baseline features CSV; enables RIMP")
    p.add_argument("--pipeline", default="fusion", help="name recorded for --features")
    p.add_argument("--dataset-name", default="")
    p.add_argument("--repetitions", type=int, default=100)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--unstratified", action="store_true")
    p.add_argument("--f1-averaging", choices=("auto", "binary", "macro"), default="auto")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--pca-dim-per-fold", type=int, default=None,
                   help="fit PCA to this dimension on each training split")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench", help="time order-2 SGN vs S2GN construction")
    common(p)
    p.add_argument("--strategies", action="append")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DatasetError, FileNotFoundError) as exc:
        print(f"s2gn: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("pipeline failure", exc_info=True)
        print(f"s2gn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
