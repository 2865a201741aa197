"""``tabsel`` command line: summarize | run | rank.

Exit codes: 0 success, 2 config validation, 3 data error, 4 runtime/fit error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, ingest
from .errors import (
    CellError,
    ConfigError,
    DataError,
    EmptyDatasetError,
    EncodeError,
    LabelError,
    ParseError,
    SchemaError,
    StratificationError,
    TabselError,
)
from .evaluation import CSV_HEADER, best_per_column
from .experiment import load_config, load_table, run_experiment
from .rank import rank_attributes
from .seeding import derive_seed

log = logging.getLogger("tabsel")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4
DATA_ERRORS = (ParseError, SchemaError, EncodeError, EmptyDatasetError, LabelError, DataError,
               StratificationError, UnicodeDecodeError, OSError)


def safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "column"


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def environment_notes() -> dict:
    import numba
    import scipy

    return {
        "tabsel": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "platform": platform.platform(),
    }


def cmd_summarize(cfg) -> list[Path]:
    table, _ = load_table(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in table.names:
        path = out / f"summary_{safe_name(name)}.csv"
        ingest.write_counts_csv(path, ingest.summarize(table, name))
        written.append(path)
    log.info("wrote %d summaries for %d rows to %s", len(written), table.n_rows, out)
    return written


def cmd_rank(cfg) -> Path:
    table, schema = load_table(cfg)
    ranking = rank_attributes(table, n_bins=int(cfg.rank.get("bins", 10)))
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ranking.csv"
    ranking.to_csv(path)
    if ranking.discretized:
        log.info("numeric attributes binned into %s equal-frequency bins: %s",
                 cfg.rank.get("bins", 10), ", ".join(ranking.discretized))
    for name, gain in ranking.entries:
        print(f"{gain:.6f}\t{name}")
    return path


def cmd_run(cfg, jobs: int = 1) -> Path:
    result = run_experiment(cfg, jobs=jobs)
    cfg = result.config
    grid = result.grid
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(row.csv_row() for row in grid.rows)

    for label, transform in grid.transforms.items():
        write_json(out / f"selection_{safe_name(label)}.json", transform.to_json())
    for row in grid.rows:
        write_json(out / f"model_{safe_name(row.selection)}__{safe_name(row.classifier)}.json",
                   row.model.to_json())

    sidecar = {
        "config": cfg.to_json(),
        "seeds": {
            "master": cfg.seed,
            "split": cfg.split["seed"],
            "selection": {label: derive_seed(cfg.seed, "selection", label) for label in grid.transforms},
            "model": {f"{r.selection}/{r.classifier}": derive_seed(cfg.seed, "model", r.selection, r.classifier)
                      for r in grid.rows},
            "derivation": "blake2b-64 of 'master:component:...' masked to 63 bits",
        },
        "metric_notes": {
            "precision_recall_averaging": "weighted by class support",
            "roc_auc": "one-vs-rest, macro-averaged; classes lacking positives or negatives skipped",
            "train_time": "classifier fit wall-clock only, selection excluded",
        },
        "n_train": result.n_train,
        "n_test": result.n_test,
        "encoding": result.encoding.to_json(),
        "rows": [{"selection": r.selection, "classifier": r.classifier, **r.report.to_json()}
                 for r in grid.rows],
        "best_per_column": best_per_column(grid.rows),
        "environment": environment_notes(),
    }
    if cfg.repeats > 1:
        summary = result.repeat_summary()
        sidecar["repeats"] = summary
        with open(out / "results_repeats.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(summary[0]))
            w.writeheader()
            w.writerows(summary)
    write_json(out / "results.json", sidecar)
    log.info("wrote %d grid rows to %s", len(grid.rows), out)
    return out / "results.csv"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabsel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("summarize", "write per-attribute value counts"),
                        ("run", "run the selection x classifier grid"),
                        ("rank", "rank attributes by information gain")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment config JSON (or a results.json sidecar)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--jobs", type=int, default=1, help="grid cells evaluated concurrently")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, seed=args.seed, output_dir=args.out)
    except (ConfigError, SchemaError) as exc:
        print(f"tabsel: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "summarize":
            cmd_summarize(cfg)
        elif args.command == "rank":
            cmd_rank(cfg)
        else:
            cmd_run(cfg, jobs=max(1, args.jobs))
    except CellError as exc:
        code = EXIT_DATA if isinstance(exc.cause, DATA_ERRORS) else EXIT_RUNTIME
        print(f"tabsel: {exc}", file=sys.stderr)
        return code
    except DATA_ERRORS as exc:
        print(f"tabsel: data error in {cfg.dataset}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TabselError as exc:
        print(f"tabsel: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
