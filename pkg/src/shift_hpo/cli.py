"""Command-line entry point: ``shift-hpo {toy,run,density-ratio,verify-table1}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import harness
from .config import RunConfig
from .datasets import LabeledDataset, load_csv
from .density_ratio import UlsifConfig, fit_ulsif
from .errors import ShiftHpoError

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    name = os.environ.get("SHIFT_HPO_LOG", "error").strip().lower()
    if name not in LOG_LEVELS:
        raise SystemExit(f"SHIFT_HPO_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    logging.basicConfig(level=LOG_LEVELS[name], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _seeds(text: str) -> list[int]:
    """``0-29`` or ``0,3,7`` or a mix of both."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("no seeds given")
    return out


def _write(doc: dict, out: str | None, csv_text: str | None = None) -> None:
    text = harness.dumps(doc)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    if csv_text is not None:
        path.with_suffix(".csv").write_text(csv_text)


def cmd_toy(args) -> int:
    settings = {
        "c_values": args.c_values, "k": args.k, "n": args.n, "seeds": args.seeds,
        "estimators": args.estimators, "budget": args.budget, "n_init": args.n_init, "beta": args.beta,
    }
    results = harness.run_toy_sweep(args.c_values, args.k, args.n, args.seeds, args.estimators,
                                    args.budget, args.n_init, args.beta)
    _write(harness.sweep_report(results, settings), args.out, harness.flat_csv(results))
    return 0


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config)
    report = harness.run_mscs(cfg)
    _write(report.to_dict(), args.out, harness.flat_csv(report.results))
    return 0


def cmd_density_ratio(args) -> int:
    target = load_csv(args.target, args.label_column if args.target_has_label else None)
    source = load_csv(args.source, args.label_column)
    if isinstance(target, LabeledDataset):
        target = target.unlabeled()
    cfg = UlsifConfig(num_centers=args.num_centers, cap=args.cap, seed=args.seed)
    model = fit_ulsif(target, source.features, cfg)
    doc = model.to_dict()
    doc["clipped_fraction_source"] = model.clipped_fraction(source.features)
    doc["mean_ratio_source"] = float(model.evaluate(source.features).mean())
    _write(doc, args.out)
    return 0


def cmd_verify_table1(args) -> int:
    report = harness.verify_table1(args.tol)
    print(report.render())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shift-hpo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    toy = sub.add_parser("toy", help="run the synthetic shift sweep")
    toy.add_argument("--c-values", type=_floats, default=[1.0, 2.0, 3.0, 4.0, 5.0],
                     help="comma-separated source prior half-widths")
    toy.add_argument("--k", type=int, default=2, help="number of source tasks")
    toy.add_argument("--n", type=int, default=1000, help="rows per task")
    toy.add_argument("--seeds", type=_seeds, default=list(range(30)), help="e.g. 0-29 or 1,4,9")
    toy.add_argument("--estimators", type=lambda s: [x.strip() for x in s.split(",")],
                     default=[k.value for k in harness.ALL_ESTIMATORS])
    toy.add_argument("--budget", type=int, default=50)
    toy.add_argument("--n-init", type=int, default=5)
    toy.add_argument("--beta", type=float, default=2.0)
    toy.add_argument("--out", help="JSON report path; a .csv with the same stem is written next to it")
    toy.set_defaults(func=cmd_toy)

    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    dr = sub.add_parser("density-ratio", help="fit and dump a target/source density ratio model")
    dr.add_argument("--target", required=True, help="CSV of target features")
    dr.add_argument("--source", required=True, help="CSV of source rows")
    dr.add_argument("--label-column", help="label column to drop from the source file")
    dr.add_argument("--target-has-label", action="store_true",
                    help="the target file also carries --label-column; it is dropped")
    dr.add_argument("--num-centers", type=int, default=100)
    dr.add_argument("--cap", type=float, default=50.0)
    dr.add_argument("--seed", type=int, default=0)
    dr.add_argument("--out")
    dr.set_defaults(func=cmd_density_ratio)

    vt = sub.add_parser("verify-table1", help="check the two-source worked example")
    vt.add_argument("--tol", type=float, default=1e-2)
    vt.set_defaults(func=cmd_verify_table1)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging()
    try:
        return args.func(args)
    except ShiftHpoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
