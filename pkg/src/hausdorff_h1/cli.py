"""Command-line entry point: one subcommand per experiment.

Every subcommand reads an optional ``key = value`` config file and applies the
command-line overrides on top. The exit status is 0 iff no record is flagged.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from pathlib import Path

from . import experiments as ex
from .extremal import ExtremalParams, f_epsilon
from .h1norms import SELECTORS, NormReport, norm
from .hausdorff import apply
from .kernels import moment, parse_kernel

log = logging.getLogger("hausdorff_h1")

COMMANDS = ("norms", "apply", "ratio", "upper", "lower", "equiv")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hausdorff-h1", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "norms": "norm report of every battery function",
        "apply": "samples of H_phi f_eps for the first epsilon",
        "ratio": "norm ratio and residual of H_phi on f_eps for each epsilon",
        "upper": "upper-bound suite over the battery",
        "lower": "truncated and dilated lower-bound sweep",
        "equiv": "bounds under every norm, plus commutation and duality",
    }
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--config", type=Path, help="key = value config file")
        s.add_argument("--kernel", type=parse_kernel, help="kernel literal, e.g. 'indicator(0.25, 1)'")
        s.add_argument("--epsilon", help="comma-separated, descending")
        s.add_argument("--grid-n", type=int, dest="grid_points")
        s.add_argument("--grid-l", type=float, dest="grid_half_width")
        s.add_argument("--norm", choices=SELECTORS)
        s.add_argument("--out", dest="output_path", help="CSV output path (default from config)")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args: argparse.Namespace) -> ex.ExperimentConfig:
    overrides = {
        "kernel": args.kernel,
        "epsilons": tuple(float(t) for t in args.epsilon.split(",")) if args.epsilon else None,
        "grid_points": args.grid_points,
        "grid_half_width": args.grid_half_width,
        "norm": args.norm,
        "output_path": args.output_path,
    }
    if args.config is not None:
        return ex.ExperimentConfig.from_file(args.config, **overrides)
    return ex.ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def _norms(cfg: ex.ExperimentConfig) -> bool:
    rows = ex.report_rows(ex.battery(cfg.grid, cfg.seed), cfg.maximal)
    with open(cfg.output_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("label",) + NormReport.columns())
        for label, rep in rows:
            w.writerow([label] + rep.csv_row().split(","))
    return False


def _apply(cfg: ex.ExperimentConfig) -> bool:
    f = f_epsilon(ExtremalParams(cfg.epsilons[0]), cfg.grid)
    hf = apply(cfg.kernel, f)
    with open(cfg.output_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "re", "im"))
        for x, v in zip(hf.x, hf.values):
            w.writerow((f"{x:.12g}", f"{v.real:.12g}", f"{v.imag:.12g}"))
    return False


def _ratio(cfg: ex.ExperimentConfig) -> bool:
    mu = moment(cfg.kernel)
    mcfg = cfg.maximal
    records = []
    for eps in cfg.epsilons:
        t0 = time.perf_counter()
        f = f_epsilon(ExtremalParams(eps), cfg.grid)
        hf = apply(cfg.kernel, f)
        nf = norm(f, cfg.norm, None, mcfg)
        ratio = norm(hf, cfg.norm, None, mcfg) / nf
        residual = norm(hf - mu * f, cfg.norm, None, mcfg) / nf
        ms = int(round(1000 * (time.perf_counter() - t0)))
        records.append(
            ex.ConvergenceRecord(eps, math.nan, 1.0, mu, ratio, residual, ms, f"f_eps_{eps:g}", ratio > mu * (1 + ex.BUDGET))
        )
    ex.emit(records, cfg.output_path, cfg)
    return any(r.flagged for r in records)


def _upper(cfg: ex.ExperimentConfig) -> bool:
    records = ex.run_upper_bound_suite(cfg)
    ex.emit(records, cfg.output_path, cfg)
    return any(r.flagged for r in records)


def _lower(cfg: ex.ExperimentConfig) -> bool:
    records = ex.run_lower_bound_sweep(cfg)
    ex.emit(records, cfg.output_path, cfg)
    return any(r.flagged for r in records)


def _equiv(cfg: ex.ExperimentConfig) -> bool:
    report = ex.run_equivalence_suite(cfg)
    ex.emit(report.records(), cfg.output_path, cfg, extra=report.to_dict())
    return report.flagged


_RUN = {"norms": _norms, "apply": _apply, "ratio": _ratio, "upper": _upper, "lower": _lower, "equiv": _equiv}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("running %s, writing %s", args.command, cfg.output_path)
    flagged = _RUN[args.command](cfg)
    if flagged:
        print(f"{args.command}: flagged records, see {cfg.output_path}", file=sys.stderr)
    return 1 if flagged else 0


if __name__ == "__main__":
    sys.exit(main())
