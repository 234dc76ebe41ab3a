"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical or model
inconsistency (including failed oracle checks), 4 failed acceptance check.
Verbosity comes from ``POLENT_VERBOSITY`` (quiet, info or debug).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from ..errors import ConfigError, PolentError
from .config import SWEEP_AXES, load_config
from .results import ResultTable, write_plot_data, write_table
from .scenarios import run_oracles, run_scenario, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_ACCEPTANCE = 0, 2, 3, 4

_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("POLENT_VERBOSITY", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def parse_grid(text: str) -> list[float]:
    """``0.5,0.55,0.6`` or ``start:stop:count`` (inclusive linspace)."""
    text = text.strip()
    if not text:
        raise ConfigError("empty grid")
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(float(start), float(stop), int(count))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}: {exc}") from exc


def _outdir(cfg, override):
    return Path(override) if override else Path(cfg.output.dir)


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    table = run_scenario(cfg)
    outdir = _outdir(cfg, args.outdir)
    paths = write_table(table, outdir, cfg.stem)
    if cfg.scenario == "sweep":
        paths += write_plot_data(table, outdir / f"{cfg.stem}_plots", cfg.stem)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    grid = parse_grid(args.grid)
    if not grid:
        raise ConfigError("sweep grid is empty")
    table = run_sweep(cfg, args.axis, grid, workers=args.workers)
    stem = f"{cfg.stem}_sweep_{args.axis}"
    outdir = _outdir(cfg, args.outdir)
    paths = write_table(table, outdir, stem)
    paths += write_plot_data(table, outdir / f"{stem}_plots", stem)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    table, failures = run_oracles(cfg)
    for p in write_table(table, _outdir(cfg, args.outdir), f"{cfg.stem}_oracle"):
        print(p)
    if failures:
        for name in failures:
            print(f"oracle check failed: {name}", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


def cmd_verify(args) -> int:
    from ..verify import run_all

    results = run_all()
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} acceptance criteria passed")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def cmd_emit_plots(args) -> int:
    path = Path(args.results)
    try:
        table = ResultTable.from_json(path.read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read results file {path}: {exc}") from exc
    paths = write_plot_data(table, args.outdir, path.stem)
    if not paths:
        print(f"no sweep series in {path}", file=sys.stderr)
    for p in paths:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the scenario named in a config file")
    p.add_argument("config")
    p.add_argument("--outdir", help="override output.dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter of a config")
    p.add_argument("config")
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--grid", required=True, help="comma list or start:stop:count")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="Fock-space and Monte Carlo cross-checks")
    p.add_argument("config")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("emit-plots", help="write per-series plot data from a results JSON file")
    p.add_argument("results")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_emit_plots)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PolentError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
