"""Batch runner for the property suites.

Exit status is 0 when every assertion-level check passes, 1 when any
check fails and 2 for configuration errors. INFO rows never fail a run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import __version__
from .errors import BadConfig
from .suites import FAIL, PLOTS, SUITES, Context

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    suite: str
    seed: int = 0
    dim: Optional[int] = None
    trials: Optional[int] = None
    grid: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1

    def names(self) -> List[str]:
        """Suite or plot names to run; raises BadConfig before any computation."""
        if self.fmt not in ("json", "csv"):
            raise BadConfig(f"unknown format {self.fmt!r}")
        if self.jobs < 1:
            raise BadConfig("--jobs must be at least 1")
        for k in ("dim", "trials", "grid"):
            v = getattr(self, k)
            if v is not None and v < 1:
                raise BadConfig(f"--{k} must be positive")
        if self.suite == "all":
            return sorted(SUITES)
        if self.suite in SUITES:
            return [self.suite]
        if self.suite in PLOTS:
            if self.fmt != "csv":
                raise BadConfig(f"{self.suite!r} is plot data and needs --csv")
            return [self.suite]
        known = ", ".join(sorted(SUITES) + sorted(PLOTS) + ["all"])
        raise BadConfig(f"unknown suite {self.suite!r}; choose from {known}")

    def context(self, name: str) -> Context:
        return Context(name, self.seed, self.dim, self.trials, self.grid)


def _run_one(cfg: RunConfig, name: str):
    ctx = cfg.context(name)
    if name in PLOTS:
        return PLOTS[name](ctx)
    return [c.to_dict() for c in SUITES[name](ctx)]


def report(suite: str, seed: int, results: list) -> dict:
    return {"suite": suite, "seed": seed, "results": results, "version": __version__}


def render_json(reports: Sequence[dict]) -> str:
    body = reports[0] if len(reports) == 1 else list(reports)
    return json.dumps(body, sort_keys=True, indent=1) + "\n"


def render_csv(reports: Sequence[dict]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["suite", "seed", "name", "status", "residual"])
    for r in reports:
        for row in r["results"]:
            wr.writerow([r["suite"], r["seed"], row["name"], row["status"], repr(row["residual"])])
    return buf.getvalue()


def execute(cfg: RunConfig):
    """Run the configured suites; returns ``(text, failed)``.

    Work is spread over ``cfg.jobs`` processes, and results are assembled
    in name order so the output does not depend on scheduling.
    """
    names = cfg.names()
    if cfg.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            outs = list(ex.map(_run_one, [cfg] * len(names), names))
    else:
        outs = [_run_one(cfg, n) for n in names]
    if names[0] in PLOTS:
        return outs[0], False
    reports = [report(n, cfg.seed, o) for n, o in zip(names, outs)]
    failed = any(row["status"] == FAIL for r in reports for row in r["results"])
    text = render_csv(reports) if cfg.fmt == "csv" else render_json(reports)
    return text, failed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncfa", description="Run property suites for finite-dimensional "
                                "subdiagonal algebras and write a report.")
    p.add_argument("--suite", default="all",
                   help="suite name, plot-data name (with --csv) or 'all' (default)")
    p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--dim", type=int, help="matrix size override where a suite has one")
    p.add_argument("--trials", type=int, help="trial count override for randomized checks")
    p.add_argument("--grid", type=int, help="grid or truncation override where a suite has one")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV report or plot data")
    p.add_argument("--jobs", type=int, default=1, help="suites to run concurrently (default 1)")
    p.add_argument("--list", action="store_true", help="list suite and plot names and exit")
    p.set_defaults(fmt="json")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    if args.list:
        print("suites: " + " ".join(sorted(SUITES)))
        print("plot data (--csv): " + " ".join(sorted(PLOTS)))
        return EXIT_OK
    cfg = RunConfig(args.suite, args.seed, args.dim, args.trials, args.grid, args.out, args.fmt, args.jobs)
    try:
        text, failed = execute(cfg)
    except BadConfig as e:
        print(f"ncfa: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as e:
        print(f"ncfa: cannot write report: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
