"""Command-line entry point: ``lorascale {success,coverage,contour,validate}``.

Every subcommand writes one CSV (to ``--output`` or stdout).  Exit codes:
0 ok, 1 Monte Carlo / analytic disagreement, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import analytic, coverage, montecarlo
from .config import ConfigError, RunConfig, load_config
from .coverage import PRESETS
from .geometry import PlanningError, make_plan
from .montecarlo import METRICS, SimSpec
from .network import Cell

log = logging.getLogger("lorascale")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SUCCESS_HEADER = ["distance_m", "annulus", "sf", "p_snr", "p_sir_dom", "p_sir_cosf", "p_sir_joint"]
MC_HEADER = [f"mc_p_{m}" for m in METRICS] + [f"mc_p_{m}_ci" for m in METRICS]
COVERAGE_HEADER = ["n_bar", "pc_snr", "pc_sir_dom", "pc_sir_cosf", "pc_sir_joint", "pc_joint"]
CONTOUR_HEADER = ["radius_m", "n_bar", "pc_joint"]


def fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".12g")


def render_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def build_cell(cfg: RunConfig) -> Cell:
    plan = make_plan(cfg.scheme, cfg.radius_m, cfg.radio, cfg.snr, cfg.sfs)
    return Cell(cfg.radio, plan, cfg.n_bar, cfg.sir, cfg.snr)


def sim_spec(cfg: RunConfig) -> SimSpec:
    return SimSpec(trials=cfg.trials, seed=cfg.seed, capture=cfg.capture, workers=cfg.workers)


def _success_rows(cfg: RunConfig, n_points: int, validate: bool):
    cell = build_cell(cfg)
    xs = analytic.sweep_distances(cell.plan, n_points)
    points = [analytic.success_point(float(x), cell) for x in xs]
    rows = [[p.x1, p.annulus, p.sf, p.p_snr, p.p_sir_dom, p.p_sir_cosf, p.p_sir_joint] for p in points]
    if not validate:
        return SUCCESS_HEADER, rows, points, None
    sims = montecarlo.simulate_sweep(xs, cell, sim_spec(cfg))
    for row, est in zip(rows, sims):
        row.extend(est[m].p for m in METRICS)
        row.extend(est[m].half_width for m in METRICS)
    return SUCCESS_HEADER + MC_HEADER, rows, points, sims


def run_success(cfg: RunConfig, validate: bool = False) -> str:
    header, rows, _, _ = _success_rows(cfg, cfg.points, validate)
    return render_csv(header, rows)


def run_coverage(cfg: RunConfig) -> str:
    cell = build_cell(cfg)
    results = coverage.coverage_sweep(cell, cfg.coverage_devices)
    rows = [[r.n_bar, r.pc_snr, r.pc_sir_dom, r.pc_sir_cosf, r.pc_sir_joint, r.pc_joint] for r in results]
    return render_csv(COVERAGE_HEADER, rows)


def run_contour(cfg: RunConfig, preset: str | None = None) -> str:
    radio = coverage.apply_preset(cfg.radio, preset or cfg.preset)
    grid = coverage.contour_grid(radio, cfg.contour_radii_m, cfg.contour_devices, cfg.scheme, cfg.sir, cfg.snr,
                                 cfg.sfs, workers=cfg.workers)
    return render_csv(CONTOUR_HEADER, grid.rows())


@dataclass
class ValidationReport:
    csv: str
    max_diff: dict[str, float]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = [f"{m:<10} max |MC - analytic| = {self.max_diff[m]:.5f}" for m in METRICS]
        out += [f"EXCEEDED {f}" for f in self.failures]
        out.append("PASS" if self.ok else f"FAIL ({len(self.failures)} exceedances)")
        return out


def run_validate(cfg: RunConfig) -> ValidationReport:
    header, rows, points, sims = _success_rows(cfg, cfg.validate_points, True)
    max_diff = dict.fromkeys(METRICS, 0.0)
    failures = []
    for p, est in zip(points, sims):
        analytic_vals = dict(zip(METRICS, (p.p_snr, p.p_sir_dom, p.p_sir_cosf, p.p_sir_joint)))
        for m in METRICS:
            diff = abs(est[m].p - analytic_vals[m])
            max_diff[m] = max(max_diff[m], diff)
            allowed = max(0.01, est[m].half_width)
            if diff > allowed:
                failures.append(f"{m} at x1={p.x1:.3f} m: analytic {analytic_vals[m]:.5f}, "
                                f"MC {est[m].p:.5f}, |diff| {diff:.5f} > {allowed:.5f}")
    return ValidationReport(render_csv(header, rows), max_diff, failures)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI-style run configuration")
    common.add_argument("--output", metavar="PATH", help="CSV destination (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--scheme", choices=("eib", "eab", "plb"))
    common.add_argument("--radius", type=float, metavar="M", help="cell radius in metres (ignored by plb)")
    common.add_argument("--devices", type=float, metavar="N", help="mean number of devices in the cell")
    common.add_argument("--duty-cycle", type=float, metavar="F", help="duty cycle as a fraction")
    common.add_argument("--workers", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="lorascale", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("success", parents=[common], help="success probabilities versus distance")
    s.add_argument("--validate", action="store_true", help="add Monte Carlo columns")
    s.add_argument("--points", type=int)
    sub.add_parser("coverage", parents=[common], help="coverage versus mean device count")
    c = sub.add_parser("contour", parents=[common], help="joint coverage over (radius, device count)")
    c.add_argument("--preset", choices=sorted(PRESETS))
    v = sub.add_parser("validate", parents=[common], help="Monte Carlo check of the analytic curves")
    v.add_argument("--points", type=int)
    return p


def _resolve(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    points = getattr(args, "points", None)
    return cfg.override(
        output=args.output,
        seed=args.seed,
        trials=args.trials,
        scheme=args.scheme,
        radius_m=args.radius,
        n_bar=args.devices,
        duty_cycle=args.duty_cycle,
        workers=args.workers,
        points=points if args.command == "success" else None,
        validate_points=points if args.command == "validate" else None,
        preset=getattr(args, "preset", None),
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO

    code = EXIT_OK
    try:
        if args.command == "success":
            text = run_success(cfg, args.validate)
        elif args.command == "coverage":
            text = run_coverage(cfg)
        elif args.command == "contour":
            text = run_contour(cfg)
        else:
            report = run_validate(cfg)
            text = report.csv
            for line in report.lines():
                print(line, file=sys.stderr)
            code = EXIT_OK if report.ok else EXIT_MISMATCH
    except (PlanningError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if cfg.output:
            write_atomic(cfg.output, text)
            log.info("wrote %s", cfg.output)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"cannot write {cfg.output}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
