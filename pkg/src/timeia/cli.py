"""
Command-line runner.

Each subcommand writes delimited results plus a JSON manifest into the
output directory; ``--figures`` additionally renders PNG plots next to
the CSV files. Exit status is 0 on success, 2 on a configuration error
and 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .align import run_coordinated
from .analytic import RHO_MAX, RHO_MIN, ccdf_phi, pdf_phi, prob_exceeds_one
from .config import ConfigError, build, parse_rho, read_config
from .dof import as_rho
from .geo import run_satellite
from .montecarlo import (ATOM_SNAP, EmpiricalDistribution, ExperimentConfig, ccdf_at,
                         ks_distance, percentile, run_uncoordinated)

EXIT_CONFIG = 2
EXIT_IO = 3
STEP = 1e-3


def fmt(x) -> str:
    return format(float(x), ".12g")


def to_csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("ascii")


def analytic_rows(rho):
    law = pdf_phi(rho)
    top = 3 * rho
    n = int(np.floor(top / STEP + 1e-9))
    phis = [k / 1000 for k in range(n + 1)]
    if top - phis[-1] > 1e-12:
        phis.append(top)
    return [(fmt(x), fmt(law.ccdf(x))) for x in phis], phis


def empirical_rows(dist: EmpiricalDistribution):
    values = np.unique(dist.samples)
    counts = dist.count - np.searchsorted(dist.samples, values, side="right")
    rows = []
    for v, c in zip(values, counts):
        row = (fmt(v), fmt(c / dist.count))
        if rows and rows[-1][0] == row[0]:
            rows[-1] = row
        else:
            rows.append(row)
    return rows


def summarize(dist: EmpiricalDistribution) -> dict:
    return {
        "trials": dist.count,
        "mean_phi": dist.mean(),
        "min_phi": float(dist.samples[0]),
        "max_phi": float(dist.samples[-1]),
        "p_exceed_1": ccdf_at(dist, 1.0 + ATOM_SNAP),
        "ccdf_at_1": ccdf_at(dist, 1.0 + ATOM_SNAP),
        "percentile_90": percentile(dist, 0.9),
    }


def config_dict(config: ExperimentConfig) -> dict:
    out = {
        "mode": config.mode,
        "rho": config.rho,
        "trials": config.trials,
        "seed": config.master_seed,
        "grid": config.grid,
        "refine": config.refine,
        "workers": config.workers,
    }
    sc = config.scenario
    if sc is not None:
        out.update(T_seconds=sc.slot, sat_longitudes=list(sc.satellite_longitudes),
                   ground_lat_range=list(sc.lat_range), ground_lon_range=list(sc.lon_range))
    return out


class Report:
    """Collects output files in memory and writes them in one go."""

    def __init__(self, command, out_dir):
        self.command = command
        self.out_dir = out_dir
        self.files = {}
        self.figures = []
        self.started = time.perf_counter()

    def add(self, name, data: bytes):
        self.files[name] = data

    def figure(self, name, draw):
        self.figures.append((name, draw))

    def write(self, config, seed, summary):
        manifest = {
            "command": self.command,
            "config": config,
            "master_seed": seed,
            "tool_version": __version__,
            "duration_seconds": round(time.perf_counter() - self.started, 3),
            "outputs": {n: hashlib.sha256(d).hexdigest() for n, d in sorted(self.files.items())},
            "summary": summary,
        }
        os.makedirs(self.out_dir, exist_ok=True)
        written = []
        try:
            for name, data in self.files.items():
                path = os.path.join(self.out_dir, name)
                with open(path, "wb") as fh:
                    fh.write(data)
                written.append(path)
            path = os.path.join(self.out_dir, f"{self.command.replace('-', '_')}_manifest.json")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True)
                fh.write("\n")
            written.append(path)
            for name, draw in self.figures:
                path = os.path.join(self.out_dir, name)
                draw(path)
                written.append(path)
        except OSError:
            for path in written:
                try:
                    os.remove(path)
                except OSError:
                    pass
            raise
        return manifest


def cmd_analytic(args):
    rho = as_rho(args.rho)
    report = Report("analytic", args.out)
    rows, phis = analytic_rows(rho)
    report.add("analytic_ccdf.csv", to_csv(("phi", "ccdf_analytic"), rows))
    law = pdf_phi(rho)
    report.add("analytic_atoms.csv",
               to_csv(("location", "weight"), [(fmt(l), fmt(w)) for l, w in law.atoms]))
    if args.figures:
        from .plotting import ccdf_figure
        ys = [law.ccdf(x) for x in phis]
        report.figure("analytic_ccdf.png", lambda p: ccdf_figure(
            p, {f"closed form, rho={rho:.4g}": (phis, ys, "--")}))
    summary = {"p_exceed_1": prob_exceeds_one(rho), "mean_phi": law.mean(),
               "total_mass": law.total_mass()}
    return report.write({"rho": rho}, None, summary)


RUNNERS = {
    "uncoordinated": run_uncoordinated,
    "coordinated": run_coordinated,
    "satellite": run_satellite,
}


def resolve(args, mode) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            values = read_config(args.config)
        except FileNotFoundError:
            raise ConfigError("config file not found", args.config) from None
    for flag, key in (("seed", "seed"), ("trials", "trials"), ("rho", "rho"),
                      ("workers", "workers")):
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    if getattr(args, "ignore_mode", False):
        values.pop("mode", None)
    return build(values, mode)


def cmd_experiment(args):
    mode = args.command
    config = resolve(args, mode)
    dist = RUNNERS[mode](config)
    report = Report(mode, args.out)
    rows = empirical_rows(dist)
    report.add(f"{mode}_ccdf.csv", to_csv(("phi", "ccdf_empirical"), rows))
    summary = summarize(dist)
    if mode == "uncoordinated":
        summary["ks_distance_analytic"] = ks_distance(dist, pdf_phi(config.rho))
    if args.figures:
        from .plotting import ccdf_figure
        x = np.concatenate([[0.0], dist.samples])
        y = 1.0 - np.arange(x.size) / dist.count
        curves = {f"{mode}, rho={config.rho:.4g}": (x, y, "-")}
        if mode == "uncoordinated":
            xs = np.linspace(0, 3 * config.rho, 601)
            curves["closed form"] = (xs, [ccdf_phi(v, config.rho) for v in xs], "--")
        report.figure(f"{mode}_ccdf.png", lambda p: ccdf_figure(p, curves))
    return report.write(config_dict(config), config.master_seed, summary)


def sweep_grid(lo, hi, step):
    n = int(np.floor((hi - lo) / step + 1e-9))
    rhos = [lo + k * step for k in range(n + 1)]
    if hi - rhos[-1] > 1e-12:
        rhos.append(hi)
    return rhos


def cmd_rho_sweep(args):
    lo, hi = args.rho_min, args.rho_max
    if not (RHO_MIN - 1e-12 <= lo <= hi <= RHO_MAX + 1e-12):
        raise ConfigError("sweep range must lie within [1/3, 1/2]", "rho range")
    if not args.step > 0:
        raise ConfigError("step must be positive", "step")
    args.ignore_mode = True
    args.rho = None
    base = resolve(args, args.mode)
    rhos = sweep_grid(lo, hi, args.step)
    analytic, empirical = [], []
    for r in rhos:
        cfg = ExperimentConfig(master_seed=base.master_seed, trials=base.trials, rho=r,
                               mode=args.mode, grid=base.grid, refine=base.refine,
                               workers=base.workers)
        dist = RUNNERS[args.mode](cfg)
        empirical.append(ccdf_at(dist, 1.0 + ATOM_SNAP))
        analytic.append(prob_exceeds_one(r) if args.mode == "uncoordinated" else None)
    rows = [(fmt(r), "" if a is None else fmt(a), fmt(e))
            for r, a, e in zip(rhos, analytic, empirical)]
    report = Report("rho-sweep", args.out)
    name = f"rho_sweep_{args.mode}"
    report.add(f"{name}.csv",
               to_csv(("rho", "p_exceed_1_analytic", "p_exceed_1_empirical"), rows))
    k_emp = int(np.argmax(empirical))
    summary = {"argmax_empirical": {"row": k_emp, "rho": rhos[k_emp],
                                    "p_exceed_1": empirical[k_emp]}}
    if args.mode == "uncoordinated":
        k_an = int(np.argmax(analytic))
        summary["argmax_analytic"] = {"row": k_an, "rho": rhos[k_an],
                                      "p_exceed_1": analytic[k_an]}
    if args.figures:
        from .plotting import sweep_figure
        series = {"simulated": (empirical, "-")}
        if args.mode == "uncoordinated":
            series["closed form"] = (analytic, "--")
        report.figure(f"{name}.png", lambda p: sweep_figure(p, rhos, series))
    config = config_dict(base)
    config.update(mode=args.mode, rho_min=lo, rho_max=hi, step=args.step)
    del config["rho"]
    return report.write(config, base.master_seed, summary)


def _rho_arg(text):
    try:
        return parse_rho(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid duty cycle {text!r}") from None


def _seed_arg(text):
    return int(text, 0)


def make_parser():
    parser = argparse.ArgumentParser(
        prog="timeia", description="Time interference alignment experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_rho=True):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--figures", action="store_true", help="also render PNG figures")
        if with_rho:
            p.add_argument("--rho", type=_rho_arg, help="duty cycle, e.g. 0.43 or 1/3")

    def runs(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=_seed_arg, help="master seed (u64)")
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)

    p = sub.add_parser("analytic", help="closed-form CCDF of the sum DoF")
    common(p)
    p.set_defaults(func=cmd_analytic, rho=0.5)

    for mode, text in (("uncoordinated", "random transmit delays"),
                       ("coordinated", "optimized transmit delays"),
                       ("satellite", "GEO scenario with optimized delays")):
        p = sub.add_parser(mode, help=f"empirical CCDF, {text}")
        common(p)
        runs(p)
        p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("rho-sweep", help="P(phi > 1) against the duty cycle")
    common(p, with_rho=False)
    runs(p)
    p.add_argument("--mode", choices=("uncoordinated", "coordinated"), default="uncoordinated")
    p.add_argument("--rho-min", type=_rho_arg, default=RHO_MIN)
    p.add_argument("--rho-max", type=_rho_arg, default=RHO_MAX)
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_rho_sweep)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except ValueError as exc:
        print(f"timeia: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"timeia: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
