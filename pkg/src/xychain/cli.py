"""Command-line sweeps over field and temperature.

    xychain partition    --L 50 --gamma 1 --g 0:3:60 --beta 0.1:30:60 --format csv
    xychain distribution --L 50 --g 1 --beta 1 --observable kinks --variant exact
    xychain cumulants    --L 12 --g 0.5 --beta 0.1:10:40 --observable kinks
    xychain oracle-check --L-max 10 --seed 0

Grids are ``min:max:count`` with inclusive endpoints (``--log-beta`` spaces the
beta grid logarithmically); a single number is a one-point grid.
Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import fcs, partition
from .model import ChainParams, Thermal
from .partition import default_threads, parallel_map

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

OBSERVABLES = fcs.OBSERVABLES
VARIANTS = ("exact", "ppa", "coarse_grained_ppa", "ground_state", "infinite_temperature", "two_level")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    L: int
    gamma: float
    g_grid: tuple[float, ...]
    beta_grid: tuple[float, ...]
    observable: str | None
    variant: str
    output_path: str | None
    format: str
    threads: int = 1

    def __post_init__(self):
        if not self.g_grid or not self.beta_grid:
            raise ConfigError("grids must be non-empty")
        if self.L < 2 or self.L % 2:
            raise ConfigError(f"L must be even and >= 2, got {self.L}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.variant == "two_level" and self.observable is not None:
            raise ConfigError("the two_level variant has no observable")
        if self.observable is not None and self.observable not in OBSERVABLES:
            raise ConfigError(f"unknown observable {self.observable!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if any(b < 0 or not math.isfinite(b) for b in self.beta_grid):
            raise ConfigError("beta values must be finite and non-negative")
        if any(g < 0 for g in self.g_grid):
            raise ConfigError("g values must be non-negative")

    def params(self, g: float) -> ChainParams:
        return ChainParams(self.L, g, self.gamma)


def parse_grid(text: str, log: bool = False) -> tuple[float, ...]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected a number or min:max:count") from None
    if count < 1:
        raise ConfigError(f"grid count must be positive in {text!r}")
    if log:
        if lo <= 0 or hi <= 0:
            raise ConfigError("log-spaced grids need positive endpoints")
        return tuple(float(x) for x in np.geomspace(lo, hi, count))
    return tuple(float(x) for x in np.linspace(lo, hi, count))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def render(columns: list[str], rows: list[list], fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    records = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
    return json.dumps({"meta": meta, "rows": records}, indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _meta(cfg: SweepConfig, command: str) -> dict:
    return {"command": command, "L": cfg.L, "gamma": cfg.gamma, "observable": cfg.observable,
            "variant": cfg.variant, "g_grid": list(cfg.g_grid), "beta_grid": list(cfg.beta_grid)}


# --- subcommands ------------------------------------------------------------

PARTITION_COLUMNS = ["beta", "g", "log_z_exact", "log_z_ppa", "ratio", "log_z_two_level",
                     "cancellation_flag"]


def cmd_partition(cfg: SweepConfig) -> str:
    def cell(bg):
        beta, g = bg
        z = partition.z_exact(cfg.params(g), Thermal(beta))
        two = z.z_two_level.log_magnitude if z.z_two_level is not None else None
        return [beta, g, z.z_exact.log_magnitude, z.z_ppa.log_magnitude,
                z.z_ppa.ratio(z.z_exact), two, z.cancellation]

    cells = [(b, g) for b in cfg.beta_grid for g in cfg.g_grid]
    rows = parallel_map(cell, cells, cfg.threads)
    return render(PARTITION_COLUMNS, rows, cfg.format, _meta(cfg, "partition"))


def _limit_beta(variant: str) -> float | None:
    return {"ground_state": math.inf, "infinite_temperature": 0.0}.get(variant)


def _cells(cfg: SweepConfig):
    fixed = _limit_beta(cfg.variant)
    betas = (fixed,) if fixed is not None else cfg.beta_grid
    return [(b, g) for b in betas for g in cfg.g_grid]


def cmd_distribution(cfg: SweepConfig) -> str:
    if cfg.observable is None or cfg.variant == "two_level":
        raise ConfigError("distribution needs an observable and a variant other than two_level")

    def cell(bg):
        beta, g = bg
        params = cfg.params(g)
        obs = fcs.observable_by_name(cfg.observable, params)
        th = None if _limit_beta(cfg.variant) is not None else Thermal(beta)
        return fcs.distribution(obs, params, cfg.variant, th)

    cells = _cells(cfg)
    dists = parallel_map(cell, cells, cfg.threads)
    rows, blocks = [], []
    for (beta, g), d in zip(cells, dists):
        rows += [[beta, g, int(s), p] for s, p in zip(d.support, d.probs)]
        blocks.append({"beta": _json_value(beta), "g": g, "probability_sum": float(d.probs.sum()),
                       "normalization_residual": d.meta.get("normalization_residual")})
    meta = _meta(cfg, "distribution") | {"cells": blocks}
    return render(["beta", "g", "value", "probability"], rows, cfg.format, meta)


CUMULANT_COLUMNS = (["beta", "g", "variant"] + [f"kappa{i}" for i in range(1, 5)]
                    + [f"rel_err_kappa{i}" for i in range(1, 5)])
ZERO_GUARD = 1e-12


def relative_errors(exact: fcs.CumulantSet, approx: fcs.CumulantSet) -> list[float | None]:
    return [None if abs(e) < ZERO_GUARD else abs(e - a) / abs(e)
            for e, a in zip(exact.kappa, approx.kappa)]


def cmd_cumulants(cfg: SweepConfig) -> str:
    if cfg.observable is None or cfg.variant == "two_level":
        raise ConfigError("cumulants need an observable and a variant other than two_level")
    limit = _limit_beta(cfg.variant) is not None
    approx_variant = "ppa" if cfg.variant == "exact" else cfg.variant

    def cell(bg):
        beta, g = bg
        params = cfg.params(g)
        obs = fcs.observable_by_name(cfg.observable, params)
        if limit:
            return [(cfg.variant, fcs.cumulants(fcs.distribution(obs, params, cfg.variant)), None)]
        th = Thermal(beta)
        exact = fcs.cumulants(fcs.distribution(obs, params, "exact", th))
        approx = fcs.cumulants(fcs.distribution(obs, params, approx_variant, th))
        return [("exact", exact, None), (approx_variant, approx, relative_errors(exact, approx))]

    cells = _cells(cfg)
    rows = []
    for (beta, g), out in zip(cells, parallel_map(cell, cells, cfg.threads)):
        for variant, kap, rel in out:
            rows.append([beta, g, variant, *kap.kappa, *(rel or [None] * 4)])
    return render(CUMULANT_COLUMNS, rows, cfg.format, _meta(cfg, "cumulants"))


# --- argument handling --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xychain", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_args(p, observable_default):
        p.add_argument("--L", type=int, required=True)
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--g", default="1.0", help="field grid, min:max:count or a number")
        p.add_argument("--beta", default="1.0", help="inverse-temperature grid")
        p.add_argument("--log-beta", action="store_true", help="log-spaced beta grid")
        p.add_argument("--observable", choices=OBSERVABLES, default=observable_default)
        p.add_argument("--variant", choices=VARIANTS, default="exact")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output file (stdout if omitted)")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default ${partition.THREADS_ENV} or 1)")

    sweep_args(sub.add_parser("partition", help="exact, PPA and two-level partition functions"), None)
    sweep_args(sub.add_parser("distribution", help="eigenvalue distribution of an observable"), "kinks")
    sweep_args(sub.add_parser("cumulants", help="cumulants, exact versus approximate"), "kinks")

    oc = sub.add_parser("oracle-check", help="compare analytic results with dense diagonalization")
    oc.add_argument("--L-max", dest="L_max", type=int, default=10)
    oc.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args) -> SweepConfig:
    observable = None if args.command == "partition" else args.observable
    return SweepConfig(
        L=args.L, gamma=args.gamma, g_grid=parse_grid(args.g),
        beta_grid=parse_grid(args.beta, log=args.log_beta), observable=observable,
        variant=args.variant, output_path=args.out, format=args.format,
        threads=default_threads() if args.threads is None else max(1, args.threads),
    )


COMMANDS = {"partition": cmd_partition, "distribution": cmd_distribution, "cumulants": cmd_cumulants}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "oracle-check":
        from .verify import run_oracle_check
        try:
            report = run_oracle_check(args.L_max, args.seed)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(report.render())
        return EXIT_OK if report.ok else EXIT_VERIFY
    try:
        cfg = config_from_args(args)
        text = COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _write(text, cfg.output_path)
    except OSError as exc:
        print(f"error: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
