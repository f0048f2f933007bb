"""Command line entry point: parameter sweeps, analytic-vs-MC validation, alpha search.

    ehnoma sweep --var rho_db --grid 0:40:5 --quantities outage_u1,outage_u2 --mode both
    ehnoma validate --trials 1000000 --out check.csv
    ehnoma optimize --backend analytic --rho-db 20

Exit codes: 0 ok, 1 validation failure, 2 bad configuration, 3 numerical
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import io
import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .montecarlo import McConfig, McSummary, SmallSampleWarning, simulate, throughput_from_outage
from .optimizer import PsoConfig, pso_optimize_alpha
from .outage import outage, outage_asymptotic, outage_u1_icsi, throughput
from .rates import ergodic_rate
from .sysconfig import ConfigError, SystemParams, derive_thresholds, load_config, validate

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

VARIABLES = ("rho_db", "alpha", "sigma_e2", "K", "a1", "beta")
QUANTITIES = ("outage_u1", "outage_u2", "outage_u1_asy", "outage_u2_asy",
              "rate_u1", "rate_u2", "sum_rate", "throughput")
ANALYTIC_ONLY = {"outage_u1_asy", "outage_u2_asy"}
MODES = ("analytic", "montecarlo", "both")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]
    quantities: tuple[str, ...]
    modes: tuple[str, ...] = ("analytic",)
    csi: str = "imperfect"

    def __post_init__(self):
        problems = []
        if self.variable not in VARIABLES:
            problems.append(f"--var must be one of {', '.join(VARIABLES)}, got {self.variable!r}")
        if not self.grid:
            problems.append("grid is empty")
        else:
            d = np.diff(self.grid)
            if not (np.all(d > 0) or np.all(d < 0)):
                problems.append("grid must be strictly monotone")
        bad = [q for q in self.quantities if q not in QUANTITIES]
        if bad or not self.quantities:
            problems.append(f"unknown or missing quantities {bad}; choose from {', '.join(QUANTITIES)}")
        if self.csi not in ("perfect", "imperfect"):
            problems.append(f"--csi must be perfect or imperfect, got {self.csi!r}")
        if "montecarlo" in self.modes and "analytic" not in self.modes:
            mc_less = [q for q in self.quantities if q in ANALYTIC_ONLY]
            if mc_less:
                problems.append(f"{mc_less} have no Monte Carlo estimator")
        if problems:
            raise ConfigError(problems)

    @property
    def columns(self) -> list[str]:
        cols = [self.variable]
        for q in self.quantities:
            if "analytic" in self.modes:
                cols.append(f"{q}_analytic")
            if "montecarlo" in self.modes and q not in ANALYTIC_ONLY:
                cols += [f"{q}_montecarlo", f"{q}_mc_ci"]
        return cols


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (stop included) or a comma-separated list."""
    text = text.strip()
    if not text:
        return ()
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step == 0 or (stop - start) / step < 0:
                raise ConfigError(f"grid {text!r} has no points")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(float(np.round(start + i * step, 12)) for i in range(n))
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


def substitute(base: SystemParams, variable: str, value: float) -> SystemParams:
    """Fresh validated copy of ``base`` with one swept value applied."""
    if variable == "rho_db":
        p = base.with_rho_db(value)
    elif variable == "a1":
        p = base.replace(a1=value, a2=1.0 - value)
    elif variable == "K":
        if not float(value).is_integer():
            raise ConfigError(f"K grid values must be integers, got {value}")
        p = base.replace(K=int(value))
    else:
        p = base.replace(**{variable: value})
    return validate(p)


def fmt(value) -> str:
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# quantities
# ---------------------------------------------------------------------------

def analytic_value(p: SystemParams, quantity: str, csi: str) -> float:
    if quantity == "outage_u1":
        return outage(p, 1, csi)
    if quantity == "outage_u2":
        return outage(p, 2, csi)
    if quantity in ("outage_u1_asy", "outage_u2_asy"):
        which = f"{quantity[7:9]}_{'icsi' if csi == 'imperfect' else 'perfect'}"
        return outage_asymptotic(p, None, which)
    if quantity == "rate_u1":
        return ergodic_rate(p, 1, csi)
    if quantity == "rate_u2":
        return ergodic_rate(p, 2, csi)
    if quantity == "sum_rate":
        return ergodic_rate(p, 1, csi) + ergodic_rate(p, 2, csi)
    if quantity == "throughput":
        return throughput(p, csi)
    raise KeyError(quantity)


def mc_value(p: SystemParams, s: McSummary, quantity: str):
    if quantity == "outage_u1":
        return s.outage_u1
    if quantity == "outage_u2":
        return s.outage_u2
    if quantity == "rate_u1":
        return s.rate_u1
    if quantity == "rate_u2":
        return s.rate_u2
    if quantity == "sum_rate":
        return dataclasses.replace(s.rate_u1, mean=s.rate_u1.mean + s.rate_u2.mean,
                                   half_width=s.rate_u1.half_width + s.rate_u2.half_width)
    if quantity == "throughput":
        return throughput_from_outage(p, s.outage_u1, s.outage_u2)
    raise KeyError(quantity)


def _map_ordered(fn, items, workers: int) -> list:
    """Evaluate grid points concurrently; results come back in grid order."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep_rows(base: SystemParams, spec: SweepSpec, mc: McConfig) -> list[list[str]]:
    def point(value):
        p = substitute(base, spec.variable, value)  # fresh copy per row
        summary = None
        if "montecarlo" in spec.modes:
            summary = simulate(p.perfect() if spec.csi == "perfect" else p, mc)
        row = [fmt(value)]
        for q in spec.quantities:
            if "analytic" in spec.modes:
                row.append(fmt(analytic_value(p, q, spec.csi)))
            if summary is not None and q not in ANALYTIC_ONLY:
                est = mc_value(p, summary, q)
                row += [fmt(est.mean), fmt(est.half_width)]
        return row
    return _map_ordered(point, spec.grid, mc.workers)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

OUTAGE_FLOOR = 0.005
RATE_FLOOR = 0.02
U1_HIGH_SNR_TOL = 0.05  # destination-SINR approximation gap above 30 dB


def tolerance(quantity: str, rho_db: float, ci_half: float, z: float) -> float:
    sigma = ci_half / z  # back to one standard error
    if quantity.startswith("outage"):
        return max(OUTAGE_FLOOR, 3.0 * sigma)
    if quantity == "rate_u1" and rho_db >= 30.0:
        return max(U1_HIGH_SNR_TOL, 3.0 * sigma)
    return max(RATE_FLOOR, 3.0 * sigma)


VALIDATE_COLUMNS = ["rho_db", "csi", "quantity", "analytic", "montecarlo", "mc_ci", "tolerance", "status"]


def validate_rows(base: SystemParams, grid, mc: McConfig, csi_modes=("imperfect", "perfect"),
                  quantities=("outage_u1", "outage_u2", "rate_u1", "rate_u2"),
                  corrupt_omega2: float | None = None) -> list[list[str]]:
    """Compare analytic values with Monte Carlo at every (rho, csi, quantity).

    ``corrupt_omega2`` replaces one derived constant in the imperfect U1
    outage; it exists only as a negative control for the comparison itself.
    """
    def point(rho_db):
        rows = []
        p = validate(base.with_rho_db(rho_db))
        for csi in csi_modes:
            s = simulate(p.perfect() if csi == "perfect" else p, mc)
            for q in quantities:
                if corrupt_omega2 is not None and q == "outage_u1" and csi == "imperfect":
                    th = dataclasses.replace(derive_thresholds(p), Omega2=corrupt_omega2)
                    a = outage_u1_icsi(p, th)
                else:
                    a = analytic_value(p, q, csi)
                est = mc_value(p, s, q)
                tol = tolerance(q, rho_db, est.half_width, mc.z)
                ok = abs(a - est.mean) <= tol
                rows.append([fmt(rho_db), csi, q, fmt(a), fmt(est.mean), fmt(est.half_width),
                             fmt(tol), "pass" if ok else "FAIL"])
        return rows
    return [r for block in _map_ordered(point, grid, mc.workers) for r in block]


# ---------------------------------------------------------------------------
# I/O and argument handling
# ---------------------------------------------------------------------------

@contextlib.contextmanager
def _sink(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    Path(path).write_text(buf.getvalue())


def write_csv(path: str | None, header, rows):
    with _sink(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _base_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file")
    common.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    common.add_argument("--csi", default=None,
                        help="perfect or imperfect (validate also accepts both, its default)")
    common.add_argument("--seed", type=int, help="Monte Carlo / swarm seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    common.add_argument("--rho-db", type=float, help="transmit SNR in dB (overrides the config)")
    common.add_argument("--workers", type=int, default=1, help="worker threads (grid points and Monte Carlo batches)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ehnoma", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="sweep one parameter and tabulate quantities")
    sw.add_argument("--var", default="rho_db", help=f"one of {', '.join(VARIABLES)}")
    sw.add_argument("--grid", default="0:40:5", help="start:stop:step (inclusive) or a,b,c")
    sw.add_argument("--quantities", default="outage_u1,outage_u2")
    sw.add_argument("--mode", default="analytic", help="analytic, montecarlo or both")

    va = sub.add_parser("validate", parents=[common], help="analytic vs Monte Carlo pass/fail table")
    va.add_argument("--grid", default="0:40:5", help="rho grid in dB")
    va.add_argument("--corrupt-omega2", type=float, default=None, help=argparse.SUPPRESS)

    op = sub.add_parser("optimize", parents=[common], help="particle swarm search for alpha")
    op.add_argument("--backend", default="analytic", help="analytic or montecarlo")
    op.add_argument("--particles", type=int, default=30)
    op.add_argument("--iterations", type=int, default=20)
    op.add_argument("--strict", action="store_true", help="no velocity clamp")
    return parser


def _setup(args) -> tuple[SystemParams, McConfig]:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    params, extra = load_config(args.config, **overrides)
    if args.rho_db is not None:
        params = validate(params.with_rho_db(args.rho_db))
    if args.csi is None:
        args.csi = "both" if args.command == "validate" else "imperfect"
    if args.csi not in ("perfect", "imperfect", "both"):
        raise ConfigError(f"--csi must be perfect or imperfect, got {args.csi!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("always", SmallSampleWarning)
        with warnings.catch_warnings(record=True) as caught:
            mc = McConfig(n_trials=extra.get("n_trials", 1_000_000), seed=extra.get("seed", 12345),
                          workers=args.workers)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return params, mc


def run_sweep(args) -> int:
    params, mc = _setup(args)
    if args.mode not in MODES:
        raise ConfigError(f"--mode must be one of {', '.join(MODES)}")
    modes = ("analytic", "montecarlo") if args.mode == "both" else (args.mode,)
    spec = SweepSpec(args.var, parse_grid(args.grid),
                     tuple(q.strip() for q in args.quantities.split(",") if q.strip()),
                     modes, args.csi)
    write_csv(args.out, spec.columns, sweep_rows(params, spec, mc))
    return EXIT_OK


def run_validate(args) -> int:
    params, mc = _setup(args)
    grid = parse_grid(args.grid)
    if not grid:
        raise ConfigError("grid is empty")
    csi_modes = ("imperfect", "perfect") if args.csi == "both" else (args.csi,)
    rows = validate_rows(params, grid, mc, csi_modes, corrupt_omega2=args.corrupt_omega2)
    write_csv(args.out, VALIDATE_COLUMNS, rows)
    failed = sum(r[-1] != "pass" for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} comparisons passed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def run_optimize(args) -> int:
    params, mc = _setup(args)
    if args.backend not in ("analytic", "montecarlo"):
        raise ConfigError(f"--backend must be analytic or montecarlo, got {args.backend!r}")
    cfg = PsoConfig(n_particles=args.particles, n_iterations=args.iterations,
                    seed=args.seed if args.seed is not None else PsoConfig.seed, strict=args.strict)
    res = pso_optimize_alpha(params, args.backend, cfg, "imperfect" if args.csi == "both" else args.csi,
                             dataclasses.replace(mc, n_trials=min(mc.n_trials, 200_000)))
    write_csv(args.out, ["iteration", "best_objective"],
              [[str(i), fmt(v)] for i, v in enumerate(res.trace)])
    print(f"best_alpha={fmt(res.best_alpha)} best_objective={fmt(res.best_objective)}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"sweep": run_sweep, "validate": run_validate, "optimize": run_optimize}


def main(argv=None) -> int:
    parser = _base_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are configuration errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
