"""Command-line entry point.

Subcommands: ``simulate`` (scenario experiments), ``combine`` (external
panel evaluation), ``oracle`` (asymptotic risk ratios), ``screen``
(subset-screening experiment from a JSON config).  Exit status: 0 on
success, 2 on configuration errors, 3 on data errors.  The ``FCP_SEED``
environment variable overrides ``--seed``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import DATA_ERRORS, BudgetError, ConfigError, FclabError
from .harness import ExperimentConfig, run_experiment, run_panel_eval
from .oracle import case1_limit, case2_limit
from .panel_io import parse_panel, result_table_to_string, write_result_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _parse_rw_list(raw: str) -> tuple[int | None, ...]:
    out: list[int | None] = []
    for item in raw.split(","):
        item = item.strip().lower()
        if item in ("none", "standard", ""):
            out.append(None)
        else:
            out.append(int(item))
    return tuple(out)


def _parse_methods(raw: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in raw.split(",") if m.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fclab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation experiment")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--reps", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--rw", type=_parse_rw_list, default=(None,),
                     help="comma list of rolling windows, e.g. none,40,20")
    sim.add_argument("--methods", type=_parse_methods, default=("sa", "bg", "after", "linreg"))
    sim.add_argument("--grid-points", type=int, default=20)
    sim.add_argument("--sigma", type=float, default=None)
    sim.add_argument("--sigma-x", type=float, default=1.0)
    sim.add_argument("--rho", type=float, default=0.0)
    sim.add_argument("--policy", choices=("reject_nonstationary", "verbatim"),
                     default="reject_nonstationary")
    sim.add_argument("--frozen", action="store_true",
                     help="freeze candidate coefficients at the build split")
    sim.add_argument("--out", default=None, help="output CSV path (stdout when omitted)")

    comb = sub.add_parser("combine", help="evaluate methods on forecast panels")
    comb.add_argument("--panel", action="append", required=True,
                      help="panel CSV; repeat for multiple horizons")
    comb.add_argument("--methods", type=_parse_methods, default=("sa", "bg", "linreg", "after", "mafter"))
    comb.add_argument("--warmup-frac", type=float, default=0.25)
    comb.add_argument("--out", default=None)

    orc = sub.add_parser("oracle", help="print asymptotic risk ratios and optimal weights")
    orc.add_argument("--case", type=int, choices=(1, 2), required=True)
    orc.add_argument("--beta", type=float, required=True)
    orc.add_argument("--sigma", type=float, default=1.0)
    orc.add_argument("--sigma-x", type=float, default=1.0)
    orc.add_argument("--rho", type=float, default=0.0)

    scr = sub.add_parser("screen", help="run the screening experiment from a JSON config")
    scr.add_argument("--config", required=True)
    return parser


def _emit(table, out: str | None) -> None:
    if out is None:
        sys.stdout.write(result_table_to_string(table))
    else:
        write_result_table(table, out)


def _cmd_simulate(args) -> int:
    from .dgp import sn_grid

    seed = int(os.environ.get("FCP_SEED", args.seed))
    sn_points = None
    if args.scenario.startswith("case"):
        sn_points = tuple(sn_grid(args.grid_points))
    config = ExperimentConfig(
        scenario=args.scenario,
        methods=args.methods,
        rolling_windows=args.rw,
        n_reps=args.reps,
        seed=seed,
        sn_points=sn_points,
        sigma=args.sigma,
        sigma_x=args.sigma_x,
        rho=args.rho,
        stationarity_policy=args.policy,
        frozen_coefficients=args.frozen,
    )
    _emit(run_experiment(config), args.out)
    return EXIT_OK


def _cmd_combine(args) -> int:
    panels = [parse_panel(p) for p in args.panel]
    table = run_panel_eval(panels, methods=args.methods, warmup_fraction=args.warmup_frac)
    _emit(table, args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    if args.case == 1:
        result = case1_limit(args.beta, args.sigma_x, args.sigma)
    else:
        result = case2_limit(args.beta, args.sigma_x, args.sigma, args.rho)
    print(f"case {args.case}: asymptotic risk ratio (forecast 1 / simple average) = {result.ratio:.6g}")
    if result.optimal_weight_restricted is not None:
        w = result.optimal_weight_restricted.w
        print(f"optimal sum-to-one weights: ({w[0]:g}, {w[1]:g})")
    if result.optimal_weight_unrestricted is not None:
        w = result.optimal_weight_unrestricted.w
        print(f"optimal unrestricted weights: ({w[0]:g}, {w[1]:g})")
    return EXIT_OK


def _cmd_screen(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    seed = int(os.environ.get("FCP_SEED", raw.get("seed", 0)))
    config = ExperimentConfig(
        scenario="screening",
        methods=tuple(raw.get("methods", ("sa", "bg", "after", "linreg"))),
        n_reps=int(raw.get("reps", 100)),
        seed=seed,
        x_percents=tuple(raw.get("x_percents", (10, 20, 40, 60, 80))),
        sigma=raw.get("sigma"),
        rho=float(raw.get("rho", 0.0)),
        screening_strategy=raw.get("strategy", "stepwise"),
    )
    table = run_experiment(config)
    _emit(table, raw.get("out"))
    if raw.get("subsets_out"):
        _dump_reference_subsets(config, raw["subsets_out"])
    return EXIT_OK


def _dump_reference_subsets(config: ExperimentConfig, path: str) -> None:
    # retained variable sets of replication 0, one list per retention level
    from .dgp import ScreeningConfig, generate_screening
    from .numerics import SeededGenerator
    from .screening import retain_top, retained_index_sets, screen_models

    scfg = ScreeningConfig(sigma=config.effective_sigma, rho=config.rho)
    X, y = generate_screening(scfg, SeededGenerator(config.seed).for_replication(0))
    models = screen_models(X[: scfg.screen_end], y[: scfg.screen_end], strategy=config.screening_strategy)
    payload = {
        str(x): retained_index_sets(retain_top(models, x)) for x in config.x_percents
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "combine":
            return _cmd_combine(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "screen":
            return _cmd_screen(args)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
