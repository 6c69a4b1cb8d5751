"""Command-line entry point.

One subcommand per task; flags mirror config-file keys one-to-one (a
JSON file passed with ``--config`` wins conflicts, with a warning on
stderr).  Exit codes: 0 success, 1 configuration/validation error,
2 resource error.  CSV results go to stdout unless ``--out`` is given,
in which case the file is written atomically together with a JSON
metadata sidecar recording the full parameter set and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from . import experiments
from .analytic import (
    ModelParams,
    escape_band,
    lambda_critical,
    profile_minimizer,
    richardson_speeds,
)
from .errors import ConfigError, EscapeLabError, ResourceError
from .escape import Budget, InitialConfig
from .escape import run as escape_run
from .rng import derive_seed
from .tree import TreeParams, format_vertex, parse_vertex
from .richardson import sample_field

_TAG_RICHARDSON_RUN = 7
_TAG_ESCAPE_RUN = 8


class _Parser(argparse.ArgumentParser):
    """Argparse variant whose usage errors follow the exit-code contract
    (1 for bad flags, not argparse's default 2)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_vertex_set(text: str, params: TreeParams) -> tuple:
    """Comma-separated addresses; an empty string denotes {root}."""
    return tuple(parse_vertex(part.strip(), params) for part in text.split(","))


def _vertices_from_config(value, params: TreeParams) -> tuple:
    if isinstance(value, str):
        return _parse_vertex_set(value, params)
    out = []
    for item in value:
        if isinstance(item, str):
            out.append(parse_vertex(item, params))
        else:
            out.append(tuple(int(x) for x in item))
    return tuple(out)


def _print_or_save(args, header, rows, metadata) -> None:
    if getattr(args, "out", None):
        experiments.save_table(args.out, header, rows, metadata)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([experiments._fmt(v) for v in row])


def _seed_metadata(args) -> dict:
    meta = {"seed": args.seed if args.seed is not None else 0}
    if args.seed is None:
        meta["seed_defaulted"] = True
    return meta


def _resolved_seed(args) -> int:
    return args.seed if args.seed is not None else 0


# ---------------------------------------------------------------------------
# Config-file merging
# ---------------------------------------------------------------------------

_CONFIG_ALIASES = {
    "lambda": "lam",
    "A0": "a0",
    "B0": "b0",
}


def _merge_config(args: argparse.Namespace) -> None:
    path = args.config
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    flat = dict(data)
    budget = flat.pop("budget", None)
    if budget is not None:
        if not isinstance(budget, dict):
            raise ConfigError("config key 'budget' must be an object")
        for key, value in budget.items():
            flat[key] = value
    for key, value in flat.items():
        dest = _CONFIG_ALIASES.get(key, key.replace("-", "_"))
        if not hasattr(args, dest) or dest in ("config", "func", "command"):
            raise ConfigError(f"config key {key!r} is not valid for this command")
        current = getattr(args, dest)
        if current is not None and current is not False and current != value:
            print(
                f"warning: config file overrides --{dest.replace('_', '-')} "
                f"({current!r} -> {value!r})",
                file=sys.stderr,
            )
        setattr(args, dest, value)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_analytic(args) -> int:
    params = ModelParams(args.d, args.lam)
    speeds = richardson_speeds(args.d)
    c0, g_min = profile_minimizer(params)
    band = escape_band(params)
    header = ["d", "lam", "lambda_critical", "a", "b", "c0", "g_min", "r1", "r2"]
    rows = [
        (
            args.d,
            args.lam,
            lambda_critical(args.d),
            speeds.a,
            speeds.b,
            c0,
            g_min,
            band.r1 if band else None,
            band.r2 if band else None,
        )
    ]
    _print_or_save(args, header, rows, {"d": args.d, "lam": args.lam, **_seed_metadata(args)})
    return 0


def _cmd_run_richardson(args) -> int:
    params = TreeParams(args.d)
    n_list = args.n_list or [args.n_max]
    if max(n_list) > args.n_max:
        raise ConfigError(
            f"requested level {max(n_list)} exceeds --n-max {args.n_max}"
        )
    seed = _resolved_seed(args)
    header = ["replica", "n", "c", "t", "occupied", "vacant", "elapsed"]
    rows = []
    for rep in range(args.replicas):
        rep_seed = derive_seed(seed, _TAG_RICHARDSON_RUN, rep)
        field = sample_field(params, args.rate, args.n_max, rep_seed)
        for n in n_list:
            for c in args.c_grid:
                t = n / c
                started = time.perf_counter() if args.timing else None
                occ = field.count_occupied(n, t)
                elapsed = (
                    time.perf_counter() - started if started is not None else None
                )
                rows.append(
                    (rep, n, c, t, occ, field.count_vacant(n, t), elapsed)
                )
    meta = {
        "d": args.d,
        "rate": args.rate,
        "n_max": args.n_max,
        "n_list": list(n_list),
        "c_grid": list(args.c_grid),
        "replicas": args.replicas,
        **_seed_metadata(args),
    }
    _print_or_save(args, header, rows, meta)
    return 0


def _cmd_run_escape(args) -> int:
    if args.d is None or args.lam is None:
        raise ConfigError("run-escape needs d and lambda (as flags or config keys)")
    tree = TreeParams(args.d)
    params = ModelParams(args.d, args.lam)
    a0 = _vertices_from_config(args.a0, tree) if args.a0 is not None else ((),)
    b0 = _vertices_from_config(args.b0, tree) if args.b0 is not None else ()
    cfg = InitialConfig(a0=a0, b0=b0)
    budget = Budget(
        max_time=args.max_time,
        max_level=args.max_level,
        max_events=args.max_events,
    )
    checkpoints = tuple(args.checkpoints or ())
    if checkpoints and not args.out:
        raise ConfigError("checkpoint output needs --out for the CSV file")
    seed = _resolved_seed(args)
    header = ["replica", "t", "n", "m_n", "size_a", "max_level_a", "min_distance_a_to_b"]
    rows = []
    for rep in range(args.replicas):
        outcome = escape_run(
            cfg,
            params,
            budget,
            seed=derive_seed(seed, _TAG_ESCAPE_RUN, rep),
            checkpoints=checkpoints,
            engine=args.engine,
            require_nontrivial=args.require_nontrivial,
            escape_heuristic=args.escape_heuristic,
            escape_delta=args.escape_delta,
        )
        summary = (
            f"replica={rep} status={outcome.status} stop={outcome.stop_reason} "
            f"clock={outcome.clock:.6g} events={outcome.events} "
            f"type1={outcome.n_type1} type2={outcome.n_type2} "
            f"max_level={outcome.max_level_type1}"
        )
        if outcome.extinction_time is not None:
            summary += f" extinction_time={outcome.extinction_time:.6g}"
        if outcome.escape_declared is not None:
            summary += f" escape_declared={outcome.escape_declared}"
        print(summary)
        for cp in outcome.checkpoints:
            if cp.level_counts:
                for n, count in cp.level_counts:
                    rows.append(
                        (rep, cp.t, n, count, cp.n_type1, cp.max_level, cp.min_distance_to_two)
                    )
            else:
                rows.append((rep, cp.t, -1, 0, 0, -1, None))
    if args.out:
        meta = {
            "d": args.d,
            "lambda": args.lam,
            "A0": [format_vertex(v) for v in cfg.a0],
            "B0": [format_vertex(v) for v in cfg.b0],
            "budget": {
                "max_time": args.max_time,
                "max_level": args.max_level,
                "max_events": args.max_events,
            },
            "checkpoints": list(checkpoints),
            "replicas": args.replicas,
            **_seed_metadata(args),
        }
        experiments.save_table(args.out, header, rows, meta)
        print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _survival_budget(args) -> Budget:
    return Budget(
        max_time=args.max_time,
        max_level=args.max_level,
        max_events=args.max_events,
    )


def _cmd_survival_scan(args) -> int:
    tree = TreeParams(args.d)
    a0 = _vertices_from_config(args.a0, tree) if args.a0 is not None else ((),)
    b0 = _vertices_from_config(args.b0, tree) if args.b0 is not None else ((0,),)
    cfg = experiments.SurvivalScanConfig(
        d=args.d,
        lam_grid=tuple(args.lam_grid),
        initial=InitialConfig(a0=a0, b0=b0),
        replicas=args.replicas,
        budget=_survival_budget(args),
        master_seed=_resolved_seed(args),
        engine=args.engine,
        workers=args.workers,
    )
    curve = experiments.survival_scan(cfg)
    meta = {
        "d": args.d,
        "lam_grid": list(args.lam_grid),
        "replicas": args.replicas,
        "max_level": args.max_level,
        "max_events": args.max_events,
        "max_time": args.max_time,
        "note": "survival proxy is alive-at-budget; finite budgets bias toward survival",
        **_seed_metadata(args),
    }
    _print_or_save(args, curve.HEADER, curve.csv_rows(), meta)
    return 0


def _cmd_critical_estimate(args) -> int:
    estimate = experiments.critical_estimate(
        d=args.d,
        bracket=tuple(args.bracket),
        replicas=args.replicas,
        budget=_survival_budget(args),
        tol=args.tol,
        master_seed=_resolved_seed(args),
        engine=args.engine,
        workers=args.workers,
    )
    print(
        f"estimated critical interval: [{estimate.lam_low:.6g}, {estimate.lam_high:.6g}] "
        f"(threshold {estimate.threshold:.4g}, flagged={estimate.flagged}); "
        "Monte Carlo localisation with finite-budget bias, not a hypothesis test"
    )
    meta = {
        "d": args.d,
        "bracket": list(args.bracket),
        "replicas": args.replicas,
        "tol": args.tol,
        "interval": [estimate.lam_low, estimate.lam_high],
        "threshold": estimate.threshold,
        "flagged": estimate.flagged,
        **_seed_metadata(args),
    }
    _print_or_save(args, estimate.HEADER, estimate.csv_rows(), meta)
    return 0


def _cmd_profile_estimate(args) -> int:
    tree = TreeParams(args.d)
    a0 = _vertices_from_config(args.a0, tree) if args.a0 is not None else ((),)
    b0 = _vertices_from_config(args.b0, tree) if args.b0 is not None else ((0,),)
    cfg = experiments.ProfileConfig(
        d=args.d,
        lam=args.lam,
        initial=InitialConfig(a0=a0, b0=b0),
        c_grid=tuple(args.c_grid),
        n_list=tuple(args.n_list),
        replicas=args.replicas,
        max_events=args.max_events,
        master_seed=_resolved_seed(args),
        engine=args.engine,
        workers=args.workers,
    )
    table = experiments.profile_estimate(cfg)
    meta = {
        "d": args.d,
        "lambda": args.lam,
        "c_grid": list(args.c_grid),
        "n_list": list(args.n_list),
        "replicas": args.replicas,
        "max_events": args.max_events,
        "note": "exponents conditioned on surviving replicas",
        **_seed_metadata(args),
    }
    _print_or_save(args, table.HEADER, table.csv_rows(), meta)
    return 0


def _cmd_containment(args) -> int:
    table = experiments.containment_experiment(
        d=args.d,
        lam=args.lam,
        t_list=tuple(args.t_list),
        replicas=args.replicas,
        master_seed=_resolved_seed(args),
        workers=args.workers,
    )
    meta = {
        "d": args.d,
        "lambda": args.lam,
        "t_list": list(args.t_list),
        "replicas": args.replicas,
        **_seed_metadata(args),
    }
    _print_or_save(args, table.HEADER, table.csv_rows(), meta)
    return 0


def _cmd_exclusive_count(args) -> int:
    result = experiments.exclusive_count_experiment(
        d=args.d,
        lam=args.lam,
        n=args.n,
        c=args.c,
        replicas=args.replicas,
        master_seed=_resolved_seed(args),
        workers=args.workers,
    )
    meta = {
        "d": args.d,
        "lambda": args.lam,
        "n": args.n,
        "c": args.c,
        "replicas": args.replicas,
        **_seed_metadata(args),
    }
    _print_or_save(args, result.HEADER, result.csv_rows(), meta)
    return 0


def _cmd_gw_offspring(args) -> int:
    if args.escape_variant:
        if args.lam is None or args.c is None or not args.m_list:
            raise ConfigError(
                "--escape-variant needs --lambda, --c, and --m-list"
            )
        table = experiments.escape_offspring_trend(
            d=args.d,
            lam=args.lam,
            c=args.c,
            m_list=tuple(args.m_list),
            samples=args.samples,
            master_seed=_resolved_seed(args),
        )
        header, rows = table.HEADER, table.csv_rows()
        meta = {
            "d": args.d,
            "lambda": args.lam,
            "c": args.c,
            "m_list": list(args.m_list),
            "samples": args.samples,
            **_seed_metadata(args),
        }
    else:
        if args.m is None or args.threshold is None:
            raise ConfigError("gw-offspring needs --m and --threshold")
        result = experiments.gw_offspring_experiment(
            d=args.d,
            m=args.m,
            threshold=args.threshold,
            samples=args.samples,
            master_seed=_resolved_seed(args),
        )
        header, rows = result.HEADER, result.csv_rows()
        meta = {
            "d": args.d,
            "m": args.m,
            "threshold": args.threshold,
            "samples": args.samples,
            **_seed_metadata(args),
        }
    _print_or_save(args, header, rows, meta)
    return 0


def _cmd_plot(args) -> int:
    from .plotting import emit_plot

    out = emit_plot(args.csv, args.kind, args.out, d=args.d)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub, seed=True, workers=False, engine=False, out=True):
    if seed:
        sub.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    if workers:
        sub.add_argument(
            "--workers",
            type=int,
            default=None,
            help="parallel workers (default: available parallelism; "
            "ESCAPE_LAB_WORKERS overrides)",
        )
    if engine:
        sub.add_argument(
            "--engine",
            choices=["auto", "compiled", "python"],
            default=None,
            help="event-engine backend (default auto)",
        )
    if out:
        sub.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    sub.add_argument("--config", default=None, help="JSON config file (wins over flags)")


def _add_budget(sub, max_level_default=None, max_events_default=experiments.DEFAULT_EVENT_GUARD):
    sub.add_argument("--max-time", type=float, default=None, help="time budget")
    sub.add_argument(
        "--max-level", type=int, default=max_level_default, help="level budget"
    )
    sub.add_argument(
        "--max-events",
        type=int,
        default=max_events_default,
        help="event budget (guard against runaway clusters)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="escape-lab",
        description="Growth and two-type competition processes on homogeneous trees",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("analytic", help="closed-form quantities for (d, lambda)")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    _add_common(sub)
    sub.set_defaults(func=_cmd_analytic)

    sub = subs.add_parser("run-richardson", help="single-type growth level counts")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--rate", type=float, default=1.0)
    sub.add_argument("--n-max", type=int, required=True)
    sub.add_argument("--n-list", type=int, nargs="+", default=None)
    sub.add_argument("--c-grid", type=float, nargs="+", required=True)
    sub.add_argument("--replicas", type=int, default=1)
    sub.add_argument(
        "--timing",
        action="store_true",
        help="fill the elapsed column (off by default so reruns are byte-identical)",
    )
    _add_common(sub)
    sub.set_defaults(func=_cmd_run_richardson)

    sub = subs.add_parser("run-escape", help="budgeted two-type competition runs")
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--lambda", dest="lam", type=float, default=None)
    sub.add_argument("--a0", default=None, help='comma-separated addresses ("" = root)')
    sub.add_argument("--b0", default=None, help="comma-separated addresses")
    _add_budget(sub)
    sub.add_argument("--checkpoints", type=float, nargs="+", default=None)
    sub.add_argument("--replicas", type=int, default=1)
    sub.add_argument("--require-nontrivial", action="store_true")
    sub.add_argument("--escape-heuristic", action="store_true")
    sub.add_argument("--escape-delta", type=float, default=0.5)
    _add_common(sub, engine=True)
    sub.set_defaults(func=_cmd_run_escape)

    sub = subs.add_parser("survival-scan", help="survival proxy over a rate grid")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--lambda-grid", dest="lam_grid", type=float, nargs="+", required=True)
    sub.add_argument("--a0", default=None)
    sub.add_argument("--b0", default=None)
    sub.add_argument("--replicas", type=int, default=200)
    _add_budget(sub, max_level_default=30)
    _add_common(sub, workers=True, engine=True)
    sub.set_defaults(func=_cmd_survival_scan)

    sub = subs.add_parser("critical-estimate", help="bisect the survival crossover")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--bracket", type=float, nargs=2, required=True)
    sub.add_argument("--replicas", type=int, default=400)
    sub.add_argument("--tol", type=float, default=0.5)
    _add_budget(sub, max_level_default=40)
    _add_common(sub, workers=True, engine=True)
    sub.set_defaults(func=_cmd_critical_estimate)

    sub = subs.add_parser("profile-estimate", help="growth exponents on a (c, n) grid")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_argument("--a0", default=None)
    sub.add_argument("--b0", default=None)
    sub.add_argument("--c-grid", type=float, nargs="+", required=True)
    sub.add_argument("--n-list", type=int, nargs="+", required=True)
    sub.add_argument("--replicas", type=int, default=100)
    sub.add_argument(
        "--max-events", type=int, default=experiments.DEFAULT_EVENT_GUARD
    )
    _add_common(sub, workers=True, engine=True)
    sub.set_defaults(func=_cmd_profile_estimate)

    sub = subs.add_parser("containment", help="slow-in-fast cluster violations")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_argument("--t-list", type=float, nargs="+", required=True)
    sub.add_argument("--replicas", type=int, default=200)
    _add_common(sub, workers=True)
    sub.set_defaults(func=_cmd_containment)

    sub = subs.add_parser("exclusive-count", help="slow-not-fast counts vs oracle")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--c", type=float, required=True)
    sub.add_argument("--replicas", type=int, default=500)
    _add_common(sub, workers=True)
    sub.set_defaults(func=_cmd_exclusive_count)

    sub = subs.add_parser("gw-offspring", help="block offspring means vs oracle")
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--threshold", type=float, default=None)
    sub.add_argument("--samples", type=int, default=10_000)
    sub.add_argument("--escape-variant", action="store_true")
    sub.add_argument("--lambda", dest="lam", type=float, default=None)
    sub.add_argument("--c", type=float, default=None)
    sub.add_argument("--m-list", type=int, nargs="+", default=None)
    _add_common(sub)
    sub.set_defaults(func=_cmd_gw_offspring)

    sub = subs.add_parser("plot", help="render a chart from an experiment CSV")
    sub.add_argument("--csv", required=True)
    sub.add_argument("--kind", choices=["survival", "profile"], required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--config", default=None)
    sub.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _merge_config(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 2
    except EscapeLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
