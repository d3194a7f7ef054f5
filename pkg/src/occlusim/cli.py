"""Command-line front end: scenario ingestion, planning, simulation,
verification, and parameter sweeps with CSV/JSON/PNG report output."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import fixtures
from .limiter import write_limits_csv
from .model import ScenarioError, load_scenario, preset, validate
from .profiler import (
    InfeasibleEntryError,
    compute_metrics,
    metrics_to_dict,
    plan_for_scenario,
    write_profile_csv,
)
from .simkernel import adversary_sweep, report_to_dict, simulate, write_events_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_COLLISIONS = 3

# accepted --override keys -> AssumptionSet fields
_OVERRIDE_KEYS = {
    "v_O": "pedestrian_speed",
    "pedestrian_speed": "pedestrian_speed",
    "t_R": "reaction_time",
    "reaction_time": "reaction_time",
    "a_max": "max_decel",
    "max_decel": "max_decel",
    "w_O": "human_width",
    "human_width": "human_width",
    "a_plan_acc": "plan_accel",
    "plan_accel": "plan_accel",
    "a_plan_dec": "plan_decel",
    "plan_decel": "plan_decel",
}


class _Parser(argparse.ArgumentParser):
    # usage problems exit with code 1 per the exit-code contract
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    scenario_path: str
    preset_name: str | None
    overrides: dict
    ds: float
    dt: float
    out_dir: Path
    formats: set


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="occlusim",
        description="Dynamic speed limits for passing parked vehicles that may "
        "hide a crossing pedestrian: plan profiles, simulate, and verify the "
        "collision-avoidance guarantee.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario JSON file, or the name of a shipped fixture")
        p.add_argument("--preset", default=None,
                       help="assumption preset replacing the scenario's (example|extreme)")
        p.add_argument("--override", action="append", default=[], metavar="K=V",
                       help="assumption override, repeatable (e.g. v_O=3.2)")
        p.add_argument("--ds", type=float, default=0.1, help="limit grid step, m")
        p.add_argument("--dt", type=float, default=0.01, help="simulation time step, s")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", default="csv,json,png",
                       help="comma list of output formats: csv,json,png")

    p_plan = sub.add_parser("plan", help="compute the limit and velocity profile")
    common(p_plan)
    p_plan.add_argument("--no-occlusions", action="store_true",
                        help="posted limit only (no occlusion treatment)")

    p_sim = sub.add_parser("simulate", help="time-stepped traversal of the planned profile")
    common(p_sim)

    p_ver = sub.add_parser("verify", help="adversarial pedestrian-emergence sweep")
    common(p_ver)
    p_ver.add_argument("--grid", type=float, default=0.05,
                       help="emergence-time grid step, s")
    p_ver.add_argument("--posted-only", action="store_true",
                       help="negative control: ego ignores the dynamic limit")

    p_swp = sub.add_parser("sweep-params", help="metrics across an assumption grid")
    common(p_swp)
    p_swp.add_argument("--sweep", action="append", default=[], metavar="K=V1,V2,...",
                       help="assumption axis, repeatable; grid is the cartesian product")
    return parser


def _parse_overrides(parser, pairs):
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or key not in _OVERRIDE_KEYS:
            parser.error(f"bad --override {pair!r}; known keys: {sorted(set(_OVERRIDE_KEYS))}")
        try:
            out[_OVERRIDE_KEYS[key]] = float(value)
        except ValueError:
            parser.error(f"bad --override value in {pair!r}")
    return out


def _resolve_scenario(parser, path_arg: str):
    path = Path(path_arg)
    if path.is_file():
        return path
    packaged = fixtures.fixture_path(path_arg)
    if packaged is not None:
        return packaged
    parser.error(f"scenario file not found: {path_arg}")


def _load(parser, args):
    path = _resolve_scenario(parser, args.scenario)
    scenario = load_scenario(path, check=False)
    if args.preset:
        scenario = replace(scenario, assumptions=preset(args.preset))
    return validate(scenario)


def _formats(parser, value: str) -> set:
    formats = {f.strip() for f in value.split(",") if f.strip()}
    unknown = formats - {"csv", "json", "png"}
    if unknown:
        parser.error(f"unknown output formats: {sorted(unknown)}")
    return formats


def _write_json(payload, path):
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _print_metrics_block(metrics_dict):
    for key, value in metrics_dict.items():
        if key == "passing":
            continue
        print(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")


def _plan_pipeline(scenario, ds, include_occlusions=True):
    return plan_for_scenario(scenario, ds=ds, include_occlusions=include_occlusions)


def cmd_plan(args, parser) -> int:
    scenario = _load(parser, args)
    if args.override:
        overrides = _parse_overrides(parser, args.override)
        scenario = replace(scenario, assumptions=scenario.assumptions.override(**overrides))
    formats = _formats(parser, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    limits, profile = _plan_pipeline(
        scenario, args.ds, include_occlusions=not getattr(args, "no_occlusions", False)
    )
    metrics = metrics_to_dict(compute_metrics(profile, scenario))
    if "csv" in formats:
        write_limits_csv(limits, out / "limits.csv")
        write_profile_csv(profile, out / "profile.csv")
    if "json" in formats:
        _write_json(metrics, out / "metrics.json")
    if "png" in formats:
        from . import report
        report.plot_profile(profile, scenario, out / "profile.png")
    _print_metrics_block(metrics)
    return EXIT_OK


def cmd_simulate(args, parser) -> int:
    scenario = _load(parser, args)
    if args.override:
        overrides = _parse_overrides(parser, args.override)
        scenario = replace(scenario, assumptions=scenario.assumptions.override(**overrides))
    formats = _formats(parser, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    _, profile = _plan_pipeline(scenario, args.ds)
    states = simulate(scenario, profile, dt=args.dt)
    if "csv" in formats:
        with open(out / "timeseries.csv", "w") as fh:
            fh.write("t_s,s_m,v_mps,mode\n")
            for st in states:
                fh.write(f"{st.t:.9g},{st.s:.9g},{st.v:.9g},{st.mode}\n")
    if "json" in formats:
        _write_json({"travel_time_s": states[-1].t, "dt_s": args.dt},
                    out / "simulation.json")
    if "png" in formats:
        from . import report
        report.plot_timeseries(states, profile, scenario, out / "timeseries.png")
    print(f"travel_time_s: {states[-1].t:.6g}")
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    scenario = _load(parser, args)
    formats = _formats(parser, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    # The profile is planned under the scenario assumptions; --override models
    # reality deviating from them (actual pedestrian speed, reaction, braking).
    actual = scenario.assumptions.override(**_parse_overrides(parser, args.override))
    _, profile = _plan_pipeline(scenario, args.ds,
                                include_occlusions=not args.posted_only)
    report_obj = adversary_sweep(
        scenario, profile, time_step=args.grid, dt=args.dt, actual=actual
    )
    payload = report_to_dict(report_obj)
    if "json" in formats:
        _write_json(payload, out / "sweep.json")
    if "csv" in formats:
        write_events_csv(report_obj.events, out / "events.csv")
    if "png" in formats:
        from . import report
        report.plot_sweep(report_obj.events, out / "sweep.png")
    print(f"events: {report_obj.n_events}  collisions: {report_obj.collisions}  "
          f"worst_stop_margin_m: {report_obj.worst_stop_margin}")
    return EXIT_OK if report_obj.collisions == 0 else EXIT_COLLISIONS


def cmd_sweep_params(args, parser) -> int:
    scenario = _load(parser, args)
    formats = _formats(parser, args.format)
    axes = []
    for axis in args.sweep:
        key, sep, values = axis.partition("=")
        if not sep or key not in _OVERRIDE_KEYS:
            parser.error(f"bad --sweep {axis!r}")
        try:
            parsed = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            parser.error(f"bad --sweep values in {axis!r}")
        if not parsed:
            parser.error(f"empty --sweep axis {axis!r}")
        axes.append((_OVERRIDE_KEYS[key], parsed))
    if not axes:
        parser.error("sweep-params requires at least one --sweep axis")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    keys = [key for key, _ in axes]
    rows = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        assumptions = scenario.assumptions.override(**dict(zip(keys, combo)))
        sc = replace(scenario, assumptions=assumptions)
        _, profile = _plan_pipeline(sc, args.ds)
        metrics = compute_metrics(profile, sc)
        row = dict(zip(keys, combo))
        row.update(
            min_limit_mps=metrics.min_limit,
            travel_time_s=metrics.travel_time,
            avg_speed_route_mps=metrics.avg_speed_route,
            avg_speed_passing_mps=metrics.avg_speed_passing,
        )
        rows.append(row)

    metric_cols = ["min_limit_mps", "travel_time_s",
                   "avg_speed_route_mps", "avg_speed_passing_mps"]
    if "csv" in formats:
        with open(out / "sweep_params.csv", "w") as fh:
            fh.write(",".join(keys + metric_cols) + "\n")
            for row in rows:
                fh.write(",".join(f"{row[c]:.9g}" for c in keys + metric_cols) + "\n")
    if "json" in formats:
        _write_json(rows, out / "sweep_params.json")
    if "png" in formats:
        from . import report
        report.plot_param_sweep(rows, keys, out / "sweep_params.png")
    for row in rows:
        point = ", ".join(f"{k}={row[k]:g}" for k in keys)
        print(f"{point}: travel_time_s={row['travel_time_s']:.6g} "
              f"min_limit_mps={row['min_limit_mps']:.6g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "plan": cmd_plan,
        "simulate": cmd_simulate,
        "verify": cmd_verify,
        "sweep-params": cmd_sweep_params,
    }
    try:
        return handlers[args.command](args, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except ScenarioError as exc:
        for violation in exc.violations:
            sys.stderr.write(f"scenario error: {violation}\n")
        return EXIT_INVALID
    except InfeasibleEntryError as exc:
        sys.stderr.write(f"infeasible profile: {exc}\n")
        return EXIT_INVALID
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
