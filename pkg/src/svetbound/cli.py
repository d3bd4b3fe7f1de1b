"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 unphysical state, 4 filter
annihilation, 5 bisection refused on a non-monotone grid.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .analysis import certify_filtered, certify_unfiltered
from .errors import (
    FilterAnnihilationError,
    NonMonotonePredicateError,
    PhysicalityError,
    StateFormatError,
)
from .fileio import atomic_write_text
from .filtering import FilterTriple, apply_filter
from .scan import (
    ScanSpec,
    build_family_state,
    figure_data,
    optimize_filter,
    threshold_bisect,
    write_csv,
    write_json,
)
from .seesaw import OracleConfig, seesaw_max
from .states import load_state

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNPHYSICAL = 3
EXIT_ANNIHILATED = 4
EXIT_NON_MONOTONE = 5


def _num(value: float) -> str:
    return format(value, ".15e")


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _vec(v: np.ndarray) -> str:
    return " ".join(_num(float(x)) for x in v)


def _add_state_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=("chi", "ghz-noise"), help="built-in state family")
    parser.add_argument("--p", type=float, help="mixing weight of the family state")
    parser.add_argument("--theta", type=float, default=None, help="chi family angle, default pi/8")
    parser.add_argument("--state", metavar="PATH", help="JSON state file instead of a family")


def _resolve_state(args) -> tuple[np.ndarray, str]:
    if args.state is not None:
        if args.family is not None or args.p is not None or args.theta is not None:
            raise ValueError("--state excludes --family, --p and --theta")
        return load_state(args.state), args.state
    if args.family is None:
        raise ValueError("provide either --family with --p, or --state")
    if args.p is None:
        raise ValueError("--family requires --p")
    if args.theta is not None and args.family != "chi":
        raise ValueError("--theta applies to the chi family only")
    theta = args.theta if args.theta is not None else math.pi / 8
    rho = build_family_state(args.family, args.p, theta)
    label = f"{args.family} p={args.p:g}"
    if args.family == "chi":
        label += f" theta={theta:g}"
    return rho, label


def _print_settings(settings) -> None:
    for name, vec in (
        ("a", settings.a),
        ("a_prime", settings.a_prime),
        ("b", settings.b),
        ("b_prime", settings.b_prime),
        ("c", settings.c),
        ("c_prime", settings.c_prime),
    ):
        print(f"{name}: {_vec(vec)}")


def _settings_dict(settings) -> dict:
    return {
        "a": settings.a.tolist(),
        "a_prime": settings.a_prime.tolist(),
        "b": settings.b.tolist(),
        "b_prime": settings.b_prime.tolist(),
        "c": settings.c.tolist(),
        "c_prime": settings.c_prime.tolist(),
    }


def _cmd_bound(args) -> int:
    rho, label = _resolve_state(args)
    report = certify_unfiltered(
        rho, oracle_config=OracleConfig(seed=args.seed), seed=args.seed
    )
    print(f"state: {label}")
    print(f"lambda1: {_num(report.lambda1)}")
    print(f"degeneracy: {report.degeneracy}")
    print(f"bound: {_num(report.bound)}")
    print(f"tight: {_flag(report.tight)}")
    print(f"achieved: {_num(report.achieved)}")
    print(f"violates: {_flag(report.violates)}")
    _print_settings(report.settings)
    if args.json:
        payload = {
            "state": label,
            "lambda1": report.lambda1,
            "degeneracy": report.degeneracy,
            "bound": report.bound,
            "tight": report.tight,
            "achieved": report.achieved,
            "violates": report.violates,
            "settings": _settings_dict(report.settings),
        }
        atomic_write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote json: {args.json}")
    return EXIT_OK


def _cmd_filter(args) -> int:
    rho, label = _resolve_state(args)
    explicit = [v is not None for v in (args.x, args.y, args.z)]
    if args.optimize:
        if any(explicit):
            raise ValueError("--optimize excludes -x, -y and -z")
        spec = ScanSpec(seed=args.seed)
        params, _ = optimize_filter(rho, spec)
        triple = params.triple()
        x, y, z = params.x, params.y, params.z
    else:
        if not all(explicit):
            raise ValueError("give all of -x, -y, -z, or --optimize")
        x, y, z = args.x, args.y, args.z
        triple = FilterTriple.diagonal(x, y, z)
    _, n_literal = apply_filter(rho, triple)
    fa, report = certify_filtered(
        rho, triple, oracle_config=OracleConfig(seed=args.seed), seed=args.seed
    )
    print(f"state: {label}")
    print(f"filter: x={_num(x)} y={_num(y)} z={_num(z)}")
    print(f"n: {_num(n_literal)}")
    print(f"lambda1_prime: {_num(fa.lambda1_prime)}")
    print(f"bound: {_num(report.bound)}")
    print(f"tight: {_flag(report.tight)}")
    print(f"achieved: {_num(report.achieved)}")
    print(f"violates: {_flag(report.violates)}")
    _print_settings(report.settings)
    if args.json:
        payload = {
            "state": label,
            "filter": {"x": x, "y": y, "z": z},
            "n": n_literal,
            "lambda1_prime": fa.lambda1_prime,
            "bound": report.bound,
            "tight": report.tight,
            "achieved": report.achieved,
            "violates": report.violates,
            "settings": _settings_dict(report.settings),
        }
        atomic_write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote json: {args.json}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    rho, label = _resolve_state(args)
    config = OracleConfig(restarts=args.restarts, max_sweeps=args.sweeps, seed=args.seed)
    result = seesaw_max(rho, config)
    print(f"state: {label}")
    print(f"value: {_num(result.value)}")
    print(f"converged: {_flag(result.converged)}")
    print(f"sweeps: {result.sweeps_used}")
    _print_settings(result.settings)
    if args.json:
        payload = {
            "state": label,
            "value": result.value,
            "converged": result.converged,
            "sweeps": result.sweeps_used,
            "settings": _settings_dict(result.settings),
        }
        atomic_write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote json: {args.json}")
    return EXIT_OK


def _parse_p_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--p-grid must look like start:end:step")
    try:
        start, end, step = (float(s) for s in parts)
    except ValueError as exc:
        raise ValueError(f"--p-grid has a non-numeric part: {text!r}") from exc
    if not (0.0 <= start < end <= 1.0) or step <= 0.0:
        raise ValueError("--p-grid needs 0 <= start < end <= 1 and step > 0")
    return np.round(np.arange(start, end + step / 2.0, step), 12)


def _cmd_scan(args) -> int:
    if args.figure is not None:
        if args.family is not None or args.mode is not None:
            raise ValueError("--figure excludes --family and --mode")
        family = "chi" if args.figure == "fig1" else "ghz-noise"
        spec_kwargs = {"family": family, "seed": args.seed}
        if args.p_grid is not None:
            spec_kwargs["p_grid"] = _parse_p_grid(args.p_grid)
        report = figure_data(args.figure, ScanSpec(**spec_kwargs))
        print(f"family: {report.family}")
        unf = report.p_violation_unfiltered
        filt = report.p_violation_filtered
        print(f"p_violation_unfiltered: {'none' if unf is None else _num(unf)}")
        print(f"p_violation_filtered: {'none' if filt is None else _num(filt)}")
        if report.activation_window is None:
            print("activation_window: none")
        else:
            lo, hi = report.activation_window
            print(f"activation_window: {_num(lo)} {_num(hi)}")
        if args.csv:
            write_csv(report, args.csv)
            print(f"wrote csv: {args.csv}")
        if args.json:
            write_json(report, args.json)
            print(f"wrote json: {args.json}")
        return EXIT_OK

    if args.family is None or args.mode is None:
        raise ValueError("scan needs --figure, or --family with --mode")
    if args.csv:
        raise ValueError("--csv applies to --figure scans only")
    spec_kwargs = {"family": args.family, "seed": args.seed}
    if args.p_grid is not None:
        spec_kwargs["p_grid"] = _parse_p_grid(args.p_grid)
    spec = ScanSpec(**spec_kwargs)
    threshold = threshold_bisect(spec, args.mode)
    print(f"family: {spec.family}")
    print(f"mode: {args.mode}")
    print(f"threshold: {'none' if threshold is None else _num(threshold)}")
    if args.json:
        payload = {
            "family": spec.family,
            "mode": args.mode,
            "threshold": threshold,
        }
        atomic_write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote json: {args.json}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svetbound",
        description="Singular-value bounds on the Svetlichny expectation, with local filtering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="certified unfiltered bound of a state")
    _add_state_source(p_bound)
    p_bound.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p_bound.set_defaults(func=_cmd_bound)

    p_filter = sub.add_parser("filter", help="filtered bound under diagonal filters")
    _add_state_source(p_filter)
    p_filter.add_argument("-x", type=float, default=None, help="filter strength for party A")
    p_filter.add_argument("-y", type=float, default=None, help="filter strength for party B")
    p_filter.add_argument("-z", type=float, default=None, help="filter strength for party C")
    p_filter.add_argument("--optimize", action="store_true", help="search for the best strengths")
    p_filter.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p_filter.set_defaults(func=_cmd_filter)

    p_oracle = sub.add_parser("oracle", help="see-saw lower bound on the maximal expectation")
    _add_state_source(p_oracle)
    p_oracle.add_argument("--restarts", type=int, default=100)
    p_oracle.add_argument("--sweeps", type=int, default=500)
    p_oracle.add_argument("--json", metavar="PATH", help="also write the result as JSON")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_scan = sub.add_parser("scan", help="activation scan or threshold bisection over p")
    p_scan.add_argument("--figure", choices=("fig1", "fig2"), help="built-in activation scan")
    p_scan.add_argument("--family", choices=("chi", "ghz-noise"))
    p_scan.add_argument("--mode", choices=("unfiltered", "filtered"))
    p_scan.add_argument("--p-grid", metavar="START:END:STEP", help="grid over p, end inclusive")
    p_scan.add_argument("--csv", metavar="PATH", help="write per-p records as CSV")
    p_scan.add_argument("--json", metavar="PATH", help="write the report as JSON")
    p_scan.set_defaults(func=_cmd_scan)

    for sp in (p_bound, p_filter, p_oracle, p_scan):
        sp.add_argument("--seed", type=int, default=42, help="seed for every stochastic search")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StateFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FilterAnnihilationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANNIHILATED
    except PhysicalityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except NonMonotonePredicateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for lo, hi in exc.brackets:
            print(f"bracket: {_num(lo)} {_num(hi)}", file=sys.stderr)
        return EXIT_NON_MONOTONE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
