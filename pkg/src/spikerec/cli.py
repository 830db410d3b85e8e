"""Command-line driver for the recovery benchmarks.

Usage:
    recover --preset rational --method lcurve --method pinv \
            --sigma 0.1 --seeds 20 --out results --format csv

Exit codes: 0 on success, 1 on usage errors, 2 if any run recorded a
fatal stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import UnknownPreset
from .experiments import emit_report, load_preset, make_method, run_sweep
from .kernels import DEFAULT_BETA, PRESET_IDS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="recover", description=__doc__)
    p.add_argument("--preset", required=True, choices=PRESET_IDS)
    p.add_argument(
        "--method",
        action="append",
        choices=("pinv", "lcurve", "fixed-gamma"),
        help="may be given more than once to compare methods on shared noise",
    )
    p.add_argument("--sigma", action="append", type=float, help="noise level; repeatable")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--seeds", type=int, default=20, help="use seeds 0..N-1")
    group.add_argument("--seed-list", type=int, nargs="+", help="explicit seeds")
    p.add_argument("--l", type=int, default=None, help="Krylov parameter (default n_x+2)")
    p.add_argument("--tol-factor", type=float, default=1e-4)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--beta", type=float, default=None, help="Matsubara beta (spectral)")
    p.add_argument("--grid-size", type=int, default=200, help="L-curve gamma grid points")
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=("csv", "json", "plotdata"), default="csv")
    p.add_argument("--config", default=None, help="JSON file overriding preset fields")
    p.add_argument(
        "--no-timing",
        action="store_true",
        help="zero the wall_time column for byte-reproducible reports",
    )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 1
    beta = args.beta if args.beta is not None else overrides.get("beta", DEFAULT_BETA)
    try:
        preset = load_preset(
            args.preset,
            beta=beta,
            n_s=overrides.get("n_s"),
            n_a=overrides.get("n_a"),
            sigma_list=overrides.get("sigma_list"),
        )
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sigmas = tuple(args.sigma) if args.sigma else preset.sigma_list
    seeds = args.seed_list if args.seed_list is not None else list(range(args.seeds))
    method_names = args.method or ["lcurve"]
    l = args.l if args.l is not None else overrides.get("l")
    tol_factor = overrides.get("tol_factor", args.tol_factor)
    grid_size = overrides.get("grid_size", args.grid_size)
    try:
        methods = [
            make_method(
                name,
                n_x=preset.truth.n_x,
                l=l,
                tol_factor=tol_factor,
                gamma=args.gamma,
                grid_size=grid_size,
            )
            for name in method_names
        ]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    records = run_sweep(preset, methods, seeds, sigmas=sigmas)
    paths = emit_report(records, args.format, args.out, include_timing=not args.no_timing)
    for path in paths:
        print(path)
    n_failed = sum(1 for r in records if r.failed_stage is not None)
    if n_failed:
        print(f"{n_failed}/{len(records)} runs failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
