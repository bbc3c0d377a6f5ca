"""Command line front end.

Subcommands: solve (one scenario point), sweep (elasticity sweep over both
retention floors), validate (topology file check). Exit codes: 0 success,
1 pricing infeasible, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .domain import (
    TopologyParseError,
    TopologyValidationError,
    load_topology,
)
from .pricing import InfeasiblePricingError
from .scenarios import (
    emit_report,
    load_config,
    parse_ped,
    render_csv,
    run_scenario,
    sweep,
    _report_rows,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--delivery", choices=["cloud", "cloud-fog", "fog"])
    parser.add_argument("--ped", help="one elasticity or a,b,c per class")
    parser.add_argument("--lb", type=int, choices=[0, 1],
                        help="0: users may leave; 1: keep the whole base")
    parser.add_argument("--cascade", choices=["strict", "verbatim"])
    parser.add_argument("--topology", help="topology file (default: packaged att25)")
    parser.add_argument("--out", help="output directory (default: CSV to stdout)")
    parser.add_argument("--format", choices=["csv", "plot-data"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netprofit",
        description="Class pricing under demand elasticity with core-network "
                    "dimensioning and power evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one scenario point")
    _add_common(solve)

    swp = sub.add_parser("sweep", help="run an elasticity sweep over both floors")
    _add_common(swp)
    swp.add_argument("--ped-list", required=True,
                     help="comma-separated elasticities, e.g. 2,1,0.8,0.6,0.4,0.2")
    swp.add_argument("--jobs", type=int, default=1,
                     help="solve sweep points in parallel (output order is fixed)")

    val = sub.add_parser("validate", help="validate a topology file")
    val.add_argument("--topology", required=True)
    return parser


def _configure(args) -> "ScenarioConfig":
    config = load_config(args.config)
    if args.topology:
        config = replace(config, topology_path=args.topology)
    if args.delivery:
        config = replace(config, delivery=args.delivery)
    if args.ped:
        config = replace(config, elasticities=parse_ped(args.ped))
    if args.lb is not None:
        config = replace(config, lb_mode=args.lb)
    if args.cascade:
        config = replace(config, cascade_mode=args.cascade)
    return config


def _emit(reports, args) -> None:
    if args.out is None:
        if args.format != "csv":
            raise ValueError("--format plot-data requires --out")
        sys.stdout.write(render_csv(_report_rows(reports)))
        return
    for path in emit_report(reports, args.format, args.out):
        print(f"wrote {path}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            topology = load_topology(args.topology)
            print(f"ok: {topology.node_count} nodes, {len(topology.links)} links, "
                  f"{len(topology.datacenter_ids())} datacenters, "
                  f"{len(topology.fog_ids())} fog sites")
            return EXIT_OK
        config = _configure(args)
        if args.command == "solve":
            _emit(run_scenario(config), args)
            return EXIT_OK
        if args.command == "sweep":
            peds = [float(p) for p in args.ped_list.split(",") if p.strip()]
            if not peds:
                raise ValueError("--ped-list is empty")
            _emit(sweep(config, peds, jobs=args.jobs), args)
            return EXIT_OK
        raise ValueError(f"unknown command {args.command!r}")
    except InfeasiblePricingError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (TopologyParseError, TopologyValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
