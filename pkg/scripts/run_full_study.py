#!/usr/bin/env python3
"""Full study on the shipped dataset.

Sweeps the equal-elasticity grid {2, 1, 0.8, 0.6, 0.4, 0.2} over both
retention floors for each delivery mode, runs the heterogeneous assignment
(2, 0.8, 0.2), and writes CSV plus plot-ready series under results/.
"""

import argparse
import time
from pathlib import Path

from netprofit.scenarios import ScenarioConfig, emit_report, run_scenario, sweep

EQUAL_PEDS = [2, 1, 0.8, 0.6, 0.4, 0.2]
HETERO = (2.0, 0.8, 0.2)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--cascade", choices=["strict", "verbatim"], default="strict")
    args = parser.parse_args()
    out_root = Path(args.out)

    started = time.perf_counter()
    for delivery in ("cloud", "cloud-fog", "fog"):
        config = ScenarioConfig(delivery=delivery, cascade_mode=args.cascade)
        reports = sweep(config, EQUAL_PEDS, jobs=args.jobs)
        out_dir = out_root / f"equal-ped-{delivery}"
        emit_report(reports, "csv", out_dir)
        emit_report(reports, "plot-data", out_dir)
        base = reports[0].baseline
        print(f"\n{delivery} delivery (baseline profit ${base.profit:,.0f}, "
              f"core traffic {base.core_traffic_gbps:,.1f} Gbps)")
        print(f"  {'PED':>4} {'LB':>2} {'profit':>14} {'ratio':>7} "
              f"{'users%':>7} {'traffic Gbps':>12} {'power kW':>9}")
        for rep in reports:
            row = rep.rows[0]
            print(f"  {row.ped[0]:>4} {row.lb:>2} {row.profit:>14,.0f} "
                  f"{row.profit_ratio:>7.2f} {row.users_pct_total:>7.1f} "
                  f"{row.core_traffic_gbps:>12,.1f} {row.power.total_w / 1e3:>9,.1f}")

    print("\nheterogeneous elasticities (A, B, C) =", HETERO)
    for delivery in ("cloud", "cloud-fog", "fog"):
        reports = []
        for lb in (0, 1):
            rep = run_scenario(ScenarioConfig(
                delivery=delivery, elasticities=HETERO, lb_mode=lb,
                cascade_mode=args.cascade,
            ))
            reports.append(rep)
            row = rep.rows[0]
            print(f"  {delivery:>9} LB={lb}: profit ${row.profit:,.0f} "
                  f"(x{row.profit_ratio:.2f}), users {row.users_pct_total:.1f}%, "
                  f"prices ({row.prices[0]:.2f}, {row.prices[1]:.2f}, "
                  f"{row.prices[2]:.2f})")
        emit_report(reports, "csv", out_root / f"heterogeneous-{delivery}")

    print(f"\nwrote results under {out_root}/ in "
          f"{time.perf_counter() - started:.1f} s")


if __name__ == "__main__":
    main()
