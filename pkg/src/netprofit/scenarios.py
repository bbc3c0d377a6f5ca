"""Scenario orchestration: configs, the full pipeline, sweeps, and reports.

A scenario point = delivery mode x elasticity assignment x retention floor.
Each point runs pricing, dimensioning and power end to end; every report
also carries the net-neutrality baseline (anchor-price-only) evaluated
through the same pipeline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .dimensioning import cloud_demands, assign_to_datacenters, route_and_size
from .domain import (
    DELIVERY_MODES,
    EconomicParams,
    PowerParams,
    ServiceClassSpec,
    Topology,
    load_builtin_topology,
    load_topology,
)
from .elasticity import GridSpec, anchor_only_table, build_solution_table
from .power import PowerBreakdown, network_power
from .pricing import InfeasiblePricingError, PricingOutcome, optimize_pricing

CSV_HEADER = ("scenario,ped_a,ped_b,ped_c,lb,price_a,price_b,price_c,"
              "users_pct_a,users_pct_b,users_pct_c,users_pct_total,"
              "revenue_usd,cost_usd,profit_usd,profit_ratio,"
              "core_traffic_gbps,power_w")


@dataclass(frozen=True)
class ScenarioConfig:
    topology_path: str | None = None  # None: packaged att25 dataset
    delivery: str = "cloud"
    elasticities: tuple[float, float, float] = (0.2, 0.2, 0.2)
    lb_mode: int = 0
    cascade_mode: str = "strict"
    grid: GridSpec = field(default_factory=GridSpec)
    econ: EconomicParams = field(default_factory=EconomicParams)
    power: PowerParams = field(default_factory=PowerParams)
    initial_shares: tuple[float, float, float] = (0.19, 0.56, 0.25)
    download_rates: tuple[float, float, float] = (0.018, 0.0072, 0.002)

    def __post_init__(self):
        if self.delivery not in DELIVERY_MODES:
            raise ValueError(f"unknown delivery mode {self.delivery!r}")
        if self.lb_mode not in (0, 1):
            raise ValueError(f"lb mode must be 0 or 1, got {self.lb_mode}")
        if any(e <= 0 for e in self.elasticities):
            raise ValueError("elasticities must be > 0")

    def classes(self) -> tuple[ServiceClassSpec, ...]:
        return (
            ServiceClassSpec("A", self.download_rates[0], self.elasticities[0],
                             self.initial_shares[0]),
            ServiceClassSpec("B", self.download_rates[1], self.elasticities[1],
                             self.initial_shares[1]),
            ServiceClassSpec("C", self.download_rates[2], self.elasticities[2],
                             self.initial_shares[2]),
        )

    def load(self) -> Topology:
        if self.topology_path is None:
            return load_builtin_topology()
        return load_topology(self.topology_path)

    def economics(self) -> EconomicParams:
        return replace(self.econ, min_user_fraction=float(self.lb_mode))


@dataclass(frozen=True)
class ScenarioRow:
    """One report line: a scenario point or the baseline."""

    scenario: str
    ped: tuple[float, float, float]
    lb: int
    prices: tuple[float, float, float]
    users_pct: tuple[float, float, float]
    users_pct_total: float
    revenue: float
    cost: float
    profit: float
    profit_ratio: float
    core_traffic_gbps: float
    power: PowerBreakdown
    outcome: PricingOutcome

    def csv_fields(self) -> list[str]:
        return [
            self.scenario,
            *(f"{p:.6f}" for p in self.ped),
            str(self.lb),
            *(f"{p:.6f}" for p in self.prices),
            *(f"{u:.6f}" for u in self.users_pct),
            f"{self.users_pct_total:.6f}",
            f"{self.revenue:.6f}",
            f"{self.cost:.6f}",
            f"{self.profit:.6f}",
            f"{self.profit_ratio:.9f}",
            f"{self.core_traffic_gbps:.6f}",
            f"{self.power.total_w:.6f}",
        ]


@dataclass(frozen=True)
class ScenarioReport:
    baseline: ScenarioRow
    rows: tuple[ScenarioRow, ...]


def _evaluate(outcome: PricingOutcome, topology, classes, power_params):
    """Dimension the network for an outcome and price its power."""
    demands = assign_to_datacenters(cloud_demands(outcome, topology, classes), topology)
    dim = route_and_size(demands, topology, power_params)
    breakdown = network_power(dim, topology, power_params)
    return demands.total_demand_gbps, breakdown


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Run one scenario point plus its net-neutrality baseline."""
    topology = config.load()
    classes = config.classes()
    econ = config.economics()

    # the baseline is the no-repricing reference; no retention floor applies
    baseline_econ = replace(econ, min_user_fraction=0.0)
    nn_table = anchor_only_table(classes, baseline_econ, topology)
    baseline_outcome = optimize_pricing(
        nn_table, topology, classes, baseline_econ, config.delivery, config.cascade_mode
    )
    nn_traffic, nn_power = _evaluate(baseline_outcome, topology, classes, config.power)
    u = econ.total_users
    baseline = ScenarioRow(
        scenario=f"{config.delivery}-nn",
        ped=(0.0, 0.0, 0.0),
        lb=0,
        prices=baseline_outcome.prices,
        users_pct=tuple(100.0 * x / u for x in baseline_outcome.users_per_class),
        users_pct_total=100.0 * baseline_outcome.total_users / u,
        revenue=baseline_outcome.revenue,
        cost=baseline_outcome.cost,
        profit=baseline_outcome.profit,
        profit_ratio=1.0,
        core_traffic_gbps=nn_traffic,
        power=nn_power,
        outcome=baseline_outcome,
    )

    table = build_solution_table(classes, econ, topology, config.grid)
    try:
        outcome = optimize_pricing(
            table, topology, classes, econ, config.delivery, config.cascade_mode
        )
    except InfeasiblePricingError as exc:
        raise InfeasiblePricingError(
            f"{config.delivery}, ped={config.elasticities}, lb={config.lb_mode}: {exc}"
        ) from exc
    traffic, breakdown = _evaluate(outcome, topology, classes, config.power)
    row = ScenarioRow(
        scenario=config.delivery,
        ped=config.elasticities,
        lb=config.lb_mode,
        prices=outcome.prices,
        users_pct=tuple(100.0 * x / u for x in outcome.users_per_class),
        users_pct_total=100.0 * outcome.total_users / u,
        revenue=outcome.revenue,
        cost=outcome.cost,
        profit=outcome.profit,
        profit_ratio=outcome.profit / baseline.profit if baseline.profit != 0 else math.inf,
        core_traffic_gbps=traffic,
        power=breakdown,
        outcome=outcome,
    )
    return ScenarioReport(baseline=baseline, rows=(row,))


def sweep(
    config: ScenarioConfig,
    ped_list: Sequence[float | tuple[float, float, float]],
    jobs: int = 1,
) -> list[ScenarioReport]:
    """One report per (elasticity assignment, retention floor) pair.

    Points are ordered as given with floor 0 before floor 1; points are
    independent, so they may be solved in parallel without affecting output
    order.
    """
    if not ped_list:
        raise ValueError("ped_list must not be empty")
    points = []
    for ped in ped_list:
        triple = (ped,) * 3 if isinstance(ped, (int, float)) else tuple(ped)
        for lb in (0, 1):
            points.append(replace(config, elasticities=triple, lb_mode=lb))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_scenario, points))
    return [run_scenario(p) for p in points]


def _report_rows(reports: ScenarioReport | Iterable[ScenarioReport]) -> list[ScenarioRow]:
    """Baseline first (once), then every point row in order."""
    if isinstance(reports, ScenarioReport):
        reports = [reports]
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to emit")
    rows = [reports[0].baseline]
    for report in reports:
        rows.extend(report.rows)
    return rows


_SERIES = {
    "prices_users": ("price_a,price_b,price_c,users_pct_a,users_pct_b,"
                     "users_pct_c,users_pct_total"),
    "profit": "profit_usd,profit_ratio",
    "traffic": "core_traffic_gbps",
    "power": ("power_w,router_ports_w,transponders_w,edfas_w,"
              "optical_switches_w,regenerators_w"),
}


def _series_fields(name: str, row: ScenarioRow) -> list[str]:
    if name == "prices_users":
        return [*(f"{p:.6f}" for p in row.prices),
                *(f"{x:.6f}" for x in row.users_pct),
                f"{row.users_pct_total:.6f}"]
    if name == "profit":
        return [f"{row.profit:.6f}", f"{row.profit_ratio:.9f}"]
    if name == "traffic":
        return [f"{row.core_traffic_gbps:.6f}"]
    if name == "power":
        return [f"{row.power.total_w:.6f}",
                *(f"{v:.6f}" for v in row.power.components().values())]
    raise ValueError(name)


def emit_report(
    reports: ScenarioReport | Iterable[ScenarioReport],
    fmt: str,
    out_dir: str | Path,
) -> list[Path]:
    """Write CSV or plot-ready series files; identical inputs give identical bytes."""
    rows = _report_rows(reports)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        path = out / "report.csv"
        path.write_text(render_csv(rows), encoding="utf-8")
        written.append(path)
    elif fmt == "plot-data":
        key = "scenario,ped_a,ped_b,ped_c,lb"
        for name, columns in _SERIES.items():
            lines = [f"{key},{columns}"]
            for row in rows:
                prefix = [row.scenario, *(f"{p:.6f}" for p in row.ped), str(row.lb)]
                lines.append(",".join(prefix + _series_fields(name, row)))
            path = out / f"series_{name}.csv"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(path)
    else:
        raise ValueError(f"unknown report format {fmt!r}; expected csv or plot-data")
    return written


def render_csv(rows: Sequence[ScenarioRow]) -> str:
    lines = [CSV_HEADER]
    lines.extend(",".join(row.csv_fields()) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Config files: "key = value" lines with '#' comments. Unset keys fall back
# to the published defaults, so an empty file reproduces the reference setup.
# ---------------------------------------------------------------------------

_ECON_KEYS = {
    "base_price": "base_price_per_gbps",
    "core_cost": "core_cost_per_gbps",
    "metro_access_cost": "metro_access_cost_per_gbps",
    "total_users": "total_users",
}
_POWER_KEYS = ("router_port_w", "transponder_w", "edfa_w", "optical_switch_w",
               "regenerator_w", "edfa_span_km", "regen_reach_km",
               "wavelengths_per_fiber", "wavelength_rate_gbps", "pue")
_GRID_KEYS = {"grid_step": "step", "grid_lower": "lower",
              "grid_upper": "upper", "grid_cap": "cap"}


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def config_from_values(values: dict[str, str]) -> ScenarioConfig:
    values = dict(values)
    kwargs: dict = {}
    if "topology" in values:
        kwargs["topology_path"] = values.pop("topology")
    if "delivery" in values:
        kwargs["delivery"] = values.pop("delivery")
    if "ped" in values:
        kwargs["elasticities"] = parse_ped(values.pop("ped"))
    ped_parts = [values.pop(k, None) for k in ("ped_a", "ped_b", "ped_c")]
    if any(p is not None for p in ped_parts):
        if any(p is None for p in ped_parts):
            raise ValueError("ped_a/ped_b/ped_c must be given together")
        kwargs["elasticities"] = tuple(float(p) for p in ped_parts)
    if "lb" in values:
        kwargs["lb_mode"] = int(values.pop("lb"))
    if "cascade" in values:
        kwargs["cascade_mode"] = values.pop("cascade")

    econ_kwargs = {}
    for key, attr in _ECON_KEYS.items():
        if key in values:
            econ_kwargs[attr] = float(values.pop(key))
    if econ_kwargs:
        kwargs["econ"] = EconomicParams(**econ_kwargs)

    power_kwargs = {}
    for key in _POWER_KEYS:
        if key in values:
            raw = values.pop(key)
            power_kwargs[key] = int(raw) if key == "wavelengths_per_fiber" else float(raw)
    if power_kwargs:
        kwargs["power"] = PowerParams(**power_kwargs)

    grid_kwargs = {}
    for key, attr in _GRID_KEYS.items():
        if key in values:
            raw = values.pop(key)
            if attr == "upper" and raw == "auto":
                grid_kwargs[attr] = None
            else:
                grid_kwargs[attr] = float(raw)
    if grid_kwargs:
        kwargs["grid"] = GridSpec(**grid_kwargs)

    shares = [values.pop(k, None) for k in ("share_a", "share_b", "share_c")]
    if any(s is not None for s in shares):
        if any(s is None for s in shares):
            raise ValueError("share_a/share_b/share_c must be given together")
        kwargs["initial_shares"] = tuple(float(s) for s in shares)
    rates = [values.pop(k, None) for k in ("rate_a", "rate_b", "rate_c")]
    if any(r is not None for r in rates):
        if any(r is None for r in rates):
            raise ValueError("rate_a/rate_b/rate_c must be given together")
        kwargs["download_rates"] = tuple(float(r) for r in rates)

    if values:
        raise ValueError(f"unknown config keys: {sorted(values)}")
    return ScenarioConfig(**kwargs)


def load_config(path: str | Path | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    return config_from_values(parse_config_file(path))


def parse_ped(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        value = float(parts[0])
        return (value, value, value)
    if len(parts) == 3:
        return tuple(float(p) for p in parts)
    raise ValueError(f"ped must be one value or three comma-separated values, got {text!r}")
