"""IP-over-WDM power consumption under the non-bypass discipline.

Router ports, transponders and regenerators scale with per-link wavelength
counts, EDFAs with fiber counts and link length, and the optical switch at
every node draws power regardless of traffic. Everything is scaled by the
facility power usage effectiveness.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .domain import PowerParams, Topology
from .dimensioning import NetworkDimensioning


def edfa_count(distance_km: float, span_km: float) -> int:
    """In-line amplifiers on one fiber: floor(distance/span - 1), never negative."""
    if distance_km <= 0 or span_km <= 0:
        raise ValueError("distance and span must be > 0")
    return max(0, math.floor(distance_km / span_km - 1.0))


def regen_count(distance_km: float, reach_km: float) -> int:
    """Regenerators on one wavelength: one per started reach beyond the first."""
    if distance_km <= 0 or reach_km <= 0:
        raise ValueError("distance and reach must be > 0")
    return max(0, math.ceil(distance_km / reach_km) - 1)


@dataclass(frozen=True)
class PowerBreakdown:
    """Watts per device category (PUE included) plus carried link traffic."""

    router_ports_w: float
    transponders_w: float
    edfas_w: float
    optical_switches_w: float
    regenerators_w: float
    total_w: float
    total_link_traffic_gbps: float

    def components(self) -> dict[str, float]:
        return {
            "router_ports_w": self.router_ports_w,
            "transponders_w": self.transponders_w,
            "edfas_w": self.edfas_w,
            "optical_switches_w": self.optical_switches_w,
            "regenerators_w": self.regenerators_w,
        }


def network_power(
    dim: NetworkDimensioning,
    topology: Topology,
    params: PowerParams,
) -> PowerBreakdown:
    """Evaluate the power draw of a dimensioned network.

    Link sums run over directed adjacencies exactly as dimensioned; the
    optical switch term covers every node in the topology.
    """
    distances = topology.link_distances()
    wavelength_sum = 0
    edfa_total = 0.0
    regen_total = 0.0
    for load in dim.link_loads:
        d = distances.get((load.m, load.n))
        if d is None:
            raise ValueError(f"dimensioned link {load.m}->{load.n} not in topology")
        wavelength_sum += load.wavelengths
        edfa_total += load.fibers * edfa_count(d, params.edfa_span_km)
        regen_total += load.wavelengths * regen_count(d, params.regen_reach_km)

    ports = params.pue * params.router_port_w * (dim.total_ports + wavelength_sum)
    transponders = params.pue * params.transponder_w * wavelength_sum
    edfas = params.pue * params.edfa_w * edfa_total
    switches = params.pue * params.optical_switch_w * topology.node_count
    regens = params.pue * params.regenerator_w * regen_total
    total = ports + transponders + edfas + switches + regens
    return PowerBreakdown(
        router_ports_w=ports,
        transponders_w=transponders,
        edfas_w=edfas,
        optical_switches_w=switches,
        regenerators_w=regens,
        total_w=total,
        total_link_traffic_gbps=wavelength_sum * params.wavelength_rate_gbps,
    )


def power_to_csv(breakdown: PowerBreakdown, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "value"])
        for name, value in breakdown.components().items():
            writer.writerow([name, f"{value:.6f}"])
        writer.writerow(["total_w", f"{breakdown.total_w:.6f}"])
        writer.writerow(["total_link_traffic_gbps",
                         f"{breakdown.total_link_traffic_gbps:.6f}"])
