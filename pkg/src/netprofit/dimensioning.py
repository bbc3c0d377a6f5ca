"""Core-network dimensioning: demands, datacenter assignment, routing, sizing.

Operates under the non-bypass discipline: every lightpath spans exactly one
physical hop, so virtual links coincide with physical adjacencies and the
optical-layer flow conservation is trivially satisfied.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .domain import PowerParams, ServiceClassSpec, Topology
from .pricing import PricingOutcome

# guards the traffic/B ceilings against float dust from user arithmetic
_CEIL_DECIMALS = 9


class RoutingError(RuntimeError):
    """No datacenter can serve a node that has cloud demand."""


@dataclass(frozen=True)
class DemandMatrix:
    """Cloud demand per node and class, and its assignment to datacenters."""

    demand_per_node_class: tuple[tuple[float, ...], ...]  # [class][node], Gbps
    flows: tuple[tuple[int, int, float], ...]  # (datacenter, node, Gbps)

    def node_demand(self, node_index: int) -> float:
        return math.fsum(per_class[node_index] for per_class in self.demand_per_node_class)

    @property
    def total_demand_gbps(self) -> float:
        return math.fsum(math.fsum(row) for row in self.demand_per_node_class)


@dataclass(frozen=True)
class LinkLoad:
    """One directed physical adjacency with its carried traffic and hardware."""

    m: int
    n: int
    traffic_gbps: float
    wavelengths: int
    fibers: int


@dataclass(frozen=True)
class NetworkDimensioning:
    """Wavelengths, fibers and aggregation ports sized for a set of flows."""

    link_loads: tuple[LinkLoad, ...]
    aggregation_ports: tuple[tuple[int, int], ...]  # (datacenter node, ports)
    routes: tuple[tuple[int, int, tuple[int, ...]], ...]  # (src, dst, node path)

    def wavelengths(self) -> dict[tuple[int, int], int]:
        return {(l.m, l.n): l.wavelengths for l in self.link_loads}

    def fibers(self) -> dict[tuple[int, int], int]:
        return {(l.m, l.n): l.fibers for l in self.link_loads}

    # under non-bypass a virtual link is its physical adjacency
    def virtual_link_wavelengths(self) -> dict[tuple[int, int], int]:
        return self.wavelengths()

    @property
    def total_ports(self) -> int:
        return sum(p for _, p in self.aggregation_ports)


def cloud_demands(
    outcome: PricingOutcome,
    topology: Topology,
    classes: Sequence[ServiceClassSpec],
    delivery: str | None = None,
) -> DemandMatrix:
    """Gbps each node pulls from the cloud; fog-covered nodes pull nothing."""
    delivery = delivery or outcome.delivery
    fog = topology.fog_served(delivery)
    demand = tuple(
        tuple(
            0.0 if fog[d] else users[d] * cls.download_rate_gbps
            for d in range(topology.node_count)
        )
        for cls, users in zip(classes, outcome.users_per_node)
    )
    return DemandMatrix(demand_per_node_class=demand, flows=())


def assign_to_datacenters(demands: DemandMatrix, topology: Topology) -> DemandMatrix:
    """Serve each node's demand whole from its nearest datacenter.

    Nearest means fewest hops, then shortest km distance, then lowest
    datacenter id; a datacenter node serves itself locally.
    """
    datacenters = topology.datacenter_ids()
    flows = []
    reach = {dc: _shortest_paths(topology, dc) for dc in datacenters}
    for d in range(topology.node_count):
        node_id = d + 1
        total = demands.node_demand(d)
        if total <= 0:
            continue
        ranked = sorted(
            (
                (reach[dc][node_id][0], reach[dc][node_id][1], dc)
                for dc in datacenters
                if node_id in reach[dc]
            ),
        )
        if not ranked:
            raise RoutingError(f"no datacenter reachable from node {node_id}")
        flows.append((ranked[0][2], node_id, total))
    return DemandMatrix(demand_per_node_class=demands.demand_per_node_class,
                        flows=tuple(flows))


def _shortest_paths(topology: Topology, source: int) -> dict[int, tuple[int, float, tuple[int, ...]]]:
    """Deterministic (hops, km)-shortest paths from one node.

    Equal (hops, km) labels keep the path through the lower predecessor id,
    so routes are unique and stable across runs.
    """
    dist = topology.link_distances()
    best: dict[int, tuple[int, float, int]] = {source: (0, 0.0, 0)}
    heap = [(0, 0.0, source, 0)]
    while heap:
        hops, km, node, pred = heapq.heappop(heap)
        entry = best.get(node)
        if entry is not None and (hops, km, pred) > entry:
            continue
        for nxt in topology.neighbors(node):
            cand = (hops + 1, km + dist[(node, nxt)], node)
            cur = best.get(nxt)
            if cur is None or cand < cur:
                best[nxt] = cand
                heapq.heappush(heap, (cand[0], cand[1], nxt, node))
    paths = {}
    for node, (hops, km, _) in best.items():
        chain = [node]
        while chain[-1] != source:
            chain.append(best[chain[-1]][2])
        paths[node] = (hops, km, tuple(reversed(chain)))
    return paths


def _ceil_units(amount: float, unit: float) -> int:
    if amount <= 0:
        return 0
    return int(math.ceil(round(amount / unit, _CEIL_DECIMALS)))


def route_and_size(
    demands: DemandMatrix,
    topology: Topology,
    power: PowerParams,
) -> NetworkDimensioning:
    """Accumulate flow traffic per directed link and quantize hardware.

    Wavelengths per directed link are ceil(traffic / wavelength rate), fibers
    ceil(wavelengths / wavelengths-per-fiber); each datacenter gets
    ceil(aggregated demand / wavelength rate) router aggregation ports.
    """
    dc_paths = {dc: _shortest_paths(topology, dc) for dc in
                sorted({s for s, _, _ in demands.flows})}
    link_traffic: dict[tuple[int, int], float] = {}
    per_dc: dict[int, float] = {}
    routes = []
    for src, dst, gbps in demands.flows:
        hops_km_path = dc_paths[src].get(dst)
        if hops_km_path is None:
            raise RoutingError(f"no path from datacenter {src} to node {dst}")
        path = hops_km_path[2]
        routes.append((src, dst, path))
        per_dc[src] = per_dc.get(src, 0.0) + gbps
        for m, n in zip(path, path[1:]):
            link_traffic[(m, n)] = link_traffic.get((m, n), 0.0) + gbps

    loads = []
    for (m, n) in sorted(link_traffic):
        traffic = link_traffic[(m, n)]
        w = _ceil_units(traffic, power.wavelength_rate_gbps)
        f = _ceil_units(float(w), float(power.wavelengths_per_fiber))
        loads.append(LinkLoad(m=m, n=n, traffic_gbps=traffic, wavelengths=w, fibers=f))
    ports = tuple(
        (dc, _ceil_units(per_dc[dc], power.wavelength_rate_gbps))
        for dc in sorted(per_dc)
    )
    return NetworkDimensioning(
        link_loads=tuple(loads),
        aggregation_ports=ports,
        routes=tuple(routes),
    )


def dimension_outcome(
    outcome: PricingOutcome,
    topology: Topology,
    classes: Sequence[ServiceClassSpec],
    power: PowerParams,
) -> tuple[DemandMatrix, NetworkDimensioning]:
    """Full chain: demands, datacenter assignment, routing and sizing."""
    demands = cloud_demands(outcome, topology, classes)
    assigned = assign_to_datacenters(demands, topology)
    return assigned, route_and_size(assigned, topology, power)


def dimensioning_to_csv(dim: NetworkDimensioning, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["link_m", "link_n", "traffic_gbps", "wavelengths", "fibers"])
        for load in dim.link_loads:
            writer.writerow([load.m, load.n, f"{load.traffic_gbps:.6f}",
                             load.wavelengths, load.fibers])
