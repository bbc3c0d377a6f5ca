"""Core domain types: topology, service classes, economic and power parameters.

All types are immutable after construction and safe to share across threads.
Monetary values are US$ per month, rates are Gbps, distances are km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

SHARE_SUM_TOL = 1e-9

DELIVERY_MODES = ("cloud", "cloud-fog", "fog")


class TopologyParseError(ValueError):
    """Raised when a topology file cannot be parsed."""


class TopologyValidationError(ValueError):
    """Raised when a parsed topology violates a structural invariant."""


@dataclass(frozen=True)
class NodeRecord:
    """A core-network node with its share of the total user population.

    ``has_fog`` marks nodes that get a fog site under cloud-fog delivery;
    the fog exemption is applied per delivery scenario, not unconditionally.
    """

    id: int
    name: str
    population_share: float
    has_datacenter: bool = False
    has_fog: bool = False

    def __post_init__(self):
        if self.id < 1:
            raise TopologyValidationError(f"node id must be >= 1, got {self.id}")
        if self.population_share < 0:
            raise TopologyValidationError(
                f"node {self.id}: population_share must be >= 0, "
                f"got {self.population_share}"
            )


@dataclass(frozen=True)
class LinkRecord:
    """One bidirectional physical link, stored once per unordered pair."""

    m: int
    n: int
    distance_km: float

    def __post_init__(self):
        if self.m == self.n:
            raise TopologyValidationError(f"link endpoints must differ, got {self.m}")
        if self.distance_km <= 0:
            raise TopologyValidationError(
                f"link {self.m}-{self.n}: distance must be > 0, got {self.distance_km}"
            )

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.m, self.n)


@dataclass(frozen=True)
class Topology:
    """A validated core-network graph."""

    nodes: tuple[NodeRecord, ...]
    links: tuple[LinkRecord, ...]

    def __post_init__(self):
        _validate_topology(self.nodes, self.links)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> NodeRecord:
        return self.nodes[node_id - 1]

    def datacenter_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.has_datacenter)

    def fog_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.has_fog)

    def population_shares(self) -> tuple[float, ...]:
        return tuple(n.population_share for n in self.nodes)

    def neighbors(self, node_id: int) -> tuple[int, ...]:
        out = []
        for link in self.links:
            if link.m == node_id:
                out.append(link.n)
            elif link.n == node_id:
                out.append(link.m)
        return tuple(sorted(out))

    def link_distances(self) -> dict[tuple[int, int], float]:
        """Distance lookup for both directions of every physical link."""
        dist = {}
        for link in self.links:
            dist[(link.m, link.n)] = link.distance_km
            dist[(link.n, link.m)] = link.distance_km
        return dist

    def fog_served(self, delivery: str) -> tuple[bool, ...]:
        """Per-node flag: True if the node's demand stays off the core network.

        cloud: nobody is fog served; fog: everybody; cloud-fog: the nodes
        flagged ``has_fog``.
        """
        if delivery == "cloud":
            return tuple(False for _ in self.nodes)
        if delivery == "fog":
            return tuple(True for _ in self.nodes)
        if delivery == "cloud-fog":
            return tuple(n.has_fog for n in self.nodes)
        raise ValueError(f"unknown delivery mode {delivery!r}; expected one of {DELIVERY_MODES}")


def _validate_topology(nodes: Sequence[NodeRecord], links: Sequence[LinkRecord]) -> None:
    if not nodes:
        raise TopologyValidationError("topology has no nodes")
    ids = [n.id for n in nodes]
    if sorted(ids) != list(range(1, len(nodes) + 1)):
        raise TopologyValidationError(
            f"node ids must be unique and contiguous 1..{len(nodes)}, got {sorted(ids)}"
        )
    if ids != sorted(ids):
        raise TopologyValidationError("nodes must be listed in id order")

    total_share = math.fsum(n.population_share for n in nodes)
    if abs(total_share - 1.0) > SHARE_SUM_TOL:
        raise TopologyValidationError(
            f"population shares must sum to 1 (got {total_share!r})"
        )

    id_set = set(ids)
    seen_pairs = set()
    adjacency: dict[int, set[int]] = {i: set() for i in ids}
    for link in links:
        if link.m not in id_set or link.n not in id_set:
            raise TopologyValidationError(
                f"link {link.m}-{link.n} references an unknown node"
            )
        pair = (min(link.m, link.n), max(link.m, link.n))
        if pair in seen_pairs:
            raise TopologyValidationError(f"duplicate link {pair[0]}-{pair[1]}")
        seen_pairs.add(pair)
        adjacency[link.m].add(link.n)
        adjacency[link.n].add(link.m)

    if len(nodes) > 1:
        # connectivity via BFS from node 1
        seen = {1}
        frontier = [1]
        while frontier:
            current = frontier.pop()
            for nxt in adjacency[current]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if len(seen) != len(nodes):
            missing = sorted(id_set - seen)
            raise TopologyValidationError(f"graph is disconnected; unreachable nodes {missing}")


@dataclass(frozen=True)
class ServiceClassSpec:
    """One sellable service class (per-user download rate plus demand response)."""

    class_id: str
    download_rate_gbps: float
    elasticity: float
    initial_share: float

    def __post_init__(self):
        if self.download_rate_gbps <= 0:
            raise ValueError(f"class {self.class_id}: download rate must be > 0")
        if self.elasticity < 0:
            raise ValueError(f"class {self.class_id}: elasticity must be >= 0")
        if not 0 <= self.initial_share <= 1:
            raise ValueError(f"class {self.class_id}: initial share must be in [0, 1]")


def validate_service_classes(classes: Sequence[ServiceClassSpec]) -> None:
    """Classes must be ordered highest to lowest rate with shares summing <= 1."""
    rates = [c.download_rate_gbps for c in classes]
    if any(a <= b for a, b in zip(rates, rates[1:])):
        raise ValueError(f"download rates must be strictly decreasing, got {rates}")
    total = math.fsum(c.initial_share for c in classes)
    if total > 1 + 1e-12:
        raise ValueError(f"initial shares must sum to <= 1, got {total}")


def default_service_classes(
    elasticities: float | Sequence[float] = 0.2,
) -> tuple[ServiceClassSpec, ...]:
    """The three video classes: A (UHD 18 Mbps), B (HD 7.2 Mbps), C (SD 2 Mbps)."""
    if isinstance(elasticities, (int, float)):
        e = (float(elasticities),) * 3
    else:
        e = tuple(float(x) for x in elasticities)
        if len(e) != 3:
            raise ValueError(f"need one elasticity per class, got {len(e)}")
    classes = (
        ServiceClassSpec("A", 0.018, e[0], 0.19),
        ServiceClassSpec("B", 0.0072, e[1], 0.56),
        ServiceClassSpec("C", 0.002, e[2], 0.25),
    )
    validate_service_classes(classes)
    return classes


@dataclass(frozen=True)
class EconomicParams:
    """Monthly prices and costs per Gbps, plus the subscriber base."""

    base_price_per_gbps: float = 131.0
    core_cost_per_gbps: float = 28.0
    metro_access_cost_per_gbps: float = 90.0
    total_users: float = 1.8e6
    min_user_fraction: float = 0.0

    def __post_init__(self):
        for name in ("base_price_per_gbps", "core_cost_per_gbps",
                     "metro_access_cost_per_gbps", "total_users"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 <= self.min_user_fraction <= 1:
            raise ValueError("min_user_fraction must be in [0, 1]")


@dataclass(frozen=True)
class PowerParams:
    """Device power draws and optical reach figures for the core network."""

    router_port_w: float = 638.0
    transponder_w: float = 129.0
    edfa_w: float = 11.0
    optical_switch_w: float = 85.0
    regenerator_w: float = 114.0
    edfa_span_km: float = 80.0
    regen_reach_km: float = 2000.0
    wavelengths_per_fiber: int = 32
    wavelength_rate_gbps: float = 40.0
    pue: float = 1.5

    def __post_init__(self):
        for name in ("router_port_w", "transponder_w", "edfa_w", "optical_switch_w",
                     "regenerator_w", "edfa_span_km", "regen_reach_km",
                     "wavelengths_per_fiber", "wavelength_rate_gbps", "pue"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


def initial_users(
    topology: Topology,
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
) -> dict[str, tuple[float, ...]]:
    """Per-node, per-class subscriber counts before any price change.

    Counts are real-valued: total_users * initial_share * population_share.
    Returned tuples are aligned with ``topology.nodes``.
    """
    validate_service_classes(classes)
    shares = topology.population_shares()
    return {
        c.class_id: tuple(econ.total_users * c.initial_share * p for p in shares)
        for c in classes
    }


def select_fog_nodes(topology: Topology, count: int = 10) -> tuple[int, ...]:
    """Node ids that receive a fog site: highest population share first,
    ties broken by lower node id."""
    ranked = sorted(topology.nodes, key=lambda n: (-n.population_share, n.id))
    return tuple(sorted(n.id for n in ranked[:count]))


# ---------------------------------------------------------------------------
# Topology file format: [nodes] / [links] sections, comma-separated records,
# '#' comments. Node: id,name,population_share,has_datacenter,has_fog
# Link: m,n,distance_km
# ---------------------------------------------------------------------------

def load_topology(path: str | Path) -> Topology:
    """Load and validate a topology file."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_topology(text, source=str(path))


def parse_topology(text: str, source: str = "<string>") -> Topology:
    nodes: list[NodeRecord] = []
    links: list[LinkRecord] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line == "[nodes]":
                section = "nodes"
            elif line == "[links]":
                section = "links"
            else:
                raise TopologyParseError(f"{source}:{lineno}: unknown section {line}")
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            if section == "nodes":
                if len(fields) != 5:
                    raise ValueError(f"expected 5 fields, got {len(fields)}")
                nodes.append(NodeRecord(
                    id=int(fields[0]),
                    name=fields[1],
                    population_share=float(fields[2]),
                    has_datacenter=_parse_flag(fields[3]),
                    has_fog=_parse_flag(fields[4]),
                ))
            elif section == "links":
                if len(fields) != 3:
                    raise ValueError(f"expected 3 fields, got {len(fields)}")
                links.append(LinkRecord(
                    m=int(fields[0]), n=int(fields[1]), distance_km=float(fields[2]),
                ))
            else:
                raise ValueError("record outside of a [nodes]/[links] section")
        except TopologyValidationError:
            raise
        except ValueError as exc:
            raise TopologyParseError(f"{source}:{lineno}: {exc}") from exc
    return Topology(nodes=tuple(nodes), links=tuple(links))


def _parse_flag(token: str) -> bool:
    if token == "0":
        return False
    if token == "1":
        return True
    raise ValueError(f"flag must be 0 or 1, got {token!r}")


def serialize_topology(topology: Topology) -> str:
    """Render a topology back to the file format; round-trips exactly."""
    out = ["[nodes]"]
    for n in topology.nodes:
        out.append(f"{n.id},{n.name},{n.population_share!r},"
                   f"{int(n.has_datacenter)},{int(n.has_fog)}")
    out.append("[links]")
    for l in topology.links:
        out.append(f"{l.m},{l.n},{l.distance_km!r}")
    return "\n".join(out) + "\n"


def builtin_topology_path(name: str = "att25") -> Path:
    """Path of a dataset shipped with the package."""
    ref = resources.files("netprofit").joinpath("data", f"{name}.topo")
    with resources.as_file(ref) as p:
        return Path(p)


def load_builtin_topology(name: str = "att25") -> Topology:
    return load_topology(builtin_topology_path(name))
