"""Shared fixtures and the seeded random-instance generator."""

from __future__ import annotations

import math
import random

import pytest

from netprofit.domain import (
    EconomicParams,
    LinkRecord,
    NodeRecord,
    Topology,
    default_service_classes,
    load_builtin_topology,
    ServiceClassSpec,
)
from netprofit.elasticity import solution_table_from_prices


@pytest.fixture(scope="session")
def att25():
    return load_builtin_topology()


@pytest.fixture(scope="session")
def classes_e02():
    return default_service_classes(0.2)


@pytest.fixture(scope="session")
def econ():
    return EconomicParams()


@pytest.fixture
def two_node_topology():
    return Topology(
        nodes=(
            NodeRecord(1, "left", 0.5, has_datacenter=True),
            NodeRecord(2, "right", 0.5),
        ),
        links=(LinkRecord(1, 2, 100.0),),
    )


def make_line_topology(n, datacenters=(1,), fog=(), shares=None):
    if shares is None:
        shares = [1.0 / n] * n
    nodes = tuple(
        NodeRecord(i + 1, f"n{i + 1}", shares[i],
                   has_datacenter=(i + 1) in datacenters,
                   has_fog=(i + 1) in fog)
        for i in range(n)
    )
    links = tuple(LinkRecord(i, i + 1, 100.0 * i) for i in range(1, n))
    return Topology(nodes=nodes, links=links)


def random_instance(seed, delivery, cascade_mode, lb_mode):
    """A small random pricing instance for oracle comparison.

    Everything is drawn from the seed, so instances are reproducible; the
    caller picks the mode combination.
    """
    rng = random.Random(seed)
    n = rng.randint(1, 4)

    raw = [rng.uniform(0.05, 1.0) for _ in range(n)]
    total = math.fsum(raw)
    shares = [x / total for x in raw]
    dc = {rng.randint(1, n)}
    for node in range(1, n + 1):
        if rng.random() < 0.5:
            dc.add(node)
    fog = {node for node in range(1, n + 1) if rng.random() < 0.4}
    nodes = tuple(
        NodeRecord(i + 1, f"n{i + 1}", shares[i],
                   has_datacenter=(i + 1) in dc, has_fog=(i + 1) in fog)
        for i in range(n)
    )
    links = []
    for i in range(2, n + 1):  # random tree keeps the graph connected
        links.append(LinkRecord(rng.randint(1, i - 1), i, rng.uniform(50, 1800)))
    existing = {(l.m, l.n) for l in links} | {(l.n, l.m) for l in links}
    for _ in range(rng.randint(0, 2)):
        a, b = rng.randint(1, n), rng.randint(1, n)
        if a != b and (a, b) not in existing:
            links.append(LinkRecord(a, b, rng.uniform(50, 1800)))
            existing |= {(a, b), (b, a)}
    topology = Topology(nodes=nodes, links=tuple(links))

    rates = sorted((rng.uniform(0.002, 0.03) for _ in range(3)), reverse=True)
    while rates[0] <= rates[1] or rates[1] <= rates[2]:
        rates = sorted((rng.uniform(0.002, 0.03) for _ in range(3)), reverse=True)
    share_scale = rng.uniform(0.5, 1.0)
    raw_shares = [rng.uniform(0.1, 1.0) for _ in range(3)]
    share_total = math.fsum(raw_shares)
    init_shares = [share_scale * s / share_total for s in raw_shares]
    elasticities = [rng.choice([0.2, 0.5, 0.8, 1.0, 1.5, 2.0]) for _ in range(3)]
    classes = tuple(
        ServiceClassSpec(cid, rates[i], elasticities[i], init_shares[i])
        for i, cid in enumerate("ABC")
    )

    econ = EconomicParams(
        base_price_per_gbps=rng.uniform(60, 200),
        core_cost_per_gbps=rng.uniform(5, 60),
        metro_access_cost_per_gbps=rng.uniform(20, 120),
        total_users=rng.uniform(1e3, 1e6),
        min_user_fraction=float(lb_mode),
    )

    prices = {}
    for cls in classes:
        count = rng.randint(0, 10)
        mults = {round(rng.uniform(0.5, 2.5), 3) for _ in range(count)}
        mults.discard(1.0)
        prices[cls.class_id] = [econ.base_price_per_gbps * m for m in sorted(mults)]
    table = solution_table_from_prices(classes, econ, topology, prices)
    return {
        "topology": topology,
        "classes": classes,
        "econ": econ,
        "table": table,
        "delivery": delivery,
        "cascade_mode": cascade_mode,
    }


MODE_COMBOS = [
    (delivery, cascade, lb)
    for delivery in ("cloud", "cloud-fog", "fog")
    for cascade in ("strict", "verbatim")
    for lb in (0, 1)
]


def instance_for_seed(seed):
    delivery, cascade, lb = MODE_COMBOS[seed % len(MODE_COMBOS)]
    return random_instance(seed, delivery, cascade, lb)
