"""Exhaustive reference solver for small pricing instances.

Used in tests to sandwich the production optimizer: every price triple is
enumerated and the two downgrade fractions are swept over a fixed 1/100
grid, with all money computed per node from first principles. Nothing here
shares logic with the closed-form path in ``pricing``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .domain import EconomicParams, ServiceClassSpec, Topology, initial_users
from .elasticity import SolutionTable
from .pricing import CASCADE_MODES, InfeasiblePricingError, PricingOutcome

MAX_NODES = 4
MAX_PRICES = 12
FRACTION_STEPS = 101  # downgrade fractions on 0, 0.01, ..., 1


def brute_force_oracle(
    table: SolutionTable,
    topology: Topology,
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
    delivery: str = "cloud",
    cascade_mode: str = "strict",
) -> PricingOutcome:
    if cascade_mode not in CASCADE_MODES:
        raise ValueError(f"unknown cascade mode {cascade_mode!r}")
    if topology.node_count > MAX_NODES:
        raise ValueError(f"oracle accepts at most {MAX_NODES} nodes, got {topology.node_count}")
    ids = [c.class_id for c in classes]
    sols = [table.for_class(i) for i in ids]
    for class_sols in sols:
        if len(class_sols) > MAX_PRICES:
            raise ValueError(f"oracle accepts at most {MAX_PRICES} prices per class")

    baseline = initial_users(topology, classes, econ)
    n_a, n_b = baseline[ids[0]], baseline[ids[1]]
    fog = topology.fog_served(delivery)
    rates = [c.download_rate_gbps for c in classes]
    lb_target = econ.min_user_fraction * econ.total_users
    tol = 1e-6 * max(1.0, lb_target)

    frac = np.linspace(0.0, 1.0, FRACTION_STEPS)
    f_b = frac[:, None]
    f_c = frac[None, :]

    best = None  # (profit, users_total, ia, ib, ic, fb, fc)
    for ia, sol_a in enumerate(sols[0]):
        for ib, sol_b in enumerate(sols[1]):
            if sol_b.price > sol_a.price:
                continue
            for ic, sol_c in enumerate(sols[2]):
                if sol_c.price > sol_b.price:
                    continue
                users_total = np.zeros((FRACTION_STEPS, FRACTION_STEPS))
                traffic_all = np.zeros_like(users_total)
                traffic_core = np.zeros_like(users_total)
                revenue = np.zeros_like(users_total)
                for d in range(topology.node_count):
                    u_a = sol_a.users_per_node[d]
                    if cascade_mode == "strict":
                        dep_a = max(0.0, n_a[d] - u_a)
                    else:
                        dep_a = n_a[d]
                    pool_b = sol_b.users_per_node[d] + dep_a
                    u_b = f_b * pool_b
                    if cascade_mode == "strict":
                        dep_b = np.maximum(
                            0.0, n_b[d] - np.minimum(u_b, sol_b.users_per_node[d])
                        )
                    else:
                        dep_b = n_b[d]
                    pool_c = sol_c.users_per_node[d] + dep_b
                    u_c = f_c * pool_c
                    users_total += u_a + u_b + u_c
                    node_traffic = u_a * rates[0] + u_b * rates[1] + u_c * rates[2]
                    traffic_all += node_traffic
                    if not fog[d]:
                        traffic_core += node_traffic
                    revenue += (u_a * rates[0] * sol_a.price
                                + u_b * rates[1] * sol_b.price
                                + u_c * rates[2] * sol_c.price)
                cost = (econ.core_cost_per_gbps * traffic_core
                        + econ.metro_access_cost_per_gbps * traffic_all)
                profit = revenue - cost
                feasible = users_total >= lb_target - tol
                if not feasible.any():
                    continue
                profit = np.where(feasible, profit, -np.inf)
                top = profit.max()
                # among profit ties inside the triple, prefer more users
                ties = profit == top
                users_masked = np.where(ties, users_total, -np.inf)
                flat = int(np.argmax(users_masked))
                cand = (float(top), float(users_masked.flat[flat]),
                        ia, ib, ic, flat // FRACTION_STEPS, flat % FRACTION_STEPS)
                if best is None or cand[0] > best[0]:
                    best = cand

    if best is None:
        raise InfeasiblePricingError("oracle: retention floor unreachable on this instance")
    return _oracle_outcome(best, sols, topology, classes, econ, delivery,
                           cascade_mode, baseline, frac)


def _oracle_outcome(best, sols, topology, classes, econ, delivery, cascade_mode,
                    baseline, frac) -> PricingOutcome:
    _, _, ia, ib, ic, kb, kc = best
    ids = [c.class_id for c in classes]
    sel = [sols[0][ia], sols[1][ib], sols[2][ic]]
    fb, fc = frac[kb], frac[kc]
    n_a, n_b = baseline[ids[0]], baseline[ids[1]]
    fog = topology.fog_served(delivery)
    rates = [c.download_rate_gbps for c in classes]

    users_a, users_b, users_c = [], [], []
    down_ab, down_bc = [], []
    pool_b_total = pool_c_total = 0.0
    for d in range(topology.node_count):
        u_a = sel[0].users_per_node[d]
        dep_a = max(0.0, n_a[d] - u_a) if cascade_mode == "strict" else n_a[d]
        pool_b = sel[1].users_per_node[d] + dep_a
        u_b = fb * pool_b
        if cascade_mode == "strict":
            dep_b = max(0.0, n_b[d] - min(u_b, sel[1].users_per_node[d]))
        else:
            dep_b = n_b[d]
        pool_c = sel[2].users_per_node[d] + dep_b
        u_c = fc * pool_c
        users_a.append(u_a)
        users_b.append(u_b)
        users_c.append(u_c)
        down_ab.append(fb * dep_a)
        down_bc.append(fc * dep_b)
        pool_b_total += pool_b
        pool_c_total += pool_c

    users = (tuple(users_a), tuple(users_b), tuple(users_c))
    prices = tuple(s.price for s in sel)
    revenues = []
    traffic_all = traffic_core = 0.0
    for i in range(3):
        revenues.append(math.fsum(users[i]) * rates[i] * prices[i])
        traffic_all += math.fsum(users[i]) * rates[i]
        traffic_core += math.fsum(
            u for u, f in zip(users[i], fog) if not f
        ) * rates[i]
    revenue = math.fsum(revenues)
    cost = (econ.core_cost_per_gbps * traffic_core
            + econ.metro_access_cost_per_gbps * traffic_all)
    per_class = tuple(math.fsum(u) for u in users)
    pops = topology.population_shares()
    core_pop = math.fsum(p for p, f in zip(pops, fog) if not f) / math.fsum(pops)
    return PricingOutcome(
        class_ids=tuple(ids),
        selected_index=(sel[0].solution_index, sel[1].solution_index, sel[2].solution_index),
        prices=prices,
        users_per_node=users,
        class_revenues=tuple(revenues),
        revenue=revenue,
        cost=cost,
        profit=revenue - cost,
        users_per_class=per_class,
        total_users=math.fsum(per_class),
        downgraded_ab_per_node=tuple(down_ab),
        downgraded_bc_per_node=tuple(down_bc),
        pool_b_total=pool_b_total,
        pool_c_total=pool_c_total,
        delivery=delivery,
        cascade_mode=cascade_mode,
        min_user_fraction=econ.min_user_fraction,
        unit_cost_per_gbps=(econ.metro_access_cost_per_gbps
                            + econ.core_cost_per_gbps * core_pop),
    )


def oracle_gap_bound(outcome: PricingOutcome, classes: Sequence[ServiceClassSpec]) -> float:
    """Profit the oracle may concede to fraction discretization.

    Moving the class-B fraction by one grid step shifts up to
    step * pool_B users in B and, through the cascade, displaces at most as
    many from C's pool; the class-C fraction moves up to step * pool_C users.
    """
    step = 1.0 / (FRACTION_STEPS - 1)
    m_b = classes[1].download_rate_gbps * abs(outcome.prices[1] - outcome.unit_cost_per_gbps)
    m_c = classes[2].download_rate_gbps * abs(outcome.prices[2] - outcome.unit_cost_per_gbps)
    return step * ((m_b + m_c) * outcome.pool_b_total + m_c * outcome.pool_c_total) \
        + 1e-6 * (1.0 + abs(outcome.profit))
