"""Exact profit maximization over per-class price solutions.

The optimizer enumerates one price solution per class (highest class priced
at least as high as the next), resolves the downgrade cascade between
classes, and enforces the minimum-retention floor. Because every per-node
quantity stays proportional to the node's population share, the search runs
on class aggregates and the chosen solution is expanded back to nodes at the
end. Enumeration over the top class is a plain loop; the two lower classes
are evaluated as vectorized blocks with the downgrade fractions solved in
closed form (profit is piecewise linear in each pool fraction, so optima sit
on pool bounds, the retention floor, or the cascade kink).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import EconomicParams, ServiceClassSpec, Topology, initial_users
from .elasticity import SolutionTable

CASCADE_MODES = ("strict", "verbatim")

# slack on the user-count floor; per-node shares only sum to 1 within 1e-9
_LB_REL_TOL = 1e-6


class InfeasiblePricingError(RuntimeError):
    """No price selection can satisfy the minimum-retention floor."""


def class_revenue(users_per_node: Sequence[float], rate_gbps: float, price: float) -> float:
    """Monthly revenue of one class: users x per-user rate x price per Gbps."""
    return math.fsum(users_per_node) * rate_gbps * price


def delivery_cost(
    users_per_node_per_class: Sequence[Sequence[float]],
    classes: Sequence[ServiceClassSpec],
    topology: Topology,
    econ: EconomicParams,
    delivery: str,
) -> float:
    """Monthly provisioning cost for the served population.

    Core transport is charged per Gbps entering the core, which excludes
    nodes covered by a fog site; metro and access are charged for every
    served user regardless.
    """
    fog = topology.fog_served(delivery)
    total = 0.0
    core = 0.0
    for cls, users in zip(classes, users_per_node_per_class):
        class_total = math.fsum(users)
        class_core = math.fsum(u for u, f in zip(users, fog) if not f)
        total += class_total * cls.download_rate_gbps
        core += class_core * cls.download_rate_gbps
    return econ.core_cost_per_gbps * core + econ.metro_access_cost_per_gbps * total


def unit_serve_cost(topology: Topology, econ: EconomicParams, delivery: str) -> float:
    """Cost per Gbps of serving demand, averaged over the population mix."""
    fog = topology.fog_served(delivery)
    pops = topology.population_shares()
    total = math.fsum(pops)
    core_share = math.fsum(p for p, f in zip(pops, fog) if not f) / total
    return econ.metro_access_cost_per_gbps + econ.core_cost_per_gbps * core_share


@dataclass(frozen=True)
class PricingOutcome:
    """Selected prices, the users they retain, and the money they make."""

    class_ids: tuple[str, ...]
    selected_index: tuple[int, ...]
    prices: tuple[float, ...]
    users_per_node: tuple[tuple[float, ...], ...]
    class_revenues: tuple[float, ...]
    revenue: float
    cost: float
    profit: float
    users_per_class: tuple[float, ...]
    total_users: float
    downgraded_ab_per_node: tuple[float, ...]
    downgraded_bc_per_node: tuple[float, ...]
    pool_b_total: float
    pool_c_total: float
    delivery: str
    cascade_mode: str
    min_user_fraction: float
    unit_cost_per_gbps: float

    def users(self, class_id: str) -> tuple[float, ...]:
        return self.users_per_node[self.class_ids.index(class_id)]

    def price(self, class_id: str) -> float:
        return self.prices[self.class_ids.index(class_id)]


def _cascade_vectors(cascade_mode, yn_b, n_a_total, n_b_total, dep_a):
    """Pool of class B and the cascade kink under the chosen semantics.

    strict: only users actually leaving the class above are available below,
    and class C receives the members of B's original population that are no
    longer served in B (B's own stayers are retained first).
    verbatim: the printed bounds; the whole net-neutrality population of the
    class above is available below, independent of what it retained.
    """
    if cascade_mode == "strict":
        pool_b = yn_b + dep_a
        kink_b = np.minimum(yn_b, n_b_total)
    elif cascade_mode == "verbatim":
        pool_b = yn_b + n_a_total
        kink_b = np.zeros_like(yn_b)
    else:
        raise ValueError(f"unknown cascade mode {cascade_mode!r}; expected one of {CASCADE_MODES}")
    return pool_b, kink_b


def _allocate_block(m_b, m_c, pool_b, kink_b, pc1, pc2, order_ok, resid, tol):
    """Optimal (U_B, U_C) for every (B, C) solution pair at fixed class A.

    pc1/pc2 are class C's pool before/after the cascade kink; ``resid`` is
    the user count still needed to reach the retention floor. Infeasible or
    mis-ordered pairs get -inf profit.
    """
    b_pos = m_b >= 0.0
    c_pos = m_c >= 0.0

    # profitable B: take the whole pool, then top C up to the floor
    resid_after_b = np.maximum(0.0, resid - pool_b)
    uc_pos = np.where(c_pos[None, :], pc2, np.minimum(pc2, resid_after_b[:, None]))
    feas_pos = resid_after_b[:, None] <= pc2 + tol

    # unprofitable B, C loses less per user: fill C first, spill into B
    in_pool1 = resid <= pc1 + tol
    uc_cf = np.where(in_pool1[None, :], resid, np.minimum(pc2, resid - kink_b[:, None]))
    ub_cf = resid - uc_cf
    feas_cf = ub_cf <= pool_b[:, None] + tol

    # unprofitable B that still loses less than C: fill B first
    ub_bf = np.minimum(pool_b, resid)
    uc_bf = np.maximum(0.0, resid - ub_bf)
    feas_bf = uc_bf[:, None] <= pc2 + tol

    c_first = m_c[None, :] >= m_b[:, None]
    u_b = np.where(b_pos[:, None], pool_b[:, None], np.where(c_first, ub_cf, ub_bf[:, None]))
    u_c = np.where(b_pos[:, None], uc_pos, np.where(c_first, uc_cf, uc_bf[:, None]))
    feasible = np.where(b_pos[:, None], feas_pos, np.where(c_first, feas_cf, feas_bf))

    profit = m_b[:, None] * u_b + m_c[None, :] * u_c
    profit = np.where(feasible & order_ok, profit, -np.inf)
    return profit, u_b, u_c


def optimize_pricing(
    table: SolutionTable,
    topology: Topology,
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
    delivery: str = "cloud",
    cascade_mode: str = "strict",
) -> PricingOutcome:
    """Exact maximizer of monthly profit over the solution table.

    Ties are broken toward the lexicographically lowest price vector, then
    toward more served users. Raises InfeasiblePricingError when the
    retention floor is out of reach at every price selection.
    """
    if len(classes) != 3:
        raise ValueError("pricing model is defined for exactly three ordered classes")
    if cascade_mode not in CASCADE_MODES:
        raise ValueError(f"unknown cascade mode {cascade_mode!r}; expected one of {CASCADE_MODES}")
    ids = [c.class_id for c in classes]
    sols = [table.for_class(i) for i in ids]
    baseline = initial_users(topology, classes, econ)
    n_tot = [math.fsum(baseline[i]) for i in ids]

    kappa = unit_serve_cost(topology, econ, delivery)
    rate = [c.download_rate_gbps for c in classes]

    p = [np.array([s.price for s in class_sols]) for class_sols in sols]
    yn = [np.array([s.total_users for s in class_sols]) for class_sols in sols]
    m = [rate[i] * (p[i] - kappa) for i in range(3)]

    u_a = yn[0]
    dep_a = np.maximum(0.0, n_tot[0] - u_a)
    const_a = u_a * m[0]

    pool_b_all, kink_b = _cascade_vectors(cascade_mode, yn[1], n_tot[0], n_tot[1], 0.0)
    pc1 = yn[2] + n_tot[1]
    pc2 = pc1[None, :] - kink_b[:, None]
    order_bc = p[2][None, :] <= p[1][:, None]

    lb_target = econ.min_user_fraction * econ.total_users
    tol = _LB_REL_TOL * max(1.0, lb_target)
    nb_for_a = np.searchsorted(p[1], p[0], side="right")
    nc_for_a = np.searchsorted(p[2], p[0], side="right")

    best_profit = -np.inf
    best = None
    for ia in range(len(p[0])):
        nb, nc = int(nb_for_a[ia]), int(nc_for_a[ia])
        if nb == 0 or nc == 0:
            continue
        resid = max(0.0, lb_target - u_a[ia])
        if cascade_mode == "strict":
            pool_b = yn[1][:nb] + dep_a[ia]
        else:
            pool_b = pool_b_all[:nb]
        block, _, _ = _allocate_block(
            m[1][:nb], m[2][:nc], pool_b, kink_b[:nb],
            pc1[:nc], pc2[:nb, :nc], order_bc[:nb, :nc], resid, tol,
        )
        flat = int(np.argmax(block))
        top = block.flat[flat]
        if top == -np.inf:
            continue
        total = const_a[ia] + top
        if total > best_profit:
            best_profit = total
            best = (ia, flat // nc, flat % nc)

    if best is None:
        raise InfeasiblePricingError(
            f"retention floor {econ.min_user_fraction:.0%} of {econ.total_users:g} users "
            f"is unreachable for any admissible price selection ({delivery} delivery)"
        )
    return _expand_outcome(
        best, table, topology, classes, econ, delivery, cascade_mode,
        baseline, n_tot, kappa, lb_target, tol,
    )


def _expand_outcome(best, table, topology, classes, econ, delivery, cascade_mode,
                    baseline, n_tot, kappa, lb_target, tol) -> PricingOutcome:
    """Re-solve the winning triple and expand aggregates to per-node counts."""
    ia, ib, ic = best
    ids = [c.class_id for c in classes]
    sols = [table.for_class(i) for i in ids]
    sel = [sols[0][ia], sols[1][ib], sols[2][ic]]
    yn_tot = [s.total_users for s in sel]

    u_a_tot = yn_tot[0]
    dep_a_tot = max(0.0, n_tot[0] - u_a_tot)
    pool_b_vec, kink_vec = _cascade_vectors(
        cascade_mode, np.array([yn_tot[1]]), n_tot[0], n_tot[1], dep_a_tot
    )
    pc1 = np.array([yn_tot[2] + n_tot[1]])
    pc2 = pc1[None, :] - kink_vec[:, None]
    m_b = np.array([classes[1].download_rate_gbps * (sel[1].price - kappa)])
    m_c = np.array([classes[2].download_rate_gbps * (sel[2].price - kappa)])
    resid = max(0.0, lb_target - u_a_tot)
    _, u_b_arr, u_c_arr = _allocate_block(
        m_b, m_c, pool_b_vec, kink_vec, pc1, pc2,
        np.array([[True]]), resid, tol,
    )
    u_b_tot = float(u_b_arr[0, 0])
    u_c_tot = float(u_c_arr[0, 0])

    pool_b_tot = float(pool_b_vec[0])
    frac_b = u_b_tot / pool_b_tot if pool_b_tot > 0 else 0.0
    if cascade_mode == "strict":
        dep_b_tot = max(0.0, n_tot[1] - min(u_b_tot, yn_tot[1]))
    else:
        dep_b_tot = n_tot[1]
    pool_c_tot = yn_tot[2] + dep_b_tot
    frac_c = u_c_tot / pool_c_tot if pool_c_tot > 0 else 0.0

    # per-node expansion; every pool is proportional to the node population
    n_a = baseline[ids[0]]
    n_b = baseline[ids[1]]
    users_a = sel[0].users_per_node
    dep_a_nodes = [max(0.0, na - ua) if cascade_mode == "strict" else na
                   for na, ua in zip(n_a, users_a)]
    pool_b_nodes = [ynb + da for ynb, da in zip(sel[1].users_per_node, dep_a_nodes)]
    users_b = tuple(frac_b * pb for pb in pool_b_nodes)
    if cascade_mode == "strict":
        dep_b_nodes = [max(0.0, nb - min(ub, ynb))
                       for nb, ub, ynb in zip(n_b, users_b, sel[1].users_per_node)]
    else:
        dep_b_nodes = list(n_b)
    pool_c_nodes = [ync + db for ync, db in zip(sel[2].users_per_node, dep_b_nodes)]
    users_c = tuple(frac_c * pc for pc in pool_c_nodes)

    users = (tuple(users_a), users_b, users_c)
    prices = tuple(s.price for s in sel)
    revenues = tuple(
        class_revenue(users[i], classes[i].download_rate_gbps, prices[i])
        for i in range(3)
    )
    revenue = math.fsum(revenues)
    cost = delivery_cost(users, classes, topology, econ, delivery)
    per_class = tuple(math.fsum(u) for u in users)
    total_users = math.fsum(per_class)
    assert total_users >= lb_target - tol, "optimizer produced an infeasible outcome"

    return PricingOutcome(
        class_ids=tuple(ids),
        selected_index=(sel[0].solution_index, sel[1].solution_index, sel[2].solution_index),
        prices=prices,
        users_per_node=users,
        class_revenues=revenues,
        revenue=revenue,
        cost=cost,
        profit=revenue - cost,
        users_per_class=per_class,
        total_users=total_users,
        downgraded_ab_per_node=tuple(frac_b * d for d in dep_a_nodes),
        downgraded_bc_per_node=tuple(frac_c * d for d in dep_b_nodes),
        pool_b_total=pool_b_tot,
        pool_c_total=pool_c_tot,
        delivery=delivery,
        cascade_mode=cascade_mode,
        min_user_fraction=econ.min_user_fraction,
        unit_cost_per_gbps=kappa,
    )
