"""Candidate pricing solutions: price grids and the subscriber response they induce.

Each service class gets an ordered list of (price, per-node subscriber counts)
pairs. Replacing the price-times-users product with a selection over this
lookup set is what keeps the downstream profit maximization linear.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .domain import (
    EconomicParams,
    ServiceClassSpec,
    Topology,
    initial_users,
    validate_service_classes,
)

# multipliers snap to this resolution so the base-price anchor is exact
_MULT_DECIMALS = 9


def demand_response(
    price: float, base_price: float, elasticity: float, base_users: float
) -> float:
    """Subscribers retained at ``price`` given a linear elasticity response.

    A one percent price rise sheds ``elasticity`` percent of demand, and a
    price cut attracts new demand at the same rate. Demand is clamped at zero
    and not capped above.
    """
    if base_price <= 0:
        raise ValueError(f"base_price must be > 0, got {base_price}")
    if base_users < 0:
        raise ValueError(f"base_users must be >= 0, got {base_users}")
    if elasticity < 0:
        raise ValueError(f"elasticity must be >= 0, got {elasticity}")
    relative_change = (price - base_price) / base_price
    return max(0.0, base_users * (1.0 - elasticity * relative_change))


@dataclass(frozen=True)
class GridSpec:
    """Price grid as multipliers of the base price.

    ``step`` and ``lower`` are fractions of the base price. ``upper`` of None
    means: stop at the first grid point where demand hits zero (multiplier
    1 + 1/elasticity), never beyond ``cap``.
    """

    step: float = 0.01
    lower: float = 0.5
    upper: float | None = None
    cap: float = 10.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be > 0")
        if self.lower <= 0:
            raise ValueError("grid lower bound must be > 0")

    def multipliers(self, elasticity: float) -> list[float]:
        if self.upper is not None:
            upper = self.upper
        elif elasticity > 0:
            upper = min(self.cap, 1.0 + 1.0 / elasticity)
        else:
            upper = self.cap
        if upper < self.lower:
            raise ValueError(f"empty price grid: upper {upper} < lower {self.lower}")
        # integer stepping avoids accumulation drift; round the endpoint up so
        # the first zero-demand price is included when it sits on the grid
        first = math.ceil(round(self.lower / self.step, _MULT_DECIMALS))
        last = math.ceil(round(upper / self.step, _MULT_DECIMALS) - 1e-9)
        mults = [round(k * self.step, _MULT_DECIMALS) for k in range(first, last + 1)]
        mults = [1.0 if abs(m - 1.0) < 1e-9 else m for m in mults]
        if 1.0 not in mults:  # net-neutrality anchor is always present
            mults.append(1.0)
            mults.sort()
        return mults


@dataclass(frozen=True)
class PriceSolution:
    """One candidate price for a class and the users it retains per node."""

    class_id: str
    solution_index: int
    price: float
    users_per_node: tuple[float, ...]

    def __post_init__(self):
        if self.price <= 0:
            raise ValueError(f"solution price must be > 0, got {self.price}")

    @property
    def total_users(self) -> float:
        return math.fsum(self.users_per_node)


@dataclass(frozen=True)
class SolutionTable:
    """Per-class ordered price solutions, including the base-price anchor."""

    solutions: dict[str, tuple[PriceSolution, ...]]
    base_price: float

    def for_class(self, class_id: str) -> tuple[PriceSolution, ...]:
        return self.solutions[class_id]

    def anchor(self, class_id: str) -> PriceSolution:
        for s in self.solutions[class_id]:
            if s.price == self.base_price:
                return s
        raise ValueError(f"class {class_id} has no base-price anchor")


def build_solution_table(
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
    topology: Topology,
    grid: GridSpec | None = None,
) -> SolutionTable:
    """Tabulate the subscriber response of every class over its price grid."""
    grid = grid or GridSpec()
    base = econ.base_price_per_gbps
    prices = {
        c.class_id: [base * m if m != 1.0 else base for m in grid.multipliers(c.elasticity)]
        for c in classes
    }
    return solution_table_from_prices(classes, econ, topology, prices)


def solution_table_from_prices(
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
    topology: Topology,
    prices: dict[str, Sequence[float]],
) -> SolutionTable:
    """Build a table from explicit per-class price lists.

    The base price is appended when missing; duplicates are rejected. Every
    node keeps the same retention fraction, so per-node counts stay
    proportional to the initial distribution.
    """
    validate_service_classes(classes)
    base = econ.base_price_per_gbps
    baseline = initial_users(topology, classes, econ)
    table: dict[str, tuple[PriceSolution, ...]] = {}
    for c in classes:
        price_list = sorted(prices[c.class_id])
        if base not in price_list:
            price_list = sorted(price_list + [base])
        if any(a == b for a, b in zip(price_list, price_list[1:])):
            raise ValueError(f"class {c.class_id}: duplicate prices in grid")
        per_node = baseline[c.class_id]
        entries = []
        for idx, price in enumerate(price_list):
            users = tuple(
                demand_response(price, base, c.elasticity, n) for n in per_node
            )
            entries.append(PriceSolution(c.class_id, idx, price, users))
        table[c.class_id] = tuple(entries)
    return SolutionTable(solutions=table, base_price=base)


def anchor_only_table(
    classes: Sequence[ServiceClassSpec],
    econ: EconomicParams,
    topology: Topology,
) -> SolutionTable:
    """Degenerate table holding only the net-neutrality price: the baseline."""
    base = econ.base_price_per_gbps
    return solution_table_from_prices(
        classes, econ, topology, {c.class_id: [base] for c in classes}
    )


def solution_table_to_csv(table: SolutionTable, path: str | Path) -> None:
    """Dump as class,solution_index,price,retention_fraction,total_users."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "solution_index", "price",
                         "retention_fraction", "total_users"])
        for class_id in table.solutions:
            anchor_total = table.anchor(class_id).total_users
            for s in table.solutions[class_id]:
                retention = s.total_users / anchor_total if anchor_total > 0 else 0.0
                writer.writerow([
                    class_id, s.solution_index, f"{s.price:.6f}",
                    f"{retention:.9f}", f"{s.total_users:.6f}",
                ])
