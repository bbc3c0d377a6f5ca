"""Profit-driven class pricing under demand elasticity, core-network
dimensioning, and IP-over-WDM power evaluation."""

from .domain import (
    EconomicParams,
    LinkRecord,
    NodeRecord,
    PowerParams,
    ServiceClassSpec,
    Topology,
    TopologyParseError,
    TopologyValidationError,
    default_service_classes,
    initial_users,
    load_builtin_topology,
    load_topology,
    select_fog_nodes,
    serialize_topology,
)
from .elasticity import (
    GridSpec,
    PriceSolution,
    SolutionTable,
    anchor_only_table,
    build_solution_table,
    demand_response,
    solution_table_from_prices,
    solution_table_to_csv,
)
from .pricing import (
    InfeasiblePricingError,
    PricingOutcome,
    class_revenue,
    delivery_cost,
    optimize_pricing,
    unit_serve_cost,
)
from .oracle import brute_force_oracle, oracle_gap_bound
from .dimensioning import (
    DemandMatrix,
    LinkLoad,
    NetworkDimensioning,
    RoutingError,
    assign_to_datacenters,
    cloud_demands,
    dimension_outcome,
    dimensioning_to_csv,
    route_and_size,
)
from .power import PowerBreakdown, edfa_count, network_power, power_to_csv, regen_count
from .scenarios import (
    ScenarioConfig,
    ScenarioReport,
    ScenarioRow,
    emit_report,
    load_config,
    run_scenario,
    sweep,
)

__version__ = "0.1.0"
