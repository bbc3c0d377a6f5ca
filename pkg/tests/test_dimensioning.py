"""Demand construction, datacenter assignment, routing, and sizing."""

import math

import pytest

from netprofit.dimensioning import (
    DemandMatrix,
    RoutingError,
    assign_to_datacenters,
    cloud_demands,
    dimension_outcome,
    dimensioning_to_csv,
    route_and_size,
)
from netprofit.domain import PowerParams, parse_topology, default_service_classes, EconomicParams
from netprofit.elasticity import anchor_only_table
from netprofit.pricing import optimize_pricing

POWER = PowerParams()


def nn_outcome(topology, classes, econ, delivery):
    table = anchor_only_table(classes, econ, topology)
    return optimize_pricing(table, topology, classes, econ, delivery, "strict")


LINE3 = """
[nodes]
1,a,0.0,1,0
2,b,0.0,0,0
3,c,1.0,0,0
[links]
1,2,100
2,3,100
"""


class TestCloudDemands:
    def test_fog_scenario_zeroes_everything(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "fog")
        demands = cloud_demands(out, att25, classes_e02)
        assert demands.total_demand_gbps == 0.0

    def test_thousand_class_a_users(self):
        topo = parse_topology(LINE3)
        classes = default_service_classes()
        econ = EconomicParams(total_users=1000 / 0.19)  # 1000 class-A users at node 3
        out = nn_outcome(topo, classes, econ, "cloud")
        demands = cloud_demands(out, topo, classes)
        assert demands.demand_per_node_class[0][2] == pytest.approx(18.0, rel=1e-9)

    def test_att25_nn_total(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        demands = cloud_demands(out, att25, classes_e02)
        assert demands.total_demand_gbps == pytest.approx(14_313.6, rel=1e-6)

    def test_cloud_fog_zeroes_fog_nodes_only(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud-fog")
        demands = cloud_demands(out, att25, classes_e02)
        fog = att25.fog_served("cloud-fog")
        for d in range(att25.node_count):
            node_demand = demands.node_demand(d)
            assert (node_demand == 0.0) == fog[d] or att25.population_shares()[d] == 0


class TestAssignment:
    def test_local_service_at_datacenter(self):
        topo = parse_topology("""
        [nodes]
        1,dc,1.0,1,0
        2,b,0.0,0,0
        [links]
        1,2,100
        """)
        classes = default_service_classes()
        econ = EconomicParams()
        out = nn_outcome(topo, classes, econ, "cloud")
        assigned = assign_to_datacenters(cloud_demands(out, topo, classes), topo)
        assert assigned.flows == ((1, 1, pytest.approx(14_313.6, rel=1e-6)),)

    def test_line_routes_two_hops(self):
        topo = parse_topology(LINE3)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 0.0, 10.0), (0.0,) * 3, (0.0,) * 3),
            flows=(),
        )
        assigned = assign_to_datacenters(demands, topo)
        assert assigned.flows == ((1, 3, 10.0),)
        dim = route_and_size(assigned, topo, POWER)
        assert [(l.m, l.n) for l in dim.link_loads] == [(1, 2), (2, 3)]
        assert dim.routes == ((1, 3, (1, 2, 3)),)

    def test_equidistant_tie_goes_to_lower_id(self):
        topo = parse_topology("""
        [nodes]
        1,dc_a,0.0,1,0
        2,middle,1.0,0,0
        3,dc_b,0.0,1,0
        [links]
        1,2,100
        2,3,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 5.0, 0.0), (0.0,) * 3, (0.0,) * 3),
            flows=(),
        )
        assigned = assign_to_datacenters(demands, topo)
        assert assigned.flows[0][0] == 1

    def test_km_breaks_hop_ties(self):
        topo = parse_topology("""
        [nodes]
        1,dc_far,0.0,1,0
        2,middle,1.0,0,0
        3,dc_near,0.0,1,0
        [links]
        1,2,500
        2,3,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 5.0, 0.0), (0.0,) * 3, (0.0,) * 3),
            flows=(),
        )
        assigned = assign_to_datacenters(demands, topo)
        assert assigned.flows[0][0] == 3

    def test_flow_conservation(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        demands = cloud_demands(out, att25, classes_e02)
        assigned = assign_to_datacenters(demands, att25)
        served = {}
        for s, d, gbps in assigned.flows:
            served[d] = served.get(d, 0.0) + gbps
        for d in range(att25.node_count):
            expected = demands.node_demand(d)
            if expected > 0:
                assert served[d + 1] == pytest.approx(expected, rel=1e-9)

    def test_no_datacenter_raises(self):
        topo = parse_topology("""
        [nodes]
        1,a,1.0,0,0
        2,b,0.0,0,0
        [links]
        1,2,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((5.0, 0.0), (0.0,) * 2, (0.0,) * 2), flows=()
        )
        with pytest.raises(RoutingError):
            assign_to_datacenters(demands, topo)


class TestRouteAndSize:
    def test_wavelength_and_fiber_ceilings(self):
        topo = parse_topology("""
        [nodes]
        1,dc,0.0,1,0
        2,sink,1.0,0,0
        [links]
        1,2,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 50.0), (0.0,) * 2, (0.0,) * 2), flows=()
        )
        dim = route_and_size(assign_to_datacenters(demands, topo), topo, POWER)
        load = dim.link_loads[0]
        assert load.wavelengths == 2  # ceil(50 / 40)
        assert load.fibers == 1

    def test_zero_flows(self, att25):
        dim = route_and_size(DemandMatrix(demand_per_node_class=((),), flows=()),
                             att25, POWER)
        assert dim.link_loads == ()
        assert dim.aggregation_ports == ()

    def test_aggregation_ports_ceiling(self):
        topo = parse_topology("""
        [nodes]
        1,dc,0.0,1,0
        2,sink,1.0,0,0
        [links]
        1,2,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 100.0), (0.0,) * 2, (0.0,) * 2), flows=()
        )
        dim = route_and_size(assign_to_datacenters(demands, topo), topo, POWER)
        assert dim.aggregation_ports == ((1, 3),)  # ceil(100 / 40)

    def test_exact_multiple_no_overshoot(self):
        topo = parse_topology("""
        [nodes]
        1,dc,0.0,1,0
        2,sink,1.0,0,0
        [links]
        1,2,100
        """)
        demands = DemandMatrix(
            demand_per_node_class=((0.0, 40.0), (0.0,) * 2, (0.0,) * 2), flows=()
        )
        dim = route_and_size(assign_to_datacenters(demands, topo), topo, POWER)
        assert dim.link_loads[0].wavelengths == 1

    def test_quantization_dominance(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        _, dim = dimension_outcome(out, att25, classes_e02, POWER)
        carried = math.fsum(l.traffic_gbps for l in dim.link_loads)
        quantized = sum(l.wavelengths for l in dim.link_loads) * POWER.wavelength_rate_gbps
        assert quantized >= carried - 1e-6

    def test_link_capacity_invariant(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        _, dim = dimension_outcome(out, att25, classes_e02, POWER)
        for load in dim.link_loads:
            assert load.traffic_gbps <= load.wavelengths * POWER.wavelength_rate_gbps + 1e-6
            assert load.wavelengths <= load.fibers * POWER.wavelengths_per_fiber

    def test_node_flow_balance(self, att25, classes_e02, econ):
        # inbound + locally sourced equals outbound + locally sunk, per node
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        demands, dim = dimension_outcome(out, att25, classes_e02, POWER)
        inbound = {i: 0.0 for i in range(1, 26)}
        outbound = {i: 0.0 for i in range(1, 26)}
        for load in dim.link_loads:
            outbound[load.m] += load.traffic_gbps
            inbound[load.n] += load.traffic_gbps
        sourced = {i: 0.0 for i in range(1, 26)}
        sunk = {i: 0.0 for i in range(1, 26)}
        for s, d, gbps in demands.flows:
            if s != d:
                sourced[s] += gbps
                sunk[d] += gbps
        for node in range(1, 26):
            lhs = inbound[node] + sourced[node]
            rhs = outbound[node] + sunk[node]
            assert lhs == pytest.approx(rhs, abs=1e-6)

    def test_fog_monotonicity(self, att25, classes_e02, econ):
        # moving nodes onto fog can only shed wavelengths, never add them
        out_cloud = nn_outcome(att25, classes_e02, econ, "cloud")
        out_fog = nn_outcome(att25, classes_e02, econ, "cloud-fog")
        _, dim_cloud = dimension_outcome(out_cloud, att25, classes_e02, POWER)
        _, dim_fog = dimension_outcome(out_fog, att25, classes_e02, POWER)
        cloud_w = dim_cloud.wavelengths()
        for link, w in dim_fog.wavelengths().items():
            assert w <= cloud_w.get(link, 0)

    def test_routes_follow_physical_adjacencies(self, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        _, dim = dimension_outcome(out, att25, classes_e02, POWER)
        distances = att25.link_distances()
        for _, _, path in dim.routes:
            for m, n in zip(path, path[1:]):
                assert (m, n) in distances

    def test_csv_dump(self, tmp_path, att25, classes_e02, econ):
        out = nn_outcome(att25, classes_e02, econ, "cloud")
        _, dim = dimension_outcome(out, att25, classes_e02, POWER)
        path = tmp_path / "dim.csv"
        dimensioning_to_csv(dim, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "link_m,link_n,traffic_gbps,wavelengths,fibers"
        assert len(lines) == len(dim.link_loads) + 1
