import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resistive_walks import (
    HalfLineGenerator,
    TreeGenerator,
    TreeSpec,
    build_network,
    build_tree,
    contract_vertices,
    effective,
    exhaustion,
    markov_view,
    network_from_json,
    network_to_json,
    series_parallel_reduce,
    vertex_weight,
)
from resistive_walks.errors import (
    ComplementDisconnected,
    DisconnectedGraph,
    EmptyContractionSet,
    EmptyInput,
    InvalidRadius,
    InvalidVertex,
    NonpositiveConductance,
)


def random_connected_net(rng, n):
    triples = [(i, rng.integers(0, i), float(rng.uniform(0.1, 10))) for i in range(1, n)]
    extra = rng.integers(0, n, size=(n, 2))
    triples += [
        (int(a), int(b), float(rng.uniform(0.1, 10))) for a, b in extra if a != b
    ]
    return build_network(triples)


class TestBuildNetwork:
    def test_single_unit_edge(self):
        net = build_network([(0, 1, 1.0)])
        assert net.vertex_count == 2
        assert vertex_weight(net, 0) == 1.0
        assert vertex_weight(net, 1) == 1.0

    def test_parallel_edges_merge(self):
        net = build_network([(0, 1, 1.0), (0, 1, 1.0)])
        assert net.edge_count == 1
        assert net.edge_c[0] == 2.0

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedGraph):
            build_network([(0, 1, 1.0), (2, 3, 1.0)])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            build_network([])

    def test_nonpositive_conductance_rejected(self):
        with pytest.raises(NonpositiveConductance):
            build_network([(0, 1, -1.0)])
        with pytest.raises(NonpositiveConductance):
            build_network([(0, 1, 0.0)])

    def test_self_loops_dropped(self):
        net = build_network([(0, 0, 5.0), (0, 1, 1.0)])
        assert net.edge_count == 1

    def test_labels_remapped_dense(self):
        net = build_network([("a", "c", 1.0), ("c", "b", 2.0)])
        assert net.vertex_count == 3
        assert net.labels == ("a", "b", "c")
        assert net.index_of("c") == 2

    def test_vertex_weight_sums_incident(self):
        net = build_network([(0, 1, 0.5), (0, 2, 1.5), (1, 2, 1.0)])
        assert vertex_weight(net, 0) == 2.0

    def test_invalid_vertex(self):
        net = build_network([(0, 1, 1.0)])
        with pytest.raises(InvalidVertex):
            vertex_weight(net, 7)


class TestMarkovView:
    def test_single_edge_sole_neighbor(self):
        mv = markov_view(build_network([(0, 1, 3.0)]))
        assert mv.p[0, 1] == 1.0
        assert mv.p[1, 0] == 1.0

    def test_star_normalization(self):
        net = build_network([(0, 1, 1.0), (0, 2, 2.0), (0, 3, 1.0)])
        mv = markov_view(net)
        assert mv.p[0, 1] == 0.25
        assert mv.p[0, 2] == 0.5
        assert mv.p[0, 3] == 0.25

    def test_tree_uniform_rows(self):
        t = build_tree(TreeSpec(2, 2))
        mv = markov_view(t.net)
        row = mv.p[0].toarray().ravel()
        assert np.allclose(row[row > 0], 1.0 / 3.0)

    @given(st.integers(0, 2**32 - 1), st.integers(3, 12))
    @settings(max_examples=25, deadline=None)
    def test_stochastic_and_detailed_balance(self, seed, n):
        net = random_connected_net(np.random.default_rng(seed), n)
        mv = markov_view(net)
        rows = np.asarray(mv.p.sum(axis=1)).ravel()
        assert np.max(np.abs(rows - 1.0)) < 1e-12
        flux = mv.p.multiply(mv.pi[:, None])
        assert abs(flux - flux.T).max() < 1e-12

    @given(st.integers(0, 2**32 - 1), st.integers(2, 12))
    @settings(max_examples=25, deadline=None)
    def test_handshake_identity(self, seed, n):
        net = random_connected_net(np.random.default_rng(seed), n)
        assert np.isclose(net.pi.sum(), 2.0 * net.edge_c.sum(), rtol=1e-14)


class TestContraction:
    def test_path_tail_contracts_to_single_edge(self):
        net = build_network([(0, 1, 1.0), (1, 2, 1.0)])
        out, z = contract_vertices(net, {1, 2})
        assert out.vertex_count == 2
        assert out.edge_count == 1
        assert out.edge_c[0] == 1.0

    def test_tree_leaves_merge(self):
        t = build_tree(TreeSpec(2, 1))
        out, z = contract_vertices(t.net, {1, 2, 3})
        assert out.vertex_count == 2
        assert out.edge_c[0] == 3.0

    def test_contract_everything_rejected(self):
        net = build_network([(0, 1, 1.0)])
        with pytest.raises(ComplementDisconnected):
            contract_vertices(net, {0, 1})

    def test_empty_set_rejected(self):
        net = build_network([(0, 1, 1.0)])
        with pytest.raises(EmptyContractionSet):
            contract_vertices(net, set())

    def test_disconnected_complement_rejected(self):
        net = build_network([(0, 1, 1.0), (1, 2, 1.0)])
        with pytest.raises(ComplementDisconnected):
            contract_vertices(net, {1})

    def test_dead_end_contraction_preserves_resistance(self):
        # hanging branch carries no current between 0 and 2
        net = build_network([(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0), (3, 4, 1.0)])
        r_before = effective(net, 0, {2}).resistance
        out, z = contract_vertices(net, {3, 4})
        r_after = effective(out, 0, {2}).resistance
        assert abs(r_before - r_after) < 1e-12


class TestExhaustion:
    def test_radius_zero_tree(self):
        net, z = exhaustion(TreeGenerator(2), 0)
        assert net.vertex_count == 2
        assert net.edge_c[0] == 3.0

    def test_radius_one_tree(self):
        net, z = exhaustion(TreeGenerator(2), 1)
        assert net.vertex_count == 5
        assert z == 4
        # each level-1 vertex carries a merged conductance-2 edge to z
        zc = net.edge_c[net.incident_edges(z)]
        assert np.allclose(zc, 2.0)

    def test_nested_vertex_sets(self):
        gen = TreeGenerator(2)
        sizes = [exhaustion(gen, n)[0].vertex_count for n in range(4)]
        assert sizes == sorted(sizes)

    def test_negative_radius(self):
        with pytest.raises(InvalidRadius):
            exhaustion(HalfLineGenerator(), -1)


class TestSeriesParallelReduce:
    def test_series_unit_resistors(self):
        net = build_network([(0, 1, 1.0), (1, 2, 1.0)])
        out = series_parallel_reduce(net, {0, 2})
        assert out.vertex_count == 2
        assert abs(1.0 / out.edge_c[0] - 2.0) < 1e-15

    def test_parallel_merge(self):
        net = build_network([(0, 1, 1.0), (0, 1, 1.0), (0, 1, 1.0)])
        out = series_parallel_reduce(net, {0, 1})
        assert out.edge_count == 1
        assert out.edge_c[0] == 3.0

    def test_contracted_tree_ladder(self):
        t = build_tree(TreeSpec(2, 1, contract_boundary=True))
        out = series_parallel_reduce(t.net, {0, t.z})
        assert out.vertex_count == 2
        assert abs(1.0 / out.edge_c[0] - 0.5) < 1e-12

    def test_irreducible_left_alone(self):
        # K4 has no degree-2 vertices; fixed point is the input
        edges = [(a, b, 1.0) for a in range(4) for b in range(a + 1, 4)]
        net = build_network(edges)
        out = series_parallel_reduce(net, {0, 3})
        assert out.vertex_count == 4

    @given(st.integers(0, 2**32 - 1), st.integers(4, 10))
    @settings(max_examples=20, deadline=None)
    def test_preserves_effective_resistance(self, seed, n):
        net = random_connected_net(np.random.default_rng(seed), n)
        keep = {0, n - 1}
        out = series_parallel_reduce(net, keep)
        a, z = out.index_of(0), out.index_of(n - 1)
        r_full = effective(net, 0, {n - 1}).resistance
        r_red = effective(out, a, {z}).resistance
        assert abs(r_full - r_red) < 1e-10


class TestJsonFormat:
    def test_roundtrip(self):
        net = build_network([(0, 1, 1.5), (1, 2, 0.5)])
        doc = json.loads(json.dumps(network_to_json(net)))
        back = network_from_json(doc)
        assert back.vertex_count == net.vertex_count
        assert np.allclose(back.edge_c, net.edge_c)

    def test_rejects_bad_conductance(self):
        doc = {"vertices": 2, "edges": [{"u": 0, "v": 1, "c": -1.0}]}
        with pytest.raises(NonpositiveConductance):
            network_from_json(doc)

    def test_rejects_out_of_range_id(self):
        doc = {"vertices": 2, "edges": [{"u": 0, "v": 5, "c": 1.0}]}
        with pytest.raises(InvalidVertex):
            network_from_json(doc)
