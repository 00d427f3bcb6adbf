import numpy as np
import pytest

from oracles import absorbing_hit_probability, expected_visits
from resistive_walks import (
    TreeSpec,
    WalkConfig,
    build_network,
    build_tree,
    effective,
    estimate_escape,
    estimate_green,
    estimate_hitting,
    estimate_transitions,
    markov_view,
    oracle_green_hitting,
    run_walks,
)
from resistive_walks.errors import InvalidStart, NotAdjacent, VertexInTarget
from test_network import random_connected_net


def path3():
    return build_network([(0, 1, 1.0), (1, 2, 1.0)])


class TestDeterminism:
    def test_bit_identical_reruns(self):
        net = random_connected_net(np.random.default_rng(0), 12)
        cfg = WalkConfig(
            seed=123,
            num_walks=500,
            start=0,
            absorbing=(11,),
            watch_vertices=(0, 5),
            watch_edges=((0, int(net.neighbors(0)[0])),),
            track_visits=True,
            track_transitions=True,
        )
        s1 = run_walks(net, cfg)
        s2 = run_walks(net, cfg)
        assert np.array_equal(s1.absorbed_at, s2.absorbed_at)
        assert np.array_equal(s1.steps, s2.steps)
        assert np.array_equal(s1.watch_visit_counts, s2.watch_visit_counts)
        assert np.array_equal(s1.watch_edge_counts, s2.watch_edge_counts)
        assert np.array_equal(s1.visits, s2.visits)
        assert np.array_equal(s1.transition_counts, s2.transition_counts)

    def test_seed_changes_output(self):
        net = path3()
        a = run_walks(net, WalkConfig(seed=1, num_walks=200, start=1, absorbing=(0, 2)))
        b = run_walks(net, WalkConfig(seed=2, num_walks=200, start=1, absorbing=(0, 2)))
        assert not np.array_equal(a.absorbed_at, b.absorbed_at)

    def test_prefix_stability(self):
        # the per-walk stream depends only on (seed, walk index, step)
        net = path3()
        small = run_walks(net, WalkConfig(seed=9, num_walks=100, start=1, absorbing=(0, 2)))
        big = run_walks(net, WalkConfig(seed=9, num_walks=300, start=1, absorbing=(0, 2)))
        assert np.array_equal(small.absorbed_at, big.absorbed_at[:100])
        assert np.array_equal(small.steps, big.steps[:100])


class TestTrivialCases:
    def test_single_edge_one_step(self):
        net = build_network([(0, 1, 1.0)])
        stats = run_walks(net, WalkConfig(seed=0, num_walks=50, start=0, absorbing=(1,)))
        assert stats.hit_count(1) == 50
        assert np.all(stats.steps == 1)
        assert stats.censored == 0

    def test_censoring_without_absorbing(self):
        net = path3()
        stats = run_walks(net, WalkConfig(seed=0, num_walks=20, start=1, max_steps=10))
        assert stats.censored == 20
        assert np.all(stats.absorbed_at == -1)
        assert np.all(stats.steps == 10)

    def test_start_equals_target(self):
        net = path3()
        cfg = WalkConfig(seed=0, num_walks=40, start=1, absorbing=(1,))
        est, se = estimate_hitting(net, cfg, 1)
        assert est == 1.0 and se == 0.0

    def test_green_absorbing_start_is_one(self):
        net = path3()
        cfg = WalkConfig(seed=0, num_walks=40, start=1, absorbing=(1,))
        est, se = estimate_green(net, cfg, 1)
        assert est == 1.0 and se == 0.0

    def test_escape_single_edge_certain(self):
        net = build_network([(0, 1, 1.0)])
        cfg = WalkConfig(seed=0, num_walks=30, start=0)
        est, se = estimate_escape(net, cfg, 0, {1})
        assert est == 1.0 and se == 0.0

    def test_errors(self):
        net = path3()
        with pytest.raises(InvalidStart):
            run_walks(net, WalkConfig(seed=0, num_walks=1, start=9, absorbing=(0,)))
        with pytest.raises(NotAdjacent):
            estimate_transitions(
                net, WalkConfig(seed=0, num_walks=1, start=0, absorbing=(2,)), 0, 2
            )
        with pytest.raises(VertexInTarget):
            estimate_escape(net, WalkConfig(seed=0, num_walks=1, start=0), 0, {0, 2})
        with pytest.raises(ValueError):
            WalkConfig(seed=0, num_walks=0, start=0)


class TestAccounting:
    def test_hits_plus_censored(self):
        net = random_connected_net(np.random.default_rng(4), 15)
        cfg = WalkConfig(seed=7, num_walks=400, start=0, absorbing=(13, 14), max_steps=30)
        stats = run_walks(net, cfg)
        assert sum(stats.hits.values()) + stats.censored == 400

    def test_visits_match_steps(self):
        # total visit tally = one per walk per time 0..T
        net = path3()
        cfg = WalkConfig(
            seed=3, num_walks=100, start=1, absorbing=(0, 2), track_visits=True
        )
        stats = run_walks(net, cfg)
        assert stats.visits.sum() == stats.steps.sum() + 100

    def test_transitions_match_steps(self):
        net = path3()
        cfg = WalkConfig(
            seed=3, num_walks=100, start=1, absorbing=(0, 2), track_transitions=True
        )
        stats = run_walks(net, cfg)
        assert stats.transition_counts.sum() == stats.steps.sum()

    def test_watch_equals_global_tally(self):
        net = random_connected_net(np.random.default_rng(8), 10)
        cfg = WalkConfig(
            seed=5,
            num_walks=300,
            start=0,
            absorbing=(9,),
            watch_vertices=(3,),
            track_visits=True,
        )
        stats = run_walks(net, cfg)
        assert stats.watch_visit_counts[:, 0].sum() == stats.visits[3]


class TestStatisticalAgreement:
    def test_hitting_vs_dense_oracle(self):
        net = random_connected_net(np.random.default_rng(12), 8)
        cfg = WalkConfig(seed=42, num_walks=40_000, start=3, absorbing=(0, 7))
        est, se = estimate_hitting(net, cfg, 0)
        exact = absorbing_hit_probability(net, 0, {7})[3]
        assert abs(est - exact) < 4 * se

    def test_green_vs_fundamental_matrix(self):
        net = random_connected_net(np.random.default_rng(13), 8)
        cfg = WalkConfig(seed=42, num_walks=40_000, start=0, absorbing=(7,))
        est, se = estimate_green(net, cfg, 2)
        exact = expected_visits(net, 0, {7})[2]
        assert abs(est - exact) < 4 * se

    def test_escape_vs_solver(self):
        t = build_tree(TreeSpec(2, 2))
        z = {4, 5, 6, 7, 8, 9}
        cfg = WalkConfig(seed=42, num_walks=40_000, start=0)
        est, se = estimate_escape(net=t.net, cfg=cfg, a=0, z=z)
        exact = effective(t.net, 0, z).escape_probability
        assert abs(est - exact) < 4 * se

    def test_transitions_vs_green_times_p(self):
        # E[# of steps x -> y] = G(a, x) p(x, y)
        net = random_connected_net(np.random.default_rng(14), 8)
        x = 2
        y = int(net.neighbors(x)[0])
        cfg = WalkConfig(seed=42, num_walks=40_000, start=0, absorbing=(7,))
        est, se = estimate_transitions(net, cfg, x, y)
        mv = markov_view(net)
        exact = expected_visits(net, 0, {7})[x] * mv.p[x, y]
        assert abs(est - exact) < 4 * se

    def test_infinite_tree_surrogate(self):
        # deep truncation stands in for the infinite tree at the root
        t = build_tree(TreeSpec(2, 12, contract_boundary=True))
        cfg = WalkConfig(seed=42, num_walks=20_000, start=0, absorbing=(t.z,))
        est, se = estimate_green(t.net, cfg, 0)
        exact, _, _ = oracle_green_hitting(2, 0)
        assert abs(est - exact) < 4 * se + 1e-3
