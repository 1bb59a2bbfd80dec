"""Topology loading, generation, and shortest-path oracle tests."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcastmob.topology import (
    GenerationError,
    GeneratorParams,
    PathOracle,
    Topology,
    TopologyError,
    generate,
    load_edge_list,
)

from conftest import bfs_dist, random_connected_edges


class TestLoadEdgeList:
    def test_single_edge(self):
        topo = load_edge_list("0 1")
        assert topo.n == 2
        assert topo.edge_count == 1

    def test_five_cycle(self):
        text = "\n".join(f"{i} {(i + 1) % 5}" for i in range(5))
        topo = load_edge_list(text, name="c5")
        assert topo.avg_degree == 2.0
        assert PathOracle(topo).dist(0, 2) == 2

    def test_comments_and_blanks(self):
        topo = load_edge_list("# header\n\n0 1  # trailing\n1 2\n")
        assert topo.n == 3
        assert topo.edge_count == 2

    def test_table_sized_document(self):
        # 100 nodes, 185 edges, average degree 3.7: a path plus 86 chords
        lines = [f"{i} {i + 1}" for i in range(99)]
        lines += [f"{i} {i + 2}" for i in range(86)]
        topo = load_edge_list("\n".join(lines), name="ts100")
        assert (topo.n, topo.edge_count) == (100, 185)
        assert topo.summary() == "ts100 100 185 3.7"

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("0 1\n1 2 3", "line 2"),
            ("0 x", "non-integer"),
            ("0 0", "self-loop"),
            ("0 1\n1 0", "line 2: duplicate"),
            ("0 1\n-1 2", "negative"),
            ("", "empty"),
        ],
    )
    def test_rejects_malformed(self, text, fragment):
        with pytest.raises(TopologyError, match=fragment):
            load_edge_list(text)

    def test_rejects_disconnected(self):
        with pytest.raises(TopologyError, match="disconnected"):
            load_edge_list("0 1\n2 3")

    def test_gap_in_ids_is_disconnected(self):
        with pytest.raises(TopologyError, match="disconnected"):
            load_edge_list("0 2\n2 3\n5 3\n4 5\n6 4")


class TestFromEdges:
    def test_rejects_out_of_range(self):
        with pytest.raises(TopologyError, match="out of range"):
            Topology.from_edges("t", 3, [(0, 1), (1, 3)])

    def test_adjacency_sorted(self):
        topo = Topology.from_edges("t", 4, [(0, 3), (0, 1), (0, 2)])
        assert topo.adj[0] == (1, 2, 3)


class TestGenerate:
    def test_flat_random_r50(self):
        params = GeneratorParams("flat_random", 50, 8.68, seed=1)
        topo = generate(params, name="r50")
        assert abs(topo.edge_count - 217) <= 0.15 * 217
        assert topo.n == 50

    def test_deterministic(self):
        params = GeneratorParams("transit_stub", 100, 3.7, seed=9)
        assert generate(params).edges == generate(params).edges

    def test_different_seeds_differ(self):
        a = generate(GeneratorParams("flat_random", 40, 4.0, seed=1))
        b = generate(GeneratorParams("flat_random", 40, 4.0, seed=2))
        assert a.edges != b.edges

    def test_transit_stub_ts100(self):
        topo = generate(GeneratorParams("transit_stub", 100, 3.7, seed=4), name="ts100")
        assert abs(topo.avg_degree - 3.7) <= 0.15 * 3.7
        assert topo.clusters
        # clusters are contiguous id blocks covering everything past the core
        stops = [b[1] for b in topo.clusters]
        starts = [b[0] for b in topo.clusters]
        assert stops[-1] == topo.n
        assert starts[1:] == stops[:-1]

    def test_transit_stub_clusters_internally_connected(self):
        topo = generate(GeneratorParams("transit_stub", 120, 3.7, seed=5))
        for lo, hi in topo.clusters:
            inside = set(range(lo, hi))
            adj = {u: [v for v in topo.adj[u] if v in inside] for u in inside}
            assert len(bfs_dist(adj, lo)) == hi - lo

    def test_tiers_like_near_tree(self):
        topo = generate(GeneratorParams("tiers_like", 1000, 2.81, seed=6), name="ti1000")
        assert abs(topo.avg_degree - 2.81) <= 0.15 * 2.81
        assert topo.clusters

    def test_infeasible_degree(self):
        with pytest.raises(GenerationError):
            generate(GeneratorParams("flat_random", 10, 20.0, seed=1))

    def test_bad_params(self):
        with pytest.raises(GenerationError):
            GeneratorParams("flat_random", 1, 4.0)
        with pytest.raises(GenerationError):
            GeneratorParams("flat_random", 10, 1.5)
        with pytest.raises(GenerationError):
            GeneratorParams("mystery", 10, 3.0)

    @settings(max_examples=40, deadline=None)
    @given(
        kind=st.sampled_from(["flat_random", "transit_stub", "tiers_like"]),
        n=st.integers(min_value=10, max_value=80),
        deg=st.floats(min_value=2.2, max_value=6.0),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_generated_graphs_are_valid(self, kind, n, deg, seed):
        topo = generate(GeneratorParams(kind, n, deg, seed=seed))
        assert topo.n == n
        # simple graph: no self loops or duplicates by construction of the edge set
        assert all(u < v for u, v in topo.edges)
        assert len(set(topo.edges)) == topo.edge_count
        assert abs(topo.avg_degree - deg) <= 0.15 * deg
        # connectivity re-checked with the independent BFS
        adj = {u: list(nbrs) for u, nbrs in enumerate(topo.adj)}
        assert len(bfs_dist(adj, 0)) == n


class TestPathOracle:
    def test_dist_self_is_zero(self, path5):
        assert PathOracle(path5).dist(2, 2) == 0

    def test_path_graph_end_to_end(self, path5):
        oracle = PathOracle(path5)
        assert oracle.dist(0, 4) == 4
        assert oracle.shortest_path(0, 2) == [0, 1, 2]

    def test_shortest_path_self(self, path5):
        assert PathOracle(path5).shortest_path(3, 3) == [3]

    def test_diamond_tie_break(self, diamond):
        assert PathOracle(diamond).shortest_path(0, 3) == [0, 1, 3]

    def test_unknown_node(self, path5):
        oracle = PathOracle(path5)
        with pytest.raises(TopologyError, match="unknown"):
            oracle.dist(0, 9)
        with pytest.raises(TopologyError, match="unknown"):
            oracle.shortest_path(-1, 2)

    def test_matches_bfs_all_pairs(self):
        rng = random.Random(77)
        for _ in range(10):
            n = rng.randrange(8, 24)
            edges = random_connected_edges(rng, n, rng.randrange(0, 2 * n))
            topo = Topology.from_edges("g", n, edges)
            oracle = PathOracle(topo)
            adj = {u: list(nbrs) for u, nbrs in enumerate(topo.adj)}
            for s in range(n):
                expect = bfs_dist(adj, s)
                for t in range(n):
                    assert oracle.dist(t, s) == expect[t]

    def test_path_consistency(self):
        rng = random.Random(5)
        edges = random_connected_edges(rng, 20, 25)
        topo = Topology.from_edges("g", 20, edges)
        oracle = PathOracle(topo)
        for u in range(20):
            for v in range(20):
                path = oracle.shortest_path(u, v)
                assert len(path) == oracle.dist(u, v) + 1
                assert all(topo.has_edge(a, b) for a, b in zip(path, path[1:]))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_symmetry_and_triangle(self, seed):
        rng = random.Random(seed)
        n = rng.randrange(5, 16)
        topo = Topology.from_edges("g", n, random_connected_edges(rng, n, n))
        oracle = PathOracle(topo)
        for u in range(n):
            for v in range(n):
                assert oracle.dist(u, v) == oracle.dist(v, u)
                for w in range(n):
                    assert oracle.dist(u, w) <= oracle.dist(u, v) + oracle.dist(v, w)
