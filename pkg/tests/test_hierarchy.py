import itertools

import numpy as np
import pytest

import oracles
from conftest import abc, labelled
from macrocluster.errors import InputError
from macrocluster.hierarchy import (
    HierarchyTree,
    UnionFind,
    build_chain,
    build_lmst,
    build_mst,
    export_dot,
    subdominant_ultrametric,
    threshold_clusters,
)
from macrocluster.metrics import DistanceMatrix


def chain(*weights):
    nodes = [chr(ord("A") + i) for i in range(len(weights) + 1)]
    edges = [(nodes[i], nodes[i + 1], w) for i, w in enumerate(weights)]
    return HierarchyTree(nodes, edges)


class TestUnionFind:
    def test_union(self):
        uf = UnionFind(4)
        assert uf.union(0, 1) and uf.union(2, 3)
        assert not uf.union(1, 0)
        assert uf.union(1, 3)
        assert len({uf.find(i) for i in range(4)}) == 1


class TestMst:
    def test_three_nodes(self):
        t = build_mst(abc())
        assert t.edge_set() == {frozenset("AB"), frozenset("BC")}
        assert t.total_weight == 3.0

    def test_all_equal_tie_break(self):
        m = DistanceMatrix(["D", "C", "B", "A"], np.full((4, 4), 0.5) - 0.5 * np.eye(4), "euclidean")
        t = build_mst(m)
        assert t.total_weight == pytest.approx(1.5)
        # lexicographic pair order: AB, AC, AD
        assert [(a, b) for a, b, _ in t.edges] == [("A", "B"), ("A", "C"), ("A", "D")]

    def test_deterministic(self, rng):
        m = labelled(oracles.random_distance_matrix(rng, 8))
        assert build_mst(m).edges == build_mst(m).edges

    def test_seven_nodes_against_brute_force(self, rng):
        d = oracles.random_distance_matrix(rng, 7)
        assert build_mst(labelled(d)).total_weight == pytest.approx(oracles.brute_force_mst_weight(d))

    def test_lighter_than_random_spanning_trees(self, rng):
        d = oracles.random_distance_matrix(rng, 9)
        best = build_mst(labelled(d)).total_weight
        for _ in range(100):
            order = rng.permutation(9)
            weight = sum(d[order[i], order[i + 1]] for i in range(8))
            assert best <= weight + 1e-12

    def test_rank_invariance(self, rng):
        d = oracles.random_distance_matrix(rng, 8)
        a = build_mst(labelled(d)).edge_set()
        b = build_mst(labelled(np.exp(3 * d) - 1)).edge_set()
        assert a == b

    def test_two_nodes(self):
        assert len(build_mst(labelled([[0, 1], [1, 0]])).edges) == 1

    def test_too_small(self):
        with pytest.raises(InputError):
            build_mst(DistanceMatrix(["A"], [[0.0]]))


class TestUltrametric:
    def test_chain(self):
        u = subdominant_ultrametric(chain(1, 2))
        assert u["A", "C"] == 2 and u["A", "B"] == 1 and u["B", "C"] == 2

    def test_star(self):
        t = HierarchyTree(["H", "A", "B", "C"], [("H", x, 0.7) for x in "ABC"])
        u = subdominant_ultrametric(t)
        off = u.d[~np.eye(4, dtype=bool)]
        assert np.all(off == 0.7)

    def test_six_nodes_all_triples(self, rng):
        d = oracles.random_distance_matrix(rng, 6)
        u = subdominant_ultrametric(build_mst(labelled(d))).d
        for i, j, k in itertools.permutations(range(6), 3):
            assert u[i, j] <= max(u[i, k], u[k, j]) + 1e-12

    def test_equals_minimax_oracle(self, rng):
        for n in range(2, 9):
            d = oracles.random_distance_matrix(rng, n)
            u = subdominant_ultrametric(build_mst(labelled(d))).d
            np.testing.assert_allclose(u, oracles.minimax_distances(d))
            assert np.all(u <= d + 1e-12)

    def test_disconnected(self):
        t = HierarchyTree(["A", "B", "C", "D"], [("A", "B", 1), ("C", "D", 1)])
        with pytest.raises(InputError):
            subdominant_ultrametric(t)
        with pytest.raises(InputError):
            t.path("A", "D")


class TestThresholdClusters:
    def test_trivial_partitions(self, rng):
        t = build_mst(labelled(oracles.random_distance_matrix(rng, 6)))
        assert len(threshold_clusters(t, float("inf"))) == 1
        assert len(threshold_clusters(t, float("-inf"))) == 6
        assert len(threshold_clusters(t, max(w for *_, w in t.edges))) == 1
        assert len(threshold_clusters(t, min(w for *_, w in t.edges) - 1e-9)) == 6

    def test_one_cut(self):
        p = threshold_clusters(chain(1, 3, 1), 2)
        assert sorted(p.clusters) == [("A", "B"), ("C", "D")]

    def test_monotone(self, rng):
        t = build_mst(labelled(oracles.random_distance_matrix(rng, 10)))
        counts = [len(threshold_clusters(t, s)) for s in np.linspace(0, 2.1, 40)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))


class TestLmst:
    def test_three_nodes(self):
        t = build_lmst(abc())
        assert t.edges == (("A", "B", 1.0), ("B", "C", 2.0))

    def test_equals_mst_when_unique(self, rng):
        for n in range(2, 10):
            m = labelled(oracles.random_distance_matrix(rng, n))
            assert build_lmst(m).edge_set() == build_mst(m).edge_set()

    def test_two_nodes(self):
        assert len(build_lmst(labelled([[0, 1], [1, 0]])).edges) == 1


class TestChains:
    def test_umlp_root_a(self):
        t = build_chain(abc(), "unidirectional", "A")
        assert t.chain_order() == ["A", "B", "C"]
        assert t.kind == "umlp-chain"

    def test_bmlp(self):
        t = build_chain(abc(), "bidirectional")
        assert t.edges[0][:2] == ("A", "B")
        assert t.chain_order() == ["A", "B", "C"]

    def test_bmlp_attaches_at_closer_end(self):
        # seed A-B; D is nearest to A, C nearest to B
        d = np.array([[0, 1, 5, 2], [1, 0, 3, 6], [5, 3, 0, 7], [2, 6, 7, 0]], dtype=float)
        t = build_chain(DistanceMatrix(list("ABCD"), d, "euclidean"), "bidirectional")
        assert t.chain_order() == ["C", "B", "A", "D"]

    def test_umlp_grows_only_at_tail(self):
        d = np.array([[0, 1, 5, 2], [1, 0, 3, 6], [5, 3, 0, 7], [2, 6, 7, 0]], dtype=float)
        t = build_chain(DistanceMatrix(list("ABCD"), d, "euclidean"), "unidirectional", "A")
        assert [e[:2] for e in t.edges] == [("A", "B"), ("B", "C"), ("C", "D")]

    @pytest.mark.parametrize("mode", ["unidirectional", "bidirectional"])
    def test_hamiltonian_path(self, rng, mode):
        for n in range(2, 9):
            m = labelled(oracles.random_distance_matrix(rng, n))
            t = build_chain(m, mode)
            assert t.is_chain()
            assert len(t.edges) == n - 1
            assert sorted(t.chain_order()) == sorted(m.entities)

    def test_named_root_bidirectional(self):
        t = build_chain(abc(), "bidirectional", "C")
        assert t.edges[0] == ("C", "B", 2.0)

    def test_errors(self):
        with pytest.raises(InputError):
            build_chain(abc(), "bidirectional", "Z")
        with pytest.raises(InputError):
            build_chain(abc(), "sideways")


class TestExport:
    def test_dot(self):
        text = export_dot(HierarchyTree(["A", "B"], [("A", "B", 0.12345)]))
        assert text.count(" -- ") == 1
        assert '[label="0.123"]' in text
        assert text.startswith("graph mst {") and text.endswith("}\n")

    def test_dot_deterministic_and_named(self, rng):
        t = build_mst(DistanceMatrix(["AVG", "X", "Y"], [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]], "euclidean"))
        assert export_dot(t) == export_dot(t)
        assert '"AVG"' in export_dot(t)

    def test_json_round_trip(self, rng):
        t = build_mst(labelled(oracles.random_distance_matrix(rng, 5)))
        back = HierarchyTree.from_json(t.to_json())
        assert back.edges == t.edges and back.nodes == t.nodes and back.kind == t.kind

    def test_bad_trees(self):
        with pytest.raises(InputError):
            HierarchyTree(["A", "B"], [("A", "Z", 1)])
        with pytest.raises(InputError):
            HierarchyTree(["A", "B"], [], "forest")
