import math

import networkx as nx
import numpy as np
import pytest

from tangleflip import (
    CapExceeded,
    Disconnected,
    NotDisjoint,
    Triangulation,
    build_flip_graph,
    diameter,
    enumerate_triangulations,
    fan,
    find_triangle,
    flip_single,
    induced_disjoint_graph,
    is_connected,
    path_to_fan,
    spectral_report,
)
from tangleflip.flipgraph import CSV_HEADER, csv_row


def to_networkx(g):
    G = nx.Graph()
    G.add_nodes_from(range(len(g.adjacency)))
    for i, adj in enumerate(g.adjacency):
        for j in adj:
            G.add_edge(i, j)
    return G


class TestBuild:
    @pytest.mark.parametrize(
        "n,vertices", [(3, 1), (4, 2), (5, 10), (6, 68), (7, 546)]
    )
    def test_vertex_counts(self, n, vertices):
        assert build_flip_graph(n).vertex_count == vertices

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_regular_simple_symmetric(self, n):
        g = build_flip_graph(n)
        want = 2 * (n - 3)
        for i, adj in enumerate(g.adjacency):
            assert len(adj) == want
            assert len(set(adj)) == want
            assert i not in adj
            for j in adj:
                assert i in g.adjacency[j]

    def test_d5_edge_count(self):
        assert build_flip_graph(5).edge_count == 20

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_flip_graph(10)

    def test_dot_export_golden(self):
        # Byte-for-byte reproducible export.
        dot = build_flip_graph(4).to_dot()
        assert dot == (
            "graph D4 {\n"
            '  0 [label="4:[1-3]|4:[2-4]"];\n'
            '  1 [label="4:[2-4]|4:[1-3]"];\n'
            "  0 -- 1;\n"
            "}\n"
        )
        assert build_flip_graph(4).to_dot() == dot


class TestDiameter:
    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_matches_networkx(self, n):
        g = build_flip_graph(n)
        assert diameter(g) == nx.diameter(to_networkx(g))

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_within_bound(self, n):
        assert diameter(build_flip_graph(n)) <= 4 * n - 16

    def test_disconnected_raises(self):
        g = build_flip_graph(5)
        g.adjacency = [[] for _ in g.adjacency]  # sever all edges
        with pytest.raises(Disconnected) as err:
            diameter(g)
        assert err.value.components == 10


class TestInduced:
    def test_pentagon_example(self):
        sub = induced_disjoint_graph(5, Triangulation(5, [(2, 5), (3, 5)]))
        assert sub.vertex_count > 0
        assert is_connected(sub)
        for t in sub.vertices:
            assert not (t.diagonals & sub.base.diagonals)

    def test_fan6_connected_small_diameter(self):
        sub = induced_disjoint_graph(6, fan(6, 1))
        assert is_connected(sub)
        assert diameter(sub) <= 4

    @pytest.mark.parametrize("n", [5, 6])
    def test_every_base_connected_with_bound(self, n):
        for s in enumerate_triangulations(n):
            sub = induced_disjoint_graph(n, s)
            assert is_connected(sub)
            assert diameter(sub) <= 2 * n - 8
            G = to_networkx(sub)
            assert nx.is_connected(G)
            assert nx.diameter(G) == diameter(sub)

    def test_edges_are_single_flips(self):
        sub = induced_disjoint_graph(6, fan(6, 1))
        for i, t in enumerate(sub.vertices):
            for j in sub.adjacency[i]:
                assert len(t.diagonals ^ sub.vertices[j].diagonals) == 2


class TestPathToFan:
    def test_already_fan(self):
        s = Triangulation(6, [(2, 6), (2, 5), (3, 5)])
        assert path_to_fan(fan(6, 1), s, (2, 6)) == []

    def test_worked_example(self):
        s = Triangulation(6, [(2, 6), (2, 5), (3, 5)])
        t = Triangulation(6, [(1, 3), (3, 6), (4, 6)])
        flips = path_to_fan(t, s, (2, 6))
        assert len(flips) <= 2
        cur = t
        for d in flips:
            cur, created = flip_single(cur, d)
            assert not (cur.diagonals & s.diagonals)
        assert cur == fan(6, 1)

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_every_disjoint_start(self, n):
        # Pick a base containing the short diagonal (2, n); the fan at 1 is
        # then reachable within n-3-d flips, all intermediates disjoint.
        s = fan(n, 2) if n > 4 else None
        apex_edge = (2, n)
        assert apex_edge in s.diagonals
        for t in enumerate_triangulations(n):
            if t.diagonals & s.diagonals:
                continue
            d0 = sum(1 for (a, b) in t.key if a == 1)
            flips = path_to_fan(t, s, apex_edge)
            assert len(flips) <= n - 3 - d0
            if t != fan(n, 1):
                assert len(flips) <= n - 4
            cur = t
            seen_fan_diags = d0
            for d in flips:
                cur, created = flip_single(cur, d)
                cur.check()
                assert not (cur.diagonals & s.diagonals)
                assert created[0] == 1
                seen_fan_diags += 1
            assert cur == fan(n, 1)

    def test_relabeled_apex(self):
        # Base with its short diagonal elsewhere: (4, 6) skips vertex 5.
        s = Triangulation(6, [(1, 4), (1, 3), (4, 6)])
        t = Triangulation(6, [(2, 5), (2, 6), (3, 5)])
        flips = path_to_fan(t, s, (4, 6))
        cur = t
        for d in flips:
            cur, _ = flip_single(cur, d)
            assert not (cur.diagonals & s.diagonals)
        assert cur == fan(6, 5)

    def test_not_disjoint(self):
        s = Triangulation(6, [(2, 6), (2, 5), (3, 5)])
        with pytest.raises(NotDisjoint):
            path_to_fan(Triangulation(6, [(2, 5), (3, 5), (2, 6)]), s, (2, 6))


class TestTriangle:
    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_triangle_exists(self, n):
        g = build_flip_graph(n)
        i, j, k = find_triangle(g)
        assert len({i, j, k}) == 3
        assert j in g.adjacency[i] and k in g.adjacency[j] and i in g.adjacency[k]


class TestSpectral:
    def test_n5(self):
        rep = spectral_report(build_flip_graph(5))
        assert rep.vertex_count == 10
        assert abs(rep.sigma2 - math.sqrt(5) / 4) < 1e-9
        assert rep.tv_iterations == 3
        assert -1 <= rep.sigma2 <= rep.sigma2_abs <= 1

    def test_n6_exact_tv(self):
        rep = spectral_report(build_flip_graph(6))
        assert rep.tv_iterations == 7

    def test_tv_monotone_consistency(self):
        # At one step before the crossing some start is still at or above
        # the threshold.
        g = build_flip_graph(5)
        rep = spectral_report(g)
        t = rep.tv_iterations - 1
        nv = g.vertex_count
        P = np.zeros((nv, nv))
        for i, adj in enumerate(g.adjacency):
            P[i, adj] = 1 / len(adj)
        M = np.linalg.matrix_power(P, t)
        tv = 0.5 * np.abs(M - 1 / nv).sum(axis=1)
        assert tv.max() >= 0.25

    def test_exact_matches_float(self):
        from tangleflip.flipgraph import _exact_tv_iterations, _float_tv_iterations

        for n in (5, 6):
            g = build_flip_graph(n)
            assert _exact_tv_iterations(g) == _float_tv_iterations(g)

    def test_row_sums(self):
        g = build_flip_graph(6)
        nv = g.vertex_count
        P = np.zeros((nv, nv))
        for i, adj in enumerate(g.adjacency):
            P[i, adj] = 1 / g.degree
        assert np.allclose(P.sum(axis=1), 1.0)
        assert np.allclose(P, P.T)

    def test_requires_n5(self):
        with pytest.raises(ValueError):
            spectral_report(build_flip_graph(4))

    def test_csv_row(self):
        rep = spectral_report(build_flip_graph(5))
        row = csv_row(5, rep, 3)
        assert CSV_HEADER == "n,vertices,degree,diameter,sigma2,sigma2_abs,tv_iterations"
        assert row.startswith("5,10,4,3,0.559017")

    def test_json(self):
        import json

        rep = spectral_report(build_flip_graph(5))
        payload = json.loads(rep.to_json())
        assert payload["vertex_count"] == 10
        assert payload["tv_iterations"] == 3


@pytest.mark.slow
class TestLargeSpectral:
    def test_n9_report(self):
        g = build_flip_graph(9)
        rep = spectral_report(g)
        assert rep.vertex_count == 46782
        assert abs(rep.sigma2 - 0.9677) <= 1e-3
        assert rep.tv_iterations == 39
