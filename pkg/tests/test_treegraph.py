"""Tests for trees and stable graphs.

Tree counts are checked against an independent leaf-insertion
recurrence; stable-graph class counts against an independent exhaustive
enumeration deduplicated by pairwise isomorphism testing.  Neither
oracle shares code with the library.
"""

import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from operadkit.treegraph import (
    GraphError,
    StableGraph,
    Tree,
    TreeError,
    automorphism_group,
    contract_edge,
    contract_graph_edge,
    corolla,
    decode_graph,
    decode_tree,
    encode_graph,
    encode_tree,
    enumerate_stable_graphs,
    enumerate_trees,
    enumerate_trees_all,
    genus_invariant,
    graft,
    relabel_tree,
)


# --------------------------------------------------------------------------
# Oracle 1: leaf-insertion recurrence for tree counts.
#
# t(n, k) = number of rooted trees with n labeled leaves and k internal
# vertices (every internal vertex has >= 2 children).  Inserting leaf n
# into a tree on n-1 leaves either attaches it to one of the k internal
# vertices, or subdivides one of the n+k-2 edge positions (n-1 leaf
# edges, k-2 internal edges, 1 above the root) with a new vertex.


@lru_cache(maxsize=None)
def tree_count(n: int, k: int) -> int:
    if n == 2:
        return 1 if k == 1 else 0
    if k < 1 or k > n - 1:
        return 0
    return k * tree_count(n - 1, k) + (n + k - 2) * tree_count(n - 1, k - 1)


def double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


class TestTreeBasics:
    def test_canonicalization_sorts_children_by_min_leaf(self):
        a = Tree(((3, 2), 1, 4))
        b = Tree((1, (2, 3), 4))
        assert a == b
        assert encode_tree(a) == "(1,(2,3),4)"

    def test_leaves_must_be_a_full_range(self):
        with pytest.raises(TreeError):
            Tree((1, 3))
        with pytest.raises(TreeError):
            Tree((1, 2, 2))

    def test_unary_vertices_rejected(self):
        with pytest.raises(TreeError):
            Tree(((1,), 2))

    def test_corolla(self):
        t = corolla(4)
        assert t.arity == 4 and t.internal_edges == 0 and t.is_corolla()
        with pytest.raises(TreeError):
            corolla(1)

    def test_edge_list_keys_are_leaf_sets(self):
        t = decode_tree("((1,2),(3,(4,5)))")
        assert t.edge_list() == [
            frozenset({1, 2}),
            frozenset({3, 4, 5}),
            frozenset({4, 5}),
        ]

    def test_vertex_arities_preorder(self):
        t = decode_tree("((1,2),(3,(4,5)))")
        assert t.vertex_arities() == [2, 2, 2, 2]
        assert decode_tree("(1,(2,3,4),5)").vertex_arities() == [3, 3]


class TestTreeEnumeration:
    @pytest.mark.parametrize("n", range(2, 8))
    def test_counts_by_edges_match_recurrence(self, n):
        by_edges = enumerate_trees_all(n)
        for e in range(n - 1):
            assert len(by_edges[e]) == tree_count(n, e + 1)
            assert by_edges[e] == enumerate_trees(n, e)

    @pytest.mark.parametrize("n", range(2, 8))
    def test_total_counts(self, n):
        totals = {2: 1, 3: 4, 4: 26, 5: 236, 6: 2752, 7: 39208}
        assert sum(len(v) for v in enumerate_trees_all(n).values()) == totals[n]

    @pytest.mark.parametrize("n", range(2, 8))
    def test_binary_trees_are_odd_double_factorial(self, n):
        assert len(enumerate_trees(n, n - 2)) == double_factorial(2 * n - 3)

    def test_no_duplicates(self):
        trees = [t for ts in enumerate_trees_all(6).values() for t in ts]
        assert len(set(trees)) == len(trees)

    def test_out_of_range_edges_empty(self):
        assert enumerate_trees(4, 3) == []
        assert enumerate_trees(4, -1) == []

    def test_deterministic_order(self):
        assert enumerate_trees(5, 2) == enumerate_trees(5, 2)


class TestTreeOperations:
    def test_graft_labels(self):
        t = corolla(3)
        s = corolla(2)
        g = graft(t, 2, s)
        assert g == decode_tree("(1,(2,3),4)")
        assert g.arity == 4 and g.internal_edges == 1

    def test_graft_arity_and_edges_add(self):
        t = decode_tree("((1,2),3)")
        s = decode_tree("(1,(2,3))")
        g = graft(t, 1, s)
        assert g.arity == t.arity + s.arity - 1
        assert g.internal_edges == t.internal_edges + s.internal_edges + 1

    def test_graft_index_range(self):
        with pytest.raises(TreeError):
            graft(corolla(3), 4, corolla(2))

    def test_contract_inverts_graft_edge(self):
        t = decode_tree("((1,2),(3,(4,5)))")
        c = contract_edge(t, frozenset({4, 5}))
        assert c == decode_tree("((1,2),(3,4,5))")
        assert c.internal_edges == t.internal_edges - 1
        with pytest.raises(TreeError):
            contract_edge(t, frozenset({1, 3}))

    def test_relabel(self):
        t = decode_tree("((1,2),3)")
        assert relabel_tree(t, {1: 3, 2: 1, 3: 2}) == decode_tree("((1,3),2)")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.data())
    def test_relabel_preserves_edge_count(self, n, data):
        trees = [t for ts in enumerate_trees_all(n).values() for t in ts]
        t = data.draw(st.sampled_from(trees))
        perm = data.draw(st.permutations(list(range(1, n + 1))))
        mapping = {i + 1: perm[i] for i in range(n)}
        s = relabel_tree(t, mapping)
        assert s.arity == n
        assert s.internal_edges == t.internal_edges
        assert sorted(s.vertex_arities()) == sorted(t.vertex_arities())

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 6), st.data())
    def test_every_edge_contracts_to_a_valid_tree(self, n, data):
        trees = [t for t in enumerate_trees(n, data.draw(st.integers(1, n - 2)))]
        if not trees:
            return
        t = data.draw(st.sampled_from(trees))
        for edge in t.edge_list():
            c = contract_edge(t, edge)
            assert c.arity == n
            assert c.internal_edges == t.internal_edges - 1

    def test_encode_decode_round_trip(self):
        for e, ts in enumerate_trees_all(5).items():
            for t in ts:
                assert decode_tree(encode_tree(t)) == t

    def test_decode_rejects_garbage(self):
        for bad in ["", "(1,2", "(1,2))", "(1,,2)", "(x,y)"]:
            with pytest.raises(TreeError):
                decode_tree(bad)


# --------------------------------------------------------------------------
# Oracle 2: exhaustive stable-graph enumeration with pairwise
# isomorphism dedup, written independently of the library.


def _oracle_valence(v, edges, legs):
    return sum(1 for w in legs if w == v) + \
        sum((a == v) + (b == v) for a, b in edges)


def _oracle_connected(nv, edges):
    adj = {v: set() for v in range(nv)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == nv


def _oracle_isomorphic(g1, g2):
    genera1, edges1, legs1 = g1
    genera2, edges2, legs2 = g2
    nv = len(genera1)
    if len(genera2) != nv or len(edges1) != len(edges2):
        return False
    for p in itertools.permutations(range(nv)):
        if any(genera2[p[v]] != genera1[v] for v in range(nv)):
            continue
        if any(p[legs1[i]] != legs2[i] for i in range(len(legs1))):
            continue
        mapped = sorted(tuple(sorted((p[a], p[b]))) for a, b in edges1)
        if mapped == sorted(edges2):
            return True
    return False


def oracle_stable_graphs(g, n, max_edges):
    """Isomorphism classes of stable graphs, counted the slow way."""
    classes = []
    for nv in range(1, max_edges + 2):
        pairs = list(itertools.combinations_with_replacement(range(nv), 2))
        for ne in range(nv - 1, max_edges + 1):
            b1 = ne - nv + 1
            if b1 < 0 or b1 > g:
                continue
            for edges in itertools.combinations_with_replacement(pairs, ne):
                if not _oracle_connected(nv, edges):
                    continue
                for genera in itertools.product(range(g - b1 + 1), repeat=nv):
                    if sum(genera) != g - b1:
                        continue
                    for legs in itertools.product(range(nv), repeat=n):
                        ok = True
                        for v in range(nv):
                            val = _oracle_valence(v, edges, legs)
                            if genera[v] == 0 and val < 3:
                                ok = False
                            if genera[v] == 1 and val < 1:
                                ok = False
                        if not ok:
                            continue
                        cand = (tuple(genera),
                                [tuple(sorted(e)) for e in edges],
                                tuple(legs))
                        if not any(_oracle_isomorphic(cand, c)
                                   for c in classes):
                            classes.append(cand)
    return classes


class TestStableGraphs:
    def test_validation(self):
        with pytest.raises(GraphError):
            StableGraph([0], [], [0])          # valence 0 < 3 at genus 0
        with pytest.raises(GraphError):
            StableGraph([1], [], [])           # valence 0 < 1 at genus 1
        with pytest.raises(GraphError):
            StableGraph([1, 1], [], [0, 1])    # disconnected
        with pytest.raises(GraphError):
            StableGraph([-1], [], [0])
        StableGraph([1], [], [0])              # smooth genus-1 with a leg

    def test_genus_invariant(self):
        G = StableGraph([0], [(0, 0)], [0])
        assert G.b1() == 1 and genus_invariant(G) == 1
        H = StableGraph([1, 0], [(0, 1)], [1, 1])
        assert genus_invariant(H) == 1

    @pytest.mark.parametrize("g,n,max_edges", [
        (1, 1, 1), (1, 1, 2), (1, 2, 2), (0, 4, 2), (0, 5, 2),
    ])
    def test_counts_match_exhaustive_oracle(self, g, n, max_edges):
        ours = enumerate_stable_graphs(g, n, max_edges)
        assert len(set(ours)) == len(ours)
        assert len(ours) == len(oracle_stable_graphs(g, n, max_edges))

    def test_one_edge_census_frozen_values(self):
        assert len(enumerate_stable_graphs(1, 1, 1)) == 2
        assert len(enumerate_stable_graphs(0, 4, 1)) == 4
        assert len(enumerate_stable_graphs(0, 5, 1)) == 11

    def test_unstable_pairs_rejected(self):
        for g, n in [(0, 0), (0, 1), (0, 2), (1, 0)]:
            with pytest.raises(GraphError):
                enumerate_stable_graphs(g, n, 1)

    def test_loop_graph_has_automorphism_of_order_two(self):
        G = StableGraph([0], [(0, 0)], [0])
        autos = automorphism_group(G)
        assert len(autos) == 2
        nontrivial = [a for a in autos
                      if any(src != dst for src, dst in a.half_edge_map)]
        assert len(nontrivial) == 1

    def test_smooth_vertex_trivial_automorphisms(self):
        G = StableGraph([1], [], [0])
        assert len(automorphism_group(G)) == 1

    def test_parallel_edges_automorphisms(self):
        # two vertices joined by two edges: swap the edges
        G = StableGraph([1, 1], [(0, 1), (0, 1)], [])
        assert len(automorphism_group(G)) >= 2

    def test_contract_nonloop_merges_genera(self):
        G = StableGraph([1, 2], [(0, 1)], [0])
        H = contract_graph_edge(G, 0)
        assert H.genera == (3,) and H.edges == ()
        assert genus_invariant(H) == genus_invariant(G)

    def test_contract_loop_raises_genus(self):
        G = StableGraph([0], [(0, 0)], [0, 0, 0])
        H = contract_graph_edge(G, 0)
        assert H.genera == (1,) and H.edges == ()
        assert genus_invariant(H) == genus_invariant(G)

    def test_contract_rejects_bad_index(self):
        G = StableGraph([1], [], [0])
        with pytest.raises(GraphError):
            contract_graph_edge(G, 0)

    def test_encode_decode_round_trip(self):
        for G in enumerate_stable_graphs(1, 2, 2):
            assert decode_graph(encode_graph(G)) == G
        with pytest.raises(GraphError):
            decode_graph("not a graph")

    def test_canonical_form_identifies_isomorphic_presentations(self):
        a = StableGraph([0, 1], [(0, 1), (0, 1)], [0])
        b = StableGraph([1, 0], [(1, 0), (0, 1)], [1])
        assert a == b and hash(a) == hash(b)
