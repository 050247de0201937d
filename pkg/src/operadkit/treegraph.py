"""Trees indexing genus-0 strata and stable graphs indexing higher genus.

Trees are rooted, with leaves labeled 1..n and every internal vertex
having at least two children.  Equality is up to reordering of inputs,
so each tree is stored in a canonical form: children sorted by the
minimal leaf label of their subtree.  A tree of arity n corresponds to
an (n+1)-leg genus-0 stable graph with the root as leg n+1.

Stable graphs carry genus labels, edges (loops allowed) and enumerated
legs; isomorphism classes are canonicalized by minimizing the encoding
over all vertex orderings (desk scale).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


class TreeError(ValueError):
    pass


class GraphError(ValueError):
    pass


# A tree shape is a leaf label (int) or a tuple of >= 2 child shapes.


def _min_leaf(shape) -> int:
    while not isinstance(shape, int):
        shape = shape[0]
    return shape


def _canonical(shape):
    if isinstance(shape, int):
        return shape
    children = tuple(sorted((_canonical(c) for c in shape), key=_min_leaf))
    if len(children) < 2:
        raise TreeError("internal vertices need at least two inputs")
    return children


def _leaves(shape) -> list[int]:
    if isinstance(shape, int):
        return [shape]
    out = []
    for c in shape:
        out.extend(_leaves(c))
    return out


def _edge_count(shape) -> int:
    if isinstance(shape, int):
        return 0
    return sum(0 if isinstance(c, int) else 1 + _edge_count(c) for c in shape)


class Tree:
    """A rooted tree with numbered leaves, canonical under input reordering."""

    __slots__ = ("shape", "arity", "internal_edges")

    def __init__(self, shape):
        shape = _canonical(shape)
        if isinstance(shape, int):
            raise TreeError("a tree must have at least one internal vertex")
        leaves = sorted(_leaves(shape))
        n = len(leaves)
        if leaves != list(range(1, n + 1)):
            raise TreeError(f"leaves must be exactly 1..{n}, got {leaves}")
        self.shape = shape
        self.arity = n
        self.internal_edges = _edge_count(shape)

    def __eq__(self, other):
        return isinstance(other, Tree) and self.shape == other.shape

    def __hash__(self):
        return hash(self.shape)

    def __repr__(self):
        return f"Tree({encode_tree(self)!r})"

    def is_corolla(self) -> bool:
        return self.internal_edges == 0

    def vertices(self) -> list[tuple[tuple[int, ...], tuple]]:
        """Internal vertices in preorder as (path, shape) pairs.

        The path is the sequence of child indices from the root; the
        shape's children appear in canonical (min-leaf) order.
        """
        out = []

        def walk(shape, path):
            out.append((path, shape))
            for i, c in enumerate(shape):
                if not isinstance(c, int):
                    walk(c, path + (i,))

        walk(self.shape, ())
        return out

    def vertex_arities(self) -> list[int]:
        """Number of children of each internal vertex, preorder."""
        return [len(s) for _, s in self.vertices()]

    def edge_list(self) -> list[frozenset[int]]:
        """Internal edges in canonical (preorder of lower vertex) order.

        Each edge is identified by the set of leaves below it; leaf sets
        determine edges uniquely since all vertices have >= 2 children.
        """
        out = []

        def walk(shape):
            for c in shape:
                if not isinstance(c, int):
                    out.append(frozenset(_leaves(c)))
                    walk(c)

        walk(self.shape)
        return out


def corolla(n: int) -> Tree:
    """The one-vertex tree with n leaves."""
    if n < 2:
        raise TreeError("a corolla needs arity >= 2")
    return Tree(tuple(range(1, n + 1)))


@lru_cache(maxsize=None)
def _all_shapes(labels: frozenset[int]) -> tuple:
    """All canonical tree shapes on the given leaf label set (|labels| >= 2)."""
    items = sorted(labels)
    if len(items) < 2:
        raise TreeError("need at least two labels")
    shapes = []
    first, rest = items[0], items[1:]
    # set partitions into >= 2 blocks: distribute by which block holds `first`
    for blocks in _partitions(rest):
        # attach `first` either as its own block or into one of the blocks
        candidates = [tuple([(first,)] + [tuple(b) for b in blocks])]
        for i in range(len(blocks)):
            if len(blocks) >= 2:
                merged = [tuple(b) for b in blocks]
                merged[i] = tuple(sorted((first,) + merged[i]))
                candidates.append(tuple(merged))
        for part in candidates:
            if len(part) < 2:
                continue
            choices = []
            for block in part:
                if len(block) == 1:
                    choices.append((block[0],))
                else:
                    choices.append(_all_shapes(frozenset(block)))
            for combo in itertools.product(*choices):
                shapes.append(_canonical(tuple(combo)))
    # dedupe (different partitions cannot collide, but keep it safe)
    return tuple(sorted(set(shapes), key=_shape_key))


def _partitions(items: list[int]):
    """All set partitions of a list (any number of blocks >= 1)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions(rest):
        yield [[first]] + [list(b) for b in sub]
        for i in range(len(sub)):
            out = [list(b) for b in sub]
            out[i] = [first] + out[i]
            yield out


def _shape_key(shape):
    if isinstance(shape, int):
        return (0, shape)
    return (1, tuple(_shape_key(c) for c in shape))


def enumerate_trees(n: int, e: int) -> list[Tree]:
    """All isomorphism classes of n-trees with exactly e internal edges.

    Deterministic order; out-of-range e gives an empty list.
    """
    if n < 2:
        raise TreeError("arity must be >= 2")
    if e < 0 or e > n - 2:
        return []
    return [Tree(s) for s in _all_shapes(frozenset(range(1, n + 1)))
            if _edge_count(s) == e]


def enumerate_trees_all(n: int) -> dict[int, list[Tree]]:
    """Trees of arity n grouped by internal edge count."""
    out: dict[int, list[Tree]] = {e: [] for e in range(n - 1)}
    for s in _all_shapes(frozenset(range(1, n + 1))):
        out[_edge_count(s)].append(Tree(s))
    return out


def _relabel(shape, mapping):
    if isinstance(shape, int):
        return mapping[shape]
    return tuple(_relabel(c, mapping) for c in shape)


def relabel_tree(t: Tree, mapping: dict[int, int]) -> Tree:
    """Relabel leaves through a bijection and recanonicalize."""
    return Tree(_relabel(t.shape, mapping))


def graft(t: Tree, i: int, s: Tree) -> Tree:
    """Operadic grafting: plug s into leaf i of t.

    Leaves follow the usual composition convention: t's leaves below i
    keep their labels, s's leaves shift to i..i+arity(s)-1, and t's
    leaves above i shift up by arity(s)-1.
    """
    n, m = t.arity, s.arity
    if not (1 <= i <= n):
        raise TreeError(f"graft index {i} out of range 1..{n}")
    t_map = {j: (j if j < i else j + m - 1) for j in range(1, n + 1)}
    s_map = {j: j + i - 1 for j in range(1, m + 1)}
    s_shape = _relabel(s.shape, s_map)

    def substitute(shape):
        if isinstance(shape, int):
            return s_shape if shape == i else t_map[shape]
        return tuple(substitute(c) for c in shape)

    return Tree(substitute(t.shape))


def contract_edge(t: Tree, edge: frozenset[int]) -> Tree:
    """Contract the internal edge identified by the leaf set below it."""
    edge = frozenset(edge)
    if edge not in set(t.edge_list()):
        raise TreeError(f"no internal edge with leaf set {sorted(edge)}")

    def walk(shape):
        if isinstance(shape, int):
            return shape
        new_children = []
        for c in shape:
            if not isinstance(c, int) and frozenset(_leaves(c)) == edge:
                new_children.extend(walk(g) for g in c)
            else:
                new_children.append(walk(c))
        return tuple(new_children)

    return Tree(walk(t.shape))


def encode_tree(t: Tree) -> str:
    """Canonical text encoding: nested parenthesized leaf lists."""

    def render(shape):
        if isinstance(shape, int):
            return str(shape)
        return "(" + ",".join(render(c) for c in shape) + ")"

    return render(t.shape)


def decode_tree(text: str) -> Tree:
    """Parse the nested parenthesized encoding back into a Tree."""
    pos = 0

    def parse():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            children = [parse()]
            while text[pos] == ",":
                pos += 1
                children.append(parse())
            if text[pos] != ")":
                raise TreeError(f"expected ')' at position {pos}")
            pos += 1
            return tuple(children)
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise TreeError(f"expected a leaf label at position {pos}")
        return int(text[start:pos])

    try:
        shape = parse()
    except IndexError:
        raise TreeError("unexpected end of input") from None
    if pos != len(text):
        raise TreeError(f"trailing characters at position {pos}")
    return Tree(shape)


# ---------------------------------------------------------------------------
# Stable graphs


@dataclass(frozen=True)
class GraphAutomorphism:
    """An automorphism: a vertex permutation plus a half-edge bijection.

    Half-edges are ('leg', label) or ('e', edge_index, side); legs are
    always fixed.  The map preserves incidence and genus labels.
    """

    vertex_perm: tuple[int, ...]
    half_edge_map: tuple[tuple[tuple, tuple], ...]


class StableGraph:
    """A connected genus-labeled graph with legs, edges and loops.

    Stability: every genus-0 vertex has valence >= 3 and every genus-1
    vertex has valence >= 1; a loop contributes 2 to the valence of its
    vertex.  Stored in canonical form (minimal encoding over vertex
    orderings), so equal graphs compare equal.
    """

    __slots__ = ("genera", "edges", "legs")

    def __init__(self, genera, edges, legs, _canonical=False):
        genera = tuple(int(g) for g in genera)
        edges = tuple(tuple(sorted((int(a), int(b)))) for a, b in edges)
        legs = tuple(int(v) for v in legs)
        nv = len(genera)
        if nv == 0:
            raise GraphError("a stable graph needs at least one vertex")
        if any(g < 0 for g in genera):
            raise GraphError("genus labels must be nonnegative")
        for a, b in edges:
            if not (0 <= a < nv and 0 <= b < nv):
                raise GraphError(f"edge ({a},{b}) out of vertex range")
        for v in legs:
            if not (0 <= v < nv):
                raise GraphError(f"leg vertex {v} out of range")
        if not _is_connected(nv, edges):
            raise GraphError("graph must be connected")
        for v in range(nv):
            val = _valence(v, edges, legs)
            if genera[v] == 0 and val < 3:
                raise GraphError(f"genus-0 vertex {v} has valence {val} < 3")
            if genera[v] == 1 and val < 1:
                raise GraphError(f"genus-1 vertex {v} has valence {val} < 1")
        if _canonical:
            self.genera, self.edges, self.legs = genera, tuple(sorted(edges)), legs
        else:
            self.genera, self.edges, self.legs = _canonical_graph(
                genera, edges, legs)

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_legs(self) -> int:
        return len(self.legs)

    def valence(self, v: int) -> int:
        return _valence(v, self.edges, self.legs)

    def b1(self) -> int:
        return len(self.edges) - len(self.genera) + 1

    def __eq__(self, other):
        return (isinstance(other, StableGraph)
                and self.genera == other.genera
                and self.edges == other.edges
                and self.legs == other.legs)

    def __hash__(self):
        return hash((self.genera, self.edges, self.legs))

    def __repr__(self):
        return f"StableGraph({encode_graph(self)!r})"


def _valence(v, edges, legs):
    val = sum(1 for w in legs if w == v)
    for a, b in edges:
        val += (a == v) + (b == v)
    return val


def _is_connected(nv, edges):
    if nv == 1:
        return True
    adj = {v: set() for v in range(nv)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == nv


def _graph_code(genera, edges, legs, perm):
    pg = tuple(genera[perm.index(v)] for v in range(len(genera)))
    # perm maps old index -> new index
    pe = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
    pl = tuple(perm[v] for v in legs)
    return (pg, pe, pl)


def _canonical_graph(genera, edges, legs):
    nv = len(genera)
    best = None
    for p in itertools.permutations(range(nv)):
        code = _graph_code(genera, edges, legs, p)
        if best is None or code < best:
            best = code
    return best


def genus_invariant(g: StableGraph) -> int:
    """g(G) = b_1(G) + sum of vertex genera."""
    return g.b1() + sum(g.genera)


def enumerate_stable_graphs(g: int, n: int, max_edges: int) -> list[StableGraph]:
    """All isomorphism classes with total genus g, n legs, <= max_edges edges.

    Raises GraphError for unstable (g, n), i.e. 2g - 2 + n <= 0.
    """
    if 2 * g - 2 + n <= 0:
        raise GraphError(f"(g, n) = ({g}, {n}) violates 2g-2+n > 0")
    found: set[StableGraph] = set()
    for nv in range(1, max_edges + 2):
        min_e = nv - 1
        for ne in range(min_e, max_edges + 1):
            b1 = ne - nv + 1
            if b1 < 0 or b1 > g:
                continue
            genus_sum = g - b1
            pairs = list(itertools.combinations_with_replacement(range(nv), 2))
            for edge_combo in itertools.combinations_with_replacement(pairs, ne):
                if not _is_connected(nv, edge_combo):
                    continue
                for genera in _compositions(genus_sum, nv):
                    for legs in itertools.product(range(nv), repeat=n):
                        try:
                            graph = StableGraph(genera, edge_combo, legs)
                        except GraphError:
                            continue
                        found.add(graph)
    return sorted(found, key=lambda G: (len(G.genera), len(G.edges),
                                        G.genera, G.edges, G.legs))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def automorphism_group(G: StableGraph) -> list[GraphAutomorphism]:
    """The full automorphism group as an explicit list (desk scale).

    Automorphisms fix every leg, permute vertices preserving genus
    labels, and permute half-edges preserving incidence; a loop may have
    its two half-edges swapped.
    """
    nv = G.num_vertices
    autos = []
    for p in itertools.permutations(range(nv)):
        if any(G.genera[p[v]] != G.genera[v] for v in range(nv)):
            continue
        if any(p[v] != v for v in G.legs):
            continue
        # group edges by endpoint pair; p must map groups bijectively
        groups: dict[tuple[int, int], list[int]] = {}
        for j, (a, b) in enumerate(G.edges):
            groups.setdefault((a, b), []).append(j)
        image_ok = True
        for (a, b), js in groups.items():
            target = tuple(sorted((p[a], p[b])))
            if len(groups.get(target, ())) != len(js):
                image_ok = False
                break
        if not image_ok:
            continue
        # enumerate edge bijections within matched groups, with loop flips
        group_list = sorted(groups)
        per_group = []
        for (a, b) in group_list:
            js = groups[(a, b)]
            target = tuple(sorted((p[a], p[b])))
            ks = groups[target]
            assignments = []
            for kperm in itertools.permutations(ks):
                assignments.append(list(zip(js, kperm)))
            per_group.append(((a, b), assignments))
        for combo in itertools.product(*(a for _, a in per_group)):
            edge_map = {}
            for pairs in combo:
                edge_map.update(dict(pairs))
            # orientation choices: a loop mapped to a loop can be flipped
            flip_candidates = []
            forced = {}
            consistent = True
            for j, (a, b) in enumerate(G.edges):
                k = edge_map[j]
                ta, tb = G.edges[k]
                if a == b:  # loop -> loop (endpoints matched already)
                    flip_candidates.append(j)
                else:
                    if (p[a], p[b]) == (ta, tb):
                        forced[j] = False
                    elif (p[a], p[b]) == (tb, ta):
                        forced[j] = True
                    else:
                        consistent = False
                        break
            if not consistent:
                continue
            for flips in itertools.product([False, True],
                                           repeat=len(flip_candidates)):
                flip = dict(forced)
                flip.update(dict(zip(flip_candidates, flips)))
                hmap = [((('leg', i + 1), ('leg', i + 1)))
                        for i in range(G.num_legs)]
                for j in range(len(G.edges)):
                    k = edge_map[j]
                    if flip[j]:
                        hmap.append((('e', j, 0), ('e', k, 1)))
                        hmap.append((('e', j, 1), ('e', k, 0)))
                    else:
                        hmap.append((('e', j, 0), ('e', k, 0)))
                        hmap.append((('e', j, 1), ('e', k, 1)))
                autos.append(GraphAutomorphism(p, tuple(hmap)))
    return autos


def contract_graph_edge(G: StableGraph, edge_index: int) -> StableGraph:
    """Contract an interior edge or loop.

    Non-loop: merge the endpoints, adding their genera.  Loop: delete it
    and increment the vertex genus.  The genus invariant is preserved;
    legs are untouched (legs are not contractible).
    """
    if not (0 <= edge_index < len(G.edges)):
        raise GraphError(
            f"edge index {edge_index} out of range; legs cannot be contracted")
    a, b = G.edges[edge_index]
    rest = [e for j, e in enumerate(G.edges) if j != edge_index]
    if a == b:
        genera = list(G.genera)
        genera[a] += 1
        return StableGraph(genera, rest, G.legs)
    # merge b into a, shift indices above b down
    def remap(v):
        if v == b:
            v = a
        return v - 1 if v > b else v

    genera = [gv for v, gv in enumerate(G.genera) if v != b]
    genera[remap(a)] = G.genera[a] + G.genera[b]
    edges = [tuple(sorted((remap(x), remap(y)))) for x, y in rest]
    legs = [remap(v) for v in G.legs]
    return StableGraph(genera, edges, legs)


def encode_graph(G: StableGraph) -> str:
    """Canonical text encoding: genera; edge list; leg assignment."""
    genera = ",".join(str(g) for g in G.genera)
    edges = " ".join(f"{a}-{b}" for a, b in G.edges)
    legs = ",".join(str(v) for v in G.legs)
    return f"V[{genera}] E[{edges}] L[{legs}]"


def decode_graph(text: str) -> StableGraph:
    """Parse the canonical graph encoding."""
    import re

    m = re.fullmatch(r"V\[([^]]*)\] E\[([^]]*)\] L\[([^]]*)\]", text.strip())
    if not m:
        raise GraphError(f"bad graph encoding: {text!r}")
    genera = [int(x) for x in m.group(1).split(",") if x != ""]
    edges = []
    if m.group(2).strip():
        for tok in m.group(2).split():
            a, b = tok.split("-")
            edges.append((int(a), int(b)))
    legs = [int(x) for x in m.group(3).split(",") if x != ""]
    return StableGraph(genera, edges, legs)
