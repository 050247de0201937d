"""Cooperads and the cobar construction on decorated trees.

A cooperad here is the linear dual of a finite-type operad in degree
zero; the cobar complex of its reduced part is spanned by rooted trees
whose internal vertices carry cooperad basis functionals.  The
differential expands one vertex at a time and is graded by internal
edge count, which it raises by one; equivalently it lowers the operadic
degree (arity - 2 - edges) by one.

The decorated trees also assemble into a graded operad under grafting,
with Koszul signs from reordering the vertex generators (a vertex of
arity m is a generator of degree m - 2).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .qlinalg import SparseMatrix, ChainComplex, span_rank
from .operads import (GradedOperad, GradedSpace, OperadError, Vector,
                      koszul_sign, perm_inverse, _addmul)
from .treegraph import Tree, enumerate_trees


class CobarError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cooperads as duals of operads


class Cooperad:
    """Linear dual of a degree-zero finite-type operad.

    Cocompositions and the right symmetric action are transposes of the
    operad structure maps; tables are built lazily and cached.
    """

    def __init__(self, operad: GradedOperad, max_arity: int):
        for n in operad.arities():
            if n > max_arity:
                continue
            if any(d != 0 for d in operad.space(n).degrees):
                raise CobarError("dual cooperads require degree-zero operads")
        self.operad = operad
        self.max_arity = min(max_arity, operad.max_arity)
        self.components = {n: operad.space(n)
                           for n in operad.arities() if n <= self.max_arity}
        self._cotables: dict = {}
        self._act_rows: dict = {}

    def arities(self):
        return sorted(self.components)

    def dim(self, n: int) -> int:
        return self.components[n].dim

    def space(self, n: int) -> GradedSpace:
        return self.components[n]

    def cocompose(self, n: int, i: int, s: int, a0: int) -> dict:
        """Component of the (i, s) cocomposition on basis functional a0.

        Returns {(a, b): coeff} with a of arity n - s + 1 and b of arity
        s, the transpose of the operad composition at slot i.
        """
        key = (n, i, s)
        if key not in self._cotables:
            m, O = n - s + 1, self.operad
            table: dict[int, dict] = {}
            for a in range(O.dim(m)):
                for b in range(O.dim(s)):
                    for out, c in O.compose_basis(m, i, s, a, b).items():
                        table.setdefault(out, {})[(a, b)] = c
            self._cotables[key] = table
        return self._cotables[key].get(a0, {})

    def act(self, n: int, sigma: tuple[int, ...], a0: int) -> dict:
        """Right action on functionals: inverse transpose of the operad
        action, so that pairing with the operad is invariant."""
        key = (n, sigma)
        if key not in self._act_rows:
            inv = perm_inverse(sigma)
            rows: dict[int, dict] = {}
            for c in range(self.dim(n)):
                for out, v in self.operad.act_basis(n, inv, c).items():
                    rows.setdefault(out, {})[c] = v
            self._act_rows[key] = rows
        return self._act_rows[key].get(a0, {})


def dual_cooperad(O: GradedOperad, max_arity: int) -> Cooperad:
    return Cooperad(O, max_arity)


@lru_cache(maxsize=None)
def liec_cooperad(max_arity: int) -> Cooperad:
    from .operads import lie_operad
    return Cooperad(lie_operad(max_arity), max_arity)


@lru_cache(maxsize=None)
def asc_cooperad(max_arity: int) -> Cooperad:
    from .operads import assoc_operad
    return Cooperad(assoc_operad(max_arity), max_arity)


@lru_cache(maxsize=None)
def commc_cooperad(max_arity: int) -> Cooperad:
    from .operads import comm_operad
    return Cooperad(comm_operad(max_arity), max_arity)


# ---------------------------------------------------------------------------
# Shuffles and the quotient model of the Lie cooperad


def shuffles(p: int, q: int):
    """(p, q)-shuffles as permutations of 1..p+q in one-line notation."""
    for positions in itertools.combinations(range(p + q), p):
        out = [0] * (p + q)
        rest = [k for k in range(p + q) if k not in positions]
        for j, pos in enumerate(positions):
            out[pos] = j + 1
        for j, pos in enumerate(rest):
            out[pos] = p + 1 + j
        yield tuple(out)


def shuffle_sum(u: tuple[int, ...], v: tuple[int, ...],
                degrees: tuple[int, ...] | None = None) -> dict:
    """Sum of all interleavings of the words u and v.

    Letters must be disjoint.  With ``degrees`` (one per letter of the
    concatenation u + v, in that order) each interleaving carries the
    Koszul sign of the rearrangement.
    """
    if set(u) & set(v):
        raise CobarError("shuffle factors must use disjoint letters")
    cat = u + v
    p, q = len(u), len(v)
    acc: dict[tuple[int, ...], int] = {}
    for sh in shuffles(p, q):
        # interleaving: position k receives letter number sh[k] of cat
        word = tuple(cat[sh[k] - 1] for k in range(p + q))
        sign = 1
        if degrees is not None:
            sign = koszul_sign(sh, degrees)
        acc[word] = acc.get(word, 0) + sign
    return {w: c for w, c in acc.items() if c}


def multilinear_shuffle_relations(n: int) -> list[dict]:
    """Spanning set of multilinear shuffle products in n letters.

    Each relation is a sparse vector over words (tuples) of length n:
    the shuffle of an ordering of a proper nonempty subset with an
    ordering of its complement.
    """
    letters = tuple(range(1, n + 1))
    out = []
    for k in range(1, n):
        for subset in itertools.combinations(letters, k):
            rest = tuple(x for x in letters if x not in subset)
            if k > n - k:
                continue  # (u, v) and (v, u) shuffle to the same sum
            for u in itertools.permutations(subset):
                for v in itertools.permutations(rest):
                    out.append(shuffle_sum(u, v))
    return out


def liec_component_dim(n: int) -> int:
    """Dimension of multilinear words modulo shuffles, by explicit rank.

    Independent of the dual-operad model; the answer is (n-1)!.
    """
    if n == 1:
        return 1
    words = sorted(itertools.permutations(range(1, n + 1)))
    index = {w: k for k, w in enumerate(words)}
    rels = [{index[w]: Fraction(c) for w, c in r.items()}
            for r in multilinear_shuffle_relations(n)]
    return len(words) - span_rank(rels)


# ---------------------------------------------------------------------------
# Cobar complex on decorated trees


def _internal_vertices(t: Tree):
    """(key, child keys or leaf labels, arity) per internal vertex, in
    preorder; a vertex's key is the frozenset of leaves below it."""
    out = []

    def leaves_below(shape):
        if isinstance(shape, int):
            return frozenset((shape,))
        return frozenset().union(*(leaves_below(c) for c in shape))

    def walk(shape):
        if isinstance(shape, int):
            return
        key = leaves_below(shape)
        out.append((key, tuple(leaves_below(c) for c in shape), len(shape)))
        for c in shape:
            walk(c)

    walk(t.shape)
    return out


def _block_insertion_perm(m: int, positions: tuple[int, ...]) -> tuple[int, ...]:
    """Permutation aligning standard composition slots with a child
    subset.  Slots 1..i*-1 stay put (i* = min position), the inner block
    goes to the chosen positions, remaining slots fill the complement."""
    k = len(positions)
    i_star = positions[0]
    rest = [p for p in range(1, m + 1) if p not in positions and p > i_star]
    sigma = list(range(1, i_star))
    sigma.extend(positions)
    sigma.extend(rest)
    return tuple(sigma)


def _perm_parity(word: list[int]) -> int:
    """+1 or -1: parity of the permutation given as a list of distinct
    ranks."""
    sign = 1
    for x in range(len(word)):
        for y in range(x + 1, len(word)):
            if word[x] > word[y]:
                sign = -sign
    return sign


class CobarComplex:
    """The arity-n cobar complex of a cooperad, graded by edge count."""

    def __init__(self, cooperad: Cooperad, n: int, sign_mode: str = "standard"):
        if n < 2:
            raise CobarError("cobar pieces start at arity 2")
        if n > cooperad.max_arity:
            raise CobarError(
                f"cooperad only has components up to arity {cooperad.max_arity}")
        if sign_mode not in ("standard", "unsigned"):
            raise CobarError(f"unknown sign mode {sign_mode!r}")
        self.cooperad = cooperad
        self.n = n
        self.sign_mode = sign_mode
        self.basis: dict[int, list] = {}
        self.index: dict[int, dict] = {}
        for e in range(n - 1):
            items = []
            for t in enumerate_trees(n, e):
                arities = [m for _, _, m in _internal_vertices(t)]
                ranges = [range(cooperad.dim(m)) for m in arities]
                for decor in itertools.product(*ranges):
                    items.append((t, decor))
            self.basis[e] = items
            self.index[e] = {(t.shape, d): k for k, (t, d) in enumerate(items)}
        self._delta_cache: dict = {}

    def dims(self) -> dict[int, int]:
        return {e: len(b) for e, b in self.basis.items()}

    def _delta_table(self, m: int, positions: tuple[int, ...]):
        """{a0: {(a, b): coeff}} for splitting the children at the given
        positions off a vertex of arity m."""
        key = (m, positions)
        if key in self._delta_cache:
            return self._delta_cache[key]
        k = len(positions)
        i_star = positions[0]
        sigma = _block_insertion_perm(m, positions)
        O = self.cooperad.operad
        table: dict[int, dict] = {}
        for a in range(O.dim(m - k + 1)):
            for b in range(O.dim(k)):
                composed = O.compose_basis(m - k + 1, i_star, k, a, b)
                for out, c in O.act(m, sigma, composed).items():
                    table.setdefault(out, {})[(a, b)] = c
        self._delta_cache[key] = table
        return table

    def boundary_from(self, e: int) -> list[tuple[int, int, Fraction]]:
        """Sparse entries of d restricted to edge degree e (rows live in
        degree e + 1)."""
        entries = []
        tgt_index = self.index.get(e + 1, {})
        for col, (t, decor) in enumerate(self.basis[e]):
            verts = _internal_vertices(t)
            src_edges = t.edge_list()
            for vi, (vkey, childkeys, m) in enumerate(verts):
                if m < 3:
                    continue
                for k in range(2, m):
                    for subset in itertools.combinations(range(1, m + 1), k):
                        new_shape, new_key = _expand_vertex(
                            t.shape, vkey, childkeys, subset)
                        new_tree = Tree(new_shape)
                        if self.sign_mode == "standard":
                            # orientation transport: sign of the shuffle
                            # taking (source edges, new edge) to the
                            # target's canonical edge order
                            tgt_pos = {ek: j for j, ek in
                                       enumerate(new_tree.edge_list())}
                            word = [tgt_pos[ek] for ek in src_edges]
                            word.append(tgt_pos[new_key])
                            sign = _perm_parity(word)
                        else:
                            sign = 1
                        table = self._delta_table(m, subset)
                        for (a, b), c in table.get(decor[vi], {}).items():
                            new_decor = _expanded_decoration(
                                new_tree, verts, decor, vkey, new_key, a, b)
                            row = tgt_index[(new_tree.shape, new_decor)]
                            entries.append((row, col, sign * c))
        return entries

    def chain_complex(self) -> ChainComplex:
        """Regrade by operadic degree p = n - 2 - e so the differential
        lowers degree; construction validates d . d = 0."""
        n = self.n
        spaces = [len(self.basis[n - 2 - p]) for p in range(n - 1)]
        boundaries = []
        for p in range(n - 2):
            e = n - 2 - p - 1  # source of d in edge grading
            rows, cols = spaces[p], spaces[p + 1]
            acc: dict[tuple[int, int], Fraction] = {}
            for r, c, v in self.boundary_from(e):
                key = (r, c)
                acc[key] = acc.get(key, Fraction(0)) + v
            boundaries.append(SparseMatrix.from_dict(
                rows, cols, {k: v for k, v in acc.items() if v}))
        return ChainComplex(spaces, boundaries)

    def homology(self) -> dict[int, int]:
        """Betti numbers keyed by edge count."""
        betti = self.chain_complex().homology()
        return {self.n - 2 - p: b for p, b in enumerate(betti)}


def _leaves_below(shape) -> frozenset:
    if isinstance(shape, int):
        return frozenset((shape,))
    return frozenset().union(*(_leaves_below(c) for c in shape))


def _expand_vertex(shape, vkey, childkeys, positions):
    """Group the children at the given 1-based positions of the vertex
    with leaf set vkey under a new vertex; returns (shape, new key)."""
    grouped = frozenset().union(*(childkeys[p - 1] for p in positions))

    def walk(s):
        if isinstance(s, int):
            return s
        if _leaves_below(s) == vkey:
            taken = [c for p, c in enumerate(s, start=1) if p in positions]
            kept = [c for p, c in enumerate(s, start=1) if p not in positions]
            kept.append(tuple(sorted(taken, key=lambda x: min(_leaves_below(x)))))
            return tuple(sorted(kept, key=lambda x: min(_leaves_below(x))))
        return tuple(walk(c) for c in s)

    return walk(shape), grouped


def _expanded_decoration(new_tree, old_verts, decor, vkey, new_key, a, b):
    """Decoration tuple of the expanded tree in its own preorder."""
    values = {key: decor[i] for i, (key, _, _) in enumerate(old_verts)}
    values[vkey] = a
    values[new_key] = b
    return tuple(values[key] for key, _, _ in _internal_vertices(new_tree))


def cobar_dims(cooperad: Cooperad, n: int) -> dict[int, int]:
    """Dimension of each edge-graded piece of the arity-n cobar complex."""
    return CobarComplex(cooperad, n).dims()


def cobar_homology(cooperad: Cooperad, n: int,
                   sign_mode: str = "standard") -> dict[int, int]:
    """Betti numbers of the arity-n cobar complex, keyed by edge count.

    Raises ComplexError if the differential does not square to zero
    (which is how a wrong sign convention announces itself).
    """
    return CobarComplex(cooperad, n, sign_mode=sign_mode).homology()


# ---------------------------------------------------------------------------
# The cobar construction as a graded operad


class CobarOperad(GradedOperad):
    """Decorated trees under grafting, with the cobar differential.

    The arity-n component is spanned by trees with n leaves and cooperad
    basis decorations; a basis element with e internal edges sits in
    degree n - 2 - e.  Composition grafts trees (one new edge appears,
    and the degree is additive); the action relabels leaves, reorders
    each vertex's inputs through the cooperad action and picks up the
    Koszul sign of reordering the vertex generators.
    """

    def __init__(self, cooperad: Cooperad, max_arity: int):
        if max_arity > cooperad.max_arity:
            raise CobarError("max_arity exceeds the cooperad's range")
        self.cooperad = cooperad
        self._complexes = {n: CobarComplex(cooperad, n)
                           for n in range(2, max_arity + 1)}
        components = {}
        self._basis = {}
        self._bindex = {}
        diffs = {}
        for n in range(2, max_arity + 1):
            cx = self._complexes[n]
            basis = []
            for e in sorted(cx.basis):
                basis.extend(cx.basis[e])
            self._basis[n] = basis
            self._bindex[n] = {(t.shape, d): k for k, (t, d) in enumerate(basis)}
            names = []
            degrees = []
            for t, decor in basis:
                sp_names = [cooperad.space(m).names[decor[i]]
                            for i, (_, _, m) in
                            enumerate(_internal_vertices(t))]
                from .treegraph import encode_tree
                names.append(f"{encode_tree(t)}[{';'.join(sp_names)}]")
                degrees.append(n - 2 - t.internal_edges)
            components[n] = GradedSpace(tuple(names), tuple(degrees))
            diffs[n] = self._assemble_differential(n)
        # arity 1: the bare leaf, in degree 0
        components[1] = GradedSpace(("|",), (0,))
        self._basis[1] = [(None, ())]
        super().__init__(components, {0: Fraction(1)}, diffs)

    def _assemble_differential(self, n: int) -> SparseMatrix:
        cx = self._complexes[n]
        offsets = {}
        pos = 0
        for e in sorted(cx.basis):
            offsets[e] = pos
            pos += len(cx.basis[e])
        acc: dict[tuple[int, int], Fraction] = {}
        for e in sorted(cx.basis):
            if e + 1 not in cx.basis:
                continue
            for r, c, v in cx.boundary_from(e):
                key = (offsets[e + 1] + r, offsets[e] + c)
                acc[key] = acc.get(key, Fraction(0)) + v
        acc = {k: v for k, v in acc.items() if v}
        return SparseMatrix.from_dict(pos, pos, acc)

    def basis_element(self, n: int, a: int):
        return self._basis[n][a]

    def compose_basis(self, n, i, m, a, b) -> Vector:
        if m == 1:
            return {a: Fraction(1)}
        if n == 1:
            return {b: Fraction(1)}
        from .treegraph import graft
        t, dt = self._basis[n][a]
        s, ds = self._basis[m][b]
        grafted = graft(t, i, s)
        # vertex keys after operadic relabeling
        tv = _internal_vertices(t)
        sv = _internal_vertices(s)

        def shift_outer(key):
            out = set()
            for x in key:
                if x < i:
                    out.add(x)
                elif x == i:
                    out.update(range(i, i + m))
                else:
                    out.add(x + m - 1)
            return frozenset(out)

        def shift_inner(key):
            return frozenset(x + i - 1 for x in key)

        values = {}
        gen_word = []  # (key, generator degree) in source order: t then s
        for idx, (key, _, mv) in enumerate(tv):
            values[shift_outer(key)] = dt[idx]
            gen_word.append((shift_outer(key), mv - 2))
        for idx, (key, _, mv) in enumerate(sv):
            values[shift_inner(key)] = ds[idx]
            gen_word.append((shift_inner(key), mv - 2))
        target_order = [key for key, _, _ in _internal_vertices(grafted)]
        rankof = {key: j for j, key in enumerate(target_order)}
        perm = sorted(range(len(gen_word)),
                      key=lambda j: rankof[gen_word[j][0]])
        # Koszul sign of reordering the generator word into tree preorder
        sign = 1
        for x in range(len(perm)):
            for y in range(x + 1, len(perm)):
                if perm[x] > perm[y]:
                    if gen_word[perm[x]][1] % 2 and gen_word[perm[y]][1] % 2:
                        sign = -sign
        decor = tuple(values[key] for key in target_order)
        return {self._bindex[n + m - 1][(grafted.shape, decor)]: Fraction(sign)}

    def act_basis(self, n, sigma, a) -> Vector:
        if n == 1:
            return {a: Fraction(1)}
        from .treegraph import relabel_tree
        t, dt = self._basis[n][a]
        mapping = {j: sigma[j - 1] for j in range(1, n + 1)}
        new_tree = relabel_tree(t, mapping)
        old_verts = _internal_vertices(t)
        new_verts = _internal_vertices(new_tree)
        keymap = {key: frozenset(mapping[x] for x in key)
                  for key, _, _ in old_verts}
        rankof = {key: j for j, (key, _, _) in enumerate(new_verts)}
        perm = sorted(range(len(old_verts)),
                      key=lambda j: rankof[keymap[old_verts[j][0]]])
        sign = 1
        for x in range(len(perm)):
            for y in range(x + 1, len(perm)):
                if perm[x] > perm[y]:
                    dx = old_verts[perm[x]][2] - 2
                    dy = old_verts[perm[y]][2] - 2
                    if dx % 2 and dy % 2:
                        sign = -sign
        # per-vertex child reordering acts on the decoration
        factors = []  # aligned with new_verts order
        newpos = {key: idx for idx, (key, _, _) in enumerate(new_verts)}
        slots = [None] * len(new_verts)
        for j, (key, childkeys, mv) in enumerate(old_verts):
            nk = keymap[key]
            new_childkeys = dict(zip(
                (frozenset(mapping[x] for x in ck) for ck in childkeys),
                range(1, mv + 1)))
            # tau maps new child slot -> old child slot
            target = next(ck for k2, ck, m2 in new_verts if k2 == nk)
            tau = tuple(new_childkeys[ck] for ck in target)
            slots[newpos[nk]] = self.cooperad.act(mv, tau, dt[j])
        out: Vector = {}
        for combo in itertools.product(*(f.items() for f in slots)):
            decor = tuple(c for c, _ in combo)
            coeff = Fraction(sign)
            for _, v in combo:
                coeff *= v
            _addmul(out, self._bindex[n][(new_tree.shape, decor)], coeff)
        return out


def cobar_operad(cooperad: Cooperad, max_arity: int) -> CobarOperad:
    return CobarOperad(cooperad, max_arity)
