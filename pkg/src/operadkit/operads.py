"""Graded rational operads: composition, symmetric actions, axiom checks.

Ships the word operads Comm, Assoc and Lie (the latter in the
left-normed Lyndon-word basis), endomorphism operads of small graded
spaces, table-backed operads for fixtures, the axiom verifier and
free-algebra dimension counts.

Conventions.  Degrees are homological (differentials lower degree by
one).  Permutations are tuples ``sigma`` of length n with 1-based
values, ``sigma[i-1]`` the image of i.  The symmetric action is the
right action (f.sigma)(v_1,...,v_n) = +-f(v_{sigma(1)},...,v_{sigma(n)})
with the Koszul sign of the rearrangement; on words it relabels letters.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .qlinalg import SparseMatrix

Vector = dict  # basis index -> Fraction


class OperadError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """A finite-dimensional graded space with a named basis."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees must have equal length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")

    @property
    def dim(self) -> int:
        return len(self.names)


# ---------------------------------------------------------------------------
# Permutation helpers


def perm_compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """(a o b)(i) = a(b(i))."""
    return tuple(a[b[i] - 1] for i in range(len(a)))


def perm_inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(a)
    for i, v in enumerate(a):
        inv[v - 1] = i + 1
    return tuple(inv)


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def expand_perm(sigma: tuple[int, ...], k: int, s: int) -> tuple[int, ...]:
    """Blow up domain slot k of sigma into a block of s slots.

    sigma(k) = i becomes the block i..i+s-1 in order; all other values
    above i shift up by s-1.  Used in the equivariance axiom
    (f.sigma) o_i g = (f o_k g).expand_perm(sigma, k, s) with k the slot
    sigma sends to i.
    """
    n = len(sigma)
    i = sigma[k - 1]

    def adj(v):
        return v if v < i else v + s - 1

    out = []
    for t in range(1, k):
        out.append(adj(sigma[t - 1]))
    out.extend(range(i, i + s))
    for t in range(k + 1, n + 1):
        out.append(adj(sigma[t - 1]))
    return tuple(out)


def embed_block_perm(tau: tuple[int, ...], i: int, total: int) -> tuple[int, ...]:
    """Embed tau in S_s as a permutation of ``total`` slots acting on
    the block i..i+s-1."""
    s = len(tau)
    out = list(range(1, total + 1))
    for j in range(1, s + 1):
        out[i - 1 + j - 1] = i - 1 + tau[j - 1]
    return tuple(out)


def koszul_sign(perm: tuple[int, ...], degrees: tuple[int, ...]) -> int:
    """Sign of rearranging graded letters: (v_1..v_n) -> (v_{perm(1)}..).

    ``degrees[j-1]`` is the degree of v_j.  The sign is -1 to the number
    of transposed odd-odd pairs.
    """
    sign = 1
    n = len(perm)
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b]:
                if degrees[perm[a] - 1] % 2 and degrees[perm[b] - 1] % 2:
                    sign = -sign
    return sign


def cycle_types(n: int):
    """Partitions of n as sorted tuples (cycle types of S_n)."""

    def gen(remaining, maxpart):
        if remaining == 0:
            yield ()
            return
        for p in range(min(remaining, maxpart), 0, -1):
            for rest in gen(remaining - p, p):
                yield (p,) + rest

    return list(gen(n, n))


def class_size(lam: tuple[int, ...]) -> int:
    n = sum(lam)
    z = 1
    for k in set(lam):
        m = lam.count(k)
        z *= k ** m * factorial(m)
    return factorial(n) // z


def class_representative(lam: tuple[int, ...]) -> tuple[int, ...]:
    """A permutation with the given cycle type."""
    out = []
    start = 1
    for p in lam:
        cycle = list(range(start + 1, start + p)) + [start]
        out.extend(cycle)
        start += p
    return tuple(out)


# ---------------------------------------------------------------------------
# Operad base class


def _addmul(acc: Vector, idx, coeff) -> None:
    s = acc.get(idx, 0) + coeff
    if s:
        acc[idx] = s
    elif idx in acc:
        del acc[idx]


class GradedOperad:
    """Base class: finite-type graded operad with partial compositions.

    Subclasses implement ``compose_basis`` and ``act_basis`` on basis
    elements; linear extensions, the unit and axiom-facing helpers live
    here.  Instances are immutable after construction and safe to share.
    """

    def __init__(self, components: dict[int, GradedSpace],
                 unit_vector: Vector,
                 differentials: dict[int, SparseMatrix] | None = None):
        self.components = dict(components)
        self.unit_vector = dict(unit_vector)
        self.differentials = dict(differentials or {})
        for n, d in self.differentials.items():
            dim = self.components[n].dim
            if d.rows != dim or d.cols != dim:
                raise OperadError(f"differential shape mismatch at arity {n}")

    # -- interface ----------------------------------------------------------

    def compose_basis(self, n: int, i: int, m: int, a: int, b: int) -> Vector:
        raise NotImplementedError

    def act_basis(self, n: int, sigma: tuple[int, ...], a: int) -> Vector:
        raise NotImplementedError

    # -- derived operations --------------------------------------------------

    def arities(self) -> list[int]:
        return sorted(self.components)

    @property
    def max_arity(self) -> int:
        return max(self.components)

    def space(self, n: int) -> GradedSpace:
        try:
            return self.components[n]
        except KeyError:
            raise OperadError(f"no component of arity {n}") from None

    def dim(self, n: int) -> int:
        return self.space(n).dim

    def degree(self, n: int, a: int) -> int:
        return self.space(n).degrees[a]

    def compose(self, n: int, i: int, m: int, x: Vector, y: Vector) -> Vector:
        if not (1 <= i <= n):
            raise OperadError(f"slot {i} out of range for arity {n}")
        acc: Vector = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for out, c in self.compose_basis(n, i, m, a, b).items():
                    _addmul(acc, out, ca * cb * c)
        return acc

    def act(self, n: int, sigma: tuple[int, ...], x: Vector) -> Vector:
        acc: Vector = {}
        for a, ca in x.items():
            for out, c in self.act_basis(n, sigma, a).items():
                _addmul(acc, out, ca * c)
        return acc

    def action_matrix(self, n: int, sigma: tuple[int, ...]) -> SparseMatrix:
        dim = self.dim(n)
        entries = []
        for a in range(dim):
            for out, c in self.act_basis(n, sigma, a).items():
                entries.append((out, a, c))
        return SparseMatrix(dim, dim, entries)

    def action_trace(self, n: int, sigma: tuple[int, ...]) -> Fraction:
        total = Fraction(0)
        for a in range(self.dim(n)):
            total += self.act_basis(n, sigma, a).get(a, 0)
        return total

    def element_degree(self, n: int, x: Vector) -> int | None:
        degs = {self.degree(n, a) for a in x}
        if len(degs) > 1:
            raise OperadError("inhomogeneous element")
        return degs.pop() if degs else None


# ---------------------------------------------------------------------------
# Word helpers (Assoc / Lie)


def substitute_word(w: tuple[int, ...], i: int, u: tuple[int, ...]) -> tuple[int, ...]:
    """Operadic substitution of the word u into letter i of w."""
    s = len(u)
    out = []
    for letter in w:
        if letter == i:
            out.extend(x + i - 1 for x in u)
        elif letter > i:
            out.append(letter + s - 1)
        else:
            out.append(letter)
    return tuple(out)


def relabel_word(w: tuple[int, ...], sigma: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sigma[x - 1] for x in w)


@lru_cache(maxsize=None)
def lie_expand(w: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Expansion of the left-normed bracket of w into associative words.

    rho(w_1..w_n) = [..[[x_{w_1}, x_{w_2}], x_{w_3}]..], expanded via
    [a, b] = ab - ba; returns ((word, coeff), ...).
    """
    if len(w) == 1:
        return ((w, 1),)
    inner = lie_expand(w[:-1])
    last = w[-1]
    acc: dict[tuple[int, ...], int] = {}
    for word, c in inner:
        k = word + (last,)
        acc[k] = acc.get(k, 0) + c
        k = (last,) + word
        acc[k] = acc.get(k, 0) - c
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def rho_coeff(u: tuple[int, ...], w: tuple[int, ...]) -> int:
    """Coefficient of the word u in the expansion of the left-normed
    bracket of w (both multilinear of the same length)."""
    if len(w) == 1:
        return 1 if u == w else 0
    last = w[-1]
    total = 0
    if u[-1] == last:
        total += rho_coeff(u[:-1], w[:-1])
    if u[0] == last:
        total -= rho_coeff(u[1:], w[:-1])
    return total


def multilinear_words(n: int) -> list[tuple[int, ...]]:
    return sorted(itertools.permutations(range(1, n + 1)))


def lie_basis_words(n: int) -> list[tuple[int, ...]]:
    """Multilinear left-normed basis labels: words starting with 1."""
    return sorted((1,) + p for p in itertools.permutations(range(2, n + 1)))


class CommOperad(GradedOperad):
    """One-dimensional components in degree 0, trivial action."""

    def __init__(self, max_arity: int):
        if max_arity < 1:
            raise OperadError("max_arity must be >= 1")
        components = {n: GradedSpace((f"c{n}",), (0,))
                      for n in range(1, max_arity + 1)}
        super().__init__(components, {0: Fraction(1)})

    def compose_basis(self, n, i, m, a, b):
        return {0: Fraction(1)}

    def act_basis(self, n, sigma, a):
        return {a: Fraction(1)}

    def action_trace(self, n, sigma):
        return Fraction(1)


class WordOperadMixin:
    """Shared indexing for operads with word bases."""

    def word(self, n: int, a: int) -> tuple[int, ...]:
        return self._words[n][a]

    def word_index(self, n: int, w: tuple[int, ...]) -> int:
        return self._index[n][w]


class AssocOperad(GradedOperad, WordOperadMixin):
    """Components k[S_n] in degree 0; composition substitutes words."""

    def __init__(self, max_arity: int):
        if max_arity < 1:
            raise OperadError("max_arity must be >= 1")
        self._words = {n: multilinear_words(n) for n in range(1, max_arity + 1)}
        self._index = {n: {w: k for k, w in enumerate(ws)}
                       for n, ws in self._words.items()}
        components = {
            n: GradedSpace(tuple("".join(map(str, w)) for w in ws),
                           (0,) * len(ws))
            for n, ws in self._words.items()}
        super().__init__(components, {0: Fraction(1)})

    def compose_basis(self, n, i, m, a, b):
        w = substitute_word(self._words[n][a], i, self._words[m][b])
        return {self._index[n + m - 1][w]: Fraction(1)}

    def act_basis(self, n, sigma, a):
        w = relabel_word(self._words[n][a], sigma)
        return {self._index[n][w]: Fraction(1)}

    def action_trace(self, n, sigma):
        # relabeling fixes a word iff sigma is the identity
        if sigma == identity_perm(n):
            return Fraction(factorial(n))
        return Fraction(0)


class LieOperad(GradedOperad, WordOperadMixin):
    """Multilinear free Lie components in the left-normed word basis.

    A basis label w (a word starting with 1) stands for the left-normed
    bracket rho(w).  Composition and the action are computed in the
    associative expansion; coordinates are read off the words starting
    with the letter 1, which recovers the basis coefficients exactly.
    """

    def __init__(self, max_arity: int):
        if max_arity < 1:
            raise OperadError("max_arity must be >= 1")
        self._words = {n: lie_basis_words(n) for n in range(1, max_arity + 1)}
        self._index = {n: {w: k for k, w in enumerate(ws)}
                       for n, ws in self._words.items()}
        components = {
            n: GradedSpace(tuple("".join(map(str, w)) for w in ws),
                           (0,) * len(ws))
            for n, ws in self._words.items()}
        super().__init__(components, {0: Fraction(1)})

    def _from_expansion(self, n: int, terms: dict[tuple[int, ...], int]) -> Vector:
        out: Vector = {}
        index = self._index[n]
        for word, c in terms.items():
            if c and word[0] == 1:
                out[index[word]] = Fraction(c)
        return out

    def compose_basis(self, n, i, m, a, b):
        acc: dict[tuple[int, ...], int] = {}
        for wa, ca in lie_expand(self._words[n][a]):
            for wb, cb in lie_expand(self._words[m][b]):
                w = substitute_word(wa, i, wb)
                acc[w] = acc.get(w, 0) + ca * cb
        return self._from_expansion(n + m - 1, acc)

    def act_basis(self, n, sigma, a):
        acc: dict[tuple[int, ...], int] = {}
        for w, c in lie_expand(self._words[n][a]):
            acc[relabel_word(w, sigma)] = c
        return self._from_expansion(n, acc)

    def action_trace(self, n, sigma):
        inv = perm_inverse(sigma)
        total = 0
        for w in self._words[n]:
            total += rho_coeff(relabel_word(w, inv), w)
        return Fraction(total)


def comm_operad(max_arity: int) -> CommOperad:
    return CommOperad(max_arity)


def assoc_operad(max_arity: int) -> AssocOperad:
    return AssocOperad(max_arity)


def lie_operad(max_arity: int) -> LieOperad:
    return LieOperad(max_arity)


# ---------------------------------------------------------------------------
# Endomorphism operads


class EndOperad(GradedOperad):
    """End_V(n) = Hom(V^n, V) for a small graded space V.

    Basis elements are (output, input tuple) pairs; composition uses the
    sign obtained by sliding the inner map past the earlier inputs, and
    the action permutes inputs with Koszul signs.  When a differential Q
    on V is supplied, each component carries the Hom-complex
    differential.
    """

    def __init__(self, V: GradedSpace, max_arity: int,
                 q: SparseMatrix | None = None, dim_cap: int = 20000):
        if V.dim > 4:
            raise OperadError("endomorphism operads are desk scale: dim V <= 4")
        self.V = V
        self.q = q
        if q is not None:
            if q.rows != V.dim or q.cols != V.dim:
                raise OperadError("differential shape mismatch")
            for r, c, _ in q.entries():
                if V.degrees[r] != V.degrees[c] - 1:
                    raise OperadError("differential must have degree -1")
            if not q.matmul(q).is_zero():
                raise OperadError("Q squared is nonzero")
        self._basis = {}
        self._bindex = {}
        components = {}
        d = V.dim
        for n in range(1, max_arity + 1):
            if d ** (n + 1) > dim_cap:
                raise OperadError(
                    f"End component at arity {n} exceeds dimension cap")
            basis = [(j, ins) for j in range(d)
                     for ins in itertools.product(range(d), repeat=n)]
            self._basis[n] = basis
            self._bindex[n] = {b: k for k, b in enumerate(basis)}
            names = tuple(
                f"f[{V.names[j]}|{','.join(V.names[i] for i in ins)}]"
                for j, ins in basis)
            degrees = tuple(
                V.degrees[j] - sum(V.degrees[i] for i in ins)
                for j, ins in basis)
            components[n] = GradedSpace(names, degrees)
        unit = {self._bindex[1][(j, (j,))]: Fraction(1) for j in range(d)}
        diffs = {}
        if q is not None:
            for n in components:
                diffs[n] = self._hom_differential(n, components[n].degrees)
        super().__init__(components, unit, diffs)

    def basis_map(self, n: int, a: int) -> tuple[int, tuple[int, ...]]:
        return self._basis[n][a]

    def map_index(self, n: int, out: int, ins: tuple[int, ...]) -> int:
        return self._bindex[n][(out, ins)]

    def compose_basis(self, n, i, m, a, b):
        j, ins = self._basis[n][a]
        k, bins = self._basis[m][b]
        if ins[i - 1] != k:
            return {}
        gdeg = self.degree(m, b)
        slide = sum(self.V.degrees[t] for t in ins[: i - 1])
        sign = -1 if (gdeg % 2 and slide % 2) else 1
        new_ins = ins[: i - 1] + bins + ins[i:]
        return {self._bindex[n + m - 1][(j, new_ins)]: Fraction(sign)}

    def act_basis(self, n, sigma, a):
        j, ins = self._basis[n][a]
        # (f.sigma) is supported on the tuple c with c_{sigma(t)} = ins_t
        c = [0] * n
        for t in range(1, n + 1):
            c[sigma[t - 1] - 1] = ins[t - 1]
        c = tuple(c)
        degs = tuple(self.V.degrees[x] for x in c)
        sign = koszul_sign(sigma, degs)
        return {self._bindex[n][(j, c)]: Fraction(sign)}

    def _hom_differential(self, n: int, degrees: tuple[int, ...]) -> SparseMatrix:
        dim = len(self._basis[n])
        acc: dict[tuple[int, int], Fraction] = {}
        qrows: dict[int, list[tuple[int, Fraction]]] = {}
        for r, c, v in self.q.entries():
            qrows.setdefault(c, []).append((r, v))
        for col, (j, ins) in enumerate(self._basis[n]):
            fdeg = degrees[col]
            for r, v in qrows.get(j, ()):
                key = (self._bindex[n][(r, ins)], col)
                acc[key] = acc.get(key, Fraction(0)) + v
            lead = -1 if fdeg % 2 else 1
            for k in range(n):
                for cnew, v in self._q_preimages(ins[k]):
                    new_ins = ins[:k] + (cnew,) + ins[k + 1:]
                    slide = sum(self.V.degrees[x] for x in new_ins[:k])
                    s = -lead * (-1 if slide % 2 else 1)
                    key = (self._bindex[n][(j, new_ins)], col)
                    acc[key] = acc.get(key, Fraction(0)) + s * v
        acc = {k: v for k, v in acc.items() if v}
        return SparseMatrix.from_dict(dim, dim, acc)

    def _q_preimages(self, target: int):
        # basis vectors c with Q e_c having a component on e_target
        for r, c, v in self.q.entries():
            if r == target:
                yield c, v

    def degrees_of(self, n: int, a: int) -> int:
        return self.space(n).degrees[a]

    def evaluate(self, n: int, x: Vector,
                 ins: tuple[int, ...]) -> Vector:
        """Apply an element of End(n) to a basis input tuple."""
        out: Vector = {}
        for a, c in x.items():
            j, a_ins = self._basis[n][a]
            if a_ins == ins:
                _addmul(out, j, c)
        return out


def endomorphism_operad(V: GradedSpace, max_arity: int,
                        q: SparseMatrix | None = None,
                        dim_cap: int = 20000) -> EndOperad:
    return EndOperad(V, max_arity, q=q, dim_cap=dim_cap)


# ---------------------------------------------------------------------------
# Table-backed operads (fixtures, JSON round trips, fault injection)


class TableOperad(GradedOperad):
    """An operad given by explicit sparse composition/action tables."""

    def __init__(self, components, unit_vector, compositions, actions,
                 differentials=None):
        super().__init__(components, unit_vector, differentials)
        self._comp = compositions  # (n, i, m) -> {(a, b): {out: coeff}}
        self._act = actions        # (n, sigma) -> {a: {out: coeff}}

    @classmethod
    def from_operad(cls, O: GradedOperad, max_arity: int) -> "TableOperad":
        components = {n: O.space(n) for n in O.arities() if n <= max_arity}
        comp = {}
        for n in components:
            for m in components:
                if n + m - 1 > max_arity:
                    continue
                for i in range(1, n + 1):
                    table = {}
                    for a in range(O.dim(n)):
                        for b in range(O.dim(m)):
                            v = O.compose_basis(n, i, m, a, b)
                            if v:
                                table[(a, b)] = dict(v)
                    comp[(n, i, m)] = table
        act = {}
        for n in components:
            for sigma in itertools.permutations(range(1, n + 1)):
                act[(n, sigma)] = {a: dict(O.act_basis(n, sigma, a))
                                   for a in range(O.dim(n))}
        diffs = {n: O.differentials[n] for n in O.differentials
                 if n <= max_arity}
        return cls(components, dict(O.unit_vector), comp, act, diffs)

    def compose_basis(self, n, i, m, a, b):
        return self._comp.get((n, i, m), {}).get((a, b), {})

    def act_basis(self, n, sigma, a):
        return self._act[(n, sigma)].get(a, {})

    def with_corrupted_composition(self, n, i, m, a, b,
                                   scale=Fraction(-1)) -> "TableOperad":
        """Return a copy with one composition entry rescaled (fault
        injection for axiom-checker tests)."""
        comp = {key: {k: dict(v) for k, v in tab.items()}
                for key, tab in self._comp.items()}
        entry = comp[(n, i, m)][(a, b)]
        comp[(n, i, m)][(a, b)] = {k: v * scale for k, v in entry.items()}
        return TableOperad(self.components, self.unit_vector, comp, self._act,
                           self.differentials)


def operad_to_json(O: GradedOperad, max_arity: int) -> str:
    """Serialize components, compositions and actions to JSON.

    Coefficients are encoded as "p/q" strings; compositions are sparse
    triples (a, b, out, coeff).
    """
    T = O if isinstance(O, TableOperad) else TableOperad.from_operad(O, max_arity)
    doc = {
        "format": "operadkit-operad",
        "version": 1,
        "components": {
            str(n): {"names": list(sp.names), "degrees": list(sp.degrees)}
            for n, sp in T.components.items()},
        "unit": {str(k): str(v) for k, v in T.unit_vector.items()},
        "compositions": [
            {"n": n, "i": i, "m": m,
             "entries": [[a, b, out, str(c)]
                         for (a, b), vec in sorted(tab.items())
                         for out, c in sorted(vec.items())]}
            for (n, i, m), tab in sorted(T._comp.items())],
        "actions": [
            {"n": n, "sigma": list(sigma),
             "entries": [[a, out, str(c)]
                         for a, vec in sorted(tab.items())
                         for out, c in sorted(vec.items())]}
            for (n, sigma), tab in sorted(T._act.items())],
        "differentials": {
            str(n): [[r, c, str(v)] for r, c, v in d.entries()]
            for n, d in sorted(T.differentials.items())},
    }
    return json.dumps(doc, indent=1)


def operad_from_json(text: str) -> TableOperad:
    doc = json.loads(text)
    if doc.get("format") != "operadkit-operad":
        raise OperadError("not an operadkit operad document")
    components = {
        int(n): GradedSpace(tuple(sp["names"]), tuple(sp["degrees"]))
        for n, sp in doc["components"].items()}
    unit = {int(k): Fraction(v) for k, v in doc["unit"].items()}
    comp = {}
    for rec in doc["compositions"]:
        tab = {}
        for a, b, out, c in rec["entries"]:
            tab.setdefault((a, b), {})[out] = Fraction(c)
        comp[(rec["n"], rec["i"], rec["m"])] = tab
    act = {}
    for rec in doc["actions"]:
        tab = {}
        for a, out, c in rec["entries"]:
            tab.setdefault(a, {})[out] = Fraction(c)
        act[(rec["n"], tuple(rec["sigma"]))] = tab
    diffs = {}
    for n, entries in doc.get("differentials", {}).items():
        n = int(n)
        dim = components[n].dim
        diffs[n] = SparseMatrix(
            dim, dim, [(r, c, Fraction(v)) for r, c, v in entries])
    return TableOperad(components, unit, comp, act, diffs)


# ---------------------------------------------------------------------------
# Axiom verification


@dataclass
class AxiomViolation:
    axiom: str
    arities: tuple
    witness: tuple
    lhs: dict
    rhs: dict

    def __str__(self):
        return (f"axiom {self.axiom} fails at arities {self.arities}, "
                f"witness {self.witness}: {self.lhs} != {self.rhs}")


@dataclass
class AxiomReport:
    max_arity: int
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_axioms(O: GradedOperad, max_arity: int,
                 max_violations: int = 100) -> AxiomReport:
    """Exhaustively verify the operad axioms on basis elements.

    Checks, for all arities whose composites stay within max_arity:
    disjoint-slot commutation with the Koszul sign, nested-slot
    associativity, both equivariance identities and the unit laws.
    Violations are report entries, not exceptions.
    """
    arities = [n for n in O.arities() if n <= max_arity]
    violations: list[AxiomViolation] = []
    checked = 0

    def record(axiom, ar, witness, lhs, rhs):
        if len(violations) < max_violations:
            violations.append(AxiomViolation(axiom, ar, witness, lhs, rhs))

    def vec_eq(x, y):
        return {k: v for k, v in x.items() if v} == {k: v for k, v in y.items() if v}

    dims = {n: O.dim(n) for n in arities}

    # (1) disjoint slots: (f o_i f') o_{j+n'-1} f'' = +- (f o_j f'') o_i f'
    for n in arities:
        if n < 2:
            continue
        for np in arities:
            for npp in arities:
                if n + np + npp - 2 > max_arity:
                    continue
                for i in range(1, n + 1):
                    for j in range(i + 1, n + 1):
                        for a in range(dims[n]):
                            for b in range(dims[np]):
                                fb = O.compose_basis(n, i, np, a, b)
                                for c in range(dims[npp]):
                                    checked += 1
                                    lhs = O.compose(
                                        n + np - 1, j + np - 1, npp, fb,
                                        {c: Fraction(1)})
                                    fc = O.compose_basis(n, j, npp, a, c)
                                    rhs = O.compose(
                                        n + npp - 1, i, np, fc,
                                        {b: Fraction(1)})
                                    s = (-1) ** (O.degree(np, b)
                                                 * O.degree(npp, c))
                                    rhs = {k: s * v for k, v in rhs.items()}
                                    if not vec_eq(lhs, rhs):
                                        record("1", (n, np, npp), (i, j, a, b, c),
                                               lhs, rhs)

    # (2) nested slots: (f o_i f') o_{i+j-1} f'' = f o_i (f' o_j f'')
    for n in arities:
        for np in arities:
            for npp in arities:
                if n + np + npp - 2 > max_arity:
                    continue
                for i in range(1, n + 1):
                    for j in range(1, np + 1):
                        for a in range(dims[n]):
                            for b in range(dims[np]):
                                fb = O.compose_basis(n, i, np, a, b)
                                for c in range(dims[npp]):
                                    checked += 1
                                    lhs = O.compose(
                                        n + np - 1, i + j - 1, npp, fb,
                                        {c: Fraction(1)})
                                    inner = O.compose_basis(np, j, npp, b, c)
                                    rhs = O.compose(
                                        n, i, np + npp - 1,
                                        {a: Fraction(1)}, inner)
                                    if not vec_eq(lhs, rhs):
                                        record("2", (n, np, npp), (i, j, a, b, c),
                                               lhs, rhs)

    # (3) group action: adjacent transpositions satisfy the Coxeter
    # relations on each component, so checking both equivariance
    # identities on those generators certifies them for all of S_n.
    def transpositions(n):
        out = []
        for t in range(1, n):
            p = list(range(1, n + 1))
            p[t - 1], p[t] = p[t], p[t - 1]
            out.append(tuple(p))
        return out

    for n in arities:
        gens = [O.action_matrix(n, s) for s in transpositions(n)]
        ident = SparseMatrix.identity(dims[n])
        for t, g in enumerate(gens):
            checked += 1
            if g.matmul(g) != ident:
                record("3-group", (n,), ("s%d^2" % (t + 1),), {}, {})
            if t + 1 < len(gens):
                checked += 1
                h = gens[t + 1]
                gh = g.matmul(h)
                if gh.matmul(gh).matmul(gh) != ident:
                    record("3-group", (n,), ("braid", t + 1), {}, {})
            for u in range(t + 2, len(gens)):
                checked += 1
                if g.matmul(gens[u]) != gens[u].matmul(g):
                    record("3-group", (n,), ("commute", t + 1, u + 1), {}, {})

    # (3a) outer equivariance; (3b) inner equivariance
    for n in arities:
        for s in arities:
            if n + s - 1 > max_arity:
                continue
            for sigma in transpositions(n):
                sig = tuple(sigma)
                inv = perm_inverse(sig)
                for i in range(1, n + 1):
                    k = inv[i - 1]
                    big = expand_perm(sig, k, s)
                    for a in range(dims[n]):
                        fa = O.act_basis(n, sig, a)
                        for b in range(dims[s]):
                            checked += 1
                            lhs = O.compose(n, i, s, fa, {b: Fraction(1)})
                            base = O.compose_basis(n, k, s, a, b)
                            rhs = O.act(n + s - 1, big, base)
                            if not vec_eq(lhs, rhs):
                                record("3a", (n, s), (tuple(sig), i, a, b),
                                       lhs, rhs)
            for tau in transpositions(s):
                ta = tuple(tau)
                for i in range(1, n + 1):
                    big = embed_block_perm(ta, i, n + s - 1)
                    for a in range(dims[n]):
                        for b in range(dims[s]):
                            checked += 1
                            gb = O.act_basis(s, ta, b)
                            lhs = O.compose(n, i, s, {a: Fraction(1)}, gb)
                            base = O.compose_basis(n, i, s, a, b)
                            rhs = O.act(n + s - 1, big, base)
                            if not vec_eq(lhs, rhs):
                                record("3b", (n, s), (tuple(ta), i, a, b),
                                       lhs, rhs)

    # (4) unit laws
    if 1 in dims:
        for n in arities:
            for a in range(dims[n]):
                checked += 1
                lhs = O.compose(1, 1, n, O.unit_vector, {a: Fraction(1)})
                if not vec_eq(lhs, {a: Fraction(1)}):
                    record("4", (n,), ("I o f", a), lhs, {a: Fraction(1)})
                for i in range(1, n + 1):
                    checked += 1
                    lhs = O.compose(n, i, 1, {a: Fraction(1)}, O.unit_vector)
                    if not vec_eq(lhs, {a: Fraction(1)}):
                        record("4", (n,), ("f o_i I", a, i), lhs,
                               {a: Fraction(1)})

    return AxiomReport(max_arity, checked, violations)


# ---------------------------------------------------------------------------
# Free algebra dimensions


def free_algebra_dims(O: GradedOperad, d: int, max_arity: int) -> list[int]:
    """dim (O(n) (x) V^n)_{S_n} for dim V = d, n = 1..max_arity.

    The coinvariants have the same dimension as the image of the
    symmetrization projector (1/n!) sum_sigma sigma; since the projector
    is idempotent its rank equals its trace, which is evaluated exactly
    per conjugacy class: tr(sigma on O(n)) . d^{cycles(sigma)}.
    """
    if d < 0:
        raise OperadError("generator dimension must be nonnegative")
    out = []
    for n in range(1, max_arity + 1):
        total = Fraction(0)
        for lam in cycle_types(n):
            rep = class_representative(lam)
            chi = O.action_trace(n, rep)
            total += class_size(lam) * chi * Fraction(d) ** len(lam)
        total /= factorial(n)
        if total.denominator != 1 or total < 0:
            raise OperadError(
                f"projector trace is not a nonnegative integer at arity {n}: "
                f"{total}")
        out.append(int(total))
    return out


def symmetrization_projector_rank(O: GradedOperad, d: int, n: int) -> int:
    """Explicit projector rank on O(n) (x) V^n (tiny cases only).

    Independent of the trace shortcut in free_algebra_dims; used to
    cross-check it.
    """
    dim_o = O.dim(n)
    dim = dim_o * d ** n
    if dim > 600:
        raise OperadError("explicit projector only at desk scale")
    from .qlinalg import rank

    acc: dict[tuple[int, int], Fraction] = {}
    tuples = list(itertools.product(range(d), repeat=n))
    tindex = {t: k for k, t in enumerate(tuples)}
    for sigma in itertools.permutations(range(1, n + 1)):
        mats = {a: O.act_basis(n, sigma, a) for a in range(dim_o)}
        for a in range(dim_o):
            for t in tuples:
                col = a * len(tuples) + tindex[t]
                # diagonal action: sigma on O(n) tensor permutation on V^n
                tt = [0] * n
                for k in range(1, n + 1):
                    tt[sigma[k - 1] - 1] = t[k - 1]
                trow = tindex[tuple(tt)]
                for out, c in mats[a].items():
                    row = out * len(tuples) + trow
                    key = (row, col)
                    acc[key] = acc.get(key, Fraction(0)) + c
    acc = {k: v / factorial(n) for k, v in acc.items() if v}
    return rank(SparseMatrix.from_dict(dim, dim, acc))
