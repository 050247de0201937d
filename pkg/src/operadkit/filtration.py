"""Filtered operads, spectral-sequence pages, and the induced homotopy
structure pipeline.

A filtration is a basis-spanned flag per arity: each basis element
carries an integer level, F_p is spanned by levels <= p, the
differential preserves each F_p and compositions add levels.  The r-th
page at bigrade (p, q) is

  E^r_{p,q} = Z^r_{p,q} / (dZ^{r-1}_{p+r-1, q-r+2} + Z^{r-1}_{p-1, q+1}),
  Z^r_{p,q} = {x in F_p, deg p+q : dx in F_{p-r}},

computed by exact linear algebra on the flags.  The slices with
(r-1)p + rq = k(n-1) close under composition and form suboperads.

The pipeline at the end feeds a filtered algebra over the decorated-tree
operad of the Lie cooperad through the q = 0 slice of the first page,
reads off the n-ary operations from identity-word corollas, and verifies
the homotopy-commutative relations on the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .qlinalg import (SparseMatrix, ChainComplex, nullspace, span_rank,
                      solve_in_span)
from .operads import GradedOperad, GradedSpace, Vector, identity_perm
from .hoalg import MapFamily, check_ainf, check_cinf, extract_mn, CinfReport


class FiltrationError(ValueError):
    pass


class FilteredOperad:
    """A graded operad of complexes with a basis-spanned filtration."""

    def __init__(self, base: GradedOperad, levels: dict[int, tuple[int, ...]]):
        for n in base.arities():
            if n not in levels or len(levels[n]) != base.dim(n):
                raise FiltrationError(f"levels missing or wrong size at arity {n}")
        self.base = base
        self.levels = {n: tuple(lv) for n, lv in levels.items()}

    def arities(self):
        return self.base.arities()

    def level(self, n: int, a: int) -> int:
        return self.levels[n][a]

    def level_range(self, n: int) -> tuple[int, int]:
        lv = self.levels[n]
        return min(lv), max(lv)

    def flag_basis(self, n: int, p: int, degree: int | None = None) -> list[int]:
        """Basis indices in F_p, optionally of one total degree."""
        sp = self.base.space(n)
        return [a for a in range(sp.dim)
                if self.levels[n][a] <= p
                and (degree is None or sp.degrees[a] == degree)]

    def validate(self, max_arity: int | None = None) -> None:
        """Differential, composition and action compatibility with the
        flags, checked exhaustively on basis elements."""
        arities = [n for n in self.arities()
                   if max_arity is None or n <= max_arity]
        for n in arities:
            d = self.base.differentials.get(n)
            if d is not None:
                for r, c, v in d.entries():
                    if v and self.levels[n][r] > self.levels[n][c]:
                        raise FiltrationError(
                            f"differential raises filtration at arity {n}: "
                            f"{c} -> {r}")
        for n in arities:
            for m in arities:
                if n + m - 1 not in self.levels:
                    continue
                if max_arity is not None and n + m - 1 > max_arity:
                    continue
                for i in range(1, n + 1):
                    for a in range(self.base.dim(n)):
                        for b in range(self.base.dim(m)):
                            out = self.base.compose_basis(n, i, m, a, b)
                            bound = self.levels[n][a] + self.levels[m][b]
                            for o, v in out.items():
                                if v and self.levels[n + m - 1][o] > bound:
                                    raise FiltrationError(
                                        "composition raises filtration at "
                                        f"arities ({n},{m}) slot {i}")
        for n in arities:
            for t in range(1, n):
                sigma = list(identity_perm(n))
                sigma[t - 1], sigma[t] = sigma[t], sigma[t - 1]
                for a in range(self.base.dim(n)):
                    for o, v in self.base.act_basis(n, tuple(sigma), a).items():
                        if v and self.levels[n][o] != self.levels[n][a]:
                            raise FiltrationError(
                                f"action changes filtration at arity {n}")


def trivial_filtration(base: GradedOperad, level: int = 0) -> FilteredOperad:
    """Single-jump filtration: everything at one level."""
    return FilteredOperad(
        base, {n: (level,) * base.dim(n) for n in base.arities()})


def degree_filtration(base: GradedOperad) -> FilteredOperad:
    """Filtration by the complex degree itself."""
    return FilteredOperad(
        base, {n: tuple(base.space(n).degrees) for n in base.arities()})


# ---------------------------------------------------------------------------
# Spectral-sequence pages


@dataclass
class ErPiece:
    """One bigraded slot: numerator and denominator spans (sparse
    column vectors over the ambient component basis)."""

    p: int
    q: int
    z_basis: list
    b_basis: list

    @property
    def dim(self) -> int:
        return len(self.z_basis) - span_rank(self.b_basis)


@dataclass
class ErTerm:
    r: int
    filtered: FilteredOperad
    pieces: dict = field(default_factory=dict)  # n -> {(p, q): ErPiece}

    def dims(self, n: int) -> dict[tuple[int, int], int]:
        return {pq: piece.dim for pq, piece in self.pieces.get(n, {}).items()
                if piece.dim}

    def total_dim(self, n: int) -> int:
        return sum(self.dims(n).values())


def _z_space(F: FilteredOperad, n: int, r: int, p: int, q: int) -> list:
    """Basis of Z^r_{p,q}(n) as sparse coordinate vectors."""
    degree = p + q
    cols = F.flag_basis(n, p, degree)
    if not cols:
        return []
    d = F.base.differentials.get(n)
    if d is None:
        return [{a: Fraction(1)} for a in cols]
    forbidden = {a for a in range(F.base.dim(n))
                 if F.levels[n][a] > p - r}
    rows = []
    dcols: dict[int, dict[int, Fraction]] = {}
    for rr, cc, v in d.entries():
        dcols.setdefault(cc, {})[rr] = v
    entries = []
    forbidden_index = {a: k for k, a in enumerate(sorted(forbidden))}
    for j, a in enumerate(cols):
        for rr, v in dcols.get(a, {}).items():
            if rr in forbidden_index:
                entries.append((forbidden_index[rr], j, v))
    m = SparseMatrix(len(forbidden_index), len(cols), entries)
    out = []
    for vec in nullspace(m):
        out.append({cols[j]: v for j, v in vec.items()})
    return out


def _apply_differential(F: FilteredOperad, n: int, vec: dict) -> dict:
    d = F.base.differentials.get(n)
    out: dict[int, Fraction] = {}
    if d is None:
        return out
    dcols: dict[int, dict[int, Fraction]] = {}
    for rr, cc, v in d.entries():
        dcols.setdefault(cc, {})[rr] = v
    for a, c in vec.items():
        for rr, v in dcols.get(a, {}).items():
            s = out.get(rr, Fraction(0)) + c * v
            if s:
                out[rr] = s
            elif rr in out:
                del out[rr]
    return out


def er_term(F: FilteredOperad, r: int) -> ErTerm:
    """The r-th page with numerator/denominator spans per bigrade."""
    if r < 0:
        raise FiltrationError("page index must be >= 0")
    term = ErTerm(r, F)
    for n in F.arities():
        sp = F.base.space(n)
        if sp.dim == 0:
            term.pieces[n] = {}
            continue
        lo, hi = F.level_range(n)
        degrees = sorted(set(sp.degrees))
        pieces = {}
        for p in range(lo, hi + 1):
            for degree in degrees:
                q = degree - p
                z = _z_space(F, n, r, p, q)
                if not z:
                    continue
                b = []
                if r >= 1:
                    for vec in _z_space(F, n, r - 1, p + r - 1, q - r + 2):
                        dv = _apply_differential(F, n, vec)
                        if dv:
                            b.append(dv)
                    b.extend(_z_space(F, n, r - 1, p - 1, q + 1))
                piece = ErPiece(p, q, z, b)
                if piece.dim:
                    pieces[(p, q)] = piece
        term.pieces[n] = pieces
    return term


def er_closure_certificate(term: ErTerm, max_arity: int) -> tuple[bool, list]:
    """Verify the numerators compose into numerators and denominators
    absorb into denominators, the exactness content of the page being an
    operad.  Returns (ok, witnesses)."""
    F = term.filtered
    witnesses = []
    arities = [n for n in F.arities() if n <= max_arity]
    for n in arities:
        for m in arities:
            if n + m - 1 > max_arity or n + m - 1 not in term.pieces:
                continue
            for (p, q), piece in term.pieces[n].items():
                for (pp, qq), piece2 in term.pieces[m].items():
                    tgt = term.pieces[n + m - 1].get((p + pp, q + qq))
                    tgt_z = tgt.z_basis if tgt else []
                    tgt_b = tgt.b_basis if tgt else []
                    for i in range(1, n + 1):
                        for x in piece.z_basis:
                            for y in piece2.z_basis:
                                out = F.base.compose(n, i, m, x, y)
                                if out and solve_in_span(
                                        tgt_z + tgt_b, out) is None:
                                    witnesses.append(
                                        ("numerator", n, m, i, (p, q), (pp, qq)))
                        for x in piece.b_basis:
                            for y in piece2.z_basis + piece2.b_basis:
                                out = F.base.compose(n, i, m, x, y)
                                if out and solve_in_span(tgt_b, out) is None:
                                    witnesses.append(
                                        ("denominator", n, m, i, (p, q), (pp, qq)))
    return (not witnesses, witnesses)


def dk_index_identity(r: int, k: int, p: int, q: int, pp: int, qq: int,
                      n: int, m: int) -> bool:
    """(r-1)p + rq = k(n-1) is additive under composition."""
    lhs = (r - 1) * (p + pp) + r * (q + qq)
    return lhs == k * ((n + m - 1) - 1)


@dataclass
class DkSlices:
    r: int
    k: int
    slices: dict  # n -> {(p, q): dim}
    certificate: bool


def suboperad_dk(term: ErTerm, k: int) -> DkSlices:
    """The bigraded slices with (r-1)p + rq = k(arity - 1), with the
    closure certificate that composition preserves the condition."""
    r = term.r
    slices = {}
    for n, pieces in term.pieces.items():
        sel = {(p, q): piece.dim for (p, q), piece in pieces.items()
               if (r - 1) * p + r * q == k * (n - 1) and piece.dim}
        slices[n] = sel
    cert = True
    for n, sel in slices.items():
        for m, sel2 in slices.items():
            for (p, q) in sel:
                for (pp, qq) in sel2:
                    if not dk_index_identity(r, k, p, q, pp, qq, n, m):
                        cert = False
    return DkSlices(r, k, slices, cert)


def filtered_operad_to_json(F: FilteredOperad, max_arity: int) -> str:
    """Operad JSON document extended with a filtration_level table."""
    import json
    from .operads import operad_to_json
    doc = json.loads(operad_to_json(F.base, max_arity))
    doc["filtration_level"] = {str(n): list(F.levels[n])
                               for n in F.arities() if n <= max_arity}
    return json.dumps(doc, indent=1)


def filtered_operad_from_json(text: str) -> FilteredOperad:
    import json
    from .operads import operad_from_json
    doc = json.loads(text)
    base = operad_from_json(text)
    raw = doc.get("filtration_level")
    if raw is None:
        raise FiltrationError("document lacks a filtration_level table")
    levels = {int(n): tuple(lv) for n, lv in raw.items()}
    return FilteredOperad(base, levels)


def component_homology(O: GradedOperad, n: int) -> dict[int, int]:
    """Betti numbers of one operad component split by degree."""
    sp = O.space(n)
    d = O.differentials.get(n)
    degrees = sorted(set(sp.degrees))
    lo, hi = degrees[0], degrees[-1]
    by_deg = {g: [a for a in range(sp.dim) if sp.degrees[a] == g]
              for g in range(lo, hi + 1)}
    spaces = [len(by_deg[g]) for g in range(lo, hi + 1)]
    boundaries = []
    for g in range(lo, hi):
        rows = {a: k for k, a in enumerate(by_deg[g])}
        cols = {a: k for k, a in enumerate(by_deg[g + 1])}
        entries = []
        if d is not None:
            for r, c, v in d.entries():
                if c in cols and r in rows:
                    entries.append((rows[r], cols[c], v))
        boundaries.append(SparseMatrix(len(rows), len(cols), entries))
    betti = ChainComplex(spaces, boundaries).homology()
    return {lo + k: b for k, b in enumerate(betti) if b}


# ---------------------------------------------------------------------------
# Filtered algebras and the induced homotopy structure


class FilteredAlgebraData:
    """A morphism candidate from a filtered operad into End_V.

    ``mu`` maps (arity, basis index) to a multilinear tensor
    {(out, in_tuple): coeff} on the basis of V; missing keys are zero.
    V is filtered by its complex degree.
    """

    def __init__(self, space: GradedSpace, q: SparseMatrix, mu: dict):
        self.space = space
        self.q = q
        self.mu = {key: {t: Fraction(c) for t, c in tensor.items() if c}
                   for key, tensor in mu.items()}

    def tensor(self, n: int, a: int) -> dict:
        return self.mu.get((n, a), {})


def _end_compose(f: dict, n: int, i: int, g: dict, m: int,
                 degrees: tuple[int, ...]) -> dict:
    """Partial composition of multilinear tensors with the sliding sign."""
    out: dict = {}
    gdeg = None
    for (j, ins), c in g.items():
        d = degrees[j] - sum(degrees[x] for x in ins)
        gdeg = d if gdeg is None else gdeg
    for (j, ins), cf in f.items():
        for (kk, bins), cg in g.items():
            if ins[i - 1] != kk:
                continue
            slide = sum(degrees[t] for t in ins[: i - 1])
            sign = -1 if (gdeg is not None and gdeg % 2 and slide % 2) else 1
            key = (j, ins[: i - 1] + bins + ins[i:])
            s = out.get(key, Fraction(0)) + sign * cf * cg
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


@dataclass
class FilteredAlgebraReport:
    filtration_ok: bool
    morphism_ok: bool
    witnesses: list

    @property
    def ok(self) -> bool:
        return self.filtration_ok and self.morphism_ok


def check_filtered_algebra(F: FilteredOperad, A: FilteredAlgebraData,
                           max_arity: int | None = None) -> FilteredAlgebraReport:
    """Filtration predicate plus composition/unit morphism check.

    The filtration predicate is the vanishing hypothesis: mu must kill
    every basis element whose complex degree exceeds its level (V being
    filtered by degree).  Morphism failures are reported separately.
    """
    witnesses = []
    filtration_ok = True
    arities = [n for n in F.arities()
               if max_arity is None or n <= max_arity]
    for n in arities:
        sp = F.base.space(n)
        for a in range(sp.dim):
            if sp.degrees[a] > F.levels[n][a] and A.tensor(n, a):
                filtration_ok = False
                witnesses.append(("filtration", n, a, sp.degrees[a],
                                  F.levels[n][a]))
    morphism_ok = True
    degrees = A.space.degrees
    for n in arities:
        for m in arities:
            if n + m - 1 not in F.levels:
                continue
            if max_arity is not None and n + m - 1 > max_arity:
                continue
            for i in range(1, n + 1):
                for a in range(F.base.dim(n)):
                    fa = A.tensor(n, a)
                    for b in range(F.base.dim(m)):
                        lhs: dict = {}
                        for o, c in F.base.compose_basis(n, i, m, a, b).items():
                            for t, v in A.tensor(n + m - 1, o).items():
                                s = lhs.get(t, Fraction(0)) + c * v
                                if s:
                                    lhs[t] = s
                                elif t in lhs:
                                    del lhs[t]
                        rhs = _end_compose(fa, n, i, A.tensor(m, b), m, degrees)
                        if lhs != rhs:
                            morphism_ok = False
                            witnesses.append(("morphism", n, i, m, a, b))
    if 1 in F.levels:
        ident = {(j, (j,)): Fraction(1) for j in range(A.space.dim)}
        img: dict = {}
        for a, c in F.base.unit_vector.items():
            for t, v in A.tensor(1, a).items():
                img[t] = img.get(t, Fraction(0)) + c * v
        if {t: v for t, v in img.items() if v} != ident:
            morphism_ok = False
            witnesses.append(("unit",))
    return FilteredAlgebraReport(filtration_ok, morphism_ok, witnesses)


# ---------------------------------------------------------------------------
# Moduli stand-in and the end-to-end pipeline


def moduli_chain_standin(max_arity: int) -> FilteredOperad:
    """Decorated-tree stand-in for the stratified chain operad.

    The component of arity n is the cobar construction on the Lie
    cooperad; a basis tree with e internal edges models a stratum of
    dimension n - 2 - e, which is both its complex degree and its
    filtration level.  Its q = 0 first-page slice is the middle row.
    """
    from .cobar import liec_cooperad, cobar_operad
    base = cobar_operad(liec_cooperad(max_arity), max_arity)
    return degree_filtration(base)


def commutative_toy_algebra(F: FilteredOperad,
                            space: GradedSpace, q: SparseMatrix,
                            m2: dict) -> FilteredAlgebraData:
    """mu for the stand-in: binary trees act by iterated products of a
    commutative associative m2 killed by no filtration constraint; all
    other decorated trees act by zero."""
    from .cobar import CobarOperad
    base = F.base
    if not isinstance(base, CobarOperad):
        raise FiltrationError("toy algebra expects the decorated-tree base")
    mu: dict = {}
    if 1 in base.components:
        mu[(1, 0)] = {(j, (j,)): Fraction(1) for j in range(space.dim)}
    for n in base.arities():
        if n == 1:
            continue
        for a in range(base.dim(n)):
            t, decor = base.basis_element(n, a)
            from .cobar import _internal_vertices
            verts = _internal_vertices(t)
            if any(m != 2 for _, _, m in verts):
                continue
            mu[(n, a)] = _binary_tree_tensor(t.shape, m2, space)
    return FilteredAlgebraData(space, q, mu)


def _binary_tree_tensor(shape, m2: dict, space: GradedSpace) -> dict:
    """Iterated product along a binary tree, as a multilinear tensor."""
    if isinstance(shape, int):
        return {"leaf": shape}
    left = _binary_tree_tensor(shape[0], m2, space)
    right = _binary_tree_tensor(shape[1], m2, space)

    def as_maps(sub):
        if "leaf" in sub:
            return sub["leaf"], None
        return None, sub

    lleaf, lmap = as_maps(left)
    rleaf, rmap = as_maps(right)
    dim = space.dim
    out: dict = {}
    if lmap is None and rmap is None:
        for (j, ins), c in m2.items():
            # slots ordered by leaf label
            pair = {lleaf: ins[0], rleaf: ins[1]}
            key = (j, tuple(pair[x] for x in sorted(pair)))
            out[key] = out.get(key, Fraction(0)) + c
        return {k: v for k, v in out.items() if v}
    # general case: evaluate by brute force over basis tuples
    leaves = sorted(_shape_leaves(shape))
    for ins in itertools.product(range(dim), repeat=len(leaves)):
        assign = dict(zip(leaves, ins))
        vec = _eval_binary(shape, assign, m2)
        for j, c in vec.items():
            key = (j, ins)
            out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def _shape_leaves(shape):
    if isinstance(shape, int):
        return [shape]
    out = []
    for c in shape:
        out.extend(_shape_leaves(c))
    return out


def _eval_binary(shape, assign, m2) -> dict:
    if isinstance(shape, int):
        return {assign[shape]: Fraction(1)}
    # children are stored in min-leaf order; product in that order
    lvec = _eval_binary(shape[0], assign, m2)
    rvec = _eval_binary(shape[1], assign, m2)
    out: dict = {}
    for x, cx in lvec.items():
        for y, cy in rvec.items():
            for (j, ins), c in m2.items():
                if ins == (x, y):
                    s = out.get(j, Fraction(0)) + cx * cy * c
                    if s:
                        out[j] = s
                    elif j in out:
                        del out[j]
    return out


@dataclass
class PipelineResult:
    family: MapFamily
    ainf_residuals: list
    cinf_report: CinfReport

    @property
    def ok(self) -> bool:
        return not self.ainf_residuals and self.cinf_report.ok


def induce_cinf(F: FilteredOperad, A: FilteredAlgebraData,
                max_arity: int) -> PipelineResult:
    """Restrict the induced first-page algebra to the q = 0 slice, read
    off m_n from identity-word corollas, and verify the relations."""
    from .cobar import CobarOperad, _internal_vertices
    base = F.base
    if not isinstance(base, CobarOperad):
        raise FiltrationError(
            "the pipeline needs the decorated-tree stand-in (middle-row "
            "identification unavailable otherwise)")
    report = check_filtered_algebra(F, A, max_arity=min(max_arity, 3))
    if not report.filtration_ok:
        raise FiltrationError(
            f"mu violates the filtration: {report.witnesses[:3]}")
    structure: dict = {}
    for n in range(2, max_arity + 1):
        words = base.cooperad.space(n).names
        per_word = {}
        for a in range(base.dim(n)):
            t, decor = base.basis_element(n, a)
            if t.internal_edges == 0:
                word = tuple(int(ch) for ch in words[decor[0]])
                per_word[word] = A.tensor(n, a)
        structure[n] = per_word
    maps = {}
    for n in range(2, max_arity + 1):
        tensor = extract_mn(structure, n)
        if tensor:
            maps[n] = tensor
    family = MapFamily(A.space, A.q, maps)
    residuals = check_ainf(family, max_arity)
    cinf = check_cinf(family, max_arity)
    return PipelineResult(family, residuals, cinf)
