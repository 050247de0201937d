"""Stratification spectral-sequence tables for moduli of stable curves.

The first-page table assigns to each (p, q) the dimension of the sum,
over stable graphs G of genus g with n legs and 3g - 3 + n - p internal
edges, of the Aut(G)-invariant part of the tensor product over vertices
of degree-k(v) cohomology of the open moduli space at that vertex, where
the k(v) sum to p - q.  Genus-0 graphs are trees and carry no
automorphisms; their open Betti numbers come from the product formula
prod_{k=2}^{n-2} (1 + k t).

The dual (logarithmic) first page uses compactified Betti numbers, edge
count -p and vertex degrees summing to 2p + q.  For genus 0 the
compactified numbers are predicted from the first table by alternating
row sums, which is the degeneration statement being exercised.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .treegraph import (Tree, enumerate_trees, enumerate_stable_graphs,
                        automorphism_group, StableGraph)


class StrataError(ValueError):
    pass


def open_betti(n: int) -> tuple[int, ...]:
    """Betti numbers of the open genus-0 moduli space with n punctures:
    coefficients of prod_{k=2}^{n-2} (1 + k t)."""
    if n < 3:
        raise StrataError("need at least 3 punctures")
    poly = [1]
    for k in range(2, n - 1):
        poly = [a + k * b for a, b in
                zip(poly + [0], [0] + poly)]
    return tuple(poly)


class BettiTable:
    """Open-moduli Betti numbers: genus 0 computed, others ingested.

    Ships with the single verified higher-genus entry (1, 1) -> (1).
    """

    SHIPPED = {(1, 1): (1,)}

    def __init__(self, entries: dict | None = None):
        self.entries = dict(self.SHIPPED)
        if entries:
            for (g, n), betti in entries.items():
                self._validate(g, n, tuple(betti))
                self.entries[(g, n)] = tuple(betti)

    @staticmethod
    def _validate(g, n, betti):
        if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
            raise StrataError(f"unstable pair (g, n) = ({g}, {n})")
        if any(b < 0 for b in betti):
            raise StrataError("negative Betti number")
        if g == 0:
            expected = open_betti(n)
            padded = betti + (0,) * max(0, len(expected) - len(betti))
            if padded[:len(expected)] != expected or any(padded[len(expected):]):
                raise StrataError(
                    f"genus-0 entry for n = {n} conflicts with the "
                    f"internal product formula {expected}")

    def get(self, g: int, n: int) -> tuple[int, ...]:
        if g == 0:
            return open_betti(n)
        try:
            return self.entries[(g, n)]
        except KeyError:
            raise StrataError(
                f"no Betti data for (g, n) = ({g}, {n}); ingest a table"
            ) from None

    def betti(self, g: int, n: int, k: int) -> int:
        row = self.get(g, n)
        return row[k] if 0 <= k < len(row) else 0

    @classmethod
    def from_csv(cls, text: str) -> "BettiTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].replace(" ", "") != "g,n,k,dim":
            raise StrataError("expected header 'g,n,k,dim'")
        rows: dict[tuple[int, int], dict[int, int]] = {}
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != 4:
                raise StrataError(f"malformed row: {ln!r}")
            try:
                g, n, k, dim = (int(x) for x in parts)
            except ValueError:
                raise StrataError(f"non-integer field in row: {ln!r}") from None
            if dim < 0 or k < 0:
                raise StrataError(f"negative value in row: {ln!r}")
            rows.setdefault((g, n), {})[k] = dim
        entries = {}
        for (g, n), by_k in rows.items():
            top = max(by_k)
            entries[(g, n)] = tuple(by_k.get(k, 0) for k in range(top + 1))
        return cls(entries)

    def to_csv(self) -> str:
        out = ["g,n,k,dim"]
        for (g, n) in sorted(self.entries):
            for k, dim in enumerate(self.entries[(g, n)]):
                if dim:
                    out.append(f"{g},{n},{k},{dim}")
        return "\n".join(out) + "\n"


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@dataclass
class E1Table:
    g: int
    n: int
    entries: dict = field(default_factory=dict)  # (p, q) -> dim
    ingested: bool = False

    def dim(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def euler(self) -> int:
        return sum((-1) ** (p + q) * d for (p, q), d in self.entries.items())

    def row(self, q: int) -> dict[int, int]:
        return {p: d for (p, qq), d in self.entries.items() if qq == q}

    def to_json(self) -> str:
        return json.dumps({
            "format": "operadkit-e1",
            "g": self.g, "n": self.n,
            "entries": [[p, q, d] for (p, q), d in sorted(self.entries.items())],
        }, indent=1)


@dataclass
class DualE1Table:
    g: int
    n: int
    entries: dict = field(default_factory=dict)

    def dim(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def to_json(self) -> str:
        return json.dumps({
            "format": "operadkit-dual-e1",
            "g": self.g, "n": self.n,
            "entries": [[p, q, d] for (p, q), d in sorted(self.entries.items())],
        }, indent=1)


def _tree_vertex_punctures(t: Tree) -> tuple[int, ...]:
    """n(v) per internal vertex of the rooted tree viewed as a genus-0
    stable graph (the root carries one extra leg)."""
    return tuple(m + 1 for _, s in t.vertices()
                 if not isinstance(s, int)
                 for m in (len(s),))


def genus0_valence_census(n: int) -> dict[int, dict[tuple[int, ...], int]]:
    """For n punctures: count of trees per (edge count, sorted vertex
    puncture multiset).  Rooted trees on n - 1 leaves model the unrooted
    n-leg trees with the root as the n-th leg."""
    if n < 3:
        raise StrataError("need at least 3 punctures")
    census: dict[int, dict[tuple[int, ...], int]] = {}
    for e in range(n - 2):
        counts: dict[tuple[int, ...], int] = {}
        for t in enumerate_trees(n - 1, e):
            key = tuple(sorted(_tree_vertex_punctures(t)))
            counts[key] = counts.get(key, 0) + 1
        census[e] = counts
    return census


def e1_table(g: int, n: int, betti: BettiTable | None = None,
             aut_mode: str = "degree0") -> E1Table:
    """First-page dimension table of the stratification sequence.

    For genus 0 all graphs are leg-labeled trees with trivial
    automorphisms.  For g >= 1, graphs with automorphisms contribute
    their degree-0 classes only; any higher-degree class on such a graph
    is unsupported (aut_mode="degree0" raises) or counted without taking
    invariants (aut_mode="ignore", for Euler-characteristic checks).
    """
    if aut_mode not in ("degree0", "ignore"):
        raise StrataError(f"unknown aut_mode {aut_mode!r}")
    if betti is None:
        betti = BettiTable()
    table = E1Table(g, n, ingested=g > 0)
    top = 3 * g - 3 + n
    if g == 0:
        for e, counts in genus0_valence_census(n).items():
            p = top - e
            for punctures, count in counts.items():
                poly = [1]
                for nv in punctures:
                    poly = _poly_mul(poly, list(betti.get(0, nv)))
                for total_k, dim in enumerate(poly):
                    if dim:
                        q = p - total_k
                        key = (p, q)
                        table.entries[key] = table.entries.get(key, 0) \
                            + count * dim
        return table
    if 2 * g - 2 + n <= 0:
        raise StrataError("unstable (g, n)")
    for G in enumerate_stable_graphs(g, n, top):
        e = len(G.edges)
        p = top - e
        auts = len(automorphism_group(G))
        valences = [G.valence(v) for v in range(len(G.genera))]
        ranges = []
        for v in range(len(G.genera)):
            row = betti.get(G.genera[v], valences[v])
            ranges.append([(k, d) for k, d in enumerate(row) if d])
        for combo in itertools.product(*ranges):
            total_k = sum(k for k, _ in combo)
            dim = 1
            for _, d in combo:
                dim *= d
            q = p - total_k
            if auts > 1 and total_k > 0 and aut_mode == "degree0":
                raise StrataError(
                    "graph with nontrivial automorphisms carries classes "
                    f"above degree 0 at (g, n) = ({g}, {n}); the invariant "
                    "computation is unsupported")
            key = (p, q)
            table.entries[key] = table.entries.get(key, 0) + dim
    return table


def verify_vanishing(g: int, n: int, table: E1Table) -> bool:
    """Bounds -p <= q <= p <= 3g - 3 + n on every entry, plus the
    per-graph identity sum_v (n(v) - 3) = 2 ed(G) + n - 3 v(G) that
    forces q >= 0 in genus 0."""
    top = 3 * g - 3 + n
    for (p, q), d in table.entries.items():
        if d and not (-p <= q <= p <= top):
            return False
    if g == 0:
        for e in range(n - 2):
            for t in enumerate_trees(n - 1, e):
                punctures = _tree_vertex_punctures(t)
                v = len(punctures)
                lhs = sum(nv - 3 for nv in punctures)
                if lhs != 2 * e + n - 3 * v:
                    return False
                # top cohomological degree bound: p - q <= lhs = p
                if lhs != (top - e):
                    return False
    return True


def predict_compactified_betti(n: int,
                               betti: BettiTable | None = None) -> tuple[int, ...]:
    """Even Betti numbers of the genus-0 compactification by alternating
    row sums of the first page (diagonal degeneration)."""
    table = e1_table(0, n, betti)
    out = []
    for q in range(0, n - 2):
        h = (-1) ** q * sum((-1) ** p * d for (p, qq), d in
                            table.entries.items() if qq == q)
        if h < 0:
            raise StrataError(
                f"negative predicted Betti number h_{2 * q} = {h}")
        out.append(h)
    return tuple(out)


def keel_h2_rank(n: int) -> int:
    """Independent rank of H^2 of the genus-0 compactification from the
    intersection-ring presentation: 2^(n-1) - n(n-1)/2 - 1."""
    return 2 ** (n - 1) - n * (n - 1) // 2 - 1


@dataclass
class MiddleRowReport:
    arity: int
    e1_dims: dict  # p -> dim of E1_{p,0}
    cobar_dims: dict  # p -> dim at edge count arity-2-p
    equal: bool


def middle_row(arity: int) -> MiddleRowReport:
    """Compare the q = 0 row for arity + 1 punctures against the cobar
    complex of the Lie cooperad at the same arity."""
    if arity < 2:
        raise StrataError("arity must be >= 2")
    from .cobar import liec_cooperad, cobar_dims
    table = e1_table(0, arity + 1)
    e1_row = {p: d for (p, q), d in table.entries.items() if q == 0 and d}
    cdims = cobar_dims(liec_cooperad(arity), arity)
    cobar_by_p = {arity - 2 - e: d for e, d in cdims.items() if d}
    return MiddleRowReport(arity, e1_row, cobar_by_p, e1_row == cobar_by_p)


def dual_e1_table(g: int, n: int,
                  compact_betti: dict | None = None) -> DualE1Table:
    """First page of the dual (logarithmic) sequence.

    ``compact_betti`` maps (g, n) to the full Betti list of the
    compactified space; genus-0 inputs default to the predicted even
    Betti numbers (odd ones vanish).
    """
    if g != 0:
        raise StrataError(
            "dual tables require compactified Betti data; only genus 0 "
            "is supported internally")

    def cbetti(nv: int) -> list[int]:
        if compact_betti and (0, nv) in compact_betti:
            return list(compact_betti[(0, nv)])
        even = predict_compactified_betti(nv)
        out = []
        for h in even:
            out.extend([h, 0])
        return out[:-1] if out else [1]

    table = DualE1Table(g, n)
    for e in range(n - 2):
        p = -e
        for t in enumerate_trees(n - 1, e):
            punctures = _tree_vertex_punctures(t)
            poly = [1]
            for nv in punctures:
                poly = _poly_mul(poly, cbetti(nv))
            for total_k, dim in enumerate(poly):
                if dim:
                    q = total_k - 2 * p
                    key = (p, q)
                    table.entries[key] = table.entries.get(key, 0) + dim
    return table


def dual_euler_check(table: DualE1Table, n: int) -> bool:
    """Column Euler characteristics of the dual page against the open
    Betti numbers: sum_p (-1)^p dim at column q equals (-1)^(q/2) times
    the open Betti number in degree q/2 (odd columns vanish)."""
    ob = open_betti(n)
    qs = {q for (_, q) in table.entries} | {2 * k for k in range(len(ob))}
    for q in qs:
        chi = sum((-1) ** p * d for (p, qq), d in table.entries.items()
                  if qq == q)
        if q % 2:
            expected = 0
        else:
            k = q // 2
            expected = (-1) ** k * (ob[k] if k < len(ob) else 0)
        if chi != expected:
            return False
    return True


def strata_euler_characteristic(n: int) -> int:
    """Euler characteristic of the genus-0 compactification summed
    stratum by stratum: sum over trees of prod_v chi(open M at v)."""
    ob = {m: open_betti(m) for m in range(3, n + 1)}
    chi = {m: sum((-1) ** k * b for k, b in enumerate(row))
           for m, row in ob.items()}
    total = 0
    for e in range(n - 2):
        for t in enumerate_trees(n - 1, e):
            prod = 1
            for nv in _tree_vertex_punctures(t):
                prod *= chi[nv]
            total += prod
    return total


def table_to_text(entries: dict, row_label: str = "q",
                  col_label: str = "p") -> str:
    """Aligned text grid of a (p, q) -> dim table."""
    if not entries:
        return "(empty table)\n"
    ps = sorted({p for (p, _) in entries})
    qs = sorted({q for (_, q) in entries}, reverse=True)
    width = max(len(str(d)) for d in entries.values())
    width = max(width, *(len(str(p)) for p in ps), len(col_label)) + 1
    corner = row_label + "/" + col_label
    head = f"{corner:>{width + 2}}" + "".join(f"{p:>{width}}" for p in ps)
    lines = [head]
    for q in qs:
        cells = "".join(
            f"{entries.get((p, q), 0):>{width}}" for p in ps)
        lines.append(f"{q:>{width + 2}}" + cells)
    return "\n".join(lines) + "\n"
