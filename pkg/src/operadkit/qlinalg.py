"""Exact rational sparse linear algebra and chain-complex homology.

Everything here works over the rationals (``fractions.Fraction``); no
floating point anywhere.  Matrices are immutable after construction, so
they are safe to share between threads; rank and homology are pure
functions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping


class ComplexError(ValueError):
    """Raised when a chain complex fails d.d = 0."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class SparseMatrix:
    """An immutable sparse matrix over the rationals.

    Entries are stored as a dict ``(row, col) -> Fraction`` with zeros
    dropped.  Duplicate (row, col) keys in the input are rejected.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int,
                 entries: Iterable[tuple[int, int, object]] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        data: dict[tuple[int, int], Fraction] = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) out of range {rows}x{cols}")
            if (r, c) in data:
                raise ValueError(f"duplicate entry at ({r},{c})")
            v = _as_fraction(v)
            if v != 0:
                data[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self._data = data

    @classmethod
    def from_rows(cls, rowdata: Iterable[Iterable[object]],
                  cols: int | None = None) -> "SparseMatrix":
        rowlist = [list(row) for row in rowdata]
        if cols is None:
            cols = len(rowlist[0]) if rowlist else 0
        entries = []
        for r, row in enumerate(rowlist):
            if len(row) != cols:
                raise ValueError("ragged row data")
            for c, v in enumerate(row):
                entries.append((r, c, v))
        return cls(len(rowlist), cols, entries)

    @classmethod
    def from_dict(cls, rows: int, cols: int,
                  data: Mapping[tuple[int, int], object]) -> "SparseMatrix":
        return cls(rows, cols, [(r, c, v) for (r, c), v in data.items()])

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, [(i, i, 1) for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    def entries(self):
        """Iterate (row, col, value) over nonzero entries, sorted."""
        for (r, c) in sorted(self._data):
            yield r, c, self._data[(r, c)]

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self._data.get(key, Fraction(0))

    def nnz(self) -> int:
        return len(self._data)

    def is_zero(self) -> bool:
        return not self._data

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            [(c, r, v) for (r, c), v in self._data.items()])

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            out[r][c] = v
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        other_rows = other.row_dicts()
        acc: dict[tuple[int, int], Fraction] = {}
        for (r, k), v in self._data.items():
            for c, w in other_rows[k].items():
                key = (r, c)
                s = acc.get(key, Fraction(0)) + v * w
                if s:
                    acc[key] = s
                elif key in acc:
                    del acc[key]
        return SparseMatrix.from_dict(self.rows, other.cols, acc)

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times sparse column vector (dict col -> value)."""
        out: dict[int, Fraction] = {}
        by_col: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in self._data.items():
            by_col.setdefault(c, []).append((r, v))
        for c, x in vec.items():
            if x == 0:
                continue
            for r, v in by_col.get(c, ()):
                s = out.get(r, Fraction(0)) + v * x
                if s:
                    out[r] = s
                elif r in out:
                    del out[r]
        return out

    def scale_row_swap_variant(self, scalings: Mapping[int, Fraction],
                               swaps: Iterable[tuple[int, int]]) -> "SparseMatrix":
        """Return a copy with rows rescaled and then swapped (test helper)."""
        perm = list(range(self.rows))
        for a, b in swaps:
            perm[a], perm[b] = perm[b], perm[a]
        entries = []
        for (r, c), v in self._data.items():
            s = scalings.get(r, Fraction(1))
            if s == 0:
                raise ValueError("row scaling must be nonzero")
            entries.append((perm[r], c, v * s))
        return SparseMatrix(self.rows, self.cols, entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseMatrix)
                and self.rows == other.rows and self.cols == other.cols
                and self._data == other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._data.items())))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _int_rows(m: SparseMatrix) -> list[dict[int, int]]:
    """Rows cleared to integers (rank is invariant under row scaling)."""
    rows: list[dict[int, int]] = [dict() for _ in range(m.rows)]
    for (r, c), v in m._data.items():
        rows[r][c] = v
    out = []
    for row in rows:
        if not row:
            continue
        denom = 1
        for v in row.values():
            denom = denom * v.denominator // gcd(denom, v.denominator)
        irow = {c: int(v * denom) for c, v in row.items()}
        g = 0
        for v in irow.values():
            g = gcd(g, v)
        if g > 1:
            irow = {c: v // g for c, v in irow.items()}
        out.append(irow)
    return out


def rank(m: SparseMatrix) -> int:
    """Exact rank over the rationals.

    Gaussian elimination on integer-normalized sparse rows; the pivot
    row is chosen by sparsity to limit fill-in.  Deterministic.
    """
    rows = _int_rows(m)
    rk = 0
    while rows:
        # sparsest row first, ties broken by lowest column index
        rows.sort(key=lambda row: (len(row), min(row)))
        pivot_row = rows.pop(0)
        pc = min(pivot_row)
        pv = pivot_row[pc]
        rk += 1
        new_rows = []
        for row in rows:
            a = row.get(pc)
            if a is None:
                new_rows.append(row)
                continue
            new = {}
            for c in row.keys() | pivot_row.keys():
                w = row.get(c, 0) * pv - pivot_row.get(c, 0) * a
                if w:
                    new[c] = w
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                if g > 1:
                    new = {c: v // g for c, v in new.items()}
                new_rows.append(new)
        rows = new_rows
    return rk


def kernel_dim(m: SparseMatrix) -> int:
    """Dimension of the kernel: cols - rank."""
    return m.cols - rank(m)


def rref(m: SparseMatrix) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form over Fraction.

    Returns (rows, pivot_cols); rows are sparse dicts with leading 1 in
    the pivot column.  Used where explicit bases are needed.
    """
    rows = [row for row in m.row_dicts() if row]
    reduced: list[dict[int, Fraction]] = []
    pivots: list[int] = []
    for row in rows:
        row = dict(row)
        for prow, pc in zip(reduced, pivots):
            a = row.get(pc)
            if a:
                for c, v in prow.items():
                    w = row.get(c, Fraction(0)) - a * v
                    if w:
                        row[c] = w
                    elif c in row:
                        del row[c]
        if not row:
            continue
        pc = min(row)
        pv = row[pc]
        row = {c: v / pv for c, v in row.items()}
        # back-substitute into existing rows
        for i, prow in enumerate(reduced):
            a = prow.get(pc)
            if a:
                new = dict(prow)
                for c, v in row.items():
                    w = new.get(c, Fraction(0)) - a * v
                    if w:
                        new[c] = w
                    elif c in new:
                        del new[c]
                reduced[i] = new
        reduced.append(row)
        pivots.append(pc)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [reduced[i] for i in order], [pivots[i] for i in order]


def nullspace(m: SparseMatrix) -> list[dict[int, Fraction]]:
    """A basis of the right kernel, one sparse dict per basis vector."""
    rows, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for row, pc in zip(rows, pivots):
            a = row.get(f)
            if a:
                vec[pc] = -a
        basis.append(vec)
    return basis


def solve_in_span(span: list[dict[int, Fraction]],
                  target: dict[int, Fraction]) -> list[Fraction] | None:
    """Express ``target`` as a combination of ``span`` vectors.

    Returns coefficients or None when target is outside the span.
    Vectors are sparse dicts index -> Fraction.
    """
    n = len(span)
    if n == 0:
        return [] if not any(target.values()) else None
    idx = sorted({i for v in span for i in v} | set(target))
    pos = {i: k for k, i in enumerate(idx)}
    rows = []
    for v in span:
        rows.append({pos[i]: x for i, x in v.items() if x})
    aug_col = len(idx)
    # solve A^T c = t by eliminating on the augmented transpose
    mat: dict[tuple[int, int], Fraction] = {}
    for j, row in enumerate(rows):
        for i, x in row.items():
            mat[(i, j)] = x
    for i, x in target.items():
        if x:
            mat[(pos[i], n)] = _as_fraction(x)
    sm = SparseMatrix.from_dict(len(idx), n + 1, mat)
    rrows, pivots = rref(sm)
    if n in pivots:
        return None
    coeffs = [Fraction(0)] * n
    for row, pc in zip(rrows, pivots):
        coeffs[pc] = row.get(n, Fraction(0))
    # verify (cheap at desk scale, guards against bad input)
    check: dict[int, Fraction] = {}
    for c, v in zip(coeffs, span):
        if c:
            for i, x in v.items():
                s = check.get(i, Fraction(0)) + c * x
                if s:
                    check[i] = s
                elif i in check:
                    del check[i]
    tgt = {i: _as_fraction(x) for i, x in target.items() if x}
    if check != tgt:
        return None
    return coeffs


def span_rank(vectors: list[dict[int, Fraction]]) -> int:
    """Rank of the span of sparse vectors."""
    if not vectors:
        return 0
    idx = sorted({i for v in vectors for i in v})
    pos = {i: k for k, i in enumerate(idx)}
    entries = []
    for r, v in enumerate(vectors):
        for i, x in v.items():
            entries.append((r, pos[i], x))
    return rank(SparseMatrix(len(vectors), len(idx), entries))


class ChainComplex:
    """A finite chain complex of rational vector spaces.

    ``spaces[i]`` is the dimension in degree i and ``boundaries[i]``
    maps degree i+1 to degree i (differentials lower degree by one).
    The composite of consecutive boundaries must vanish.
    """

    def __init__(self, spaces: list[int], boundaries: list[SparseMatrix]):
        if len(boundaries) != max(len(spaces) - 1, 0):
            raise ValueError("need one boundary per adjacent degree pair")
        for i, b in enumerate(boundaries):
            if b.rows != spaces[i] or b.cols != spaces[i + 1]:
                raise ValueError(
                    f"boundary {i} has shape {b.rows}x{b.cols}, "
                    f"expected {spaces[i]}x{spaces[i + 1]}")
        for i in range(len(boundaries) - 1):
            prod = boundaries[i].matmul(boundaries[i + 1])
            if not prod.is_zero():
                r, c, v = next(prod.entries())
                raise ComplexError(
                    f"d.d != 0 at degree {i + 2}: entry ({r},{c}) = {v}")
        self.spaces = list(spaces)
        self.boundaries = list(boundaries)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * d for i, d in enumerate(self.spaces))

    def homology(self) -> list[int]:
        """Betti number per degree; zero maps off both ends."""
        n = len(self.spaces)
        ranks = [rank(b) for b in self.boundaries]
        betti = []
        for i in range(n):
            out_rank = ranks[i - 1] if i > 0 else 0       # d_i : C_i -> C_{i-1}
            in_rank = ranks[i] if i < n - 1 else 0        # d_{i+1}: C_{i+1} -> C_i
            betti.append(self.spaces[i] - out_rank - in_rank)
        return betti


def homology(c: ChainComplex) -> list[int]:
    """Betti numbers of a chain complex (one per degree)."""
    return c.homology()
