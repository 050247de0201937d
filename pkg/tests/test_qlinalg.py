"""Tests for exact sparse linear algebra and chain-complex homology.

Ranks are cross-checked against an independent dense Gaussian
elimination over Fraction, written here from scratch so the two
implementations share no code.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from operadkit.qlinalg import (
    ChainComplex,
    ComplexError,
    SparseMatrix,
    homology,
    kernel_dim,
    nullspace,
    rank,
    rref,
    solve_in_span,
    span_rank,
)


def dense_rank(rows: list[list[Fraction]]) -> int:
    """Reference rank: plain dense elimination over Fraction."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rk = 0
    col = 0
    r = 0
    while r < len(rows) and col < ncols:
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        rk += 1
        r += 1
        col += 1
    return rk


def to_dense(m: SparseMatrix) -> list[list[Fraction]]:
    out = [[Fraction(0)] * m.cols for _ in range(m.rows)]
    for r, c, v in m.entries():
        out[r][c] = v
    return out


fraction_entries = st.builds(
    Fraction,
    st.integers(min_value=-9, max_value=9),
    st.integers(min_value=1, max_value=7),
)

small_matrix = st.integers(min_value=0, max_value=6).flatmap(
    lambda r: st.integers(min_value=0, max_value=6).flatmap(
        lambda c: st.lists(
            st.lists(fraction_entries, min_size=c, max_size=c),
            min_size=r, max_size=r,
        ).map(lambda rows: SparseMatrix.from_rows(rows, cols=c))
    )
)


class TestSparseMatrix:
    def test_construction_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [(2, 0, 1)])

    def test_construction_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [(0, 0, 1), (0, 0, 2)])

    def test_zeros_are_dropped(self):
        m = SparseMatrix(2, 2, [(0, 0, 0), (1, 1, 3)])
        assert m.nnz() == 1
        assert m[(0, 0)] == 0 and m[(1, 1)] == 3

    def test_identity_matmul(self):
        m = SparseMatrix.from_rows([[1, 2], [3, 4]])
        assert m.matmul(SparseMatrix.identity(2)) == m
        assert SparseMatrix.identity(2).matmul(m) == m

    def test_matmul_shape_mismatch(self):
        with pytest.raises(ValueError):
            SparseMatrix.identity(2).matmul(SparseMatrix.identity(3))

    def test_transpose_involution(self):
        m = SparseMatrix.from_rows([[1, 0, 2], [0, 5, 0]])
        assert m.transpose().transpose() == m

    def test_apply_matches_matmul(self):
        m = SparseMatrix.from_rows([[1, 2], [3, 4]])
        out = m.apply({0: Fraction(1), 1: Fraction(-1)})
        assert out == {0: Fraction(-1), 1: Fraction(-1)}


class TestRank:
    def test_zero_matrix(self):
        assert rank(SparseMatrix.zero(3, 4)) == 0
        assert kernel_dim(SparseMatrix.zero(3, 4)) == 4

    def test_identity(self):
        assert rank(SparseMatrix.identity(5)) == 5

    def test_fill_in_is_not_lost(self):
        # Elimination creates entries in columns absent from the
        # eliminated row; this matrix has rank 2 only if they survive.
        m = SparseMatrix.from_rows([
            [1, 1, 0],
            [1, 0, 1],
        ])
        assert rank(m) == 2

    def test_rational_entries(self):
        m = SparseMatrix.from_rows([
            [Fraction(1, 2), Fraction(1, 3)],
            [Fraction(3, 2), Fraction(1, 1)],
        ])
        assert rank(m) == dense_rank(to_dense(m)) == 1

    @settings(max_examples=150, deadline=None)
    @given(small_matrix)
    def test_matches_dense_reference(self, m):
        assert rank(m) == dense_rank(to_dense(m))

    @settings(max_examples=100, deadline=None)
    @given(small_matrix)
    def test_transpose_invariant(self, m):
        assert rank(m) == rank(m.transpose())

    @settings(max_examples=100, deadline=None)
    @given(small_matrix, st.data())
    def test_row_scaling_and_swap_invariant(self, m, data):
        if m.rows == 0:
            return
        scalings = {
            r: data.draw(st.sampled_from(
                [Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 3)]))
            for r in range(m.rows)
        }
        swaps = data.draw(st.lists(
            st.tuples(st.integers(0, m.rows - 1), st.integers(0, m.rows - 1)),
            max_size=4))
        assert rank(m.scale_row_swap_variant(scalings, swaps)) == rank(m)


class TestRrefAndNullspace:
    def test_rref_pivots_are_unit(self):
        m = SparseMatrix.from_rows([[2, 4], [1, 2], [0, 3]])
        rows, pivots = rref(m)
        assert pivots == [0, 1]
        for row, pc in zip(rows, pivots):
            assert row[pc] == 1

    def test_nullspace_vectors_are_killed(self):
        m = SparseMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
        basis = nullspace(m)
        assert len(basis) == m.cols - rank(m) == 1
        for vec in basis:
            assert not m.apply(vec)

    @settings(max_examples=100, deadline=None)
    @given(small_matrix)
    def test_nullspace_dimension_and_independence(self, m):
        basis = nullspace(m)
        assert len(basis) == kernel_dim(m)
        assert span_rank(basis) == len(basis)
        for vec in basis:
            assert not m.apply(vec)


class TestSolveInSpan:
    def test_inside(self):
        span = [{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1)}]
        coeffs = solve_in_span(span, {0: Fraction(2), 1: Fraction(5)})
        assert coeffs == [Fraction(2), Fraction(3)]

    def test_outside(self):
        span = [{0: Fraction(1)}]
        assert solve_in_span(span, {1: Fraction(1)}) is None

    def test_empty_span(self):
        assert solve_in_span([], {}) == []
        assert solve_in_span([], {0: Fraction(1)}) is None


class TestChainComplex:
    def triangle(self) -> ChainComplex:
        """Simplicial chains of a hollow triangle: 3 vertices, 3 edges."""
        d1 = SparseMatrix.from_rows([
            [-1, -1, 0],
            [1, 0, -1],
            [0, 1, 1],
        ])
        return ChainComplex([3, 3], [d1])

    def test_triangle_homology(self):
        c = self.triangle()
        assert homology(c) == [1, 1]
        assert c.euler_characteristic() == 0

    def test_two_simplex_homology(self):
        # Fill the triangle with one 2-cell: contractible.
        d1 = self.triangle().boundaries[0]
        d2 = SparseMatrix.from_rows([[1], [-1], [1]])
        c = ChainComplex([3, 3, 1], [d1, d2])
        assert c.homology() == [1, 0, 0]
        assert c.euler_characteristic() == 1

    def test_square_of_differential_is_checked(self):
        d1 = SparseMatrix.from_rows([[1, 0], [0, 1]])
        d2 = SparseMatrix.from_rows([[1], [0]])
        with pytest.raises(ComplexError) as exc:
            ChainComplex([2, 2, 1], [d1, d2])
        # the witness names a nonzero entry of d.d
        assert "d.d != 0" in str(exc.value)
        assert "(0,0)" in str(exc.value)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ChainComplex([2, 3], [SparseMatrix.zero(3, 2)])
        with pytest.raises(ValueError):
            ChainComplex([2, 3], [])

    @settings(max_examples=60, deadline=None)
    @given(small_matrix)
    def test_euler_characteristic_equals_alternating_betti(self, m):
        c = ChainComplex([m.rows, m.cols], [m])
        betti = c.homology()
        assert sum((-1) ** i * b for i, b in enumerate(betti)) == \
            c.euler_characteristic()
