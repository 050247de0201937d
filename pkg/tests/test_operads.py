"""Tests for symmetric operads: axioms, actions, free-algebra dimensions.

Free-algebra dimensions are checked against independent closed forms
(necklace/Moebius counts for the bracket operad, powers and binomials
for the other two) and against an explicit symmetrization projector.
"""

import itertools
import json
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from operadkit.operads import (
    AssocOperad,
    CommOperad,
    EndOperad,
    GradedSpace,
    LieOperad,
    OperadError,
    TableOperad,
    assoc_operad,
    check_axioms,
    comm_operad,
    embed_block_perm,
    expand_perm,
    free_algebra_dims,
    identity_perm,
    koszul_sign,
    lie_basis_words,
    lie_expand,
    lie_operad,
    operad_from_json,
    operad_to_json,
    perm_compose,
    perm_inverse,
    rho_coeff,
    symmetrization_projector_rank,
)
from operadkit.qlinalg import SparseMatrix


# --------------------------------------------------------------------------
# Independent dimension oracles


def mobius(n: int) -> int:
    if n == 1:
        return 1
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


def witt_dim(d: int, n: int) -> int:
    """Dimension of the degree-n piece of a free bracket algebra."""
    return sum(mobius(k) * d ** (n // k) for k in range(1, n + 1)
               if n % k == 0) // n


class TestPermHelpers:
    def test_compose_inverse(self):
        a = (2, 3, 1)
        assert perm_compose(a, perm_inverse(a)) == identity_perm(3)
        assert perm_compose(perm_inverse(a), a) == identity_perm(3)

    @given(st.permutations(list(range(1, 6))), st.permutations(list(range(1, 6))))
    def test_compose_is_associative_with_inverse(self, a, b):
        a, b = tuple(a), tuple(b)
        ab = perm_compose(a, b)
        assert perm_compose(ab, perm_inverse(b)) == a

    def test_koszul_sign_even_degrees_trivial(self):
        assert koszul_sign((2, 1, 3), (2, 4, 0)) == 1

    def test_koszul_sign_odd_degrees_is_parity(self):
        assert koszul_sign((2, 1), (1, 1)) == -1
        assert koszul_sign((2, 3, 1), (1, 1, 1)) == 1  # 3-cycle is even

    def test_koszul_sign_mixed(self):
        # swapping an even past an odd costs nothing
        assert koszul_sign((2, 1), (2, 1)) == 1

    def test_expand_perm_is_a_permutation(self):
        sigma = (2, 1, 3)
        big = expand_perm(sigma, 1, 2)
        assert sorted(big) == list(range(1, 5))

    def test_embed_block_perm_identity_outside_block(self):
        big = embed_block_perm((2, 1), 2, 4)
        assert big == (1, 3, 2, 4)


class TestAxioms:
    @pytest.mark.parametrize("factory", [comm_operad, assoc_operad, lie_operad])
    def test_axioms_hold_arity_four(self, factory):
        report = check_axioms(factory(4), 4)
        assert report.ok, report.violations[:3]
        assert report.checked > 0

    def test_end_operad_axioms_graded(self):
        V = GradedSpace(("x", "y"), (0, 1))
        report = check_axioms(EndOperad(V, 3), 3)
        assert report.ok, report.violations[:3]

    def test_corrupted_composition_is_detected(self):
        table = TableOperad.from_operad(assoc_operad(3), 3)
        assert check_axioms(table, 3).ok
        bad = table.with_corrupted_composition(2, 1, 2, 0, 0)
        report = check_axioms(bad, 3)
        assert not report.ok
        v = report.violations[0]
        assert v.axiom in {"1", "2", "3a", "3b", "4"}
        assert "witness" in str(v)

    def test_corrupted_action_breaks_equivariance(self):
        table = TableOperad.from_operad(lie_operad(3), 3)
        bad = table.with_corrupted_composition(2, 2, 2, 0, 0,
                                               scale=Fraction(2))
        report = check_axioms(bad, 3)
        assert not report.ok

    def test_violation_cap(self):
        table = TableOperad.from_operad(assoc_operad(3), 3)
        bad = table.with_corrupted_composition(2, 1, 2, 0, 0)
        report = check_axioms(bad, 3, max_violations=2)
        assert len(report.violations) == 2


class TestComponentSizes:
    def test_dims(self):
        assert [comm_operad(4).dim(n) for n in range(1, 5)] == [1, 1, 1, 1]
        assert [assoc_operad(4).dim(n) for n in range(1, 5)] == [1, 2, 6, 24]
        assert [lie_operad(5).dim(n) for n in range(1, 6)] == [1, 1, 2, 6, 24]

    def test_lie_basis_words_start_with_one(self):
        words = lie_basis_words(4)
        assert len(words) == 6
        assert all(w[0] == 1 for w in words)

    def test_lie_expand_bracket(self):
        assert dict(lie_expand((1, 2))) == {(1, 2): 1, (2, 1): -1}

    def test_lie_antisymmetry_via_action(self):
        L = lie_operad(3)
        swapped = L.act_basis(2, (2, 1), 0)
        assert swapped == {0: Fraction(-1)}

    def test_jacobi_via_rho_coeff(self):
        # [[1,2],3] + [[2,3],1] + [[3,1],2] = 0 in every left-normed word
        for u in lie_basis_words(3):
            total = 0
            for w in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
                total += rho_coeff(u, w)
            # rho_coeff(u, w) is the coefficient of u in the left-normed
            # expansion of [[w1,w2],w3]
            assert total == 0


class TestEndOperad:
    def test_evaluate_composition(self):
        V = GradedSpace(("x", "y"), (0, 0))
        E = EndOperad(V, 3)
        # f(a,b) = x when (a,b) == (x,y); g(a) = y when a == x
        f = {E.map_index(2, 0, (0, 1)): Fraction(1)}
        g = {E.map_index(1, 1, (0,)): Fraction(1)}
        h = E.compose(2, 2, 1, f, g)   # h(a,b) = f(a, g(b))
        assert E.evaluate(2, h, (0, 0)) == {0: Fraction(1)}
        assert E.evaluate(2, h, (0, 1)) == {}

    def test_composition_sign_from_sliding(self):
        V = GradedSpace(("x", "y"), (0, 1))
        E = EndOperad(V, 3)
        # g of odd total degree slides past the odd first input of f
        f = {E.map_index(2, 0, (1, 0)): Fraction(1)}
        g = {E.map_index(1, 0, (1,)): Fraction(1)}  # degree -1
        h = E.compose(2, 2, 1, f, g)
        assert h == {E.map_index(2, 0, (1, 1)): Fraction(-1)}

    def test_differential_squares_to_zero(self):
        V = GradedSpace(("x", "y"), (0, 1))
        q = SparseMatrix.from_dict(2, 2, {(0, 1): Fraction(1)})
        E = EndOperad(V, 3, q=q)
        for n in range(1, 4):
            d = E.differentials[n]
            assert d.matmul(d).is_zero()

    def test_differential_degree_validation(self):
        V = GradedSpace(("x", "y"), (0, 0))
        q = SparseMatrix.from_dict(2, 2, {(0, 1): Fraction(1)})
        with pytest.raises(OperadError):
            EndOperad(V, 2, q=q)

    def test_dimension_cap(self):
        V = GradedSpace(("a", "b", "c", "d"), (0, 0, 0, 0))
        with pytest.raises(OperadError):
            EndOperad(V, 7, dim_cap=1000)


class TestFreeAlgebraDims:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_bracket_operad_matches_necklace_counts(self, d):
        dims = free_algebra_dims(lie_operad(6), d, 6)
        assert dims == [witt_dim(d, n) for n in range(1, 7)]

    def test_bracket_d2_frozen(self):
        assert free_algebra_dims(lie_operad(6), 2, 6) == [2, 1, 2, 3, 6, 9]

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_associative_matches_powers(self, d):
        assert free_algebra_dims(assoc_operad(5), d, 5) == \
            [d ** n for n in range(1, 6)]

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_commutative_matches_binomials(self, d):
        assert free_algebra_dims(comm_operad(6), d, 6) == \
            [comb(d + n - 1, n) for n in range(1, 7)]

    @pytest.mark.parametrize("factory,d,n", [
        (comm_operad, 2, 3), (assoc_operad, 2, 3), (lie_operad, 2, 4),
        (lie_operad, 3, 3),
    ])
    def test_trace_shortcut_matches_explicit_projector(self, factory, d, n):
        O = factory(n)
        assert free_algebra_dims(O, d, n)[n - 1] == \
            symmetrization_projector_rank(O, d, n)

    def test_negative_dimension_rejected(self):
        with pytest.raises(OperadError):
            free_algebra_dims(comm_operad(3), -1, 3)


class TestActionMatrices:
    @pytest.mark.parametrize("factory", [assoc_operad, lie_operad])
    def test_trace_matches_matrix_trace(self, factory):
        O = factory(4)
        for sigma in itertools.permutations(range(1, 5)):
            m = O.action_matrix(4, sigma)
            tr = sum(m[(k, k)] for k in range(O.dim(4)))
            assert O.action_trace(4, sigma) == tr

    def test_action_matrices_form_a_homomorphism(self):
        O = lie_operad(4)
        for a, b in itertools.product(
                itertools.permutations(range(1, 4)), repeat=2):
            lhs = O.action_matrix(3, perm_compose(a, b))
            rhs = O.action_matrix(3, a).matmul(O.action_matrix(3, b))
            assert lhs == rhs


class TestJsonRoundTrip:
    def test_round_trip_preserves_tables(self):
        O = lie_operad(3)
        text = operad_to_json(O, 3)
        back = operad_from_json(text)
        assert check_axioms(back, 3).ok
        for n in range(1, 4):
            assert back.dim(n) == O.dim(n)
            for sigma in itertools.permutations(range(1, n + 1)):
                for a in range(O.dim(n)):
                    assert back.act_basis(n, sigma, a) == \
                        dict(O.act_basis(n, sigma, a))
        for (n, i, m) in [(2, 1, 2), (2, 2, 2)]:
            for a in range(O.dim(n)):
                for b in range(O.dim(m)):
                    assert back.compose_basis(n, i, m, a, b) == \
                        dict(O.compose_basis(n, i, m, a, b))

    def test_round_trip_preserves_differentials(self):
        V = GradedSpace(("x", "y"), (0, 1))
        q = SparseMatrix.from_dict(2, 2, {(0, 1): Fraction(1)})
        E = EndOperad(V, 2, q=q)
        back = operad_from_json(operad_to_json(E, 2))
        for n in (1, 2):
            assert back.differentials[n] == E.differentials[n]

    def test_rejects_wrong_format(self):
        with pytest.raises((OperadError, ValueError, KeyError)):
            operad_from_json(json.dumps({"format": "something-else"}))

    def test_coefficients_stay_exact(self):
        O = lie_operad(3)
        data = json.loads(operad_to_json(O, 3))
        text = json.dumps(data)
        assert "0.3" not in text and "e-" not in text
