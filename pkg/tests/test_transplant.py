import itertools
from fractions import Fraction

import numpy as np
import pytest

from isospectral.tiling import (
    SignConvention,
    family_ids,
    load_family,
    relabel_tiles,
    to_signed_matrices,
)
from isospectral.transplant import (
    as_exact,
    decomposition_signature,
    exact_det,
    format_matrix,
    integer_nullspace,
    is_nontrivial,
    is_signed_permutation,
    parse_matrices,
    solve_transplantation,
    transplant_coefficients,
    verify_transplantation,
)

from oracles import REF71_A, REF71_B, explicit_t73


def _triples(fid, conv=SignConvention.DIRICHLET):
    pair = load_family(fid)
    return to_signed_matrices(pair.left, conv), to_signed_matrices(pair.right, conv)


def test_integer_nullspace_small():
    # x0 + x1 = 0, x2 free
    basis = integer_nullspace([{0: 1, 1: 1}], 3)
    assert sorted(basis) == [[0, 0, 1], [1, -1, 0]]
    # 2 x0 - 4 x1 = 0 -> primitive (2, 1)
    assert integer_nullspace([{0: 2, 1: -4}], 2) == [[2, 1]]


def test_exact_det():
    assert exact_det(as_exact([[2, 1], [1, 1]])) == 1
    assert exact_det(as_exact([[1, 2], [2, 4]])) == 0
    assert exact_det(as_exact([[Fraction(1, 2), 0], [0, 4]])) == 2


def test_reference_7_1_matrices_verbatim():
    basis = solve_transplantation(REF71_A, REF71_B)
    assert basis.dimension == 2
    for T in basis.basis:
        assert verify_transplantation(T, REF71_A, REF71_B).is_zero
    assert decomposition_signature(basis).counts == (3, 4)
    assert is_nontrivial(basis)


@pytest.mark.parametrize("conv", list(SignConvention))
def test_7_1_both_conventions(conv):
    A, B = _triples("7_1", conv)
    basis = solve_transplantation(A, B)
    sig = decomposition_signature(basis)
    assert sig.counts == (3, 4)
    t3, t4 = sig.representatives
    assert not any(x and y for x, y in zip(t3.flat, t4.flat))
    for T in (t3, t4, t3 + t4, 5 * t3 - 2 * t4):
        assert verify_transplantation(T, A, B).is_zero


def test_basis_normalised():
    A, B = _triples("7_2")
    for T in solve_transplantation(A, B).basis:
        flat = [v for v in T.flat if v]
        assert flat[0] > 0
        assert np.gcd.reduce([abs(int(v)) for v in flat]) == 1


def test_explicit_t73_solves_7_3():
    A, B = _triples("7_3")
    assert verify_transplantation(explicit_t73(1, 2), A, B).is_zero
    T3, T4 = explicit_t73(1, 0), explicit_t73(0, 1)
    for T in (T3, T4):
        assert verify_transplantation(T, A, B).is_zero
    sig = decomposition_signature(solve_transplantation(A, B))
    assert sig.counts == (3, 4)


def test_zero_matrix_is_a_solution():
    A, B = _triples("7_1")
    assert verify_transplantation(np.zeros((7, 7), dtype=int), A, B).is_zero


def test_no_permutation_transplants_7_1():
    A, B = _triples("7_1")
    A = np.asarray(A)
    B = np.asarray(B)
    witness = None
    for perm in itertools.permutations(range(7)):
        P = np.eye(7, dtype=int)[list(perm)]
        if all(np.array_equal(P @ A[c], B[c] @ P) for c in range(3)):
            pytest.fail(f"permutation {perm} transplants a non-isometric pair")
        if witness is None:
            witness = P
    assert not verify_transplantation(witness, A, B).is_zero


def test_self_pair_contains_identity_and_is_trivial():
    A, _ = _triples("7_1")
    basis = solve_transplantation(A, A)
    eye = np.eye(7, dtype=int)
    # identity lies in the span: solve for coefficients on two entries
    M = np.array([[T[0, 0], T[0, 1]] for T in basis.basis], dtype=float).T
    coef = np.linalg.lstsq(M, [1, 0], rcond=None)[0]
    combo = sum(c * np.asarray(T, dtype=float) for c, T in zip(coef, basis.basis))
    assert np.allclose(combo, eye)
    assert not is_nontrivial(basis)


def test_relabelled_copy_is_trivial():
    pair = load_family("7_1")
    perm = [0, 2, 1, 4, 3, 6, 5]
    A = to_signed_matrices(pair.left)
    B = to_signed_matrices(relabel_tiles(pair.left, perm))
    basis = solve_transplantation(A, B)
    assert basis.dimension >= 1
    assert not is_nontrivial(basis)


def test_signed_permutation_predicate():
    assert is_signed_permutation(as_exact([[0, -3], [3, 0]]))
    assert not is_signed_permutation(as_exact([[1, 1], [0, 1]]))
    assert not is_signed_permutation(as_exact([[1, 0], [0, 2]]))


def test_dimension_mismatch():
    A, _ = _triples("7_1")
    B, _ = _triples("13_1")
    with pytest.raises(ValueError, match="dimension mismatch"):
        solve_transplantation(A, B)


def test_transplant_coefficients():
    v = np.arange(7)
    assert np.array_equal(transplant_coefficients(np.eye(7, dtype=int), v), v)
    e1 = np.eye(7, dtype=int)[0]
    col = transplant_coefficients(np.array(explicit_t73(1, 0)), e1)
    assert col.tolist() == [1, 0, 0, -1, 0, -1, 0]
    # nodal case: equal parameters, constant vector -> row sums
    T = np.array(explicit_t73(1, 1))
    out = transplant_coefficients(T, np.ones(7), normalization=2)
    assert np.allclose(out, 2 * T.sum(axis=1))
    with pytest.raises(ValueError, match="length mismatch"):
        transplant_coefficients(T, np.ones(6))


def test_matrix_text_roundtrip():
    m = as_exact([[1, Fraction(-2, 3)], [0, 5]])
    text = format_matrix(m) + format_matrix(as_exact([[7]]))
    back = parse_matrices(text)
    assert len(back) == 2
    assert back[0].tolist() == m.tolist()
    assert back[1].tolist() == [[7]]
    with pytest.raises(ValueError):
        parse_matrices("matrix 2 2\n1 2\n")


@pytest.mark.parametrize("fid", family_ids())
def test_shipped_family_signature(fid):
    pair = load_family(fid)
    for conv in SignConvention:
        A, B = to_signed_matrices(pair.left, conv), to_signed_matrices(pair.right, conv)
        basis = solve_transplantation(A, B)
        assert basis.dimension >= 2
        assert all(verify_transplantation(T, A, B).is_zero for T in basis.basis)
        assert decomposition_signature(basis).counts == pair.expected_signature
