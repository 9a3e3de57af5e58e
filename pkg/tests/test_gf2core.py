from __future__ import annotations

import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stabrw import gf2core as g


def bit_matrices(max_rows=7, max_cols=7):
    shape = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shape.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def _brute_rank(M):
    rows = [int("".join(map(str, r)), 2) for r in M.tolist()]
    seen = {0}
    for r in rows:
        seen |= {x ^ r for x in seen}
    return int(np.log2(len(seen)))


def test_tau_is_x_dot_z():
    assert g.tau([0, 1], [1, 0]) == 1
    assert g.tau([1, 0], [0, 1]) == 0
    assert g.tau([0, 1, 0, 1], [1, 0, 1, 0]) == 0


def test_symplectic_xz_anticommute():
    assert g.symplectic([1, 0], [0, 1]) == 1
    assert g.symplectic([1, 1], [1, 1]) == 0


def test_tau_rejects_odd_length():
    import pytest

    with pytest.raises(ValueError):
        g.tau([1, 0, 1], [0, 0, 1])


@given(bit_matrices())
def test_column_reduce_contract(M):
    cr = g.column_reduce(M)
    prod = (M.astype(np.int64) @ cr.ops.astype(np.int64)) & 1
    assert np.array_equal(prod[:, : cr.rank], cr.echelon)
    assert not prod[:, cr.rank :].any()
    assert cr.rank == _brute_rank(M.T) == g.rank(M)
    assert round(abs(np.linalg.det(cr.ops.astype(float)))) % 2 == 1


@given(bit_matrices())
def test_left_kernel_is_full(M):
    K = g.left_kernel(M)
    assert not ((K.astype(np.int64) @ M) & 1).any()
    assert K.shape[0] == M.shape[0] - g.rank(M)
    assert g.rank(K) == K.shape[0]


@given(bit_matrices(), st.data())
def test_solve_left_finds_solution(M, data):
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=M.shape[0], max_size=M.shape[0])), dtype=np.uint8)
    b = (x.astype(np.int64) @ M) & 1
    y = g.solve_left(M, b)
    assert y is not None
    assert np.array_equal((y.astype(np.int64) @ M) & 1, b)


def test_solve_left_inconsistent():
    assert g.solve_left([[1, 0]], [0, 1]) is None


@given(bit_matrices(6, 6))
def test_bitmatrix_matches_dense(M):
    B = g.BitMatrix.from_array(M)
    assert np.array_equal(B.to_array(), M)
    assert B.rank() == g.rank(M)
    assert np.array_equal((B @ B.T).to_array(), (M.astype(np.int64) @ M.T) & 1)
    assert np.array_equal(B.T.to_array(), M.T)


def test_quad_canon_folds_asymmetric():
    Q = g.quad_canon([[1, 2], [0, 3]])
    assert Q.tolist() == [[1, 1], [1, 3]]


def test_quad_canon_rejects_odd_cross():
    import pytest

    with pytest.raises(ValueError):
        g.quad_canon([[0, 1], [0, 0]])


@given(arrays(np.int64, (4, 4), elements=st.integers(0, 3)))
def test_quad_cross_term(A):
    Q = g.quad_canon(A + A.T)
    for a, b in itertools.product(itertools.product((0, 1), repeat=4), repeat=2):
        a, b = np.array(a), np.array(b)
        lhs = g.quad_eval(Q, None, a ^ b)
        rhs = (g.quad_eval(Q, None, a) + g.quad_eval(Q, None, b) + 2 * (int(a @ Q @ b) & 1)) & 3
        assert lhs == rhs


@settings(max_examples=30)
@given(arrays(np.int64, (3, 3), elements=st.integers(0, 3)), arrays(np.uint8, (3, 3), elements=st.integers(0, 1)))
def test_conjugate_quad_pulls_back(A, V):
    Q = g.quad_canon(A + A.T)
    C = g.conjugate_quad(Q, V)
    for u in itertools.product((0, 1), repeat=3):
        u = np.array(u)
        assert g.quad_eval(C, None, u) == g.quad_eval(Q, None, (u @ V) & 1)


def test_coboundary_is_offdiag_parity():
    Q = np.array([[3, 1], [1, 2]])
    assert g.coboundary(Q).tolist() == [[1, 1], [1, 0]]


def test_span_enumerates():
    S = g.span([[1, 0, 1], [0, 1, 1]])
    assert sorted(map(tuple, S.tolist())) == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
