"""GF(2) linear algebra and Z4-valued quadratic forms.

Phase points are bit rows ``u`` of even length ``2n`` with qubit ``i`` owning
the interleaved coordinates ``(z_i, x_i) = (u[2i], u[2i+1])``.  Dense matrices
are ``np.uint8`` arrays with entries in {0, 1}; quadratic-form matrices are
symmetric ``np.int64`` arrays with diagonal in Z4 and off-diagonal in Z2.

``BitMatrix`` is a bit-packed row store (one Python int per row) used by the
compiled classical-circuit forms, where rows grow to thousands of bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BitMatrix",
    "as_bits",
    "tau",
    "symplectic",
    "quad_eval",
    "quad_canon",
    "coboundary",
    "conjugate_quad",
    "column_reduce",
    "row_reduce",
    "rank",
    "left_kernel",
    "right_kernel",
    "solve_left",
    "span",
    "ColumnReduction",
]


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a uint8 0/1 array."""
    arr = np.asarray(a, dtype=np.int64) & 1
    arr = arr.astype(np.uint8)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    return arr


def _check_len(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    if u.shape[-1] % 2:
        raise ValueError("phase points must have even length")


def tau(u, v) -> int:
    """Sign-update cocycle: sum_i x_i(u) z_i(v) mod 2."""
    u = as_bits(u, 1)
    v = as_bits(v, 1)
    _check_len(u, v)
    return int(np.dot(u[1::2].astype(np.int64), v[0::2]) & 1)


def symplectic(u, v) -> int:
    """Symplectic form [u, v] = tau(u, v) + tau(v, u) mod 2."""
    return tau(u, v) ^ tau(v, u)


def quad_canon(Q) -> np.ndarray:
    """Canonical Z4 quadratic-form matrix.

    The diagonal is reduced mod 4 and the off-diagonal mod 2.  A non-symmetric
    input is folded: the cross coefficient of ``u_i u_j`` is
    ``Q_ij + Q_ji``, which must be even.
    """
    A = np.asarray(Q, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"quadratic form must be square, got {A.shape}")
    if np.array_equal(A, A.T):
        out = A & 1
    else:
        cross = A + A.T
        if np.any(cross & 1):
            raise ValueError("asymmetric matrix has odd cross terms; not a Z4 form")
        out = (cross // 2) & 1
    np.fill_diagonal(out, np.diagonal(A) & 3)
    return out


def quad_eval(Q, s, u) -> int:
    """q(u) = 2 u.s + u Q u^T mod 4, using the integer lift of ``Q``."""
    Q = np.asarray(Q, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64) & 1
    n = u.shape[-1]
    if Q.shape != (n, n):
        raise ValueError(f"dimension mismatch: Q {Q.shape}, u {u.shape}")
    val = int(u @ Q @ u)
    if s is not None:
        s = np.asarray(s, dtype=np.int64) & 1
        if s.shape != (n,):
            raise ValueError(f"dimension mismatch: s {s.shape}, u {u.shape}")
        val += 2 * int(u @ s)
    return val & 3


def coboundary(Q) -> np.ndarray:
    """Boolean bilinear form dq(u, u') = u Q u'^T mod 2."""
    return as_bits(quad_canon(Q))


def conjugate_quad(Q, V) -> np.ndarray:
    """Canonical form of ``V Q V^T`` computed over the integers.

    The result satisfies ``quad_eval(result, 0, u) == quad_eval(Q, 0, u V)``.
    """
    Q = np.asarray(Q, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64) & 1
    if V.ndim != 2 or V.shape[1] != Q.shape[0]:
        raise ValueError(f"dimension mismatch: V {V.shape}, Q {Q.shape}")
    return quad_canon(V @ Q @ V.T)


@dataclass(frozen=True)
class ColumnReduction:
    """Outcome of Gaussian elimination on columns.

    ``echelon == (M @ ops)[:, :rank]`` over GF(2), and the remaining columns of
    ``M @ ops`` are zero.  ``pivots[j]`` is the pivot row of echelon column j.
    """

    echelon: np.ndarray
    rank: int
    ops: np.ndarray
    pivots: tuple[int, ...]


def column_reduce(M) -> ColumnReduction:
    """Reduced column echelon form of ``M`` with zero columns deleted.

    Rows are scanned top to bottom; the first not-yet-used column holding a 1
    in the current row becomes the pivot column, and that row is cleared from
    every other column.
    """
    A = as_bits(M, 2).copy()
    rows, cols = A.shape
    ops = np.eye(cols, dtype=np.uint8)
    pivots: list[int] = []
    used = 0
    for r in range(rows):
        if used == cols:
            break
        hits = np.flatnonzero(A[r, used:])
        if hits.size == 0:
            continue
        j = used + int(hits[0])
        if j != used:
            A[:, [used, j]] = A[:, [j, used]]
            ops[:, [used, j]] = ops[:, [j, used]]
        others = np.flatnonzero(A[r])
        others = others[others != used]
        if others.size:
            A[:, others] ^= A[:, [used]]
            ops[:, others] ^= ops[:, [used]]
        pivots.append(r)
        used += 1
    return ColumnReduction(A[:, :used].copy(), used, ops, tuple(pivots))


def row_reduce(M) -> tuple[np.ndarray, tuple[int, ...], np.ndarray]:
    """Reduced row echelon form.

    Returns ``(R, pivot_cols, T)`` with ``R == T @ M`` over GF(2).  Zero rows
    are kept at the bottom of ``R``.
    """
    cr = column_reduce(as_bits(M, 2).T)
    R = np.zeros_like(as_bits(M, 2))
    R[: cr.rank] = cr.echelon.T
    return R, cr.pivots, cr.ops.T.copy()


def rank(M) -> int:
    return column_reduce(M).rank


def left_kernel(M) -> np.ndarray:
    """Rows ``u`` spanning ``{u : u M = 0}``; shape ``(d, rows(M))``."""
    M = as_bits(M, 2)
    if M.shape[1] == 0:
        return np.eye(M.shape[0], dtype=np.uint8)
    cr = column_reduce(M.T)
    return cr.ops[:, cr.rank:].T.copy()


def right_kernel(M) -> np.ndarray:
    """Columns ``v`` spanning ``{v : M v = 0}``, returned as rows."""
    return left_kernel(as_bits(M, 2).T)


def solve_left(M, b) -> np.ndarray | None:
    """Some ``x`` with ``x M = b``, or None if inconsistent."""
    M = as_bits(M, 2)
    b = as_bits(b, 1)
    rows = M.shape[0]
    aug = np.vstack([M, b[None, :]])
    ker = left_kernel(aug)
    hit = np.flatnonzero(ker[:, rows]) if ker.size else np.array([], dtype=int)
    if hit.size == 0:
        return None
    return ker[hit[0], :rows].copy()


def span(rows) -> np.ndarray:
    """All 2^d combinations of the given rows (exponential; small d only)."""
    B = as_bits(rows, 2)
    d, n = B.shape
    coeffs = (np.arange(1 << d)[:, None] >> np.arange(d)[None, :]) & 1
    return ((coeffs.astype(np.int64) @ B) & 1).astype(np.uint8).reshape(1 << d, n)


class BitMatrix:
    """Bit-packed GF(2) matrix; row ``i`` is the Python int ``rows[i]``.

    Bit ``j`` of a row int holds column ``j``.  Instances are treated as
    immutable by the public API; in-place helpers are prefixed with ``_``.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[int] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = list(rows) if rows is not None else [0] * nrows
        if len(self.rows) != nrows:
            raise ValueError("row count mismatch")
        mask = (1 << ncols) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("row has bits beyond ncols")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = as_bits(a, 2)
        weights = [1 << j for j in range(a.shape[1])]
        rows = [sum(w for w, bit in zip(weights, row) if bit) for row in a.tolist()]
        return cls(a.shape[0], a.shape[1], rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[i, j] = 1
                r >>= 1
                j += 1
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        out = []
        orow = other.rows
        for r in self.rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= orow[j]
                r >>= 1
                j += 1
            out.append(acc)
        return BitMatrix(self.nrows, other.ncols, out)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def matvec(self, v: Sequence[int]) -> list[int]:
        """``M v`` for a 0/1 sequence ``v`` of length ncols."""
        x = sum(1 << j for j, b in enumerate(v) if b & 1)
        return [(r & x).bit_count() & 1 for r in self.rows]

    def rank(self) -> int:
        return len(_packed_echelon(list(self.rows))[1])


def _packed_echelon(rows: list[int]) -> tuple[list[int], list[int]]:
    """Row echelon form of packed rows; returns (basis rows, pivot bits)."""
    basis: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if r:
            p = (r & -r).bit_length() - 1
            for i, b in enumerate(basis):
                if (b >> p) & 1:
                    basis[i] = b ^ r
            basis.append(r)
            pivots.append(p)
    return basis, pivots
