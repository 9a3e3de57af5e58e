"""Standard quadratic form expansions of Clifford channels.

A trace-preserving Clifford channel from ``n_in`` to ``n_out`` qubits is the
tuple ``(H, s, Q, V)`` acting as

    Phi = sum_{u : uH = 0} (-1)^(u.s) i^(uQu^T) |u}{uV|

with ``|u} = T(u) / 2^n`` and ``{u| = Tr(T(u)^dagger .)``.  Trace-decreasing
channels add a post-selection part ``(k; G, c, J, M, K)``.  All Boolean
matrices are ``np.uint8``; ``Q`` and ``M`` are canonical Z4 form matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import gf2core as g
from .circuit_ir import CircuitError, QuantumCircuit, analyze, live_before

__all__ = [
    "StdQFE",
    "TDQFE",
    "PauliCheck",
    "ValidationReport",
    "elementary_qfe",
    "compose",
    "tensor",
    "normalize",
    "validate",
    "embed",
    "discard_wire",
    "permute",
    "heisenberg_pullback",
    "expectation",
    "pauli_check",
    "compose_td",
    "td_from_std",
    "td_from_check",
    "td_reduce",
    "circuit_contract",
    "tuple_to_json",
    "tau_matrix",
]


def _bits(a, shape) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64).reshape(shape) & 1).astype(np.uint8)


def _mul(A, B) -> np.ndarray:
    """GF(2) product that tolerates empty dimensions."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    return ((A @ B) & 1).astype(np.uint8)


def tau_matrix(n: int) -> np.ndarray:
    """Boolean matrix T with tau(u, v) = u T v^T."""
    T = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    for i in range(n):
        T[2 * i + 1, 2 * i] = 1
    return T


@dataclass(frozen=True, eq=False)
class StdQFE:
    n_in: int
    n_out: int
    H: np.ndarray
    s: np.ndarray
    Q: np.ndarray
    V: np.ndarray

    def __post_init__(self) -> None:
        m, m_in = 2 * self.n_out, 2 * self.n_in
        H = np.asarray(self.H)
        object.__setattr__(self, "H", _bits(H, (m, H.size // m if m else (H.shape[1] if H.ndim == 2 else 0))))
        object.__setattr__(self, "s", _bits(self.s, (m,)))
        object.__setattr__(self, "Q", g.quad_canon(np.asarray(self.Q, dtype=np.int64).reshape(m, m)))
        object.__setattr__(self, "V", _bits(self.V, (m, m_in)))

    @property
    def k(self) -> int:
        return self.H.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StdQFE):
            return NotImplemented
        return (
            (self.n_in, self.n_out) == (other.n_in, other.n_out)
            and np.array_equal(self.H, other.H)
            and np.array_equal(self.s, other.s)
            and np.array_equal(self.Q, other.Q)
            and np.array_equal(self.V, other.V)
        )

    def __hash__(self):
        return hash((self.n_in, self.n_out, self.H.tobytes(), self.s.tobytes(), self.Q.tobytes(), self.V.tobytes()))

    def __repr__(self) -> str:
        return f"StdQFE(n_in={self.n_in}, n_out={self.n_out}, k={self.k})"


def _empty(m: int) -> np.ndarray:
    return np.zeros((m, 0), dtype=np.uint8)


def _prep(Hcol, s) -> StdQFE:
    return StdQFE(0, 1, np.asarray(Hcol).reshape(2, -1), s, np.zeros((2, 2)), np.zeros((2, 0)))


def _gate(n: int, V, Q=None, s=None) -> StdQFE:
    m = 2 * n
    return StdQFE(n, n, _empty(m), np.zeros(m) if s is None else s, np.zeros((m, m)) if Q is None else Q, V)


_TABLE = {
    "PREP0": lambda: _prep([[0], [1]], [0, 0]),
    "PREP1": lambda: _prep([[0], [1]], [1, 0]),
    "PREPP": lambda: _prep([[1], [0]], [0, 0]),
    "PREPM": lambda: _prep([[1], [0]], [0, 1]),
    "PREPCHAOS": lambda: _prep(np.eye(2), [0, 0]),
    "PREPMAGIC_I": lambda: StdQFE(0, 1, [[1], [1]], [0, 0], [[0, 0], [0, 3]], np.zeros((2, 0))),
    "I": lambda: _gate(1, np.eye(2)),
    "Z": lambda: _gate(1, np.eye(2), s=[0, 1]),
    "X": lambda: _gate(1, np.eye(2), s=[1, 0]),
    "DEPHZ": lambda: StdQFE(1, 1, [[0], [1]], [0, 0], np.zeros((2, 2)), [[1, 0], [0, 0]]),
    "DEPHX": lambda: StdQFE(1, 1, [[1], [0]], [0, 0], np.zeros((2, 2)), [[0, 0], [0, 1]]),
    "DISCARD": lambda: StdQFE(1, 0, np.zeros((0, 0)), np.zeros(0), np.zeros((0, 0)), np.zeros((0, 2))),
    "H": lambda: _gate(1, [[0, 1], [1, 0]], Q=[[0, 1], [1, 0]]),
    "S": lambda: _gate(1, [[1, 0], [1, 1]], Q=[[0, 0], [0, 3]]),
    "SDG": lambda: _gate(1, [[1, 0], [1, 1]], Q=[[0, 0], [0, 1]]),
    "CNOT": lambda: _gate(2, [[1, 0, 0, 0], [0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 0, 1]]),
    "CZ": lambda: _gate(
        2,
        [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [1, 0, 0, 1]],
        Q=[[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0]],
    ),
    "SWAP": lambda: _gate(2, [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]),
}
_TABLE["MZ"] = _TABLE["DEPHZ"]
_TABLE["MX"] = _TABLE["DEPHX"]


def elementary_qfe(kind: str) -> StdQFE:
    """Tuple of an elementary operation (measurements act as dephasing)."""
    try:
        return _TABLE[kind]()
    except KeyError:
        raise ValueError(f"no quadratic form expansion for {kind!r}") from None


def compose(later: StdQFE, earlier: StdQFE) -> StdQFE:
    """Tuple of ``later o earlier``."""
    if earlier.n_out != later.n_in:
        raise ValueError(f"cannot compose: {earlier.n_out} output qubits into {later.n_in} input qubits")
    VCB = later.V
    return StdQFE(
        earlier.n_in,
        later.n_out,
        np.hstack([later.H, _mul(VCB, earlier.H)]),
        later.s ^ _mul(VCB, earlier.s),
        later.Q + g.conjugate_quad(earlier.Q, VCB),
        _mul(VCB, earlier.V),
    )


def _block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=np.int64)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def tensor(a: StdQFE, b: StdQFE) -> StdQFE:
    """``a`` on the first qubits, ``b`` on the following ones."""
    return StdQFE(
        a.n_in + b.n_in,
        a.n_out + b.n_out,
        _block(a.H, b.H),
        np.concatenate([a.s, b.s]),
        _block(a.Q, b.Q),
        _block(a.V, b.V),
    )


def _kernel_lifts(H: np.ndarray) -> tuple[np.ndarray, tuple[int, ...], list[int]]:
    """Reduced H, its pivot rows, and the free rows.

    For reduced column echelon ``H`` every free row ``l`` lifts to the kernel
    vector with ``u_l = 1``, ``u_p = H[l, j]`` at pivot row ``p`` of column j.
    """
    cr = g.column_reduce(H)
    free = [r for r in range(H.shape[0]) if r not in cr.pivots]
    return cr.echelon, cr.pivots, free


def _lift_matrix(Hr: np.ndarray, pivots: Sequence[int], free: Sequence[int]) -> np.ndarray:
    L = np.zeros((len(free), Hr.shape[0]), dtype=np.uint8)
    for i, l in enumerate(free):
        L[i, l] = 1
        for j, p in enumerate(pivots):
            L[i, p] = Hr[l, j]
    return L


def normalize(f: StdQFE) -> StdQFE:
    """Canonical representative of the tuple's equivalence class.

    ``H`` goes to reduced column echelon form; ``s``, ``Q`` and the rows of
    ``V`` are zeroed on pivot rows and expressed through the kernel lifts on
    the free rows.  Two tuples of the same channel normalize identically.
    """
    m = 2 * f.n_out
    Hr, pivots, free = _kernel_lifts(f.H)
    L = _lift_matrix(Hr, pivots, free)
    s = np.zeros(m, dtype=np.uint8)
    V = np.zeros_like(f.V)
    Q = np.zeros((m, m), dtype=np.int64)
    if free:
        idx = np.array(free)
        s[idx] = _mul(L, f.s)
        V[idx] = _mul(L, f.V)
        Q[np.ix_(idx, idx)] = g.conjugate_quad(f.Q, L)
    return StdQFE(f.n_in, f.n_out, Hr, s, Q, V)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate(f: StdQFE, bound: int = 3) -> ValidationReport:
    """Check the 1-cocycle and symplectic conditions on the kernel of H.

    Both conditions are bilinear, so a kernel basis is enough; for
    ``n_out <= bound`` the full kernel is enumerated to name the first
    violating pair in lexicographic order.
    """
    K = g.left_kernel(f.H)
    T_out = tau_matrix(f.n_out).astype(np.int64)
    T_in = tau_matrix(f.n_in).astype(np.int64)
    cob = g.coboundary(f.Q).astype(np.int64)

    def defect(U):
        U = U.astype(np.int64)
        UV = U @ f.V.astype(np.int64)
        lhs = (U @ cob @ U.T) & 1
        rhs = ((U @ T_out @ U.T) + (UV @ T_in @ UV.T)) & 1
        return lhs ^ rhs

    bad = defect(K) if K.size else np.zeros((0, 0), dtype=np.int64)
    if not bad.any():
        return ValidationReport(True)
    if f.n_out <= bound:
        pts = g.span(K)
        order = np.lexsort(pts.T[::-1])
        pts = pts[order]
        D = defect(pts)
        i, j = map(int, np.argwhere(D)[0])
    else:
        pts = K
        i, j = map(int, np.argwhere(bad)[0])
    return ValidationReport(False, (tuple(map(int, pts[i])), tuple(map(int, pts[j]))), "1-cocycle condition violated")


def embed(f: StdQFE, targets: Sequence[int], n: int) -> StdQFE:
    """Lift an ``k -> k`` qubit tuple to act on ``targets`` of an ``n``-qubit register."""
    if f.n_in != f.n_out or f.n_in != len(targets):
        raise ValueError("embed needs a square tuple matching the target count")
    coords = np.array([c for q in targets for c in (2 * q, 2 * q + 1)], dtype=np.int64)
    m = 2 * n
    V = np.eye(m, dtype=np.uint8)
    V[np.ix_(coords, np.arange(m))] = 0
    V[np.ix_(coords, coords)] = f.V
    H = np.zeros((m, f.k), dtype=np.uint8)
    H[coords] = f.H
    s = np.zeros(m, dtype=np.uint8)
    s[coords] = f.s
    Q = np.zeros((m, m), dtype=np.int64)
    Q[np.ix_(coords, coords)] = f.Q
    return StdQFE(n, n, H, s, Q, V)


def discard_wire(n: int, wire: int) -> StdQFE:
    """Trace out one qubit of an ``n``-qubit register."""
    keep = [c for q in range(n) if q != wire for c in (2 * q, 2 * q + 1)]
    V = np.eye(2 * n, dtype=np.uint8)[keep]
    m = 2 * (n - 1)
    return StdQFE(n, n - 1, _empty(m), np.zeros(m), np.zeros((m, m)), V)


def permute(n: int, order: Sequence[int]) -> StdQFE:
    """Relabel qubits: output qubit ``i`` is input qubit ``order[i]``."""
    rows = [c for q in order for c in (2 * q, 2 * q + 1)]
    V = np.eye(2 * n, dtype=np.uint8)[rows]
    return _gate(n, V)


# --- Heisenberg picture and expectations ---------------------------------------


@dataclass(frozen=True, eq=False)
class PauliCheck:
    """(1/2^k) sum_{tG=0} (-1)^(t.c) i^(-tMt^T) T(tK) on ``n`` qubits."""

    k: int
    G: np.ndarray
    c: np.ndarray
    M: np.ndarray
    K: np.ndarray

    def __post_init__(self) -> None:
        K = np.asarray(self.K)
        b = K.shape[0]
        G = np.asarray(self.G)
        object.__setattr__(self, "K", _bits(K, K.shape))
        object.__setattr__(self, "G", _bits(G, (b, G.size // b if b else (G.shape[1] if G.ndim == 2 else 0))))
        object.__setattr__(self, "c", _bits(self.c, (b,)))
        object.__setattr__(self, "M", g.quad_canon(np.asarray(self.M, dtype=np.int64).reshape(b, b)))

    @property
    def n(self) -> int:
        return self.K.shape[1] // 2


def pauli_check(generators: Sequence[Sequence[int]], signs: Sequence[int] | None = None) -> PauliCheck:
    """Projector onto the joint +1 eigenspace of signed Hermitian Paulis.

    Generator ``j`` is the Hermitian Pauli proportional to ``T(u_j)`` (``Y``
    for ``ZX``) times ``(-1)^signs[j]``; generators must commute.
    """
    K = g.as_bits(np.atleast_2d(np.asarray(generators)), 2)
    b = K.shape[0]
    signs = np.zeros(b, dtype=np.uint8) if signs is None else g.as_bits(signs, 1)
    T = tau_matrix(K.shape[1] // 2).astype(np.int64)
    tau_kk = (K.astype(np.int64) @ T @ K.T.astype(np.int64)) & 1
    if np.any(tau_kk ^ tau_kk.T):
        raise ValueError("check generators must commute")
    M = tau_kk.copy()
    return PauliCheck(b, np.zeros((b, 0), dtype=np.uint8), signs, M, K)


def heisenberg_pullback(f: StdQFE, check: PauliCheck) -> PauliCheck:
    """Dual action of ``f`` on a check living on its output system."""
    if check.K.shape[1] != 2 * f.n_out:
        raise ValueError("check does not live on the channel output")
    K = check.K
    return PauliCheck(
        check.k,
        np.hstack([check.G, _mul(K, f.H)]),
        check.c ^ _mul(K, f.s),
        check.M + g.conjugate_quad(f.Q, K),
        _mul(K, f.V),
    )


def expectation(check: PauliCheck, state: StdQFE) -> Fraction:
    """Tr(Pi rho) for a state tuple (``n_in == 0``) by a quadratic Gauss sum."""
    if state.n_in != 0:
        raise ValueError("expectation needs a state tuple")
    pb = heisenberg_pullback(state, check)
    B = g.left_kernel(pb.G)
    d = B.shape[0]
    c2 = _mul(B, pb.c)
    M2 = g.conjugate_quad(pb.M, B)
    off = M2.copy()
    np.fill_diagonal(off, 0)
    diag = np.diagonal(M2)
    if off.any() or np.any(diag & 1):
        raise AssertionError("reduced check form is not linear; invalid check/state pair")
    lin = c2 ^ ((diag >> 1) & 1).astype(np.uint8)
    if lin.any():
        return Fraction(0)
    return Fraction(2) ** (d - pb.k)


# --- trace-decreasing channels ------------------------------------------------


@dataclass(frozen=True, eq=False)
class TDQFE:
    """Trace-decreasing tuple; ``k is None`` encodes the zero channel."""

    n_in: int
    n_out: int
    k: int | None
    H: np.ndarray
    s: np.ndarray
    Q: np.ndarray
    V: np.ndarray
    G: np.ndarray
    c: np.ndarray
    J: np.ndarray
    M: np.ndarray
    K: np.ndarray

    def __post_init__(self) -> None:
        m, m_in = 2 * self.n_out, 2 * self.n_in
        G = np.asarray(self.G)
        b = G.shape[0] if G.ndim == 2 else 0
        cols = G.shape[1] if G.ndim == 2 else 0
        object.__setattr__(self, "H", _bits(self.H, (m, cols)))
        object.__setattr__(self, "s", _bits(self.s, (m,)))
        object.__setattr__(self, "Q", g.quad_canon(np.asarray(self.Q, dtype=np.int64).reshape(m, m)))
        object.__setattr__(self, "V", _bits(self.V, (m, m_in)))
        object.__setattr__(self, "G", _bits(G, (b, cols)))
        object.__setattr__(self, "c", _bits(self.c, (b,)))
        object.__setattr__(self, "J", _bits(self.J, (b, m)))
        object.__setattr__(self, "M", g.quad_canon(np.asarray(self.M, dtype=np.int64).reshape(b, b)))
        object.__setattr__(self, "K", _bits(self.K, (b, m_in)))

    @property
    def is_zero(self) -> bool:
        return self.k is None

    def __repr__(self) -> str:
        k = "inf" if self.k is None else self.k
        return f"TDQFE(n_in={self.n_in}, n_out={self.n_out}, k={k}, checks={self.G.shape[0]})"


def td_from_std(f: StdQFE) -> TDQFE:
    m = 2 * f.n_out
    return TDQFE(
        f.n_in, f.n_out, 0, f.H, f.s, f.Q, f.V,
        np.zeros((0, f.k)), np.zeros(0), np.zeros((0, m)), np.zeros((0, 0)), np.zeros((0, 2 * f.n_in)),
    )


def td_from_check(check: PauliCheck) -> TDQFE:
    """The functional {Pi| as a channel with no output qubits."""
    b, cols = check.G.shape
    return TDQFE(
        check.n, 0, check.k, np.zeros((0, cols)), np.zeros(0), np.zeros((0, 0)), np.zeros((0, 2 * check.n)),
        check.G, check.c, np.zeros((b, 0)), check.M, check.K,
    )


def _zero_td(n_in: int, n_out: int) -> TDQFE:
    m = 2 * n_out
    return TDQFE(
        n_in, n_out, None, np.zeros((m, 0)), np.zeros(m), np.zeros((m, m)), np.zeros((m, 2 * n_in)),
        np.zeros((0, 0)), np.zeros(0), np.zeros((0, m)), np.zeros((0, 0)), np.zeros((0, 2 * n_in)),
    )


def compose_td(later: TDQFE, earlier: TDQFE) -> TDQFE:
    """Tuple of ``later o earlier`` for trace-decreasing channels.

    The top-left block of the combined check form is ``M + K Q' K^T`` where
    ``Q'`` is the quadratic part of ``earlier``: the check variables ``t`` of
    ``later`` enter ``earlier``'s form through ``u' = uV + tK``.
    """
    if earlier.n_out != later.n_in:
        raise ValueError(f"cannot compose: {earlier.n_out} output qubits into {later.n_in} input qubits")
    if later.is_zero or earlier.is_zero:
        return _zero_td(earlier.n_in, later.n_out)
    V, K = later.V, later.K
    b, b2 = later.G.shape[0], earlier.G.shape[0]
    G = np.vstack(
        [
            np.hstack([later.G, _mul(K, earlier.H)]),
            np.hstack([np.zeros((b2, later.G.shape[1]), dtype=np.uint8), earlier.G]),
        ]
    )
    J = np.vstack([later.J ^ _mul(_mul(K, earlier.Q & 1), V.T), _mul(earlier.J, V.T)])
    M = np.zeros((b + b2, b + b2), dtype=np.int64)
    M[:b, :b] = later.M + g.conjugate_quad(earlier.Q, K)
    cross = _mul(K, earlier.J.T)
    M[:b, b:] = cross
    M[b:, :b] = cross.T
    M[b:, b:] = earlier.M
    out = TDQFE(
        earlier.n_in,
        later.n_out,
        later.k + earlier.k,
        np.hstack([later.H, _mul(V, earlier.H)]),
        later.s ^ _mul(V, earlier.s),
        later.Q + g.conjugate_quad(earlier.Q, V),
        _mul(V, earlier.V),
        G,
        np.concatenate([later.c ^ _mul(K, earlier.s), earlier.c]),
        J,
        M,
        np.vstack([_mul(K, earlier.V), earlier.K]),
    )
    return td_reduce(out)


def td_reduce(f: TDQFE) -> TDQFE:
    """Eliminate check variables that act trivially, detecting the zero channel.

    Variables ``t`` with ``tG = 0`` and ``tK = 0`` only contribute the sign
    ``(-1)^(t.c + tMt/2)``; summing them either cancels the channel or yields
    a factor ``2^dim`` absorbed into ``k``.
    """
    if f.is_zero:
        return f
    b = f.G.shape[0]
    N = g.left_kernel(np.hstack([f.G, f.K])) if b else np.zeros((0, 0), dtype=np.uint8)
    d = N.shape[0]
    if d:
        Nl = N.astype(np.int64)
        diag_vals = np.einsum("ij,jk,ik->i", Nl, f.M, Nl) & 3
        if np.any(diag_vals & 1):
            raise AssertionError("odd check form on trivial variables; tuple violates the coboundary conditions")
        if np.any(_mul(N, f.c) ^ ((diag_vals >> 1) & 1).astype(np.uint8)):
            return _zero_td(f.n_in, f.n_out)
        R = _complete_basis(N)
        keep = slice(d, b)
        RG, RK, Rc, RJ = _mul(R, f.G)[keep], _mul(R, f.K)[keep], _mul(R, f.c)[keep], _mul(R, f.J)[keep]
        RM = g.conjugate_quad(f.M, R)[keep, keep]
        f = TDQFE(f.n_in, f.n_out, f.k - d, f.H, f.s, f.Q, f.V, RG, Rc, RJ, RM, RK)
    # joint column reduction of the constraint uH = tG
    stacked = np.vstack([f.H, f.G])
    cr = g.column_reduce(stacked)
    m = f.H.shape[0]
    return TDQFE(
        f.n_in, f.n_out, f.k, cr.echelon[:m], f.s, f.Q, f.V, cr.echelon[m:], f.c, f.J, f.M, f.K
    )


def _complete_basis(N: np.ndarray) -> np.ndarray:
    """Invertible matrix whose first rows are the (independent) rows of N."""
    d, b = N.shape
    rows = [r for r in N]
    for i in range(b):
        e = np.zeros(b, dtype=np.uint8)
        e[i] = 1
        if g.rank(np.array(rows + [e])) > len(rows):
            rows.append(e)
    return np.array(rows, dtype=np.uint8).reshape(b, b)


# --- circuits -----------------------------------------------------------------


def circuit_contract(qc: QuantumCircuit, strategy: str = "sequential") -> StdQFE:
    """Output-state tuple of a non-adaptive, magic-free circuit.

    Measurements act as dephasing channels and their qubits stay in the
    output.  Output qubits are the prepared, non-discarded ones in ascending
    index order.
    """
    if strategy != "sequential":
        raise ValueError(f"unknown contraction strategy {strategy!r}")
    prof = analyze(qc)
    if prof.adaptive:
        raise CircuitError("circuit_contract rejects adaptive circuits; use framed sampling")
    if any(i.kind == "PREPMAGIC_H" for i in qc.instructions):
        raise CircuitError("circuit_contract rejects magic-state preparations")
    wires: list[int] = []
    state = StdQFE(0, 0, np.zeros((0, 0)), np.zeros(0), np.zeros((0, 0)), np.zeros((0, 0)))
    for ins, live in zip(qc.instructions, live_before(qc)):
        k = ins.kind
        if k.startswith("PREP"):
            state = tensor(state, elementary_qfe(k))
            wires.append(ins.targets[0])
        elif k == "DISCARD":
            p = wires.index(ins.targets[0])
            state = compose(discard_wire(len(wires), p), state)
            wires.pop(p)
        elif k == "WH":
            for q in live:
                state = compose(embed(elementary_qfe("H"), [wires.index(q)], len(wires)), state)
        else:
            pos = [wires.index(q) for q in ins.targets]
            state = compose(embed(elementary_qfe(k), pos, len(wires)), state)
        state = normalize(state)
    order = sorted(range(len(wires)), key=lambda i: wires[i])
    return normalize(compose(permute(len(wires), order), state))


def tuple_to_json(f: StdQFE) -> dict:
    return {
        "n_in": f.n_in,
        "n_out": f.n_out,
        "H": f.H.astype(int).tolist(),
        "s": f.s.astype(int).tolist(),
        "Q": (f.Q & 3).astype(int).tolist(),
        "V": f.V.astype(int).tolist(),
    }
