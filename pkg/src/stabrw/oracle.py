"""Dense brute-force reference semantics.

Everything here works on explicit density matrices in exact arithmetic
(``stabrw.exact``) and never touches the tableau or rewriting code paths,
so it can serve as an independent check on them.  Costs are exponential;
the default qubit bound is 8.

Measurement records are kept as fully dephased wires instead of branching:
a measured qubit stays in the register as a classical register cell, and a
classically controlled gate becomes a gate coherently controlled by the parity
of those diagonal wires.  Because the record wires are diagonal this is the
same channel as branching on outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .circuit_ir import MEASURE_KINDS, QuantumCircuit, live_before
from .exact import Exact, ExactArray

__all__ = [
    "DEFAULT_BOUND",
    "OracleBoundError",
    "DenseResult",
    "pauli_dense",
    "phase_point_dense",
    "dense_run",
    "dense_state",
    "choi_dense",
    "choi_of_channel",
    "textbook_channel",
    "dense_symbol",
    "hs_inner",
]

DEFAULT_BOUND = 8


class OracleBoundError(ValueError):
    pass


def _check_bound(n: int, bound: int) -> None:
    if n > bound:
        raise OracleBoundError(f"{n} qubits exceed the dense oracle bound {bound}")


_I2 = np.eye(2, dtype=np.int64)
_X = np.array([[0, 1], [1, 0]], dtype=np.int64)
_Z = np.array([[1, 0], [0, -1]], dtype=np.int64)


def pauli_dense(u: Sequence[int], bound: int = DEFAULT_BOUND) -> ExactArray:
    """T(u) = Z(z) X(x) as a real integer matrix, qubit 0 most significant."""
    u = [int(b) & 1 for b in u]
    if len(u) % 2:
        raise ValueError("phase point must have even length")
    n = len(u) // 2
    _check_bound(n, bound)
    out = np.ones((1, 1), dtype=np.int64)
    for i in range(n):
        z, x = u[2 * i], u[2 * i + 1]
        m = (_Z if z else _I2) @ (_X if x else _I2)
        out = np.kron(out, m)
    return ExactArray.from_gaussian(out)


def _all_points(n: int) -> np.ndarray:
    m = 2 * n
    return ((np.arange(1 << m)[:, None] >> np.arange(m - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def _quad(F, u) -> int:
    F = np.asarray(F, dtype=np.int64)
    return int(u.astype(np.int64) @ F @ u.astype(np.int64)) & 3


_IPOW = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def phase_point_dense(v: Sequence[int], F=None, bound: int = DEFAULT_BOUND) -> ExactArray:
    """A^F(v) = 2^-n sum_u (-1)^(u.v) i^f(u) T(u)."""
    v = np.asarray(v, dtype=np.int64) & 1
    n = v.size // 2
    _check_bound(n, bound)
    F = np.zeros((2 * n, 2 * n), dtype=np.int64) if F is None else np.asarray(F)
    re = np.zeros((1 << n, 1 << n), dtype=np.int64)
    im = np.zeros_like(re)
    for u in _all_points(n):
        sign = -1 if int(u.astype(np.int64) @ v) & 1 else 1
        pr, pi = _IPOW[_quad(F, u)]
        T = pauli_dense(u, bound).parts[0]
        re += sign * pr * T
        im += sign * pi * T
    return ExactArray.from_gaussian(re, im, e=n)


def hs_inner(A: ExactArray, B: ExactArray) -> Exact:
    """Tr(A^dagger B)."""
    return A.conj().bilinear(B, lambda p, q: np.sum(p * q), A.parts[0].size).item()


# --- dense register -------------------------------------------------------


def _gate_matrix(kind: str) -> tuple[np.ndarray, np.ndarray, int]:
    """(real part, imaginary part, e) with U = (re + i im) / sqrt(2)^e."""
    z2 = np.zeros((2, 2), dtype=np.int64)
    if kind == "X":
        return _X, z2, 0
    if kind == "Z":
        return _Z, z2, 0
    if kind in ("H", "WH"):
        return np.array([[1, 1], [1, -1]]), z2, 1
    if kind == "S":
        return np.diag([1, 0]), np.diag([0, 1]), 0
    if kind == "SDG":
        return np.diag([1, 0]), np.diag([0, -1]), 0
    if kind == "CNOT":
        m = np.eye(4, dtype=np.int64)[[0, 1, 3, 2]]
        return m, np.zeros((4, 4), dtype=np.int64), 0
    if kind == "CZ":
        return np.diag([1, 1, 1, -1]), np.zeros((4, 4), dtype=np.int64), 0
    if kind == "SWAP":
        m = np.eye(4, dtype=np.int64)[[0, 2, 1, 3]]
        return m, np.zeros((4, 4), dtype=np.int64), 0
    raise ValueError(f"no dense unitary for {kind}")


_H_STATE = ExactArray.from_scalars(
    [Exact(2, 1, e=2), Exact(0, 1, e=2), Exact(0, 1, e=2), Exact(2, -1, e=2)], (2, 2)
)


def _prep_state(kind: str) -> ExactArray:
    if kind == "PREP0":
        return ExactArray.from_gaussian([[1, 0], [0, 0]])
    if kind == "PREP1":
        return ExactArray.from_gaussian([[0, 0], [0, 1]])
    if kind == "PREPP":
        return ExactArray.from_gaussian([[1, 1], [1, 1]], e=1)
    if kind == "PREPM":
        return ExactArray.from_gaussian([[1, -1], [-1, 1]], e=1)
    if kind == "PREPCHAOS":
        return ExactArray.from_gaussian([[1, 0], [0, 1]], e=1)
    if kind == "PREPMAGIC_I":
        return ExactArray.from_gaussian([[1, 0], [0, 1]], [[0, -1], [1, 0]], e=1)
    if kind == "PREPMAGIC_H":
        return _H_STATE
    raise ValueError(f"not a preparation: {kind}")


class _Register:
    """Density matrix over an ordered list of wires (qubit ids)."""

    def __init__(self) -> None:
        self.wires: list[int] = []
        self.rho = ExactArray.from_gaussian(np.ones((1, 1), dtype=np.int64))

    @property
    def w(self) -> int:
        return len(self.wires)

    def tensor(self) -> ExactArray:
        return self.rho.reshape((2,) * (2 * self.w)) if self.w else self.rho.reshape(())

    def _set_tensor(self, t: ExactArray) -> None:
        d = 1 << self.w
        self.rho = t.reshape(d, d)

    def add(self, q: int, sigma: ExactArray) -> None:
        self.rho = self.rho.kron(sigma)
        self.wires.append(q)

    def pos(self, q: int) -> int:
        return self.wires.index(q)

    def _left(self, t: ExactArray, M: ExactArray, axes: list[int]) -> ExactArray:
        k = len(axes)
        Mt = M.reshape((2,) * (2 * k))
        out = Mt.tensordot(t, (list(range(k, 2 * k)), axes))
        return out.moveaxis(list(range(k)), axes)

    def conjugated(self, U: ExactArray, qubits: Sequence[int], e: int) -> ExactArray:
        """U rho U^dagger / 2^e as a tensor (U given unscaled)."""
        axes = [self.pos(q) for q in qubits]
        t = self.tensor()
        t = self._left(t, U, axes)
        t = self._left(t, U.conj(), [a + self.w for a in axes])
        return t.half(e) if e else t

    def apply_unitary(self, kind: str, qubits: Sequence[int], mask: np.ndarray | None = None) -> None:
        re, im, e = _gate_matrix(kind)
        U = ExactArray.from_gaussian(re, im)
        new = self.conjugated(U, qubits, e)
        if mask is not None:
            old = self.tensor()
            a, b, ee = old._aligned(new)
            new = ExactArray(np.where(mask[None], b, a), ee)
        self._set_tensor(new)

    def dephase_z(self, q: int) -> None:
        p = self.pos(q)
        shape = [1] * (2 * self.w)
        shape[p] = 2
        shape[p + self.w] = 2
        keep = np.eye(2, dtype=np.int64).reshape(shape)
        t = self.tensor()
        self._set_tensor(ExactArray(t.parts * keep[None], t.e))

    def dephase_x(self, q: int) -> None:
        t = self.tensor()
        U = ExactArray.from_gaussian(_X)
        flipped = self.conjugated(U, [q], 0)
        self._set_tensor((t + flipped).half())

    def discard(self, q: int) -> None:
        p = self.pos(q)
        t = self.tensor()
        parts = np.trace(t.parts, axis1=p + 1, axis2=p + self.w + 1)
        self.wires.pop(p)
        self.rho = ExactArray(parts, t.e).reshape(1 << self.w, 1 << self.w)

    def parity_mask(self, record_wires: Iterable[int], const: int) -> np.ndarray:
        """Boolean tensor over the row axes: parity of the given wires xor const."""
        shape = (2,) * (2 * self.w)
        mask = np.full(shape, bool(const & 1))
        for q in record_wires:
            p = self.pos(q)
            idx = [1] * (2 * self.w)
            idx[p] = 2
            bit = np.array([False, True]).reshape(idx)
            mask = mask ^ bit
        return mask

    def reorder(self, order: Sequence[int]) -> ExactArray:
        """Density matrix with wires permuted into ``order``."""
        perm = [self.pos(q) for q in order]
        t = self.tensor()
        if not self.w:
            return self.rho
        t = t.transpose(perm + [p + self.w for p in perm])
        d = 1 << self.w
        return t.reshape(d, d)


@dataclass
class DenseResult:
    """Exact output of ``dense_run``.

    ``dist`` maps outcome tuples (ordered like ``labels``) to probabilities;
    zero-probability outcomes are omitted.  ``state`` is the final density
    matrix over ``wires`` (record wires included, ascending qubit order).
    """

    labels: tuple[str, ...]
    dist: dict[tuple[int, ...], Exact]
    state: ExactArray
    wires: tuple[int, ...]

    def fractions(self) -> dict[tuple[int, ...], Fraction]:
        return {k: v.to_fraction() for k, v in self.dist.items()}

    def prob(self, outcome: Sequence[int]) -> Exact:
        return self.dist.get(tuple(int(b) for b in outcome), Exact(0))

    def marginal(self, labels: Sequence[str]) -> dict[tuple[int, ...], Exact]:
        idx = [self.labels.index(l) for l in labels]
        out: dict[tuple[int, ...], Exact] = {}
        for k, v in self.dist.items():
            key = tuple(k[i] for i in idx)
            out[key] = out.get(key, Exact(0)) + v
        return {k: v for k, v in out.items() if v != 0}


def _simulate(qc: QuantumCircuit, inputs: Mapping[str, int] | None, bound: int, rotate_mx: bool) -> tuple[_Register, dict[str, int]]:
    _check_bound(len(qc.prepared()), bound)
    inputs = dict(inputs or {})
    unknown = set(inputs) - set(qc.inputs)
    if unknown:
        raise ValueError(f"unknown inputs {sorted(unknown)}")
    reg = _Register()
    records: dict[str, int] = {}
    lives = live_before(qc) if any(i.kind == "WH" for i in qc.instructions) else None
    for step, ins in enumerate(qc.instructions):
        k = ins.kind
        if k.startswith("PREP"):
            reg.add(ins.targets[0], _prep_state(k))
            continue
        if k in ("X", "Z", "H", "S", "SDG", "CNOT", "CZ", "SWAP", "WH"):
            mask = None
            if ins.control:
                if not rotate_mx:
                    raise ValueError("dense_state does not support classical control")
                const = sum(int(inputs.get(n, 0)) for n in ins.control if n in qc.inputs)
                wires = [records[n] for n in ins.control if n not in qc.inputs]
                mask = reg.parity_mask(wires, const)
            if k == "WH":
                for q in lives[step]:
                    reg.apply_unitary("H", [q], mask)
            else:
                reg.apply_unitary(k, ins.targets, mask)
            continue
        q = ins.targets[0]
        if k in ("DEPHZ", "MZ"):
            reg.dephase_z(q)
        elif k in ("DEPHX", "MX"):
            if rotate_mx and k == "MX":
                reg.apply_unitary("H", [q])
                reg.dephase_z(q)
            else:
                reg.dephase_x(q)
        elif k == "DISCARD":
            reg.discard(q)
        else:
            raise AssertionError(k)
        if k in MEASURE_KINDS:
            records[ins.record_label] = q
    return reg, records


def dense_run(qc: QuantumCircuit, inputs: Mapping[str, int] | None = None, bound: int = DEFAULT_BOUND) -> DenseResult:
    """Exact joint distribution of all measurement records."""
    reg, records = _simulate(qc, inputs, bound, rotate_mx=True)
    wires = tuple(sorted(reg.wires))
    state = reg.reorder(wires)
    labels = qc.labels
    rec_wires = [records[l] for l in labels]
    for q in [q for q in reg.wires if q not in rec_wires]:
        reg.discard(q)
    diag = reg.reorder(rec_wires).einsum_diag(len(rec_wires)).to_list()
    m = len(rec_wires)
    dist = {}
    for idx, p in enumerate(diag):
        if p != 0:
            dist[tuple((idx >> (m - 1 - j)) & 1 for j in range(m))] = p
    return DenseResult(labels, dist, state, wires)


def dense_state(qc: QuantumCircuit, bound: int = DEFAULT_BOUND) -> tuple[ExactArray, tuple[int, ...]]:
    """Output density matrix of a non-adaptive circuit.

    Measurements act as plain dephasing (MX dephases in the X basis and the
    wire is not rotated), matching the channel semantics of circuit
    contraction.  Wires are the prepared, non-discarded qubits ascending.
    """
    reg, _ = _simulate(qc, None, bound, rotate_mx=False)
    order = sorted(reg.wires)
    return reg.reorder(order), tuple(order)


# --- channels and Choi matrices ------------------------------------------------


def _basis_op(i: int, j: int, d: int) -> ExactArray:
    m = np.zeros((d, d), dtype=np.int64)
    m[i, j] = 1
    return ExactArray.from_gaussian(m)


def choi_of_channel(channel: Callable[[ExactArray], ExactArray], n_in: int, n_out: int) -> ExactArray:
    """sum_ij |i><j| (x) Phi(|i><j|) / 2^n_in, input factor first."""
    d_in, d_out = 1 << n_in, 1 << n_out
    acc = ExactArray.zeros((d_in * d_out, d_in * d_out))
    for i in range(d_in):
        for j in range(d_in):
            out = channel(_basis_op(i, j, d_in))
            if out.shape != (d_out, d_out):
                raise ValueError(f"channel produced shape {out.shape}, expected {(d_out, d_out)}")
            acc = acc + _basis_op(i, j, d_in).kron(out)
    return acc.half(n_in)


def _unitary_channel(kind: str) -> Callable[[ExactArray], ExactArray]:
    re, im, e = _gate_matrix(kind)
    U = ExactArray.from_gaussian(re, im)

    def apply(rho: ExactArray) -> ExactArray:
        out = U.matmul(rho).matmul(_dagger(U))
        return out.half(e) if e else out

    return apply


def _dagger(A: ExactArray) -> ExactArray:
    return A.conj().transpose([1, 0])


def textbook_channel(kind: str) -> tuple[Callable[[ExactArray], ExactArray], int, int]:
    """Dense action of an elementary operation as (map, n_in, n_out)."""
    if kind in ("X", "Z", "H", "S", "SDG"):
        return _unitary_channel(kind), 1, 1
    if kind in ("CNOT", "CZ", "SWAP"):
        return _unitary_channel(kind), 2, 2
    if kind == "I":
        return (lambda rho: rho), 1, 1
    if kind.startswith("PREP"):
        sigma = _prep_state(kind)
        return (lambda rho: sigma.scale(rho[0, 0] if rho.shape else rho.item())), 0, 1
    if kind in ("DEPHZ", "MZ"):
        P0, P1 = ExactArray.from_gaussian(np.diag([1, 0])), ExactArray.from_gaussian(np.diag([0, 1]))
        return (lambda rho: P0.matmul(rho).matmul(P0) + P1.matmul(rho).matmul(P1)), 1, 1
    if kind in ("DEPHX", "MX"):
        X = ExactArray.from_gaussian(_X)
        return (lambda rho: (rho + X.matmul(rho).matmul(X)).half()), 1, 1
    if kind == "DISCARD":
        return (lambda rho: ExactArray.from_scalar(rho.trace(), (1, 1))), 1, 0
    raise ValueError(f"no textbook channel for {kind}")


def _phase(k: int) -> Exact:
    return [Exact(1), Exact(0, 0, 1), Exact(-1), Exact(0, 0, -1)][k & 3]


def choi_dense(f, bound: int = 4) -> ExactArray:
    """Choi matrix rebuilt from a quadratic-form tuple by direct summation.

    ``f`` needs attributes ``n_in, n_out, H, s, Q, V``; trace-decreasing
    tuples additionally carry ``k, G, c, J, M, K`` (``k is None`` for the zero
    channel).  The sum runs over all ``(u, t)`` with ``uH = tG``.
    """
    n_in, n_out = f.n_in, f.n_out
    _check_bound(n_in + n_out, bound)
    d = 1 << (n_in + n_out)
    td = hasattr(f, "G")
    if td and f.k is None:
        return ExactArray.zeros((d, d))
    H = np.asarray(f.H, dtype=np.int64)
    H = H.reshape(2 * n_out, H.shape[-1] if H.ndim == 2 else 0)
    s = np.asarray(f.s, dtype=np.int64).reshape(2 * n_out)
    Q = np.asarray(f.Q, dtype=np.int64).reshape(2 * n_out, 2 * n_out)
    V = np.asarray(f.V, dtype=np.int64).reshape(2 * n_out, 2 * n_in)
    if td:
        G = np.asarray(f.G, dtype=np.int64)
        b = G.shape[0]
        G = G.reshape(b, H.shape[1])
        c = np.asarray(f.c, dtype=np.int64).reshape(b)
        J = np.asarray(f.J, dtype=np.int64).reshape(b, 2 * n_out)
        M = np.asarray(f.M, dtype=np.int64).reshape(b, b)
        K = np.asarray(f.K, dtype=np.int64).reshape(b, 2 * n_in)
        k = f.k
    else:
        b, k = 0, 0
        G = np.zeros((0, H.shape[1]), dtype=np.int64)
        c = np.zeros(0, dtype=np.int64)
        J = np.zeros((0, 2 * n_out), dtype=np.int64)
        M = np.zeros((0, 0), dtype=np.int64)
        K = np.zeros((0, 2 * n_in), dtype=np.int64)
    us = _all_points(n_out).astype(np.int64)
    ts = ((np.arange(1 << b)[:, None] >> np.arange(b)[None, :]) & 1).astype(np.int64)
    re = np.zeros((d, d), dtype=np.int64)
    im = np.zeros_like(re)
    for u in us:
        uH = (u @ H) & 1
        q_u = (2 * int(u @ s) + int(u @ Q @ u)) & 3
        for t in ts:
            if not np.array_equal(uH, (t @ G) & 1):
                continue
            lin = (int(t @ c) + int(t @ J @ u)) & 1
            ph = (q_u + 2 * lin + int(t @ M @ t)) & 3
            w = ((u @ V) ^ (t @ K)) & 1 if n_in else np.zeros(0, dtype=np.int64)
            T = np.kron(pauli_dense(w).parts[0], pauli_dense(u).parts[0]) if (n_in or n_out) else np.ones((1, 1), dtype=np.int64)
            pr, pi = _IPOW[ph]
            re += pr * T
            im += pi * T
    return ExactArray.from_gaussian(re, im, e=n_in + n_out + k)


def dense_symbol(rho: ExactArray, n: int, F=None) -> dict[tuple[int, ...], Exact]:
    """Framed symbol p^F(v) = 2^-2n sum_u (-1)^(u.v) i^-f(u) Tr(T(u)^dagger rho)."""
    F = np.zeros((2 * n, 2 * n), dtype=np.int64) if F is None else np.asarray(F, dtype=np.int64)
    coeff = {}
    for u in _all_points(n):
        T = pauli_dense(u)
        coeff[tuple(int(b) for b in u)] = hs_inner(T, rho) * _phase(-_quad(F, u))
    out: dict[tuple[int, ...], Exact] = {}
    for v in _all_points(n):
        acc = Exact(0)
        for u, cu in coeff.items():
            if cu == 0:
                continue
            sign = sum(a * b for a, b in zip(u, v.tolist())) & 1
            acc = acc - cu if sign else acc + cu
        out[tuple(int(b) for b in v)] = acc.half(2 * n)
    return out
