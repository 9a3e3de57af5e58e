"""Reference frames and framed simulation of non-CSS stabilizer circuits.

A frame is a Z4 quadratic form ``f(u) = u F u^T`` on the phase space of the
full register.  The classical bits of the rewritten circuit carry the state's
framed symbol; gates update the frame by ``F -> Q + V F V^T``.  When a qubit
is measured, the frame is folded back onto the remaining qubits and the
reported bit picks up the sign ``i^(F_cc)`` of the measured coordinate.

The executor is vectorized over samples.  Samples share a frame context until
a controlled non-Pauli gate fires for only some of them, at which point the
context splits.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import gf2core as g
from . import oracle
from .circuit_ir import (
    CircuitError,
    Instruction,
    QuantumCircuit,
    analyze,
    desugar_magic_i,
    live_before,
    to_rebit,
)
from .classical_sim import SampleBatch, random_bits
from .exact import Exact
from .qfe import StdQFE, elementary_qfe, embed
from .rewriter import measured_bit, rewrite_instruction, z_bit, x_bit

__all__ = [
    "FrameError",
    "FramedRun",
    "QuasiDistribution",
    "frame_update",
    "frame_correct",
    "measurement_correction",
    "framed_run",
    "framed_distribution",
    "state_symbol",
    "negativity",
    "condition_on_record",
    "magic_estimate",
    "magic_distribution",
    "MagicEstimate",
    "H_SYMBOL",
    "H_NEGATIVITY",
    "hoeffding_samples",
]


class FrameError(RuntimeError):
    """The tracked frame is inconsistent with the tracked state support."""


def frame_update(F, gate: StdQFE) -> np.ndarray:
    """Frame after ``gate``: ``Q + V F V^T``."""
    F = np.asarray(F, dtype=np.int64)
    if F.shape != (2 * gate.n_in, 2 * gate.n_in):
        raise ValueError(f"frame of shape {F.shape} does not fit a gate on {gate.n_in} qubits")
    return g.quad_canon(gate.Q + g.conjugate_quad(F, gate.V))


def frame_correct(F, H, N, M) -> np.ndarray:
    """``F + H N^T + N H^T + H M H^T``; leaves symbols of states with ``uH = 0`` unchanged."""
    F = np.asarray(F, dtype=np.int64)
    H = np.asarray(H, dtype=np.int64)
    N = np.asarray(N, dtype=np.int64)
    M = np.asarray(M, dtype=np.int64)
    if H.shape[0] != F.shape[0] or N.shape != H.shape or M.shape != (H.shape[1], H.shape[1]):
        raise ValueError("dimension mismatch in frame correction")
    return g.quad_canon(F + H @ N.T + N @ H.T + H @ M @ H.T)


# --- register-level channels ---------------------------------------------------


def _coords(q: int) -> list[int]:
    return [2 * q, 2 * q + 1]


def _reset(n: int, q: int, Hcols: np.ndarray) -> StdQFE:
    """Throw qubit ``q`` away and put a fresh state with parity check ``Hcols`` there."""
    m = 2 * n
    V = np.eye(m, dtype=np.uint8)
    V[_coords(q), :] = 0
    H = np.zeros((m, Hcols.shape[1]), dtype=np.uint8)
    H[_coords(q)] = Hcols
    return StdQFE(n, n, H, np.zeros(m), np.zeros((m, m)), V)


def _register_op(ins: Instruction, n: int, live: Sequence[int]) -> list[StdQFE]:
    k = ins.kind
    if k == "PREPMAGIC_H":
        return [_reset(n, ins.targets[0], np.zeros((2, 0), dtype=np.uint8))]
    if k.startswith("PREP"):
        return [_reset(n, ins.targets[0], elementary_qfe(k).H)]
    if k == "DISCARD":
        return [_reset(n, ins.targets[0], np.eye(2, dtype=np.uint8))]
    if k == "WH":
        return [embed(elementary_qfe("H"), [q], n) for q in live]
    return [embed(elementary_qfe(k), list(ins.targets), n)]


@dataclass
class _Context:
    F: np.ndarray
    H: np.ndarray
    mask: np.ndarray

    def key(self) -> tuple[bytes, bytes, tuple[int, ...]]:
        return (self.F.tobytes(), self.H.tobytes(), self.H.shape)

    def apply(self, op: StdQFE) -> "_Context":
        F = frame_update(self.F, op)
        H = g.column_reduce(np.hstack([op.H, (op.V.astype(np.int64) @ self.H) & 1])).echelon
        return _Context(F, H, self.mask)


def measurement_correction(F, H, c: int, q: int) -> tuple[int, np.ndarray]:
    """Sign and frame for reading coordinate ``c`` of qubit ``q``.

    ``H`` is the state's parity check after dephasing.  Returns ``(a, F')``:
    the reported bit is the classical bit plus ``a / 2``, and ``F'`` is the
    frame on the remaining qubits (zero on ``q``).  Three situations:

    * ``e_c`` is a stabilizer direction: ``F_cc`` must be even, it is the sign.
    * ``e_c + w`` is one for some ``w`` on other qubits, but ``e_c`` is not:
      the outcome is random and correlated with ``w``; the part of ``f`` on
      ``e_c`` is moved onto ``w`` through a functional ``l`` dual to ``w``.
    * no stabilizer touches ``c``: the outcome is independent noise.
    """
    F = np.asarray(F, dtype=np.int64)
    K = g.left_kernel(H)
    qc = _coords(q)
    Fcc = int(F[c, c]) & 3
    hit = np.flatnonzero(K[:, c]) if K.size else np.array([], dtype=int)

    def folded(Fx):
        out = Fx.copy()
        out[qc, :] = 0
        out[:, qc] = 0
        return g.quad_canon(out)

    if hit.size == 0:
        return (Fcc if Fcc % 2 == 0 else 0), folded(F)
    u1 = K[hit[0]].copy()
    K0 = K[[i for i in range(K.shape[0]) if i != hit[0]]].copy()
    K0[K0[:, c] == 1] ^= u1
    w1 = u1.copy()
    w1[c] = 0
    if np.any(w1[qc]) or (K0.size and np.any(K0[:, qc])):
        raise FrameError("state support still touches the measured qubit after dephasing")
    in_span = not w1.any() or (K0.shape[0] and g.rank(np.vstack([K0, w1])) == g.rank(K0))
    if in_span:
        if Fcc % 2:
            raise FrameError(f"odd frame value {Fcc} on a deterministic measured coordinate")
        cross = (F[c].astype(np.int64) @ K0.T.astype(np.int64)) & 1 if K0.size else np.zeros(0)
        if np.any(cross):
            raise FrameError("frame couples the measured coordinate to the remaining support")
        return Fcc, folded(F)
    a = Fcc if Fcc % 2 == 0 else 0
    target = np.zeros(K0.shape[0] + 1, dtype=np.uint8)
    target[-1] = 1
    ell = g.solve_left(np.vstack([K0, w1]).T, target)
    if ell is None:
        raise FrameError("no functional separates the correlated direction")
    ell = ell.astype(np.int64)
    ell[qc] = 0
    r = (F[c] & 1).astype(np.int64)
    r[qc] = 0
    delta = (Fcc - a) * np.outer(ell, ell) + np.outer(ell, r) + np.outer(r, ell)
    return a, folded(F + delta)


def condition_on_record(H, q: int) -> np.ndarray:
    """Parity check of the support once the reading of qubit ``q`` is on record.

    Every stabilizer direction ``e_c + w`` of the dephased state becomes ``w``:
    the classical record fixes its parity, so later readings of ``w`` stay
    correlated with it.  The result has no support on ``q``.
    """
    K = g.left_kernel(H)
    if K.size:
        K = K.copy()
        K[:, _coords(q)] = 0
        K = K[np.any(K, axis=1)]
    if not K.size:
        return np.eye(np.asarray(H).shape[0], dtype=np.uint8)
    return g.column_reduce(g.left_kernel(K.T).T).echelon


# --- executor -------------------------------------------------------------------


@dataclass(frozen=True)
class FramedRun:
    samples: SampleBatch
    frame_trace: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out = self.samples.to_json()
        out["frame_trace"] = [
            {"position": t["position"], "label": t["label"], "frames": [F.astype(int).tolist() for F in t["frames"]]}
            for t in self.frame_trace
        ]
        return out


def _prepare(qc: QuantumCircuit, rebit: bool) -> QuantumCircuit:
    qc = desugar_magic_i(qc)
    if rebit:
        qc = to_rebit(qc)
    return qc


def count_random(qc: QuantumCircuit) -> int:
    """Random bits consumed by the framed executor, in program order."""
    total = 0
    for ins, live in zip(qc.instructions, live_before(qc)):
        if ins.kind == "PREPMAGIC_H":
            continue
        total += sum(c.kind == "SETRANDOM" for c in rewrite_instruction(ins, (), live))
    return total


def _parity(bits: np.ndarray, idx: Sequence[int]) -> np.ndarray:
    return np.bitwise_xor.reduce(bits[:, list(idx)], axis=1).astype(bool)


def _execute(
    qc: QuantumCircuit,
    rand: np.ndarray,
    inputs: Mapping[str, int] | None = None,
    magic_points: np.ndarray | None = None,
    trace: list | None = None,
) -> np.ndarray:
    n = qc.n_qubits
    S = rand.shape[0]
    where = {name: 2 * n + i for i, name in enumerate(qc.inputs)}
    inputs = dict(inputs or {})
    bits = np.zeros((S, 2 * n + len(qc.inputs)), dtype=np.uint8)
    for name, b in where.items():
        bits[:, b] = int(inputs.get(name, 0)) & 1
    contexts = [_Context(np.zeros((2 * n, 2 * n), dtype=np.int64), np.eye(2 * n, dtype=np.uint8), np.ones(S, dtype=bool))]
    r = 0
    mag = 0
    outputs: list[int] = []
    for pos, (ins, live) in enumerate(zip(qc.instructions, live_before(qc))):
        k = ins.kind
        ctl_bits = tuple(where[name] for name in ins.control)
        fire = _parity(bits, ctl_bits) if ctl_bits else None
        # classical part
        if k == "PREPMAGIC_H":
            q = ins.targets[0]
            if magic_points is None:
                raise CircuitError("magic-state preparation needs sampled phase points; use magic_estimate")
            bits[:, z_bit(q)] = magic_points[:, 2 * mag]
            bits[:, x_bit(q)] = magic_points[:, 2 * mag + 1]
            mag += 1
        else:
            for cins in rewrite_instruction(ins, ctl_bits, live):
                r = _apply_classical(bits, cins, rand, r, fire)
        # frame part
        if k in ("X", "Z"):
            pass
        elif k in ("MZ", "MX"):
            q = ins.targets[0]
            c = measured_bit(ins)
            (op,) = _register_op(ins, n, live)
            retire = _reset(n, q, np.eye(2, dtype=np.uint8))
            new_contexts = []
            frames = []
            for ctx in contexts:
                ctx = ctx.apply(op)
                a, F = measurement_correction(ctx.F, ctx.H, c, q)
                if a == 2:
                    bits[ctx.mask, c] ^= 1
                ctx = _Context(F, condition_on_record(ctx.H, q), ctx.mask).apply(retire)
                new_contexts.append(ctx)
                frames.append(ctx.F)
            contexts = _merge(new_contexts)
            outputs.append(c)
            where[ins.record_label] = c
            if trace is not None:
                trace.append({"position": pos, "label": ins.record_label, "frames": frames})
        else:
            ops = _register_op(ins, n, live)
            new_contexts = []
            for ctx in contexts:
                upd = ctx
                for op in ops:
                    upd = upd.apply(op)
                if fire is None:
                    new_contexts.append(upd)
                    continue
                on = ctx.mask & fire
                off = ctx.mask & ~fire
                if on.any():
                    new_contexts.append(_Context(upd.F, upd.H, on))
                if off.any():
                    new_contexts.append(_Context(ctx.F, ctx.H, off))
            contexts = _merge(new_contexts)
    if r != rand.shape[1]:
        raise RuntimeError("random bit accounting mismatch")
    return bits[:, outputs] if outputs else np.zeros((S, 0), dtype=np.uint8)


def _merge(contexts: list[_Context]) -> list[_Context]:
    seen: dict[tuple, _Context] = {}
    for ctx in contexts:
        key = ctx.key()
        if key in seen:
            seen[key].mask = seen[key].mask | ctx.mask
        else:
            seen[key] = _Context(ctx.F, ctx.H, ctx.mask.copy())
    return list(seen.values())


def _apply_classical(bits: np.ndarray, ins, rand: np.ndarray, r: int, fire) -> int:
    k = ins.kind
    a = ins.targets[0]
    if k == "SETRANDOM":
        bits[:, a] = rand[:, r]
        return r + 1
    if k == "SETCONST":
        bits[:, a] = ins.value
    elif k == "FORGET":
        bits[:, a] = 0
    elif k == "NOT":
        bits[:, a] ^= 1 if fire is None else fire.astype(np.uint8)
    elif k == "CXOR":
        b = ins.targets[1]
        bits[:, b] ^= bits[:, a] if fire is None else bits[:, a] & fire
    elif k == "SWAPBITS":
        b = ins.targets[1]
        t = bits[:, a] ^ bits[:, b]
        if fire is not None:
            t &= fire
        bits[:, a] ^= t
        bits[:, b] ^= t
    return r


def framed_run(
    qc: QuantumCircuit,
    n_samples: int,
    seed: int = 0,
    inputs: Mapping[str, int] | None = None,
    rebit: bool = False,
) -> FramedRun:
    """Sample a stabilizer circuit through the framed classical dynamics."""
    if any(i.kind == "PREPMAGIC_H" for i in qc.instructions):
        raise CircuitError("PREPMAGIC_H needs quasiprobability sampling; use magic_estimate")
    qc = _prepare(qc, rebit)
    rand = random_bits(seed, n_samples, count_random(qc))
    trace: list = []
    rows = _execute(qc, rand, inputs, trace=trace)
    return FramedRun(SampleBatch(qc.labels, rows, seed, "framed"), trace)


def _enumerate(m: int) -> np.ndarray:
    return ((np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1).astype(np.uint8)


def framed_distribution(
    qc: QuantumCircuit,
    inputs: Mapping[str, int] | None = None,
    rebit: bool = False,
    max_random: int = 20,
) -> dict[tuple[int, ...], Fraction]:
    """Exact output distribution: the executor run on every random-bit string."""
    qc = _prepare(qc, rebit)
    m = count_random(qc)
    if m > max_random:
        raise ValueError(f"{m} random bits exceed the enumeration bound {max_random}")
    rows = _execute(qc, _enumerate(m), inputs)
    cnt = Counter(tuple(int(b) for b in row) for row in rows)
    return {y: Fraction(c, 1 << m) for y, c in cnt.items()}


# --- symbols and magic states ----------------------------------------------------


@dataclass(frozen=True)
class QuasiDistribution:
    values: dict[tuple[int, ...], Exact]

    def total(self) -> Exact:
        acc = Exact(0)
        for v in self.values.values():
            acc = acc + v
        return acc

    def negativity(self) -> Exact:
        return negativity(self)

    def __getitem__(self, v) -> Exact:
        return self.values[tuple(v)]


def state_symbol(qc: QuantumCircuit, F=None, bound: int = oracle.DEFAULT_BOUND) -> QuasiDistribution:
    """Framed symbol of the circuit's output state (dense, small systems only).

    Coordinates follow the final wires in ascending qubit order.
    """
    rho, wires = oracle.dense_state(qc, bound)
    n = len(wires)
    return QuasiDistribution(oracle.dense_symbol(rho, n, F))


def negativity(p: QuasiDistribution) -> Exact:
    acc = Exact(0)
    for v in p.values.values():
        acc = acc + abs(v)
    return acc


H_SYMBOL = {
    (0, 0): Exact(1, 1, e=2),
    (0, 1): Exact(1, e=2),
    (1, 0): Exact(1, e=2),
    (1, 1): Exact(1, -1, e=2),
}
H_NEGATIVITY = Exact(1, 1, e=1)


def hoeffding_samples(neg: float, epsilon: float, p_fail: float) -> int:
    """Samples for an estimate within ``epsilon`` of the mean with prob. ``1 - p_fail``.

    Each sample is a sign-weighted variable in ``[-neg, neg]``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < p_fail < 1:
        raise ValueError("p_fail must be in (0, 1)")
    return math.ceil(2 * neg * neg * math.log(2 / p_fail) / (epsilon * epsilon))


@dataclass(frozen=True)
class MagicEstimate:
    estimate: float
    n_samples: int
    negativity: float
    signed_hits: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "n_samples": self.n_samples, "negativity": self.negativity}


_H_POINTS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _sample_magic(seed: int, n_samples: int, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Phase points drawn from ``|p_H| / N_H`` for ``t`` magic qubits, with signs."""
    probs = np.array([float(abs(H_SYMBOL[v])) for v in _H_POINTS]) / float(H_NEGATIVITY)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    pts = np.zeros((n_samples, 2 * t), dtype=np.uint8)
    sign = np.ones(n_samples, dtype=np.int64)
    for i in range(n_samples):
        gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 1, i]))
        draws = np.searchsorted(cdf, gen.random(t), side="right")
        for j, d in enumerate(draws):
            z, x = _H_POINTS[min(int(d), 3)]
            pts[i, 2 * j], pts[i, 2 * j + 1] = z, x
            if (z, x) == (1, 1):
                sign[i] = -sign[i]
    return pts, sign


def _execute_magic(qc, rand, inputs, pts):
    try:
        return _execute(qc, rand, inputs, magic_points=pts)
    except FrameError as exc:
        raise CircuitError(
            "a magic-state qubit reaches a measurement with a frame that is odd or coupled to "
            f"other qubits; the sign-weighted sampler does not branch on such frames ({exc})"
        ) from None


def magic_estimate(
    qc: QuantumCircuit,
    target_label: str,
    epsilon: float = 0.02,
    p_fail: float = 1e-3,
    seed: int = 0,
    target_value: int = 0,
    n_samples: int | None = None,
) -> MagicEstimate:
    """Quasiprobability estimate of ``P(target_label == target_value)``.

    Magic qubits start at phase points drawn from ``|p_H|``; each trajectory
    is weighted by the product of signs times the total negativity.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if analyze(qc).adaptive:
        raise CircuitError("magic_estimate rejects adaptive circuits")
    if target_label not in qc.labels:
        raise CircuitError(f"unknown target label {target_label!r}")
    qc = desugar_magic_i(qc)
    t = sum(i.kind == "PREPMAGIC_H" for i in qc.instructions)
    neg = float(H_NEGATIVITY) ** t
    N = n_samples if n_samples is not None else hoeffding_samples(neg, epsilon, p_fail)
    pts, sign = _sample_magic(seed, N, t)
    rand = random_bits(seed, N, count_random(qc))
    rows = _execute_magic(qc, rand, None, pts)
    col = qc.labels.index(target_label)
    hit = rows[:, col] == (target_value & 1)
    signed = int(np.sum(sign[hit]))
    return MagicEstimate(neg * signed / N, N, neg, signed)


def exact_magic_negativity(t: int) -> Exact:
    out = Exact(1)
    for _ in range(t):
        out = out * H_NEGATIVITY
    return out



def magic_distribution(
    qc: QuantumCircuit,
    inputs: Mapping[str, int] | None = None,
    max_random: int = 16,
) -> dict[tuple[int, ...], Exact]:
    """Exact output distribution of a circuit with magic-state inputs.

    Sums the framed executor over every phase-point assignment of the magic
    qubits, weighted by the symbol of ``|H>``, and over every random-bit
    string.  Negative weights cancel, so the result is a true distribution.
    """
    qc = desugar_magic_i(qc)
    t = sum(i.kind == "PREPMAGIC_H" for i in qc.instructions)
    m = count_random(qc)
    if m + 2 * t > max_random:
        raise ValueError(f"{m + 2 * t} enumerated bits exceed the bound {max_random}")
    pts = _enumerate(2 * t)
    rand = _enumerate(m)
    P, R = len(pts), len(rand)
    rows = _execute_magic(qc, np.tile(rand, (P, 1)), inputs, np.repeat(pts, R, axis=0))
    weights = []
    for v in pts:
        w = Exact(1)
        for j in range(t):
            w = w * H_SYMBOL[(int(v[2 * j]), int(v[2 * j + 1]))]
        weights.append(w.half(m))
    out: dict[tuple[int, ...], Exact] = {}
    for i, row in enumerate(rows):
        key = tuple(int(b) for b in row)
        out[key] = out.get(key, Exact(0)) + weights[i // R]
    return {k: v for k, v in out.items() if v != 0}
