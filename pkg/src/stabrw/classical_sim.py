"""Simulation of rewritten classical circuits.

Four routes to the same output distribution:

* Method I, ``sample_direct``: run the Boolean gates on every sample.
* Method II, ``compile_affine``: outputs as an affine map ``v -> A v + s`` of
  the random bits.
* Method III, ``code_form``: generator and parity-check matrices of the
  affine output code, for sampling and exact outcome probabilities.
* Method IV, ``stepwise_code_form``: the same code, eliminating dead random
  variables after every step instead of once at the end.

Random bit ``j`` of sample ``i`` is drawn from a Philox stream keyed by the
seed with counter ``i``, so batches can be split across workers freely.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import gf2core as g
from ._backend import run_program
from .rewriter import ClassicalCircuit, ClassicalInstruction, input_vector

__all__ = [
    "AffineMap",
    "CodeForm",
    "SampleBatch",
    "NonAffineError",
    "OPCODES",
    "encode",
    "random_bits",
    "execute",
    "sample_direct",
    "snapshots",
    "compile_affine",
    "sample_affine",
    "code_form",
    "stepwise_code_form",
    "strong_probability",
    "sample_from_code",
    "exact_distribution",
]

OPCODES = {"SETCONST": 0, "SETRANDOM": 1, "NOT": 2, "CXOR": 3, "SWAPBITS": 4, "FORGET": 5}


class NonAffineError(ValueError):
    """Raised by Methods II-IV on controls they cannot express."""

    def __init__(self, instruction: ClassicalInstruction, position: int):
        self.instruction = instruction
        self.position = position
        super().__init__(f"instruction {position} ({instruction.text()}) is not affine in the random bits")


@dataclass(frozen=True)
class SampleBatch:
    labels: tuple[str, ...]
    rows: np.ndarray
    seed: int
    method: str

    def counts(self) -> Counter:
        return Counter(tuple(int(b) for b in r) for r in self.rows)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "samples": self.rows.astype(int).tolist(),
            "seed": self.seed,
            "method": self.method,
        }


def encode(cc: ClassicalCircuit) -> tuple[np.ndarray, np.ndarray]:
    """Flat program rows ``[op, a, b, ctrl_offset, ctrl_len]`` plus control bits."""
    L = len(cc.instructions)
    prog = np.zeros((L, 5), dtype=np.int32)
    ctrl: list[int] = []
    for i, ins in enumerate(cc.instructions):
        a = ins.targets[0]
        b = ins.value if ins.kind == "SETCONST" else (ins.targets[1] if len(ins.targets) > 1 else 0)
        prog[i] = (OPCODES[ins.kind], a, b, len(ctrl), len(ins.control))
        ctrl.extend(ins.control)
    return prog, np.asarray(ctrl, dtype=np.int32)


def random_bits(seed: int, n_samples: int, m: int, start: int = 0) -> np.ndarray:
    """Random bits of samples ``start .. start+n_samples-1``, shape ``(n, m)``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    out = np.empty((n_samples, m), dtype=np.uint8)
    for i in range(n_samples):
        gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, start + i]))
        out[i] = gen.integers(0, 2, size=m, dtype=np.uint8)
    return out


def execute(
    cc: ClassicalCircuit,
    rand: np.ndarray,
    inputs: Mapping[str, int] | None = None,
    program: tuple[np.ndarray, np.ndarray] | None = None,
    runner=None,
) -> np.ndarray:
    """Run the circuit once per row of ``rand``; returns output bits ``(n, k)``."""
    prog, ctrl = program if program is not None else encode(cc)
    rand = np.ascontiguousarray(rand, dtype=np.uint8)
    n = rand.shape[0]
    if rand.shape[1] != cc.n_random:
        raise ValueError(f"expected {cc.n_random} random bits per sample, got {rand.shape[1]}")
    bits = np.tile(input_vector(cc, inputs), (n, 1))
    (runner or run_program)(prog, ctrl, rand, bits)
    idx = np.array([b for _, b in cc.outputs], dtype=np.int64)
    return bits[:, idx] if idx.size else np.zeros((n, 0), dtype=np.uint8)


def snapshots(
    cc: ClassicalCircuit,
    rand: np.ndarray,
    cuts: Sequence[int],
    inputs: Mapping[str, int] | None = None,
) -> list[np.ndarray]:
    """Full bit registers after the first ``c`` instructions, for each ``c`` in ``cuts``.

    Hidden bits are included, so relations between intermediate values can
    be checked on each trajectory.  Returns arrays of shape ``(n, n_bits)``.
    """
    prog, ctrl = encode(cc)
    rand = np.ascontiguousarray(rand, dtype=np.uint8)
    n = rand.shape[0]
    bits = np.tile(input_vector(cc, inputs), (n, 1))
    is_rand = prog[:, 0] == OPCODES["SETRANDOM"]
    out: dict[int, np.ndarray] = {}
    done = 0
    for c in sorted(set(cuts)):
        if not 0 <= c <= len(prog):
            raise ValueError(f"cut {c} outside 0..{len(prog)}")
        r0, r1 = int(is_rand[:done].sum()), int(is_rand[:c].sum())
        run_program(np.ascontiguousarray(prog[done:c]), ctrl, np.ascontiguousarray(rand[:, r0:r1]), bits)
        done = c
        out[c] = bits.copy()
    return [out[c] for c in cuts]


def sample_direct(
    cc: ClassicalCircuit,
    n_samples: int,
    seed: int = 0,
    inputs: Mapping[str, int] | None = None,
) -> SampleBatch:
    """Method I.  Handles arbitrary classical control."""
    rand = random_bits(seed, n_samples, cc.n_random)
    return SampleBatch(cc.labels, execute(cc, rand, inputs), seed, "I")


@dataclass(frozen=True)
class AffineMap:
    """Outputs ``A v + shift`` of the random-bit vector ``v``."""

    A: g.BitMatrix
    shift: np.ndarray

    @property
    def k(self) -> int:
        return self.A.nrows

    @property
    def m(self) -> int:
        return self.A.ncols

    def __call__(self, v: Sequence[int]) -> np.ndarray:
        return (np.array(self.A.matvec(v), dtype=np.uint8).reshape(self.k) ^ self.shift).astype(np.uint8)


def _affine_rows(cc: ClassicalCircuit, inputs: Mapping[str, int] | None):
    """Track every bit as (mask over random bits, constant)."""
    mask = [0] * cc.n_bits
    const = [int(b) for b in input_vector(cc, inputs)]
    r = 0
    for pos, ins in enumerate(cc.instructions):
        k = ins.kind
        a = ins.targets[0]
        if ins.control and k != "NOT":
            raise NonAffineError(ins, pos)
        if k == "SETRANDOM":
            mask[a], const[a] = 1 << r, 0
            r += 1
        elif k == "SETCONST":
            mask[a], const[a] = 0, ins.value & 1
        elif k == "FORGET":
            mask[a], const[a] = 0, 0
        elif k == "NOT":
            if ins.control:
                for c in ins.control:
                    mask[a] ^= mask[c]
                    const[a] ^= const[c]
            else:
                const[a] ^= 1
        elif k == "CXOR":
            b = ins.targets[1]
            mask[b] ^= mask[a]
            const[b] ^= const[a]
        elif k == "SWAPBITS":
            b = ins.targets[1]
            mask[a], mask[b] = mask[b], mask[a]
            const[a], const[b] = const[b], const[a]
    return mask, const, r


def compile_affine(cc: ClassicalCircuit, inputs: Mapping[str, int] | None = None) -> AffineMap:
    """Method II.  Only controlled NOTs are allowed (they stay affine)."""
    mask, const, m = _affine_rows(cc, inputs)
    idx = [b for _, b in cc.outputs]
    A = g.BitMatrix(len(idx), m, [mask[b] for b in idx])
    shift = np.array([const[b] for b in idx], dtype=np.uint8)
    return AffineMap(A, shift)


def sample_affine(am: AffineMap, labels: Sequence[str], n_samples: int, seed: int = 0) -> SampleBatch:
    """Method II sampling; uses the same random stream as Method I."""
    rand = random_bits(seed, n_samples, am.m)
    A = am.A.to_array().astype(np.int64)
    rows = ((rand.astype(np.int64) @ A.T) & 1).astype(np.uint8) ^ am.shift
    return SampleBatch(tuple(labels), rows, seed, "II")


@dataclass(frozen=True)
class CodeForm:
    """Affine output code ``{G u + shift} = {y : P y = c}``.

    ``G`` is ``k x r`` with independent columns and ``P`` is ``(k-r) x k``.
    """

    G: np.ndarray
    shift: np.ndarray
    P: np.ndarray
    c: np.ndarray

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def r(self) -> int:
        return self.G.shape[1]

    def contains(self, y: Sequence[int]) -> bool:
        y = g.as_bits(y, 1)
        return not np.any(((self.P.astype(np.int64) @ y) & 1) ^ self.c)


def _code_from_generators(A: np.ndarray, shift: np.ndarray) -> CodeForm:
    k = A.shape[0]
    cr = g.column_reduce(A.reshape(k, -1))
    P = g.left_kernel(A.reshape(k, -1)) if k else np.zeros((0, 0), dtype=np.uint8)
    c = ((P.astype(np.int64) @ shift.astype(np.int64)) & 1).astype(np.uint8) if k else np.zeros(0, dtype=np.uint8)
    return CodeForm(cr.echelon.reshape(k, cr.rank), shift.astype(np.uint8), P.reshape(k - cr.rank, k), c)


def code_form(am: AffineMap) -> CodeForm:
    """Method III: column elimination of ``A``."""
    return _code_from_generators(am.A.to_array(), np.asarray(am.shift, dtype=np.uint8))


def stepwise_code_form(cc: ClassicalCircuit, inputs: Mapping[str, int] | None = None) -> CodeForm:
    """Method IV: keep the random variables reduced while the circuit runs.

    Bits are affine in a pool of live variables.  After every step that
    introduces or kills a variable, the live bit rows are column-reduced: an
    invertible change of uniform variables keeps the joint distribution, and
    variables that no bit depends on any more are dropped.  The pool never
    exceeds the number of tracked bits.
    """
    mask = [0] * cc.n_bits
    const = [int(b) for b in input_vector(cc, inputs)]
    width = 0
    for pos, ins in enumerate(cc.instructions):
        k = ins.kind
        a = ins.targets[0]
        if ins.control and k != "NOT":
            raise NonAffineError(ins, pos)
        changed = False
        if k == "SETRANDOM":
            mask[a], const[a] = 1 << width, 0
            width += 1
            changed = True
        elif k == "SETCONST":
            mask[a], const[a] = 0, ins.value & 1
            changed = True
        elif k == "FORGET":
            mask[a], const[a] = 0, 0
            changed = True
        elif k == "NOT":
            if ins.control:
                for c in ins.control:
                    mask[a] ^= mask[c]
                    const[a] ^= const[c]
            else:
                const[a] ^= 1
        elif k == "CXOR":
            b = ins.targets[1]
            mask[b] ^= mask[a]
            const[b] ^= const[a]
        elif k == "SWAPBITS":
            b = ins.targets[1]
            mask[a], mask[b] = mask[b], mask[a]
            const[a], const[b] = const[b], const[a]
        if changed and width:
            mask, width = _reduce_pool(mask, width)
    idx = [b for _, b in cc.outputs]
    A = g.BitMatrix(len(idx), width, [mask[b] for b in idx]).to_array()
    shift = np.array([const[b] for b in idx], dtype=np.uint8)
    return _code_from_generators(A, shift)


def _reduce_pool(mask: list[int], width: int) -> tuple[list[int], int]:
    """Column-reduce the bit rows over the variable pool and drop dead variables.

    Works on the transpose: each variable is a packed column over bits, the
    column space is re-based by row echelon form on those packed columns.
    """
    n_bits = len(mask)
    cols = [0] * width
    for b, row in enumerate(mask):
        while row:
            low = row & -row
            j = low.bit_length() - 1
            cols[j] |= 1 << b
            row ^= low
    basis, _ = g._packed_echelon(cols)
    new = [0] * n_bits
    for j, col in enumerate(basis):
        while col:
            low = col & -col
            b = low.bit_length() - 1
            new[b] |= 1 << j
            col ^= low
    return new, len(basis)


def strong_probability(cf: CodeForm, outcome: Sequence[int]) -> Fraction:
    """Exact probability ``2^-r`` on the code, ``0`` off it."""
    y = g.as_bits(outcome, 1)
    if y.shape[0] != cf.k:
        raise ValueError(f"outcome has {y.shape[0]} bits, code has {cf.k}")
    if np.any(((cf.P.astype(np.int64) @ (y ^ cf.shift)) & 1)):
        return Fraction(0)
    return Fraction(1, 1 << cf.r)


def sample_from_code(cf: CodeForm, n_samples: int, seed: int = 0, labels: Sequence[str] = ()) -> SampleBatch:
    """Method III sampling: ``y = G u + shift`` with ``u`` uniform."""
    u = random_bits(seed, n_samples, cf.r)
    rows = ((u.astype(np.int64) @ cf.G.T.astype(np.int64)) & 1).astype(np.uint8) ^ cf.shift
    return SampleBatch(tuple(labels), rows.reshape(n_samples, cf.k), seed, "III")


def _enumerate(m: int) -> np.ndarray:
    return ((np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1).astype(np.uint8)


def exact_distribution(
    cc: ClassicalCircuit,
    method: str = "I",
    inputs: Mapping[str, int] | None = None,
    max_random: int = 20,
) -> dict[tuple[int, ...], Fraction]:
    """Exact output distribution by the chosen method."""
    if method == "I":
        m = cc.n_random
        if m > max_random:
            raise ValueError(f"{m} random bits exceed the enumeration bound {max_random}")
        rows = execute(cc, _enumerate(m), inputs)
        cnt = Counter(tuple(int(b) for b in r) for r in rows)
        return {y: Fraction(c, 1 << m) for y, c in cnt.items()}
    if method == "II":
        am = compile_affine(cc, inputs)
        if am.m > max_random:
            raise ValueError(f"{am.m} random bits exceed the enumeration bound {max_random}")
        A = am.A.to_array().astype(np.int64)
        rows = ((_enumerate(am.m).astype(np.int64) @ A.T) & 1).astype(np.uint8) ^ am.shift
        cnt = Counter(tuple(int(b) for b in r) for r in rows.reshape(-1, am.k))
        return {y: Fraction(c, 1 << am.m) for y, c in cnt.items()}
    if method in ("III", "IV"):
        cf = code_form(compile_affine(cc, inputs)) if method == "III" else stepwise_code_form(cc, inputs)
        rows = ((_enumerate(cf.r).astype(np.int64) @ cf.G.T.astype(np.int64)) & 1).astype(np.uint8) ^ cf.shift
        p = Fraction(1, 1 << cf.r)
        return {tuple(int(b) for b in r): p for r in rows.reshape(-1, cf.k)}
    raise ValueError(f"unknown method {method!r}")
