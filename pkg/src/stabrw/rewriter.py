"""Rewriting of stabilizer circuits into classical circuits over Z- and X-bits.

Qubit ``q`` owns the Z-bit ``2q`` and the X-bit ``2q + 1``; classical input
``i`` lives at bit ``2n + i``.  Each quantum instruction is replaced in place
by a short classical gadget, so the classical circuit has the same shape as
the quantum one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuit_ir import CircuitError, Instruction, QuantumCircuit, MAGIC_KINDS, PREP_KINDS, live_before
from .qfe import elementary_qfe

__all__ = [
    "CKINDS",
    "ClassicalInstruction",
    "ClassicalCircuit",
    "ResourceProfile",
    "rewrite_instruction",
    "rewrite_circuit",
    "instruction_offsets",
    "resource_profile",
    "parse_classical",
    "z_bit",
    "x_bit",
]

CKINDS = ("SETCONST", "SETRANDOM", "NOT", "CXOR", "SWAPBITS", "FORGET")


def z_bit(q: int) -> int:
    return 2 * q


def x_bit(q: int) -> int:
    return 2 * q + 1


@dataclass(frozen=True)
class ClassicalInstruction:
    """One classical gate; ``control`` lists the bits whose XOR gates it.

    CXOR reads ``targets[0]`` and flips ``targets[1]``.  SETCONST writes
    ``value``.
    """

    kind: str
    targets: tuple[int, ...]
    control: tuple[int, ...] = ()
    value: int = 0

    def __post_init__(self) -> None:
        want = 2 if self.kind in ("CXOR", "SWAPBITS") else 1
        if self.kind not in CKINDS:
            raise ValueError(f"unknown classical kind {self.kind!r}")
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} expects {want} bit(s)")
        if want == 2 and self.targets[0] == self.targets[1]:
            raise ValueError(f"{self.kind} needs distinct bits")

    def text(self) -> str:
        parts = [self.kind, *map(str, self.targets)]
        if self.kind == "SETCONST":
            parts.append(str(self.value))
        if self.control:
            parts += ["IF", "^".join(map(str, self.control))]
        return " ".join(parts)


@dataclass(frozen=True)
class ClassicalCircuit:
    """Classical circuit produced by rewriting.

    ``outputs`` pairs each record label with the bit it reads at the end of
    the run; measured bits are never touched again, so reading late is the
    same as reading at measurement time.
    """

    n_qubits: int
    instructions: tuple[ClassicalInstruction, ...]
    outputs: tuple[tuple[str, int], ...] = ()
    inputs: tuple[str, ...] = ()

    @property
    def n_bits(self) -> int:
        return 2 * self.n_qubits + len(self.inputs)

    @property
    def n_random(self) -> int:
        return sum(i.kind == "SETRANDOM" for i in self.instructions)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.outputs)

    @property
    def adaptive(self) -> bool:
        return any(i.control for i in self.instructions)

    def input_bit(self, name: str) -> int:
        return 2 * self.n_qubits + self.inputs.index(name)

    def __len__(self) -> int:
        return len(self.instructions)

    def text(self) -> str:
        out = [f"BITS {self.n_bits}", f"QUBITS {self.n_qubits}"]
        if self.inputs:
            out.append("INPUTS " + " ".join(self.inputs))
        out.extend(i.text() for i in self.instructions)
        out.extend(f"OUTPUT {lab} {bit}" for lab, bit in self.outputs)
        return "\n".join(out) + "\n"


def parse_classical(text: str) -> ClassicalCircuit:
    """Inverse of ``ClassicalCircuit.text``."""
    n_qubits = 0
    inputs: list[str] = []
    ins: list[ClassicalInstruction] = []
    outputs: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head = toks[0].upper()
        try:
            if head == "BITS":
                continue
            if head == "QUBITS":
                n_qubits = int(toks[1])
            elif head == "INPUTS":
                inputs.extend(toks[1:])
            elif head == "OUTPUT":
                outputs.append((toks[1], int(toks[2])))
            else:
                control: tuple[int, ...] = ()
                if "IF" in toks:
                    k = toks.index("IF")
                    control = tuple(int(b) for b in toks[k + 1].split("^"))
                    toks = toks[:k]
                nums = [int(t) for t in toks[1:]]
                if head == "SETCONST":
                    ins.append(ClassicalInstruction(head, (nums[0],), control, nums[1]))
                else:
                    ins.append(ClassicalInstruction(head, tuple(nums), control))
        except (ValueError, IndexError) as exc:
            raise CircuitError(f"bad classical statement: {exc}", lineno) from None
    return ClassicalCircuit(n_qubits, tuple(ins), tuple(outputs), tuple(inputs))


_PREP_RULES = {
    "PREP0": ((0, 0), None),
    "PREP1": ((0, 1), None),
    "PREPP": (None, (0, 0)),
    "PREPM": (None, (0, 1)),
    "PREPCHAOS": (None, None),
}


def rewrite_instruction(
    ins: Instruction,
    control: Sequence[int] = (),
    live: Sequence[int] = (),
) -> list[ClassicalInstruction]:
    """Classical gadget for one quantum instruction.

    ``control`` holds the bit indices of the instruction's control labels;
    ``live`` lists the live qubits, needed only for WH.  A measurement's
    exported bit is reported by ``rewrite_circuit``.
    """
    k = ins.kind
    ctl = tuple(control)
    C = ClassicalInstruction
    if k in MAGIC_KINDS:
        raise CircuitError(f"{k} has no classical rewriting; use the framed or magic-state path")
    if k in _PREP_RULES:
        q = ins.targets[0]
        zset, xset = _PREP_RULES[k]
        out = []
        out.append(C("SETCONST", (z_bit(q),), value=zset[1]) if zset else C("SETRANDOM", (z_bit(q),)))
        out.append(C("SETCONST", (x_bit(q),), value=xset[1]) if xset else C("SETRANDOM", (x_bit(q),)))
        return out
    if k == "X":
        return [C("NOT", (z_bit(ins.targets[0]),), ctl)]
    if k == "Z":
        return [C("NOT", (x_bit(ins.targets[0]),), ctl)]
    if k == "CNOT":
        a, b = ins.targets
        return [C("CXOR", (z_bit(a), z_bit(b)), ctl), C("CXOR", (x_bit(b), x_bit(a)), ctl)]
    if k == "CZ":
        a, b = ins.targets
        return [C("CXOR", (z_bit(a), x_bit(b)), ctl), C("CXOR", (z_bit(b), x_bit(a)), ctl)]
    if k == "SWAP":
        a, b = ins.targets
        return [C("SWAPBITS", (z_bit(a), z_bit(b)), ctl), C("SWAPBITS", (x_bit(a), x_bit(b)), ctl)]
    if k == "H":
        q = ins.targets[0]
        return [C("SWAPBITS", (z_bit(q), x_bit(q)), ctl)]
    if k == "WH":
        return [C("SWAPBITS", (z_bit(q), x_bit(q)), ctl) for q in live]
    if k in ("S", "SDG"):
        q = ins.targets[0]
        return [C("CXOR", (z_bit(q), x_bit(q)), ctl)]
    if k == "DEPHZ":
        q = ins.targets[0]
        return [C("FORGET", (x_bit(q),)), C("SETRANDOM", (x_bit(q),))]
    if k == "DEPHX":
        q = ins.targets[0]
        return [C("FORGET", (z_bit(q),)), C("SETRANDOM", (z_bit(q),))]
    if k == "MZ":
        return [C("FORGET", (x_bit(ins.targets[0]),))]
    if k == "MX":
        return [C("FORGET", (z_bit(ins.targets[0]),))]
    if k == "DISCARD":
        q = ins.targets[0]
        return [C("FORGET", (z_bit(q),)), C("FORGET", (x_bit(q),))]
    raise CircuitError(f"no rewriting rule for {k!r}")


def measured_bit(ins: Instruction) -> int:
    q = ins.targets[0]
    return z_bit(q) if ins.kind == "MZ" else x_bit(q)


def rewrite_circuit(qc: QuantumCircuit) -> ClassicalCircuit:
    """Instruction-local rewriting of a whole circuit (linear time)."""
    n = qc.n_qubits
    where = {name: 2 * n + i for i, name in enumerate(qc.inputs)}
    live: set[int] = set()
    out: list[ClassicalInstruction] = []
    outputs: list[tuple[str, int]] = []
    for ins in qc.instructions:
        ctl = tuple(where[name] for name in ins.control)
        out.extend(rewrite_instruction(ins, ctl, sorted(live) if ins.kind == "WH" else ()))
        if ins.kind in PREP_KINDS:
            live.add(ins.targets[0])
        elif ins.kind in ("MZ", "MX", "DISCARD"):
            live.discard(ins.targets[0])
        if ins.record_label is not None:
            bit = measured_bit(ins)
            where[ins.record_label] = bit
            outputs.append((ins.record_label, bit))
    return ClassicalCircuit(n, tuple(out), tuple(outputs), qc.inputs)


def instruction_offsets(qc: QuantumCircuit) -> list[int]:
    """Index of the first classical instruction of each quantum instruction.

    One extra entry at the end holds the total length.
    """
    offsets = [0]
    for ins, live in zip(qc.instructions, live_before(qc)):
        offsets.append(offsets[-1] + len(rewrite_instruction(ins, (), live)))
    return offsets


@dataclass(frozen=True)
class ResourceProfile:
    """Raw non-CSS content of a circuit.

    ``imaginarity`` counts odd diagonal entries and ``graphness`` off-diagonal
    pairs of the per-instruction quadratic forms; ``magic`` counts
    non-stabilizer preparations, which have no such form.
    """

    imaginarity: int
    graphness: int
    magic: int = 0

    @property
    def css(self) -> bool:
        return self.imaginarity == 0 and self.graphness == 0 and self.magic == 0


def _q_counts(kind: str) -> tuple[int, int]:
    Q = elementary_qfe(kind).Q
    odd = int(np.count_nonzero(np.diagonal(Q) & 1))
    pairs = int(np.count_nonzero(np.triu(Q, 1)))
    return odd, pairs


def resource_profile(qc: QuantumCircuit) -> ResourceProfile:
    imag = graph = magic = 0
    live: set[int] = set()
    for ins in qc.instructions:
        k = ins.kind
        if k == "PREPMAGIC_H":
            magic += 1
        elif k == "WH":
            graph += len(live) * _q_counts("H")[1]
        else:
            a, b = _q_counts(k)
            imag += a
            graph += b
        if k in PREP_KINDS:
            live.add(ins.targets[0])
        elif k in ("MZ", "MX", "DISCARD"):
            live.discard(ins.targets[0])
    return ResourceProfile(imag, graph, magic)


def input_vector(cc: ClassicalCircuit, inputs: Mapping[str, int] | None) -> np.ndarray:
    """Initial bit vector with classical inputs filled in."""
    bits = np.zeros(cc.n_bits, dtype=np.uint8)
    inputs = dict(inputs or {})
    unknown = set(inputs) - set(cc.inputs)
    if unknown:
        raise ValueError(f"unknown inputs: {sorted(unknown)}")
    for i, name in enumerate(cc.inputs):
        bits[2 * cc.n_qubits + i] = int(inputs.get(name, 0)) & 1
    return bits
