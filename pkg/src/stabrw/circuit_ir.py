"""Quantum circuit IR: text format, validation, classification, R-I rebit pass.

Text format, one statement per line, ``#`` starts a comment::

    QUBITS 3
    INPUTS a b
    PREPP 0
    PREP0 1
    CNOT 0 1
    MZ 0 -> m0
    X 1 IF m0^a

Qubits follow a one-way lifecycle: unprepared, live after a preparation,
dead after a measurement or discard.  Indices are never reused.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Sequence

__all__ = [
    "CircuitError",
    "Instruction",
    "QuantumCircuit",
    "CircuitProfile",
    "parse_circuit",
    "emit_circuit",
    "analyze",
    "to_rebit",
    "desugar_magic_i",
    "KINDS",
    "PREP_KINDS",
    "MEASURE_KINDS",
    "UNITARY_KINDS",
]


class CircuitError(ValueError):
    """Malformed or invalid circuit; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


PREP_KINDS = frozenset({"PREP0", "PREP1", "PREPP", "PREPM", "PREPCHAOS", "PREPMAGIC_H", "PREPMAGIC_I"})
MAGIC_KINDS = frozenset({"PREPMAGIC_H", "PREPMAGIC_I"})
MEASURE_KINDS = frozenset({"MZ", "MX"})
UNITARY_KINDS = frozenset({"X", "Z", "H", "S", "SDG", "CNOT", "CZ", "SWAP", "WH"})
CHANNEL_KINDS = frozenset({"DEPHZ", "DEPHX", "DISCARD"})
KINDS = PREP_KINDS | MEASURE_KINDS | UNITARY_KINDS | CHANNEL_KINDS
TWO_QUBIT = frozenset({"CNOT", "CZ", "SWAP"})
NON_CSS = frozenset({"H", "S", "SDG", "CZ"}) | MAGIC_KINDS
NON_REAL = frozenset({"S", "SDG", "PREPMAGIC_I"})


def arity(kind: str) -> int:
    if kind == "WH":
        return 0
    return 2 if kind in TWO_QUBIT else 1


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\[\]']*$")


@dataclass(frozen=True)
class Instruction:
    kind: str
    targets: tuple[int, ...] = ()
    record_label: str | None = None
    control: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "control", tuple(self.control))
        if self.kind not in KINDS:
            raise CircuitError(f"unknown instruction kind {self.kind!r}")
        if len(self.targets) != arity(self.kind):
            raise CircuitError(f"{self.kind} expects {arity(self.kind)} target(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{self.kind} targets must be distinct")
        if any(t < 0 for t in self.targets):
            raise CircuitError("negative qubit index")
        if (self.kind in MEASURE_KINDS) != (self.record_label is not None):
            if self.kind in MEASURE_KINDS:
                raise CircuitError(f"{self.kind} needs a record label")
            raise CircuitError(f"{self.kind} cannot carry a record label")
        if self.control and self.kind not in UNITARY_KINDS:
            raise CircuitError(f"classical control is only allowed on unitary gates, not {self.kind}")

    def text(self) -> str:
        parts = [self.kind, *map(str, self.targets)]
        if self.record_label is not None:
            parts += ["->", self.record_label]
        if self.control:
            parts += ["IF", "^".join(self.control)]
        return " ".join(parts)


@dataclass(frozen=True)
class QuantumCircuit:
    n_qubits: int
    instructions: tuple[Instruction, ...] = ()
    inputs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        _validate(self)

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def labels(self) -> tuple[str, ...]:
        """Measurement record labels in program order."""
        return tuple(i.record_label for i in self.instructions if i.record_label is not None)

    def text(self) -> str:
        return emit_circuit(self)

    def prepared(self) -> list[int]:
        """Qubits that get prepared somewhere, ascending."""
        return sorted({i.targets[0] for i in self.instructions if i.kind in PREP_KINDS})

    def final_wires(self) -> list[int]:
        """Prepared qubits that are not discarded (measured ones included)."""
        gone = {i.targets[0] for i in self.instructions if i.kind == "DISCARD"}
        return [q for q in self.prepared() if q not in gone]


def _validate(qc: QuantumCircuit, lines: Sequence[int] | None = None) -> None:
    if qc.n_qubits < 0:
        raise CircuitError("negative qubit count")
    defined: set[str] = set()
    for name in qc.inputs:
        if not _NAME.match(name):
            raise CircuitError(f"bad input name {name!r}")
        if name in defined:
            raise CircuitError(f"duplicate input {name!r}")
        defined.add(name)
    state = ["new"] * qc.n_qubits
    for pos, ins in enumerate(qc.instructions):
        line = lines[pos] if lines is not None else None
        for t in ins.targets:
            if t >= qc.n_qubits:
                raise CircuitError(f"qubit index {t} out of range (QUBITS {qc.n_qubits})", line)
        for name in ins.control:
            if name not in defined:
                raise CircuitError(f"undefined label {name!r}", line)
        if ins.kind in PREP_KINDS:
            q = ins.targets[0]
            if state[q] == "live":
                raise CircuitError(f"qubit {q} prepared while live", line)
            if state[q] == "dead":
                raise CircuitError(f"qubit {q} reused after measurement or discard", line)
            state[q] = "live"
            continue
        if ins.kind == "WH":
            continue
        for t in ins.targets:
            if state[t] == "new":
                raise CircuitError(f"qubit {t} used before preparation", line)
            if state[t] == "dead":
                raise CircuitError(f"qubit {t} used after measurement or discard", line)
        if ins.kind in MEASURE_KINDS or ins.kind == "DISCARD":
            state[ins.targets[0]] = "dead"
        if ins.record_label is not None:
            if ins.record_label in defined:
                raise CircuitError(f"duplicate label {ins.record_label!r}", line)
            if not _NAME.match(ins.record_label):
                raise CircuitError(f"bad label {ins.record_label!r}", line)
            defined.add(ins.record_label)


def live_before(qc: QuantumCircuit) -> list[list[int]]:
    """Live qubits (ascending) just before each instruction."""
    state = ["new"] * qc.n_qubits
    out = []
    for ins in qc.instructions:
        out.append([q for q in range(qc.n_qubits) if state[q] == "live"])
        if ins.kind in PREP_KINDS:
            state[ins.targets[0]] = "live"
        elif ins.kind in MEASURE_KINDS or ins.kind == "DISCARD":
            state[ins.targets[0]] = "dead"
    return out


def parse_circuit(text: str) -> QuantumCircuit:
    """Parse the line-oriented circuit format."""
    n_qubits: int | None = None
    inputs: list[str] = []
    instructions: list[Instruction] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        head = toks[0].upper()
        if head == "QUBITS":
            if n_qubits is not None:
                raise CircuitError("duplicate QUBITS header", lineno)
            if len(toks) != 2 or not toks[1].isdigit():
                raise CircuitError("expected 'QUBITS <n>'", lineno)
            n_qubits = int(toks[1])
            continue
        if n_qubits is None:
            raise CircuitError("missing QUBITS header", lineno)
        if head == "INPUTS":
            if instructions:
                raise CircuitError("INPUTS must precede instructions", lineno)
            inputs.extend(toks[1:])
            continue
        try:
            instructions.append(_parse_instruction(toks))
        except CircuitError as exc:
            raise CircuitError(str(exc), lineno) from None
        lines.append(lineno)
    if n_qubits is None:
        raise CircuitError("missing QUBITS header")
    qc = QuantumCircuit.__new__(QuantumCircuit)
    object.__setattr__(qc, "n_qubits", n_qubits)
    object.__setattr__(qc, "instructions", tuple(instructions))
    object.__setattr__(qc, "inputs", tuple(inputs))
    _validate(qc, lines)
    return qc


def _parse_instruction(toks: list[str]) -> Instruction:
    kind = toks[0].upper()
    if kind not in KINDS:
        raise CircuitError(f"unknown instruction kind {toks[0]!r}")
    rest = toks[1:]
    control: tuple[str, ...] = ()
    label = None
    if "IF" in rest:
        k = rest.index("IF")
        if k != len(rest) - 2:
            raise CircuitError("IF must be followed by exactly one XOR expression at line end")
        control = tuple(p for p in rest[k + 1].split("^"))
        if any(not p for p in control):
            raise CircuitError(f"malformed control expression {rest[k + 1]!r}")
        rest = rest[:k]
    if "->" in rest:
        k = rest.index("->")
        if k != len(rest) - 2:
            raise CircuitError("'->' must be followed by exactly one label")
        label = rest[k + 1]
        rest = rest[:k]
    try:
        targets = tuple(int(t) for t in rest)
    except ValueError:
        raise CircuitError(f"non-integer target in {' '.join(toks)!r}") from None
    return Instruction(kind, targets, label, control)


def emit_circuit(qc: QuantumCircuit) -> str:
    out = [f"QUBITS {qc.n_qubits}"]
    if qc.inputs:
        out.append("INPUTS " + " ".join(qc.inputs))
    out.extend(ins.text() for ins in qc.instructions)
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class CircuitProfile:
    css_preserving: bool
    real: bool
    adaptive: bool
    unitary: bool
    magic_count: int


def analyze(qc: QuantumCircuit) -> CircuitProfile:
    kinds = [i.kind for i in qc.instructions]
    return CircuitProfile(
        css_preserving=not any(k in NON_CSS for k in kinds),
        real=not any(k in NON_REAL for k in kinds),
        adaptive=any(i.control for i in qc.instructions),
        unitary=not any(k in MEASURE_KINDS or k in CHANNEL_KINDS or k == "PREPCHAOS" for k in kinds),
        magic_count=sum(k in MAGIC_KINDS for k in kinds),
    )


def desugar_magic_i(qc: QuantumCircuit) -> QuantumCircuit:
    """Replace each PREPMAGIC_I by PREPP followed by S."""
    out: list[Instruction] = []
    for ins in qc.instructions:
        if ins.kind == "PREPMAGIC_I":
            q = ins.targets[0]
            out += [Instruction("PREPP", (q,)), Instruction("S", (q,))]
        else:
            out.append(ins)
    return replace(qc, instructions=tuple(out))


def to_rebit(qc: QuantumCircuit) -> QuantumCircuit:
    """Real circuit on one extra qubit simulating ``qc``.

    The extra qubit ``r = n_qubits`` holds the real/imaginary flag.  ``S q``
    becomes ``CZ q r`` then ``CNOT q r``; ``SDG q`` becomes the reverse pair.
    """
    if any(i.kind in MAGIC_KINDS for i in qc.instructions):
        raise CircuitError("to_rebit does not accept magic-state preparations")
    r = qc.n_qubits
    out = [Instruction("PREP0", (r,))]
    for ins, live in zip(qc.instructions, live_before(qc)):
        if ins.kind in ("S", "SDG"):
            q = ins.targets[0]
            cz = Instruction("CZ", (q, r), control=ins.control)
            cx = Instruction("CNOT", (q, r), control=ins.control)
            out += [cz, cx] if ins.kind == "S" else [cx, cz]
        elif ins.kind == "WH":
            # WH must not touch the rebit, so spell it out on the live qubits
            out += [Instruction("H", (q,), control=ins.control) for q in live]
        else:
            out.append(ins)
    out.append(Instruction("DISCARD", (r,)))
    return QuantumCircuit(r + 1, tuple(out), qc.inputs)

