"""Shipped example circuits and random circuit generators."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .circuit_ir import Instruction, QuantumCircuit, parse_circuit

__all__ = [
    "names",
    "load",
    "text",
    "random_circuit",
    "CSS_GATES",
    "NON_CSS_GATES",
    "long_css_circuit",
]

CSS_GATES = ("X", "Z", "CNOT", "SWAP")
NON_CSS_GATES = ("H", "S", "SDG", "CZ", "WH")
_CSS_PREPS = ("PREP0", "PREP1", "PREPP", "PREPM")


def names() -> list[str]:
    files = resources.files(__package__).joinpath("corpus")
    return sorted(p.name[:-3] for p in files.iterdir() if p.name.endswith(".qc"))


def text(name: str) -> str:
    return resources.files(__package__).joinpath("corpus", f"{name}.qc").read_text()


def load(name: str) -> QuantumCircuit:
    return parse_circuit(text(name))


def random_circuit(
    rng: np.random.Generator,
    n_qubits: int,
    n_instructions: int,
    gates: tuple[str, ...] = CSS_GATES,
    adaptive: bool = True,
    controlled_gates: tuple[str, ...] = ("X", "Z"),
    channels: bool = True,
    chaos: bool = False,
    n_inputs: int = 0,
) -> QuantumCircuit:
    """Valid random circuit over the given gate pool.

    Every qubit is prepared first; the body mixes gates, dephasing,
    measurements and discards; live qubits are measured at the end.  With
    ``adaptive`` set, gates from ``controlled_gates`` may carry an XOR
    control over earlier records and inputs.
    """
    inputs = tuple(f"in{i}" for i in range(n_inputs))
    preps = _CSS_PREPS + (("PREPCHAOS",) if chaos else ())
    out: list[Instruction] = []
    live = list(range(n_qubits))
    for q in live:
        out.append(Instruction(str(rng.choice(preps)), (q,)))
    labels: list[str] = list(inputs)
    body = max(0, n_instructions - 2 * n_qubits)
    for _ in range(body):
        if not live:
            break
        roll = rng.random()
        if channels and roll < 0.08 and len(live) > 1:
            q = int(rng.choice(live))
            kind = str(rng.choice(["MZ", "MX", "DISCARD"]))
            if kind == "DISCARD":
                out.append(Instruction(kind, (q,)))
            else:
                lab = f"m{len(labels)}"
                out.append(Instruction(kind, (q,), lab))
                labels.append(lab)
            live.remove(q)
            continue
        if channels and roll < 0.12:
            out.append(Instruction(str(rng.choice(["DEPHZ", "DEPHX"])), (int(rng.choice(live)),)))
            continue
        pool = [k for k in gates if k not in ("CNOT", "CZ", "SWAP") or len(live) > 1]
        kind = str(rng.choice(pool))
        if kind in ("CNOT", "CZ", "SWAP"):
            a, b = rng.choice(live, size=2, replace=False)
            targets: tuple[int, ...] = (int(a), int(b))
        elif kind == "WH":
            targets = ()
        else:
            targets = (int(rng.choice(live)),)
        control: tuple[str, ...] = ()
        if adaptive and labels and kind in controlled_gates and rng.random() < 0.5:
            k = int(rng.integers(1, min(3, len(labels)) + 1))
            control = tuple(str(x) for x in rng.choice(labels, size=k, replace=False))
        out.append(Instruction(kind, targets, control=control))
    for q in live:
        lab = f"m{len(labels)}"
        out.append(Instruction(str(rng.choice(["MZ", "MX"])), (q,), lab))
        labels.append(lab)
    return QuantumCircuit(n_qubits, tuple(out), inputs)


def long_css_circuit(n_qubits: int, length: int, seed: int = 0) -> QuantumCircuit:
    """Fixed-width CSS circuit with ``length`` gates between preparation and readout."""
    rng = np.random.default_rng(seed)
    out = [Instruction("PREPP" if q % 2 else "PREP0", (q,)) for q in range(n_qubits)]
    kinds = rng.integers(0, 3, size=length)
    pairs = rng.integers(0, n_qubits, size=(length, 2))
    cnots = {}
    for kind, (a, b) in zip(kinds.tolist(), pairs.tolist()):
        if kind == 0 and a != b:
            key = (a, b)
            ins = cnots.get(key)
            if ins is None:
                ins = cnots[key] = Instruction("CNOT", key)
            out.append(ins)
        else:
            out.append(_PAULI[(kind % 2, a)] if (kind % 2, a) in _PAULI else _pauli(kind % 2, a))
    out += [Instruction("MZ", (q,), f"m{q}") for q in range(n_qubits)]
    return QuantumCircuit(n_qubits, tuple(out))


_PAULI: dict[tuple[int, int], Instruction] = {}


def _pauli(which: int, q: int) -> Instruction:
    ins = Instruction("X" if which else "Z", (q,))
    _PAULI[(which, q)] = ins
    return ins
