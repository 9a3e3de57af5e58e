"""Classical simulation of stabilizer circuits by rewriting to Z- and X-bits."""

from ._backend import BACKEND
from .circuit_ir import Instruction, QuantumCircuit, parse_circuit

__version__ = "0.1.0"

__all__ = ["BACKEND", "Instruction", "QuantumCircuit", "parse_circuit", "__version__"]
