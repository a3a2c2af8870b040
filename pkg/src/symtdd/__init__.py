"""symtdd: symbolic tensor decision diagrams for quantum circuit verification.

Quantum states and operators are stored as canonical decision diagrams whose
edge weights are themselves canonical complex-valued tensors over Boolean
symbols, so one symbolic simulation covers every concrete input assignment.
"""

from .core import Manager, SymTdd
from .weights import SqcupConflictError, WeightManager
from .circuit import (Circuit, CircuitSyntaxError, Gate, gate_tensor,
                      parse_circuit, simulate, unparse)
from .verify import (VerificationReport, bitflip_relations, dense_simulate,
                     exhaustive_check, grover_success_probability, verify_bv,
                     verify_qft)

__all__ = [
    "Manager", "SymTdd", "WeightManager", "SqcupConflictError",
    "Circuit", "CircuitSyntaxError", "Gate", "gate_tensor", "parse_circuit",
    "simulate", "unparse",
    "VerificationReport", "bitflip_relations", "dense_simulate",
    "exhaustive_check", "grover_success_probability", "verify_bv",
    "verify_qft",
]

__version__ = "0.1.0"
