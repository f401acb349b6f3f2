"""Lifting decision-tree lower bounds to parity decision trees, checked exhaustively at small scale."""

from .boolfun import Gadget, PartialAssignment, Relation, compose_relation, is_k_stifled, max_stifling, stifle
from .f2core import BitVec, F2Basis
from .lift import Mode, SimState, build_lifted_dt, row_reduce, simulate_path, witness_completion

__version__ = "0.1.0"

__all__ = [
    "BitVec",
    "F2Basis",
    "Gadget",
    "PartialAssignment",
    "Relation",
    "compose_relation",
    "is_k_stifled",
    "max_stifling",
    "stifle",
    "Mode",
    "SimState",
    "build_lifted_dt",
    "row_reduce",
    "simulate_path",
    "witness_completion",
]
