"""Covert entanglement-generation laboratory for lossy thermal-noise bosonic channels.

Closed-form capacity constants, covertness budgets, and practical photonic
qubit rates, each backed by an independent truncated-Fock-space oracle, plus
a sweep CLI that emits deterministic CSV.
"""

from .channels import ChannelParams, KrausChannel, PauliVector
from .formulas import CovertBudget, PracticalRates, RateConstants
from .fock import DensityMatrix, FockOperator

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "CovertBudget",
    "DensityMatrix",
    "FockOperator",
    "KrausChannel",
    "PauliVector",
    "PracticalRates",
    "RateConstants",
    "__version__",
]
