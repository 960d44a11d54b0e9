"""Exact mixed multiplicities of multigraded modules and of ideal families."""

from .algebra import GradedRing, Polynomial, parse_polynomial
from .hilbert import hilbert_series, mixed_multiplicity, module_hilbert_polynomial
from .koszul import euler_characteristic
from .modules import Presentation, cyclic_quotient, direct_sum, quotient_by_elements
from .problem import emit_problem, parse_problem
from .runner import run
from .systems import multiplicity_symbol, verify_equality_theorem

__all__ = [
    "GradedRing", "Polynomial", "parse_polynomial", "hilbert_series", "mixed_multiplicity",
    "module_hilbert_polynomial", "euler_characteristic", "Presentation", "cyclic_quotient",
    "direct_sum", "quotient_by_elements", "parse_problem", "emit_problem", "run",
    "multiplicity_symbol", "verify_equality_theorem",
]
__version__ = "0.1.0"
