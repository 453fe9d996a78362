"""Exact homology, transferred L-infinity brackets and higher Whitehead products for free DGLs."""

from .freelie import FreeDGL, Generator, LieElement, bracket
from .dglparse import parse_dgl, parse_expression
from .retract import Retract, random_retract, retract_from_decomposition, verify_retract
from .transfer import CONVENTION, TransferEngine, compute_table, verify_generalized_jacobi

__version__ = "0.1.0"

__all__ = ["CONVENTION", "FreeDGL", "Generator", "LieElement", "Retract", "TransferEngine", "bracket",
           "compute_table", "parse_dgl", "parse_expression", "random_retract",
           "retract_from_decomposition", "verify_generalized_jacobi", "verify_retract"]
