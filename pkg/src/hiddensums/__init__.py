"""Practical hidden sums on (F2)^N.

Construct and validate alternative XOR-like operations hidden in the affine
group, count them, find the ones that make a given mixing layer linear, and
run the affine reconstruction attack they enable.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .gf2core import BitMatrix, BitVector
from .hiddensum import HiddenSum

__all__ = ["BACKEND", "BitMatrix", "BitVector", "HiddenSum", "__version__"]
