"""Verification engine for almost contact pseudo-metric manifolds.

Metric and structure tensors are given as expressions in a chart; every
derivative is taken exactly with truncated Taylor jets.
"""

from kenmotsu._kernels import BACKEND
from kenmotsu.library import builtin
from kenmotsu.manifold import ManifoldSpec, Sampling, SolitonBlock, StructureBlock

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ManifoldSpec",
    "Sampling",
    "SolitonBlock",
    "StructureBlock",
    "builtin",
    "__version__",
]
