"""Numerical toolkit for entanglement catalysis.

Submodules: ``linalg`` (states and subsystem algebra), ``measures``
(entropies and entanglement measures), ``channels`` (Kraus channels),
``capacity`` (catalytic capacity bounds), ``convertibility`` (majorization
and the Schmidt-vector net), ``noniid`` (non-identical state sequences),
``catalysim`` (single-copy catalysis simulator), ``nodedist``
(intermediate-node distribution) and ``cli``.
"""
from .errors import EntcatError, InputError, PreconditionError
from .linalg import DensityMatrix
from .channels import QuantumChannel
from .measures import DEFAULT_SEED

__all__ = ["DensityMatrix", "QuantumChannel", "DEFAULT_SEED", "EntcatError", "InputError", "PreconditionError"]
__version__ = "0.1.0"
