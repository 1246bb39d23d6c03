"""Pairs of spin-model subfactors from complex Hadamard matrices, at desk scale.

The package builds the finite-dimensional towers attached to two-by-two and
four-by-four complex Hadamard matrices, intersects the two resulting
ladders level by level and computes the invariants of the pair:
Pimsner-Popa constants, relative entropies, angles, spectra of the seed
products, inclusion matrices and relative commutants.

Modules
-------
linalg
    Dense complex linear algebra conventions.
algebra
    Finite-dimensional subalgebras of ``M_N``.
hadamard
    Complex Hadamard matrices and exact angles.
towers
    Towers of basic constructions and intersection grids.
invariants
    Pimsner-Popa constants, entropies, angles, commuting squares.
spectral
    Spectra of the four-by-four seed products and index predictions.
cli
    Command-line reports.
"""

__version__ = "0.1.0"

from . import algebra, errors, hadamard, invariants, linalg, spectral, towers  # noqa: E402
from .errors import SpinlabError  # noqa: E402

__all__ = ["__version__", "SpinlabError", "algebra", "errors", "hadamard", "invariants", "linalg", "spectral", "towers"]
