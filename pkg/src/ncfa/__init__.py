"""Finite-dimensional laboratory for noncommutative function algebras.

Block-diagonal matrix algebras with tracial states stand in for finite von
Neumann algebras. Nest subalgebras provide the subdiagonal algebras, and
the modules check determinant, Jensen, Jordan, Gleason-part and Hankel
statements on them numerically.
"""

__version__ = "0.1.0"

from .algebra import DirectSumAlgebra, NestSubalgebra, TracialState  # noqa: E402
from .expectations import DCharacter, construct_expectation  # noqa: E402
from .fk import brown_measure, fk_det, power_limit_det  # noqa: E402

__all__ = ["DirectSumAlgebra", "NestSubalgebra", "TracialState", "DCharacter", "construct_expectation",
           "brown_measure", "fk_det", "power_limit_det", "__version__"]
