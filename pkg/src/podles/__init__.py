"""High-precision laboratory for the coordinate algebra of quantum SU(2),
its Podles-sphere coideals, the associated Askey-Wilson spherical polynomial
identities, a generating functional obtained from the principal-series limit,
and the GNS construction of the resulting 1-cocycle."""

__version__ = "0.1.0"

from .precision import FalsificationError, PrecisionContext, PrecisionError
from .qseries import Polynomial, QContext

__all__ = [
    "FalsificationError",
    "PrecisionContext",
    "PrecisionError",
    "Polynomial",
    "QContext",
    "__version__",
]
