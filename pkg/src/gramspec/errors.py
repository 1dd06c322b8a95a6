"""Exception types shared across the package."""


class GramspecError(Exception):
    """Base class for all errors raised by this package."""


class NonSymmetric(GramspecError, ValueError):
    """Matrix fails the symmetry tolerance required by a symmetric solver."""


class RankTooLarge(GramspecError, ValueError):
    """Requested rank exceeds what the input dimensions allow."""


class RankDeficient(GramspecError, ValueError):
    """Matrix does not have the full column rank required by the operation."""


class NoConvergence(GramspecError, RuntimeError):
    """An iterative kernel exhausted its iteration budget."""


class InvalidProbability(GramspecError, ValueError):
    """Sampling rate outside (0, 1]."""


class InvalidParameter(GramspecError, ValueError):
    """A model or bound parameter violates its stated range."""


class IndexOutOfRange(GramspecError, IndexError):
    """Row or column index outside the matrix dimensions."""


class ShapeMismatch(GramspecError, ValueError):
    """Operands have incompatible shapes."""


class ConfigInvalid(GramspecError, ValueError):
    """Experiment specification fails validation."""
