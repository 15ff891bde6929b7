"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands disagree on qudit dimension or wire count, or an index is out of range."""


class NotSymplecticError(ValueError):
    """A matrix or association fails to preserve the symplectic form."""


class ZeroProjectionError(ArithmeticError):
    """A projection produced a (numerically) zero vector."""


class ParseError(ValueError):
    """A text file or token could not be parsed."""
