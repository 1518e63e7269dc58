"""Exception types raised across the package."""

import numpy as np


class DimensionMismatch(ValueError):
    """Shapes of symbols, pairs or Jacobians do not fit together."""


class NotPositiveSemiDefinite(ValueError):
    """The Laplace coefficients have a negative eigenvalue beyond tolerance.

    Attributes:
        min_eigenvalue: the most negative eigenvalue of the Gram matrix.
        witness: a Jacobian X (dim_F x n) with <X, M X> = min_eigenvalue, |X| = 1.
    """

    def __init__(self, min_eigenvalue, witness):
        self.min_eigenvalue = float(min_eigenvalue)
        self.witness = np.asarray(witness)
        super().__init__(f"Laplace form is indefinite: min eigenvalue {self.min_eigenvalue:.6g}")


class DegenerateGradient(ValueError):
    """The defining function has (numerically) vanishing gradient at a point."""

    def __init__(self, x, grad_norm):
        self.x = np.asarray(x)
        self.grad_norm = float(grad_norm)
        super().__init__(f"|grad rho| = {self.grad_norm:.3g} at x = {self.x}")


class RankJump(ValueError):
    """The kernel dimension of B(nu(x)) is not constant along the boundary."""

    def __init__(self, x1, x2, dims):
        self.x1, self.x2 = np.asarray(x1), np.asarray(x2)
        self.dims = tuple(dims)
        super().__init__(f"kernel dimension jumps {self.dims[0]} -> {self.dims[1]} between {self.x1} and {self.x2}")


class NotStarShaped(ValueError):
    """A polynomial domain is not star-shaped about its declared center."""


class SupportError(ValueError):
    """A compactly supported test field does not fit inside the domain."""


class SpecParseError(ValueError):
    """A pair or domain spec document could not be parsed.

    ``location`` is a JSON path like ``A[1]`` or ``line 4``.
    """

    def __init__(self, message, location=None):
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(prefix + message)
