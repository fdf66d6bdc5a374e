"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for all geometric failures."""


class DegenerateInput(GeometryError):
    """Input point set is not full-dimensional."""


class DimensionMismatch(GeometryError):
    """Operands live in different or unsupported dimensions."""


class UnsupportedDimension(GeometryError):
    """Requested dimension outside {2, 3} (or {1, 2, 3} internally)."""


class OutsideProjection(GeometryError):
    """Chord query point lies outside the projected body."""


class BaseMismatch(GeometryError):
    """Two subdivisions do not cover the same base polytope."""


class NotInterior(GeometryError):
    """Pole too close to the boundary; the polar would be unbounded."""


class ParamOutOfRange(GeometryError):
    """Family parameter outside its admissible interval."""


class ZeroDelta(GeometryError):
    """Affine-shear fit requested with zero parameter increment."""


class TooFewChords(GeometryError):
    """Midpoint test needs at least dim + 2 sample chords."""


class NoConvergence(GeometryError):
    """Santalo solver failed to converge.

    Carries the best iterate found so far.
    """

    def __init__(self, message, best_point=None, residual=None, context=None):
        super().__init__(message)
        self.best_point = best_point
        self.residual = residual
        self.context = context


class BadSpec(GeometryError):
    """Body specification is invalid."""


class ParseError(GeometryError):
    """Body file could not be parsed."""
