"""Exception types shared across the solver modules."""


class LinfNormError(Exception):
    """Base class for all errors raised by this package."""


class SingularShift(LinfNormError):
    """D(s) is exactly or numerically singular at the requested shift.

    Signals that the shift sits (numerically) on a pole; the caller must
    move to a different shift.
    """

    def __init__(self, s, rcond=None):
        self.s = s
        self.rcond = rcond
        msg = f"D(s) is numerically singular at s = {s}"
        if rcond is not None:
            msg += f" (rcond estimate {rcond:.2e})"
        super().__init__(msg)


class DimensionMismatch(LinfNormError):
    """Matrix dimensions are inconsistent with the declared structure."""


class ParseError(LinfNormError):
    """A manifest or matrix file could not be parsed."""


class PencilSingular(LinfNormError):
    """The level-set eigenvalue pencil is numerically singular."""


class UnboundedOnAxis(LinfNormError):
    """The largest singular value is certified unbounded on the imaginary axis.

    The reduced model has a pole on the axis; the caller should treat it as
    invalid and repair the subspaces.
    """


class NoConvergence(LinfNormError):
    """An inner solver exhausted its iteration budget."""


class InvalidBound(LinfNormError):
    """An evaluated value exceeded the certified envelope bound.

    Certifies that the user-supplied curvature bound was wrong.
    """


class AllShiftsSingular(LinfNormError):
    """Every initial interpolation point hit a numerically singular D(s)."""
