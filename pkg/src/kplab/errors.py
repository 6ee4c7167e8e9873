"""Exception hierarchy shared by all kplab modules."""


class KplabError(Exception):
    """Base class for all kplab errors."""


class UnsupportedOrder(KplabError):
    """Requested (derivative, accuracy) pair has no shipped coefficient set."""


class GridTooSmall(KplabError):
    """Grid has fewer points than the stencil needs."""


class DimensionMismatch(KplabError):
    """Vector/operator sizes do not agree."""


class EvenGridSize(KplabError):
    """The antiderivative closure is singular on even-sized grids."""


class UnderdeterminedStencil(KplabError):
    """Boundary stencil too small for the requested accuracy."""


class TooLargeForDense(KplabError):
    """Dense Kronecker assembly refused above the size cap."""


class SingularMatrix(KplabError):
    """LU factorization hit a zero pivot."""


class Breakdown(KplabError):
    """Unrecoverable breakdown in the Krylov iteration."""


class PicardDiverged(KplabError):
    """Fixed-point iteration diverged; near blow-up this is the expected signal."""

    def __init__(self, msg, last_iterate=None, report=None):
        super().__init__(msg)
        self.last_iterate = last_iterate
        self.report = report


class GmresFailed(KplabError):
    """Linear solve inside a time step did not converge."""


class ExistenceViolated(KplabError):
    """Traveling-wave parameters violate the existence condition."""


class UnknownState(KplabError):
    """Unrecognized initial-state name."""


class MissingParam(KplabError):
    """Required initial-state parameter absent."""


class DegenerateSamples(KplabError):
    """Not enough (or invalid) samples for a slope fit."""


class ParseError(KplabError):
    """Config file could not be parsed."""

    def __init__(self, msg, line=None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


class ValidationError(KplabError):
    """Config parsed but violates an invariant; names the offending key."""


class BadMagic(KplabError):
    """Snapshot file does not start with the KPS1 magic."""


class TruncatedFile(KplabError):
    """Snapshot payload shorter than the header promises."""
