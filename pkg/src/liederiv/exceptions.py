"""Exception hierarchy shared by every module of the package."""


class LieDerivError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(LieDerivError, ValueError):
    """Malformed algebra, element or operator description."""


class AlgebraMismatchError(LieDerivError, ValueError):
    """Operands live in different algebras or have the wrong shape."""


class PreconditionError(LieDerivError, ValueError):
    """An input violates a documented precondition (e.g. not a projection)."""


class CommutativeSummandError(PreconditionError):
    """The algebra has a one-dimensional block; split it off first."""


class EquivalenceError(PreconditionError):
    """Two projections are not Murray-von Neumann equivalent blockwise."""


class FrameError(PreconditionError):
    """A projection does not define a valid halving frame."""


class NotInnerError(LieDerivError):
    """No element implements the given map as an inner derivation."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotLieDerivationError(LieDerivError):
    """Raised when some stage of the decomposition pipeline detects a defect.

    ``stage`` names the failing check (``"lie"``, ``"lemma3"``, ``"lemma4"``,
    ``"lemma5"``, ``"leibniz"``, ``"trace"``, ``"reconstruction"``), and
    ``witness`` is the pair of basis indices that attains the defect when one
    is available.
    """

    def __init__(self, message, stage, residual=None, witness=None):
        super().__init__(message)
        self.stage = stage
        self.residual = residual
        self.witness = witness

    def to_dict(self):
        return {
            "stage": self.stage,
            "message": str(self),
            "residual": self.residual,
            "witness": None if self.witness is None else list(self.witness),
        }
