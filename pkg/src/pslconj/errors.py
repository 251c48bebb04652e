"""Exception types raised across the package."""


class PSLError(Exception):
    """Base class for all errors raised by pslconj."""


class InvalidArityError(PSLError, ValueError):
    pass


class DomainError(PSLError, ValueError):
    """A probability (input or operation output) fell outside [0, 1]."""


class BoundarySumError(PSLError, ValueError):
    pass


class InteriorSumError(PSLError, ValueError):
    pass


class UpperSumError(PSLError, ValueError):
    pass


class InfeasibleTargetError(PSLError, ValueError):
    """Requested conjunction probability lies outside the Frechet interval."""


class ProgramError(PSLError):
    """A rule program failed to parse or validate.

    ``diagnostics`` holds every problem found; the message reports the first.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0]
        super().__init__(str(first))

    @property
    def line(self):
        return self.diagnostics[0].line

    @property
    def col(self):
        return self.diagnostics[0].col


class GroundingError(PSLError):
    pass


class NonconvexLossError(PSLError, ValueError):
    pass


class OracleScaleError(PSLError):
    pass


class NotPiecewiseLinearError(PSLError, ValueError):
    pass
