"""Exception hierarchy shared by every module of the package."""


class DiamondMirrorError(Exception):
    """Base class for all errors raised by :mod:`diamondmirror`."""


class InvalidParameter(DiamondMirrorError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergence(DiamondMirrorError, ArithmeticError):
    """A series or iteration did not reach its accuracy target within budget."""


class ToleranceNotMet(DiamondMirrorError, ArithmeticError):
    """Adaptive quadrature gave up before meeting the requested tolerance.

    The best estimate and its error bound are kept on the exception so that
    callers (sweeps in particular) can decide whether to use them anyway.
    """

    def __init__(self, message, value=None, error_estimate=None, partial=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.partial = partial


class OutsideDiamond(DiamondMirrorError, ValueError):
    """A spacetime point does not lie strictly inside the causal diamond."""


class NonPhysical(DiamondMirrorError, ValueError):
    """A covariance matrix violates the uncertainty principle."""


class DegenerateState(DiamondMirrorError, ValueError):
    """Standard-form reduction is ambiguous for the supplied state."""


class OptimizationFailed(DiamondMirrorError, RuntimeError):
    """Multi-start optimisation produced inconsistent optima."""


class DetectorOverlapTooLarge(DiamondMirrorError, ValueError):
    """Two same-direction detectors overlap too much to be treated as independent modes."""

    def __init__(self, message, commutator=None):
        super().__init__(message)
        self.commutator = commutator
