"""Exception hierarchy shared across the solver stack.

Everything raised on purpose derives from :class:`Fv1dError`, so callers can
catch one base class at the CLI boundary and map it to an exit code.
"""


class Fv1dError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(Fv1dError, ValueError):
    """A parameter is outside the range a routine is specified for."""


class DomainError(Fv1dError, ValueError):
    """An evaluation point lies outside a potential's domain of definition."""


class NonConvergence(Fv1dError, RuntimeError):
    """An iterative process exhausted its budget without meeting tolerance."""


class PoleAtZero(Fv1dError, ArithmeticError):
    """A logarithmic derivative was requested where the function vanishes."""


class InteriorPole(Fv1dError, ArithmeticError):
    """The interior log-derivative was evaluated at a trigonometric pole."""


class AnchorSingularity(Fv1dError, ArithmeticError):
    """Piecewise assembly hit a vanishing interior anchor (cos or sin at the cutoff)."""


class StepUnderflow(Fv1dError, RuntimeError):
    """The adaptive integrator's step size collapsed below the resolvable scale."""


class NoRoots(Fv1dError, RuntimeError):
    """A shooting scan found no sign changes in the requested energy window."""


class OutsideDecayWindow(Fv1dError, ValueError):
    """Decay-mode boundary data requested where the decay constant is imaginary."""


class GridTooCoarse(Fv1dError, RuntimeError):
    """Adjacent eigenvalues could not be separated on the configured grid."""


class ZeroNorm(Fv1dError, ValueError):
    """A wavefunction with (numerically) zero norm cannot be normalised."""


class NegativeCharge(Fv1dError, ValueError):
    """Charge normalisation was requested for a state of non-positive total charge."""


class PrecisionLossWarning(UserWarning):
    """Severe cancellation detected; the returned value has reduced accuracy."""
