"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: precondition violations exit
with 2, numerical failures (non-convergence, radius collapse, step-size
underflow, failed parameter searches) with 3, I/O problems with 4.
"""


class AsymoscError(Exception):
    """Base class for all package errors."""


class PreconditionError(AsymoscError):
    """An operation was called outside its documented domain."""


class NumericalError(AsymoscError):
    """A numerical procedure failed to converge or lost validity."""


class QuadratureError(NumericalError):
    """Composite quadrature could not reach the requested tolerance."""


class StepUnderflowError(NumericalError):
    """Adaptive integration drove the step size below the representable floor."""


class RadiusCollapseError(NumericalError):
    """An action radius fell below the trust floor during a flight."""


class SearchError(NumericalError):
    """An iterative parameter search exhausted its budget."""
