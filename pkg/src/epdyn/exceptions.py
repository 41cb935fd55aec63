"""Exception types raised by the epdyn computation modules."""


class EPDynError(Exception):
    """Base class for all package errors."""


class ModelMismatchError(EPDynError, ValueError):
    """Operation is not defined for the given model family."""


class EPNotRealError(EPDynError, ValueError):
    """Closed-form exceptional points are complex (coupling g >= 1)."""


class EPDegeneracyError(EPDynError, ArithmeticError):
    """Quantity diverges because the state sits on an exceptional point."""


class NotFoundError(EPDynError, LookupError):
    """A search did not find what it was looking for.

    ``data`` carries whatever bracketing information the search produced.
    """

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data


class ClassificationError(EPDynError):
    """Side sampling could not decide the type of an exceptional point."""


class QuadratureError(EPDynError, ArithmeticError):
    """Quadrature failed to reach its tolerance.

    ``error_estimate`` is the last achieved error estimate.
    """

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ReflectionError(EPDynError, ValueError):
    """Finite lattice too short: boundary reflections would reach the dot."""

    def __init__(self, message, required_sites):
        super().__init__(message)
        self.required_sites = required_sites


class IllPosedFitError(EPDynError, ValueError):
    """Least-squares design matrix is rank deficient or badly conditioned."""

    def __init__(self, message, condition=None, rank=None):
        super().__init__(message)
        self.condition = condition
        self.rank = rank
