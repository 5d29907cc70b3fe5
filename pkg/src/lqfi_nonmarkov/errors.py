"""Exception types raised by the numerics."""


class NonHermitian(ValueError):
    pass


class NotPSD(ValueError):
    pass


class Unphysical(ValueError):
    """Correlation parameters outside the Bell-diagonal tetrahedron."""


class NotCompletelyPositive(ValueError):
    """Kraus weights went negative."""


class QuadratureFailure(RuntimeError):
    pass


class StepTooLarge(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass
