"""Exception hierarchy; every numerical failure derives from NumericalError."""


class DomainError(ValueError):
    """Invalid parameters or malformed input."""


class NumericalError(ArithmeticError):
    """A factorization or iteration could not produce a valid result."""


class NotPositiveDefiniteError(NumericalError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"not positive definite: pivot {index} is not positive")


class RankDeficientError(NumericalError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"rank deficient: column {index} has no nonzero pivot")


class SingularError(NumericalError):
    """Exactly singular triangular factor or section."""


class ConvergenceError(NumericalError):
    """An iteration or adaptive window exceeded its cap."""


class BandwidthError(NumericalError):
    """Entries expected to vanish outside a band were not small."""
