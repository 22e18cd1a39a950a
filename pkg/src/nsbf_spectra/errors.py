class InputError(ValueError):
    """Invalid or inconsistent user data (unsorted spectra, too few values, ...)."""


class NumericalError(RuntimeError):
    """A numerical step failed to reach its target (bracketing, tolerance, ...)."""


class IllConditionedError(NumericalError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition
