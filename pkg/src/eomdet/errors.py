"""Exception and warning types shared across the package."""


class EomdetError(Exception):
    """Base class for all package errors."""


class NonPositiveParameter(EomdetError, ValueError):
    def __init__(self, field, value, requirement="strictly positive"):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be {requirement}, got {value!r}")


class NonPositiveFrequency(NonPositiveParameter):
    def __init__(self, value):
        super().__init__("omega", value)


class MissingParameter(EomdetError, ValueError):
    def __init__(self, names, context=""):
        if isinstance(names, str):
            names = [names]
        self.names = list(names)
        where = f" (needed by {context})" if context else ""
        super().__init__(f"missing parameter(s): {', '.join(self.names)}{where}")


class SingularSystem(EomdetError, ArithmeticError):
    pass


class QuadratureNonConvergence(EomdetError, ArithmeticError):
    pass


class NotConverged(EomdetError, ArithmeticError):
    pass


class ApproximationOutOfRange(EomdetError, ValueError):
    pass


class TargetUnreachable(EomdetError, ValueError):
    pass


class ResolvedSidebandViolation(UserWarning):
    """Cavity linewidth not small against the mechanical frequency."""
