"""Exception hierarchy shared across the package."""


class FqCoverError(Exception):
    """Base class for all package errors."""


class NonPrimeBase(FqCoverError, ValueError):
    pass


class DegreeOutOfRange(FqCoverError, ValueError):
    pass


class DivisionByZeroPoly(FqCoverError, ZeroDivisionError):
    pass


class NotMonic(FqCoverError, ValueError):
    pass


class ConstantPolynomial(FqCoverError, ValueError):
    pass


class FieldMismatch(FqCoverError, ValueError):
    pass


class PolynomialParseError(FqCoverError, ValueError):
    pass


class InstanceFormatError(FqCoverError, ValueError):
    """Malformed instance file; ``lineno`` is 1-based, or None for whole-file problems."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class BudgetExceeded(FqCoverError, RuntimeError):
    """A residue enumeration would exceed the configured budget."""

    def __init__(self, message, degree=None, required=None, budget=None):
        self.degree = degree
        self.required = required
        self.budget = budget
        super().__init__(message)


class InvalidDelta(FqCoverError, ValueError):
    pass


class DomainError(FqCoverError, ValueError):
    pass


class TailNotContractive(FqCoverError, ArithmeticError):
    pass
