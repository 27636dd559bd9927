"""Exception hierarchy. Each family maps to one CLI exit code."""


class NSFourierError(Exception):
    exit_code = 1


class ParseError(NSFourierError, ValueError):
    """Syntax error in a formula or piecewise spec.

    ``offset`` is the 0-based byte offset of the offending token and
    ``expected`` the set of token kinds that would have been accepted there.
    """

    exit_code = 2

    def __init__(self, message, offset=None, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = message
        if offset is not None:
            detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class NumericError(NSFourierError, ArithmeticError):
    exit_code = 3


class DomainError(NumericError):
    """An expression was evaluated outside its domain (ln(0), sqrt(-1), 1/0, ...)."""


class QuadratureError(NumericError):
    """Adaptive quadrature hit its subdivision cap before reaching tolerance."""


class NormCollapseError(NumericError):
    """Gram-Schmidt produced a (numerically) zero vector."""

    def __init__(self, message, index):
        self.index = index
        super().__init__(message)


class PreconditionError(NSFourierError, ValueError):
    exit_code = 4


class ParityError(PreconditionError):
    """A function or spectrum does not have the parity an operation requires."""


class MissingGeneratorError(PreconditionError):
    def __init__(self, parity):
        self.parity = parity
        super().__init__(f"basis has no {parity} generator but the target has a nonzero {parity} component")


class SingularBasisError(PreconditionError):
    """Leading coefficient of a generator spectrum is (numerically) zero."""
