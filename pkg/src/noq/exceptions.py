"""Exception types raised by the toolkit."""


class NoqError(Exception):
    """Base class for all errors raised by :mod:`noq`."""


class DimensionError(NoqError, ValueError):
    """Shapes or subsystem dimensions are inconsistent."""


class ValidationError(NoqError, ValueError):
    """An object violates one of its invariants.

    The message always names the violated invariant, e.g. ``"hermitian"``.
    """

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidBasisError(ValidationError):
    def __init__(self, detail=""):
        super().__init__("unitary basis", detail)


class DomainError(NoqError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class NumericalError(NoqError, ArithmeticError):
    """A numerical routine failed; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(f"{message}; diagnostics={self.diagnostics}")
