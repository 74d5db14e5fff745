"""Exception types shared across the library."""


class CartanError(Exception):
    """Base class for all library-specific errors."""


class InvalidDimension(CartanError):
    pass


class NumericalFailure(CartanError):
    pass


class PrincipalLogUndefined(CartanError):
    """Spectrum touches the closed negative real axis; the principal
    matrix logarithm does not exist."""


class NotInAlgebra(CartanError):
    """A matrix does not lie in the span of the algebra basis."""


class NotAnIsomorphism(CartanError):
    pass


class InvalidMutation(CartanError):
    pass


class SignatureError(CartanError):
    pass


class DegenerateMetric(CartanError):
    pass


class UnknownModel(CartanError):
    pass


class ParseError(CartanError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownSymbol(CartanError):
    def __init__(self, name, offset=None):
        msg = f"unknown symbol '{name}'"
        if offset is not None:
            msg += f" (offset {offset})"
        super().__init__(msg)
        self.name = name
        self.offset = offset


class OutOfChart(CartanError):
    pass


class FieldError(CartanError):
    pass


class Unsupported(CartanError):
    pass


class DomainError(CartanError):
    pass


class NoGeodesicFound(CartanError):
    """Bounded search exhausted without a connecting geodesic.  This is
    evidence, not proof of non-existence."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget
