"""Exception hierarchy shared by every module of the package."""


class QuasiprobError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(QuasiprobError, ValueError):
    pass


class InvalidInputError(QuasiprobError, ValueError):
    pass


class InvalidSpecError(QuasiprobError, ValueError):
    pass


class RangeError(QuasiprobError, ValueError):
    """Argument outside the documented stability envelope."""


class TruncationError(QuasiprobError):
    """The Fock truncation is too small for the requested accuracy.

    ``minimal_dim`` is filled in when the caller can compute an adequate size.
    """

    def __init__(self, message, minimal_dim=None):
        super().__init__(message)
        self.minimal_dim = minimal_dim


class QuadratureError(QuasiprobError):
    """Quadrature did not converge, or left a residue it should not have."""


class DivergenceError(QuasiprobError):
    pass


class DomainError(QuasiprobError):
    """Integration or sampling domain does not cover the integrand support."""

    def __init__(self, message, required_extent=None):
        super().__init__(message)
        self.required_extent = required_extent


class PositivityError(QuasiprobError):
    pass


class UncalibratedRouteError(QuasiprobError):
    pass


class CalibrationError(QuasiprobError):
    pass


class StateSpecError(QuasiprobError, ValueError):
    """Malformed state specification; ``position`` indexes the input text."""

    def __init__(self, message, position=0):
        super().__init__(f"{message} (at position {position})")
        self.position = position
        self.reason = message


class UnknownKindError(StateSpecError):
    pass


class ArityError(StateSpecError):
    pass


class ComplexLiteralError(StateSpecError):
    pass


class ParameterRangeError(StateSpecError):
    pass
