from __future__ import annotations


class GrwsError(Exception):
    """Base class of every error raised by this package."""


class ValidationError(GrwsError, ValueError):
    """The input cannot be processed; the command line reports it with exit code 1."""


class InvalidRational(ValidationError):
    pass


class InvalidArgument(ValidationError):
    pass


class ParameterOutOfSquare(ValidationError):
    def __init__(self, detail: str = "") -> None:
        super().__init__(f"parameter out of square{f': {detail}' if detail else ''}")


class TargetOutsideSquare(ValidationError):
    def __init__(self, detail: str = "") -> None:
        super().__init__(f"target outside square{f': {detail}' if detail else ''}")


class NegativeCoefficient(ValidationError):
    def __init__(self, index: int, value: object) -> None:
        super().__init__(f"negative coefficient: m_{index} = {value}")
        self.index = index
        self.value = value


class OutsideSector(ValidationError):
    pass


class InexactValue(GrwsError):
    """An exact rational was requested for a quantity that is not rational."""


class InvariantBreach(GrwsError):
    """An exact identity that must hold did not; the command line reports it with exit code 2."""
