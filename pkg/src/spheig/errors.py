"""Exception hierarchy.

Every error carries a ``details`` mapping so the CLI can emit a machine-readable
record (``to_record``) instead of a bare message.
"""

from typing import Any


class SpheigError(Exception):
    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_record(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value: Any) -> Any:
    match value:
        case float() | int() | str() | bool() | None:
            return value
        case list() | tuple():
            return [_plain(v) for v in value]
        case dict():
            return {str(k): _plain(v) for k, v in value.items()}
        case _ if hasattr(value, "item"):
            return value.item()
        case _:
            return str(value)


# geometry


class EmptyDomain(SpheigError):
    pass


class ComplementPolar(SpheigError):
    pass


class OutsideDomain(SpheigError):
    pass


class SelfIntersection(SpheigError):
    pass


# axisymmetric shooting


class DegenerateWeight(SpheigError):
    pass


class IntegratorError(SpheigError):
    pass


class BracketFailure(SpheigError):
    pass


class MonotonicityViolation(SpheigError):
    pass


# finite elements


class MeshError(SpheigError):
    pass


class EigenIterError(SpheigError):
    pass


class PicardError(SpheigError):
    pass


# exponent program


class NegativeGap(SpheigError):
    pass


class PositivityError(SpheigError):
    pass


# cones


class ConeSolveError(SpheigError):
    pass


class FitError(SpheigError):
    pass


class ContractionFailure(SpheigError):
    pass


class NondegeneracyFailure(SpheigError):
    pass


# verification and cli


class RangeError(SpheigError, ValueError):
    pass


class ConfigError(SpheigError, ValueError):
    pass
