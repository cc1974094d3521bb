"""Exception hierarchy with stable machine codes.

Every error that can cross the service boundary carries a ``code`` that the
HTTP layer and the CLI map one-to-one onto a status / exit code.
"""

from __future__ import annotations


class HarmtaxError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "ERROR"

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.path = path


class ParseError(HarmtaxError):
    code = "PARSE_ERROR"


class TaxonomyInvalid(HarmtaxError):
    """Raised by loaders when a taxonomy document violates its invariants."""

    code = "TAXONOMY_INVALID"

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(f"{v.code} at {v.path}" for v in self.violations)
        super().__init__(f"taxonomy invalid: {summary}")


class UnknownIdError(HarmtaxError):
    """Lookup failure; carries nearest-match suggestions."""

    code = "UNKNOWN_ID"

    def __init__(self, message: str, *, path: str | None = None, suggestions=()):
        super().__init__(message, path=path)
        self.suggestions = list(suggestions)


class NotFoundError(HarmtaxError):
    code = "NOT_FOUND"


class ConflictError(HarmtaxError):
    code = "CONFLICT"


class RoundClosedError(ConflictError):
    code = "ROUND_CLOSED"


class RoundOpenError(ConflictError):
    code = "ROUND_OPEN"


class EmptyRoundError(HarmtaxError):
    code = "EMPTY_ROUND"


class UnknownSelectionError(HarmtaxError):
    code = "UNKNOWN_SELECTION"


class InvalidStatusError(HarmtaxError):
    code = "INVALID_STATUS"


class ConflictingStatusError(HarmtaxError):
    """Same (harm type, specific harm) submitted as both actual and potential."""

    code = "CONFLICTING_STATUS"


class IngestError(HarmtaxError):
    code = "INGEST_ERROR"


class NoPairableUnitsError(HarmtaxError):
    code = "NO_PAIRABLE_UNITS"


class DegenerateDataError(HarmtaxError):
    code = "DEGENERATE_DATA"


class EmptyInputError(HarmtaxError):
    code = "EMPTY_INPUT"


class UnsupportedFormatError(HarmtaxError):
    code = "UNSUPPORTED"


class AuthError(HarmtaxError):
    code = "UNAUTHORIZED"
