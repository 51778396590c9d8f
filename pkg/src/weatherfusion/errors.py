"""Engine error hierarchy.

Every failure that crosses a module boundary carries a stable ``code``
string (``E_*``) so the CLI and the HTTP service can report it verbatim.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""

    code = "E_INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class YearRangeError(EngineError):
    code = "E_YEAR_RANGE"


class NetworkError(EngineError):
    code = "E_NETWORK"


class DiskError(EngineError):
    code = "E_DISK"


class CorruptGzipError(EngineError):
    code = "E_CORRUPT_GZ"


class MalformedError(EngineError):
    code = "E_MALFORMED"


class UnknownCountryError(EngineError):
    code = "E_UNKNOWN_COUNTRY"


class UnknownScopeError(EngineError):
    code = "E_UNKNOWN_SCOPE"


class MissingYearError(EngineError):
    code = "E_MISSING_YEAR"


class ExistsError(EngineError):
    code = "E_EXISTS"


class BusyError(EngineError):
    code = "E_BUSY"


class EmptyError(EngineError):
    code = "E_EMPTY"


class EmptyStationListError(EngineError):
    code = "E_EMPTY_STATION_LIST"


class UnitMismatchError(EngineError):
    code = "E_UNIT_MISMATCH"


class InsufficientDataError(EngineError):
    code = "E_INSUFFICIENT_DATA"


class NumericError(EngineError):
    code = "E_NUMERIC"


class DegenerateError(EngineError):
    code = "E_DEGENERATE"


class LengthError(EngineError):
    code = "E_LENGTH"


class NoOverlapError(EngineError):
    code = "E_NO_OVERLAP"
