"""Exception types shared across the pipeline."""

from __future__ import annotations


class SlabcodeError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(SlabcodeError, ValueError):
    """An argument is outside its documented domain."""


class BoundsError(SlabcodeError, ValueError):
    """A rectangle or coordinate does not fit inside its image."""


class ConfigError(SlabcodeError, ValueError):
    """A configuration file or color-spec set is invalid."""


class EmptySplitError(SlabcodeError, ValueError):
    """A dataset split has no images usable for the requested operation."""


class ManifestError(SlabcodeError, ValueError):
    """A dataset manifest row cannot be parsed or resolved."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NoBandsError(SlabcodeError):
    """Decoding found no color bands; carries the per-color mask report."""

    def __init__(self, message: str = "no bands detected", report: dict | None = None):
        super().__init__(message)
        self.report = report or {}
