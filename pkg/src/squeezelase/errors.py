"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class SqueezeLaseError(Exception):
    exit_code = 1
    kind = "error"


class ConfigError(SqueezeLaseError):
    """Invalid or incomplete configuration (descriptor, calibration metadata, flags)."""

    exit_code = 2
    kind = "config"


class TraceParseError(SqueezeLaseError):
    """Malformed CSV input. ``line`` is 1-based, or None if not tied to a line."""

    exit_code = 3
    kind = "parse"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(SqueezeLaseError, ValueError):
    exit_code = 4
    kind = "domain"


class ThresholdSingularityError(DomainError):
    """The linearized OPO model is at or above its oscillation threshold."""

    exit_code = 5
    kind = "threshold-singularity"
