"""Exception types shared across the library."""


class AutocurriculaError(Exception):
    """Base class for all library errors."""


class ConfigError(AutocurriculaError):
    """Invalid configuration value or unknown configuration key."""


class LevelError(AutocurriculaError):
    """A level violates its structural invariants or cannot be parsed."""


class LevelParseError(LevelError):
    """Malformed level text. Carries 1-based line/column of the offending char."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class ContractViolation(AutocurriculaError):
    """An operation was called outside its documented preconditions."""


class ShapeError(AutocurriculaError):
    """Array arguments do not match the declared batch shape."""


class RunnerFault(AutocurriculaError):
    """Unrecoverable runtime fault (non-finite loss, shard divergence)."""
