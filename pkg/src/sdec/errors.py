"""Exception hierarchy shared across the engine."""


class SdecError(Exception):
    """Base class for all engine errors."""


class ShapeError(SdecError, ValueError):
    """Operand dimensions are incompatible."""


class DegenerateVectorError(SdecError, ValueError):
    """A vector with zero norm was passed where a direction is required."""


class DegenerateRowError(SdecError, ValueError):
    """A matrix row cannot be normalized (zero norm or constant)."""

    def __init__(self, row: int, reason: str):
        self.row = row
        super().__init__(f"row {row}: {reason}")


class EmptySequenceError(SdecError, ValueError):
    """A token sequence has no unmasked tokens."""


class InfeasibleError(SdecError, ValueError):
    """Requested operation cannot be satisfied by the data (e.g. k > n)."""


class FormatError(SdecError):
    """Base class for file-format errors."""


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(FormatError):
    """File version is not supported by this reader."""


class TruncatedPayloadError(FormatError):
    """File payload is shorter or longer than the header declares."""


class CorruptCheckpointError(FormatError):
    """Checkpoint structure is internally inconsistent."""


class ConfigError(SdecError, ValueError):
    """Run configuration is malformed (unknown key, bad type, bad value)."""
