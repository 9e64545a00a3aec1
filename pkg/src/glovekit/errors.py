"""Exception hierarchy shared across the toolkit."""


class GlovekitError(Exception):
    """Base class for all toolkit errors."""


class ProtocolError(GlovekitError):
    """Invalid frame/command content or malformed host command line."""


class CalibrationError(GlovekitError):
    """Calibration profile cannot be built or is inconsistent."""


class ShapeMismatchError(GlovekitError):
    """Inputs disagree on dimensionality (channels, joints, basis size)."""


class SingularSystemError(GlovekitError):
    """Unregularized least-squares system is numerically singular."""


class FormatError(GlovekitError):
    """A persisted file does not conform to its declared format."""


class TransportError(GlovekitError):
    """Byte transport failed or ended before the session completed."""
