"""Error types raised by the library."""


class ConfigError(ValueError):
    """A scenario file or preset request is malformed."""


class GeometryError(ValueError):
    """A geometric computation received degenerate input.

    Raised for coincident transmit/receive points, rotation matrices that
    fail the orthonormality check, and elevation angles at the arcsin
    branch point where the measurement Jacobian is undefined.
    """
