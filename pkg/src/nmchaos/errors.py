"""Exception hierarchy shared by the whole package.

Configuration problems map to CLI exit code 1, numerical failures to exit
code 2; everything derives from :class:`NmchaosError` so callers can catch
broadly.
"""


class NmchaosError(Exception):
    """Base class for all package errors."""


# --- configuration -------------------------------------------------------

class ConfigError(NmchaosError):
    """Base class for configuration/CLI-input problems (exit code 1)."""


class ParseError(ConfigError):
    """Config file is not well-formed TOML."""


class ValidationError(ConfigError):
    """A config value violates its documented constraint."""


class UnknownKeyError(ConfigError):
    """Config contains a key the schema does not define (strict mode)."""


# --- numerics ------------------------------------------------------------

class NumericalError(NmchaosError):
    """Base class for runtime numerical failures (exit code 2)."""


class StepSizeUnderflow(NumericalError):
    """The adaptive step controller pushed h below its hard floor.

    Signals stiffness or divergence of the integrated system.
    """

    def __init__(self, t, h):
        super().__init__(f"step size underflow at t={t:.6g} (h={h:.3e})")
        self.t = t
        self.h = h


class NonFiniteState(NumericalError):
    """A state component became NaN or infinite during integration."""

    def __init__(self, t):
        super().__init__(f"non-finite state encountered at t={t:.6g}")
        self.t = t


class GridTooCoarse(NumericalError):
    """Kernel-field grid refinement disagrees with the internal error model."""


class GridMismatch(NumericalError):
    """Two time grids that must align cannot be matched."""


# --- series / estimators --------------------------------------------------

class SeriesError(NmchaosError):
    """Base class for problems with scalar time series input."""


class SeriesTooShort(SeriesError):
    """Series has too few samples for the requested embedding."""


class DegenerateCloud(SeriesError):
    """Embedded point cloud has too few distinct points to track neighbors."""


class EmptyWindow(SeriesError):
    """Requested averaging window contains no defined estimate samples."""
