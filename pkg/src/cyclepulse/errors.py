"""Error taxonomy shared by all solver pipelines.

Every runtime numerical failure derives from NumericsError so the CLI can
map the whole family to a single exit code; the class name is the
diagnostic printed on stderr.
"""


class NumericsError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class NonMonotone(NumericsError):
    """A map that must be nondecreasing has a negative unwrapped increment."""


class HNearOne(NumericsError):
    """Initial slope energy too close to 1; the 1/(1-h) coefficients blow up."""


class SmoothnessLost(NumericsError):
    """Direct Eulerian march steepened past its trust threshold."""


class DriftExceeded(NumericsError):
    """Invariant residuals exceeded the configured guard during a march."""


class NoContraction(NumericsError):
    """Characteristic fixed-point iteration failed to contract."""


class MaskTooLarge(NumericsError):
    """Too many slope samples invalid to evaluate an integral functional."""


class ConfigError(Exception):
    """Invalid run configuration (CLI exit code 2)."""
