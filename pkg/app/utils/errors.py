class RegpropError(Exception):
    """Base class for every error raised by regprop"""


class NonAntisymmetric(RegpropError):
    pass


class ZeroAxis(RegpropError):
    pass


class DegenerateState(RegpropError):
    pass


class OriginSingularity(RegpropError):
    pass


class RectilinearOrbit(RegpropError):
    """Angular momentum vanishes, so frames and flows are undefined"""


class AsymptoteReached(RegpropError):
    """True anomaly at or past the hyperbolic asymptote"""


class ImaginaryFrequency(RegpropError):
    """Manev flow requested with l^2 <= k2"""


class ConstraintViolated(RegpropError):
    pass


class DimensionMismatch(RegpropError):
    pass


class OrderingMismatch(RegpropError):
    """Two STMs with different coordinate orderings or parameters were combined"""


class BranchMismatch(RegpropError):
    pass


class UnknownSuite(RegpropError):
    pass


class ConfigError(RegpropError):
    """Scenario document could not be parsed or validated"""


class PropagationError(RegpropError):
    pass


class StepUnderflow(PropagationError):
    pass


class MaxStepsExceeded(PropagationError):
    pass


class NonFiniteState(PropagationError):
    pass


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def exit_code_for(error: Exception) -> int:
    """Process exit status for an error raised while running a command"""
    if isinstance(error, (ConfigError, UnknownSuite)):
        return EXIT_USAGE
    return EXIT_RUNTIME
