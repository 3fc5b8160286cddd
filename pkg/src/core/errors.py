"""Exception hierarchy shared by the numerical core and the command line."""

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INSTABILITY = 4


class QBMError(Exception):
    """Base class for all toolkit errors."""
    exit_code = EXIT_NUMERICAL


class InvalidParameter(QBMError, ValueError):
    """A constructor received a value outside its allowed range."""
    exit_code = EXIT_CONFIG


class ConfigError(QBMError, ValueError):
    """A configuration block could not be turned into domain objects."""
    exit_code = EXIT_CONFIG


class ZeroFriction(QBMError, ValueError):
    """Operation needs R > 0 (Einstein relation, regime classifier)."""
    exit_code = EXIT_CONFIG


class ZeroTemperature(QBMError, ValueError):
    """The y-correlator diverges at T = 0."""
    exit_code = EXIT_CONFIG


class NonpositiveTime(QBMError, ValueError):
    exit_code = EXIT_CONFIG


class GridTooCoarse(QBMError, ValueError):
    exit_code = EXIT_CONFIG


class WindowTooEarly(QBMError, ValueError):
    exit_code = EXIT_CONFIG


class DegeneratePath(QBMError, ValueError):
    exit_code = EXIT_CONFIG


class EndpointMismatch(QBMError, ValueError):
    exit_code = EXIT_CONFIG


class QuadratureFailure(QBMError):
    """Adaptive quadrature did not meet tolerance inside its subinterval budget."""
    exit_code = EXIT_NUMERICAL


class ZeroTrace(QBMError):
    exit_code = EXIT_NUMERICAL


class UnstableConfig(QBMError):
    """The time step or grid cannot carry the run without blow-up or aliasing."""
    exit_code = EXIT_INSTABILITY


class UnstableDt(QBMError):
    """Langevin step does not resolve the momentum relaxation time."""
    exit_code = EXIT_INSTABILITY


class NaNDetected(QBMError):
    """Non-finite values appeared during time stepping."""
    exit_code = EXIT_INSTABILITY

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite density matrix at step {step}")
