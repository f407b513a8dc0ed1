"""Exception types raised across the package."""


class AttocellError(Exception):
    """Base class for all package-specific errors."""


class ScenarioError(AttocellError):
    """Scenario configuration is malformed or fails validation."""


class DimensionMismatchError(AttocellError):
    """Array arguments disagree on transmitter/element/device counts."""


class UnservableDeviceError(AttocellError):
    """A device receives no light from any transmitter element."""


class TargetUnreachableError(AttocellError):
    """An energy target exceeds what the model can deliver."""


class InfeasibleError(AttocellError):
    """A requested optimization problem has no feasible point."""


class SolverStallError(AttocellError):
    """An iterative solver failed to make progress within its budget."""
