"""Exception hierarchy.

Configuration problems and solver failures are kept apart so the command
line can map them to distinct exit codes.
"""


class TouchbarError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(TouchbarError, ValueError):
    """Invalid input data: bad values, unknown labels, malformed files."""


class UnknownMaterialError(ConfigError):
    pass


class MissingMassError(ConfigError):
    pass


class PositionOutOfRangeError(ConfigError):
    pass


class SolverError(TouchbarError, ArithmeticError):
    """A numerical operation could not produce a trustworthy answer."""


class ResonanceSingularError(SolverError):
    pass


class SingularMassError(SolverError):
    pass


class EigenNoConvergenceError(SolverError):
    pass


class EigenbasisSingularError(SolverError):
    pass


class FactorizationError(SolverError):
    pass


class GridMismatchError(TouchbarError, ValueError):
    pass


class AttachmentNodeMissingError(ConfigError):
    pass


class NodeOutOfRangeError(ConfigError, IndexError):
    pass
