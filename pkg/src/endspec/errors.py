"""Exception hierarchy. CLI maps ConfigError to exit 2, NumericalError to exit 3."""


class EndspecError(Exception):
    pass


class ConfigError(EndspecError):
    pass


class GridError(EndspecError):
    """Invalid or too-coarse discretization grid."""


class NumericalError(EndspecError):
    """Solver breakdown: singular systems, non-convergence, divergent quadrature."""
