"""Exception types shared across the package."""


class RrmError(Exception):
    """Base class for all package-specific errors."""


class DomainError(RrmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(RrmError):
    """A root-finding bracket does not enclose a sign change."""


class ConvergenceError(RrmError):
    """An iterative solver exhausted its iteration budget."""


class InfeasibleRateError(RrmError):
    """The requested rate exceeds what the effective SINR supports."""


class AllInfeasibleError(InfeasibleRateError):
    """The equal-power start violates some VUE's rate requirement, so the
    whole allocation instance is declared infeasible."""


class ConfigError(RrmError):
    """A configuration file could not be parsed or validated."""
