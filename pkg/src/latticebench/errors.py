"""Exception hierarchy shared across the workbench."""


class LatticeBenchError(Exception):
    """Base class for all workbench errors."""


class ParameterError(LatticeBenchError, ValueError):
    """A parameter lies outside its documented domain."""


class GeometryError(LatticeBenchError):
    """Generated or supplied geometry is invalid or degenerate."""


class PatternRegionError(GeometryError):
    """A fill region is too small to host a single pattern tile."""


class DisconnectedNetworkError(GeometryError):
    """A beam network that must be connected is not."""


class MechanismError(LatticeBenchError):
    """The constrained stiffness system is singular: rigid-body modes remain."""

    def __init__(self, message: str, modes=()):
        super().__init__(message)
        self.modes = tuple(modes)


class SizingInfeasibleError(LatticeBenchError):
    """No thickness within the given bounds satisfies the displacement limit."""


class ConfigError(LatticeBenchError):
    """Configuration text failed validation; carries every problem found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = (problems,)
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


class ExportError(LatticeBenchError):
    """Mesh or report emission failed."""
