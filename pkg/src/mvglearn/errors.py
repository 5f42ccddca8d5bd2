"""Exception types shared across the package."""


class MvglError(Exception):
    """Base class for all mvglearn errors."""


class InvalidMatrix(MvglError):
    """Input matrix is not square or not symmetric within tolerance."""


class InvalidHyperparameter(MvglError):
    """A hyperparameter is outside its valid range."""


class InvalidData(MvglError):
    """Observation data is malformed (non-finite entries, bad shapes, unparsable files)."""


class DimensionMismatch(MvglError):
    """Inputs that must share dimensions do not."""


class InvalidConfig(MvglError):
    """A simulation, solver-options or benchmark configuration is invalid."""


class EmptyGraph(MvglError):
    """An operation that needs at least one edge was given an empty graph."""
