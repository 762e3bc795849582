"""Exception hierarchy shared by every module of the toolkit."""


class AssocEmpError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(AssocEmpError, ValueError):
    """A parameter lies outside its admissible range."""


class DomainError(AssocEmpError, ValueError):
    """An argument lies outside the domain of a mathematical function."""


class EmptyInputError(AssocEmpError, ValueError):
    pass


class CapacityError(AssocEmpError, MemoryError):
    """Requested sizes exceed the configured resource guard."""


class GridError(AssocEmpError, ValueError):
    """An evaluation grid does not contain the lattice a statistic needs."""


class TruncationError(AssocEmpError, RuntimeError):
    """A series tail cannot be certified below the requested tolerance."""


class NotPSDError(AssocEmpError, RuntimeError):
    """A covariance matrix stays indefinite after the maximal jitter."""


class NeedReplicatesError(AssocEmpError, ValueError):
    pass


class UnderpoweredError(AssocEmpError, ValueError):
    """Too few replicates for a two-sample comparison."""


class UnsupportedMarginalError(AssocEmpError, ValueError):
    pass


class ConfigError(AssocEmpError, ValueError):
    """Malformed experiment configuration or unknown check name."""
