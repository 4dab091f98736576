"""Exception hierarchy.

Errors are split by exit-code class: configuration problems (bad input
files or parameters), domain problems (mathematically meaningful
failures such as a singular offset), and internal assertion failures.
"""


class ModelSetError(Exception):
    """Base class for all library errors."""


class ConfigError(ModelSetError):
    """Malformed or inconsistent configuration input."""


class DomainError(ModelSetError):
    """Mathematically meaningful failure for valid input."""


class SingularParameterError(DomainError):
    """An offset puts a lattice star exactly on the window boundary."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnrealizablePatchError(DomainError):
    """The patch is incompatible with the window (empty acceptance domain)."""


class SampleTooSmallError(DomainError):
    """A search exhausted the sample before reaching its goal."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class IncompleteKnowledgeError(DomainError):
    """A requested ball or margin sticks out of the sampled box."""


class InternalCheckError(ModelSetError):
    """An internal consistency assertion failed; indicates a bug."""
