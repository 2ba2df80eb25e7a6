"""Exception hierarchy shared by all cvdistill modules."""


class CVDistillError(Exception):
    """Base class for errors raised by cvdistill."""


class InvalidArgument(CVDistillError, ValueError):
    """A parameter is outside its admissible range."""


class InvalidState(CVDistillError, ValueError):
    """A matrix does not represent a valid quantum state."""


class CapacityError(CVDistillError, MemoryError):
    """A requested Fock-space computation exceeds the configured size budget."""
