"""Shared exception types."""


class InputError(ValueError):
    """Raised when an input (file, name, argument, config) fails validation."""


class MalformedNameError(InputError):
    """Raised when a name cannot be split into labels."""
