"""Shared exception types."""


class InstanceTooLargeError(ValueError):
    """Raised when an exhaustive operation is asked for an oversized instance."""


class WrongModelVariantError(ValueError):
    """Raised when an operation needs a different probability-model variant."""
