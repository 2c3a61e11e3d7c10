"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where a formula is valid."""


class ResourceError(RuntimeError):
    """A table, cache or memory budget is too small for the request."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
