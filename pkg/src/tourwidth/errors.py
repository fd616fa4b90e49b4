class InputError(ValueError):
    """Malformed or inconsistent user input."""


class CapExceeded(RuntimeError):
    """A configured size cap (submonoid, brute force) was exceeded."""


class TheoryViolation(AssertionError):
    """A bound or identity guaranteed by the construction failed at runtime."""
