"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed to converge or violated a hard check (CLI exit code 3)."""
