"""Exception types shared across the package."""


class BandClustError(Exception):
    """Base class for all bandclust errors."""


class InputError(BandClustError):
    """Malformed or inconsistent input data (bad shape, bad indices, ...)."""


class NonFiniteError(InputError):
    """A NaN or infinite value was encountered where a finite one is required."""
