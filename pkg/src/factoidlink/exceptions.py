"""Exception types shared across the package."""


class FactoidLinkError(Exception):
    """Base class for all factoidlink errors."""


class InputError(FactoidLinkError):
    """Invalid input data: malformed files, broken references, bad ids."""


class DivergenceError(FactoidLinkError):
    """Training produced non-finite values."""
