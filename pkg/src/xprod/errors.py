"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input data: bad labels, bad matrix, unparsable spec."""


class ContractError(RuntimeError):
    """An operation was called outside its stated preconditions."""


class ResourceGuardError(RuntimeError):
    """A size or degree guard tripped before memory could blow up."""
