"""Exception types raised across the package."""


class OpdynError(Exception):
    """Base class for all package errors."""


class DimensionError(OpdynError, ValueError):
    pass


class ConvergenceError(OpdynError, RuntimeError):
    pass


class DomainError(OpdynError, ValueError):
    pass


class SpecificationError(OpdynError, ValueError):
    """An operator specification cannot be materialized as requested."""


class MembershipError(OpdynError, ValueError):
    """A matrix does not belong to the requested model algebra."""


class CapExceededError(OpdynError, ValueError):
    """A lift or decomposition would exceed its configured size cap."""


class ConfigError(OpdynError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"field {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
