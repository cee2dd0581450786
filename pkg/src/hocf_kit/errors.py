"""Exception hierarchy shared by all modules."""


class HocfError(Exception):
    """Base class for every error raised by hocf_kit."""


class GridError(HocfError, ValueError):
    pass


class PositivityViolation(HocfError, ValueError):
    pass


class ZeroParameter(HocfError, ValueError):
    pass


class DomainError(HocfError, ValueError):
    pass


class NotObservable(HocfError, ValueError):
    pass


class ResolutionError(HocfError, ValueError):
    pass


class WindowMismatch(HocfError, ValueError):
    pass


class WindowTooShort(HocfError, ValueError):
    pass


class GridTooCoarse(HocfError, ValueError):
    pass


class InsufficientTrace(HocfError, ValueError):
    pass


class KernelDomainError(HocfError, ValueError):
    pass


class NoConvergence(HocfError, RuntimeError):
    pass


class SingularMarch(HocfError, ZeroDivisionError):
    pass


class ConfigError(HocfError, ValueError):
    """Malformed system or run configuration."""
