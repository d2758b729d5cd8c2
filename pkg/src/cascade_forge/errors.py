"""Exception and warning types raised across the package."""


class CascadeForgeError(Exception):
    """Base class for all package errors."""


class NumericOverflowError(CascadeForgeError):
    pass


class ThresholdViolationError(CascadeForgeError):
    """A horseshoe geometry inequality does not hold.

    ``inequality`` names the first failed condition in plain text.
    """

    def __init__(self, inequality, detail=""):
        self.inequality = inequality
        msg = inequality if not detail else f"{inequality} ({detail})"
        super().__init__(msg)


class UnknownPerturbationError(CascadeForgeError, ValueError):
    pass


class WindowError(CascadeForgeError, ValueError):
    pass


class NoConvergenceError(CascadeForgeError):
    pass


class EscapedRegionError(NoConvergenceError):
    pass


class UncodableOrbitError(CascadeForgeError):
    pass


class CensusMismatchError(CascadeForgeError):
    def __init__(self, k, missing=(), extra=(), detail=""):
        self.k = k
        self.missing = list(missing)
        self.extra = list(extra)
        super().__init__(
            f"census mismatch at k={k}: missing={self.missing} extra={self.extra} {detail}".rstrip()
        )


class SingularJacobianError(CascadeForgeError):
    pass


class StepFailureError(CascadeForgeError):
    pass


class SwitchFailureError(CascadeForgeError):
    pass


class OrientationError(CascadeForgeError):
    pass


class InvalidChainError(CascadeForgeError, ValueError):
    pass


class UniquenessViolationError(CascadeForgeError):
    def __init__(self, first, second, detail=""):
        self.pair = (first, second)
        super().__init__(f"uniqueness violation between {first} and {second} {detail}".rstrip())


class ConfigError(CascadeForgeError, ValueError):
    pass


class NonhyperbolicOrbitWarning(UserWarning):
    """A multiplier lies within the hyperbolicity margin of the unit circle."""
