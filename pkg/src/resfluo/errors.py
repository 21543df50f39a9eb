"""Exception types shared across the package."""


class InvalidParametersError(ValueError):
    """Atomic or scene parameters violate a documented precondition."""


class UnreachableRatioError(ValueError):
    """Requested coherence ratio lies at or below the weak-drive infimum."""


class NoConvergenceError(RuntimeError):
    """An iterative solve failed to reach its residual target."""


class DegeneratePatternError(ValueError):
    """A detector sits on the dipole axis, so its pattern vector vanishes."""


class UndrivenAtomError(ValueError):
    """Operation needs a driven atom (sigma22 or sigma21 is zero)."""


class TooLargeError(ValueError):
    """Joint-space construction requested beyond the supported atom count."""


class ZeroIdealMinorError(ValueError):
    """Relative negativity is undefined because the ideal minor is zero."""


class ConfigError(ValueError):
    """Configuration file or key set is invalid for the requested run."""


class VerificationError(RuntimeError):
    """An emitted value disagreed with the brute-force backend."""
