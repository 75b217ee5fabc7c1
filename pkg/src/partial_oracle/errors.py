"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested register or enumeration exceeds the configured size bound."""


class NormalizationError(RuntimeError):
    """A statevector drifted away from unit norm; indicates a bug, never masked."""
