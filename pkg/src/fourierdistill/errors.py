"""Exception and warning types shared across the package."""


class CapacityError(Exception):
    """Register too large for dense amplitude-vector representation."""


class DegenerateInputError(ValueError):
    """Operation has no valid outcome (disjoint spectra, zero-probability branch)."""


class PrecisionWarning(UserWarning):
    """Numerical result may be less precise than the requested target."""
