class WindowError(ValueError):
    """A coefficient was requested outside the range where it is known exactly."""


class TruncationOverflow(WindowError):
    """A vertex-algebra computation needs states above the weight cutoff."""


class SubstitutionError(ValueError):
    pass


class ConvergenceDomainError(ValueError):
    pass


class NotProjectiveError(ValueError):
    pass


class IrreducibilityError(ValueError):
    """Primitive idempotents would need a proper extension of Q."""
