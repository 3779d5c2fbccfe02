"""Exceptions shared across the package."""


class DriftLabError(Exception):
    pass


class ConvergenceError(DriftLabError):
    """Eigensolver failed to converge; carries the best residuals reached."""

    def __init__(self, message, eigenvalues=(), residuals=()):
        super().__init__(message)
        self.eigenvalues = tuple(float(v) for v in eigenvalues)
        self.residuals = tuple(float(r) for r in residuals)


class UnderResolvedError(DriftLabError):
    """Product spectrum cannot be certified from the supplied prefixes."""

    def __init__(self, message, needed_left=None, needed_right=None):
        super().__init__(message)
        self.needed_left = needed_left
        self.needed_right = needed_right


class CacheFormatError(DriftLabError):
    """Cache file carries an unknown format tag."""
