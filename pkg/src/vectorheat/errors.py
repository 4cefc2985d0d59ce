"""Exception hierarchy shared across the package.

The CLI maps these onto stable exit codes: validation failures exit 1,
numerical failures exit 2, I/O failures exit 3.
"""


class VhnError(Exception):
    """Base class for all package errors."""


class ValidationError(VhnError):
    """Bad input: malformed files, broken preconditions, mismatched shapes."""

    exit_code = 1


class MeshParseError(ValidationError):
    """Malformed OBJ content. Carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonManifoldError(ValidationError):
    """Mesh violates edge- or vertex-manifoldness."""


class DegenerateFaceError(ValidationError):
    """Face area below the degeneracy threshold."""


class NumericalError(VhnError):
    """Solver non-convergence, NaN gradients, failed residual checks."""

    exit_code = 2


class CacheError(VhnError):
    """Unreadable or stale cache artifacts."""

    exit_code = 3
