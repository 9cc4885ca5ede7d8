"""Exception types raised across the package."""


class HybridFaceError(Exception):
    """Base class for every error raised by hybridface."""


class ShapeError(HybridFaceError, ValueError):
    pass


class ParameterError(HybridFaceError, ValueError):
    pass


class FormatError(HybridFaceError, ValueError):
    """Malformed PGM, manifest or model file."""


class LengthError(FormatError):
    """Payload shorter than its header promises."""


class UnsupportedDepthError(FormatError):
    pass


class VersionError(FormatError):
    pass


class ValidationError(FormatError):
    """A model file parsed but its contents violate model invariants."""


class SymmetryError(HybridFaceError, ValueError):
    pass


class ConvergenceError(HybridFaceError, RuntimeError):
    pass


class SingularMatrixError(HybridFaceError, ArithmeticError):
    def __init__(self, message, pivot=0.0):
        super().__init__(message)
        self.pivot = pivot


class DegenerateDataError(HybridFaceError, ValueError):
    pass


class RankError(HybridFaceError, ValueError):
    pass


class DivergenceError(HybridFaceError, RuntimeError):
    pass


class ConfigurationError(HybridFaceError, ValueError):
    pass


class BranchError(HybridFaceError):
    """Wraps an error raised while training one recognition branch."""

    def __init__(self, branch, cause):
        super().__init__(f"{branch} branch failed: {cause}")
        self.branch = branch
        self.cause = cause
