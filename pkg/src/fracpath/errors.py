"""Exception types shared across the library."""

from __future__ import annotations

__all__ = [
    "FracpathError",
    "InvalidParameterError",
    "InvalidConfigError",
    "SamplingInfeasibleError",
    "InsufficientDerivativesError",
    "InvalidBundleError",
    "InvalidPhiError",
    "NoLimitError",
    "QuadratureError",
    "KernelSingularError",
    "AdmissibilityError",
]


class FracpathError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(FracpathError, ValueError):
    """A parameter is outside the documented domain."""


class InvalidConfigError(FracpathError, ValueError):
    """An experiment configuration failed validation."""


class SamplingInfeasibleError(FracpathError, RuntimeError):
    """A Gaussian path cannot be sampled with the available factorizations."""


class InsufficientDerivativesError(FracpathError, ValueError):
    """An operation needs more derivatives than the bundle provides."""


class InvalidBundleError(FracpathError, ValueError):
    """A derivative bundle is inconsistent (e.g. asymmetric tensors)."""


class InvalidPhiError(FracpathError, ValueError):
    """A phi evaluator violated its contract (e.g. negative values)."""


class NoLimitError(FracpathError, RuntimeError):
    """A numeric limit did not stabilize; refusing to guess."""


class QuadratureError(FracpathError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class KernelSingularError(FracpathError, RuntimeError):
    """The remainder kernel has no finite diagonal limit at this point."""


class AdmissibilityError(FracpathError, RuntimeError):
    """A regularity gate for an identity check is not satisfied."""
