"""Exception hierarchy for the risk engine.

Every error raised by this package derives from :class:`DgnRiskError`, so
callers can catch a single base class at API boundaries (the CLI does).
"""


class DgnRiskError(Exception):
    """Base class for all errors raised by dgnrisk."""


class DimensionMismatch(DgnRiskError):
    """Vector/matrix dimensions are inconsistent."""


class AsymmetricInput(DgnRiskError):
    """A matrix required to be symmetric violates the symmetry tolerance."""


class NotPositiveDefinite(DgnRiskError):
    """Covariance matrix failed the Cholesky factorization."""


class OutsideStrip(DgnRiskError):
    """Complex frequency lies outside the strip where the CF is analytic."""


class UnknownParameter(DgnRiskError):
    """Parameter identifier does not name theta, delta_i or lambda_i."""


class WrongRegime(DgnRiskError):
    """Tail-asymptotics formula requested for an incompatible regime."""


class DegeneratePortfolio(DgnRiskError):
    """Portfolio value is a.s. constant; distributional operations refused."""


class NonFiniteIntegrand(DgnRiskError):
    """Integrand returned NaN or infinity."""


class QuadratureFailure(DgnRiskError):
    """A Fourier integral did not converge to the requested tolerance."""


class BracketingFailure(DgnRiskError):
    """Root bracket for the VaR level could not be established."""


class VanishingDensity(DgnRiskError):
    """Density at the VaR point is numerically zero; sensitivity undefined."""


class LevelOutOfRange(DgnRiskError):
    """Significance level outside (0, 1)."""


class InsufficientTailSample(DgnRiskError):
    """Too few scenarios fall in the requested tail."""


class IntervalNotFound(DgnRiskError):
    """No order-statistics pair achieves the requested confidence level."""


class ResourceExhausted(DgnRiskError):
    """Scenario allocation failed."""
