"""Exception hierarchy.

Two branches matter for callers (and for the CLI exit codes):

  * ``ValidationError`` -- the input data or a declared precondition is bad;
    nothing was computed.  CLI exit status 2.
  * ``NumericalError`` -- the computation itself failed (divergent Newton
    iteration, divergent series, lost hyperbolicity, ...).  CLI exit status 3.
"""

from __future__ import annotations


class SkewTorusError(Exception):
    """Base class for all library errors."""


class ValidationError(SkewTorusError):
    """Invalid input or violated precondition."""


class NumericalError(SkewTorusError):
    """A numerical procedure failed to produce a trustworthy result."""


# -- validation ---------------------------------------------------------------

class NotUnimodular(ValidationError):
    """Integer matrix does not have determinant +1."""


class NotHyperbolic(ValidationError):
    """Integer matrix has |trace| <= 2, hence eigenvalues on the unit circle."""


class NegativeEigenvalues(ValidationError):
    """Hyperbolic matrix with trace < -2; negative eigenvalues unsupported."""


class EnumerationCapExceeded(ValidationError):
    """A periodic-point enumeration would exceed the configured cap."""


class RealityViolation(ValidationError):
    """A trigonometric polynomial fails to be real-valued."""


class InsufficientScales(ValidationError):
    """Too few usable scales/data points for a regression estimate."""


class NonpositiveRoof(ValidationError):
    """Suspension roof function is not strictly positive."""


class DivergentSeries(ValidationError):
    """A series whose convergence requires a center-expanding model."""


class ChartNotAdapted(ValidationError):
    """A chart change violates one of the adapted-axis conditions."""


# -- numerical ----------------------------------------------------------------

class NoConvergence(NumericalError):
    """Coefficient transport failed to decay within the orbit-length cap."""


class MeanObstruction(NumericalError):
    """Zero-frequency component of a cohomological equation is unsolvable."""


class NewtonDiverged(NumericalError):
    """Newton iteration failed to converge."""


class InverseNewtonDiverged(NewtonDiverged):
    """Newton inversion of a perturbed map failed to converge."""


class HyperbolicityLost(NumericalError):
    """A periodic-orbit eigenvalue modulus is too close to 1."""


class SplittingCollapse(NumericalError):
    """Subspace intersection in the splitting computation is ill-conditioned."""


class MatchFailed(NumericalError):
    """Orbit matching by continuation diverged."""


class UniquenessSuspect(NumericalError):
    """A second solution was found inside the shadowing ball."""


class ZetaVanished(NumericalError):
    """The template-minus-series coefficient vanished at a scan grid point."""
