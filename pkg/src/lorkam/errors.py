"""Exception hierarchy shared by all solver modules."""


class LorkamError(Exception):
    """Base class for all library errors."""


class DomainError(LorkamError):
    """Point lies outside the chart domain of the spacetime."""


class StepFailure(LorkamError):
    """Adaptive integrator could not complete a step."""


class NotTimelike(LorkamError):
    """Vector/covector is not in the interior of the future causal cone."""


class NotCausallyRelated(LorkamError):
    """The two points are not connected by any causal curve."""


class NotChronological(LorkamError):
    """The two points are not connected by a timelike curve."""


class ConvergenceFailure(LorkamError):
    """A root finder or multi-start search stagnated.

    Carries a ``diagnostics`` dict when raised by the boundary-value solver.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DomainExceeded(LorkamError):
    """Geodesic left the chart domain before the requested parameter.

    ``t_reach`` is the largest parameter that was still inside.
    """

    def __init__(self, t_reach):
        super().__init__(f"geodesic domain ends at parameter {t_reach:.6g}")
        self.t_reach = t_reach


class ClassificationGap(LorkamError):
    """A finite cut time matched neither the conjugate nor the
    multi-geodesic criterion; flags a numerical inconsistency."""


class SearchBoundaryHit(LorkamError):
    """Inner maximization pinned to the search-ball boundary; the search
    radius constant is too small for this input."""


class NUCheckFailed(LorkamError):
    """Requested multi-maximizer verification of a regularized point failed."""


class InAubry(LorkamError):
    """Retraction input failed its required non-ray / non-line membership check."""


class InconsistentCut(LorkamError):
    """Multiple maximizers disagree about the cut parameter beyond tolerance."""


class SafetyBoundHit(LorkamError):
    """No positive flow time keeps the flowed pair outside the obstruction set."""
