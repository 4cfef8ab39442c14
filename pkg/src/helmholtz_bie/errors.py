"""Exception types raised by the solver library."""


class HelmholtzBIEError(Exception):
    """Base class for all library errors."""


class BranchCut(HelmholtzBIEError, ValueError):
    """Argument lies on the excluded half-line (-inf, 0]."""


class OriginSingularity(HelmholtzBIEError, ValueError):
    """Fundamental solution evaluated at the origin."""


class InvalidWavenumber(HelmholtzBIEError, ValueError):
    pass


class OddN(HelmholtzBIEError, ValueError):
    """Per-curve node count must be even."""


class CurveTooClose(HelmholtzBIEError, ValueError):
    pass


class GeometryError(HelmholtzBIEError, ValueError):
    pass


class NearBoundary(HelmholtzBIEError, ValueError):
    """Evaluation point inside the refusal band around the boundary."""


class WrongRegion(HelmholtzBIEError, ValueError):
    pass


class SingularGeometry(HelmholtzBIEError, RuntimeError):
    """Discrete system more rank-deficient than the predicted kernel."""


class UnresolvedDip(HelmholtzBIEError, RuntimeError):
    pass


class HypothesisViolated(HelmholtzBIEError, ValueError):
    pass


class NoConvergence(HelmholtzBIEError, RuntimeError):
    pass
