"""Exception hierarchy shared across the package."""


class DilationLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(DilationLabError, ValueError):
    """Arguments outside the domain of an operation."""


class BracketError(DilationLabError, ValueError):
    """Root bracket endpoints have the same sign."""


class NonConvergence(DilationLabError, ArithmeticError):
    """An iterative routine ran out of iterations before meeting its tolerance."""


class ExcludedTriple(DomainError):
    """Curvature triple for which no closed profile formula exists."""


class OutOfDomain(DomainError):
    """epsilon_bound called at or above the admissibility threshold."""


class Infeasible(DilationLabError):
    """No candidate set attains the requested mass."""


class SingularProfile(DilationLabError, ArithmeticError):
    """Profile value too close to zero to divide by."""


class AssumptionAViolated(DilationLabError):
    """The profile failed the regularity check needed by the eps-bound pipeline."""


class NotNormalized(DomainError):
    """A density ratio does not integrate to one."""


class NonIntegrable(DomainError):
    """A required moment or power of a function is not integrable."""


class InadmissibleG(DomainError):
    """Test function outside the class allowed by the dual formula."""


class CurvatureViolated(DilationLabError):
    """Measure does not satisfy the curvature condition required by a bound."""


class Infinite(DilationLabError, ArithmeticError):
    """A quantity that must be finite turned out to be infinite."""
