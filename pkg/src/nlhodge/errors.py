"""Exception hierarchy shared by every module."""
from __future__ import annotations


class NLHodgeError(Exception):
    """Base class; ``module`` names the component that raised."""

    module = "nlhodge"


class DimensionError(NLHodgeError, ValueError):
    module = "symcore"


class MetricDegenerateError(NLHodgeError):
    module = "chern"

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class IntegrabilityUndefinedError(NLHodgeError):
    module = "bundles"


class SingularFrameError(NLHodgeError):
    module = "bundles"


class LiftingConditionError(NLHodgeError):
    module = "curvature"


class ConjugationUnavailableError(NLHodgeError):
    module = "conjugation"


class BetaPreservationError(NLHodgeError):
    module = "simpson"


class PeriodDomainError(NLHodgeError):
    module = "rank1"


class ContinuationEscaped(NLHodgeError):
    """Integration left the domain; ``parameter`` is the path parameter at escape."""

    module = "monodromy"

    def __init__(self, message: str, parameter: float, value=None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value


class PoleProximityError(NLHodgeError):
    module = "monodromy"


class WordCountExceeded(NLHodgeError):
    module = "monodromy"


class ScenarioError(NLHodgeError):
    """Schema violation; ``path`` is the offending field path."""

    module = "cli"

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
