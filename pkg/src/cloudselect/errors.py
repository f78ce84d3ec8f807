"""Exception hierarchy shared across the engine.

Errors split into two families: bad inputs from a caller (rejected with a
message naming the offending field) and violated internal invariants
(malformed data that should never have been constructed).
"""

from __future__ import annotations


class CloudSelectError(Exception):
    """Base class for all domain errors raised by this package."""


class BadRequestError(CloudSelectError):
    """A caller-supplied value is invalid; ``parameter`` names the culprit."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter


class InvariantError(CloudSelectError):
    """An internal data invariant does not hold (e.g. non-contiguous tiers)."""


class CatalogParseError(CloudSelectError):
    """The catalog document is structurally malformed."""


class CatalogValidationError(CloudSelectError):
    """The catalog parsed but one or more invariants are violated."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"catalog validation failed: {lines}")


class InconsistentJudgmentsError(CloudSelectError):
    """Pairwise comparisons are too inconsistent to derive trustworthy weights."""

    def __init__(self, consistency_ratio: float, threshold: float):
        self.consistency_ratio = consistency_ratio
        self.threshold = threshold
        super().__init__(
            f"pairwise judgments are inconsistent (CR={consistency_ratio:.4f} "
            f"> {threshold:.2f}); please revise the comparisons"
        )
