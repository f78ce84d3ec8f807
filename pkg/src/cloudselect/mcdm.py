"""Criterion weighting and scalarization.

Weights come from a reciprocal pairwise-comparison matrix via its principal
eigenvector (power iteration), with the classic consistency-ratio check
against Saaty's random indices. Alternatives are scored by simple additive
weighting over min-max normalized criterion columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError

# Random consistency index for matrices of order 1..10.
RANDOM_INDEX = (0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49)

RECIPROCAL_TOLERANCE = 1e-9
POWER_ITERATION_RESIDUAL = 1e-10
POWER_ITERATION_MAX_STEPS = 10_000


@dataclass(frozen=True)
class PairwiseMatrix:
    """Square reciprocal matrix of relative criterion importances."""

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n == 0:
            raise InvariantError("pairwise matrix must have at least one criterion")
        if any(len(row) != n for row in self.entries):
            raise InvariantError("pairwise matrix must be square")
        for i in range(n):
            if abs(self.entries[i][i] - 1.0) > RECIPROCAL_TOLERANCE:
                raise InvariantError(f"diagonal entry [{i}][{i}] must be 1")
            for j in range(n):
                value = self.entries[i][j]
                if value <= 0:
                    raise InvariantError(f"entry [{i}][{j}] must be positive")
                if abs(self.entries[j][i] - 1.0 / value) > RECIPROCAL_TOLERANCE * max(
                    1.0, 1.0 / value
                ):
                    raise InvariantError(
                        f"entry [{j}][{i}] must be the reciprocal of entry [{i}][{j}]"
                    )

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, rows) -> "PairwiseMatrix":
        return cls(tuple(tuple(float(x) for x in row) for row in rows))

    @classmethod
    def consistent_from_weights(cls, weights) -> "PairwiseMatrix":
        """Build the perfectly consistent matrix w_i / w_j."""
        return cls.from_rows([[wi / wj for wj in weights] for wi in weights])


@dataclass(frozen=True)
class CriterionWeights:
    weights: dict[str, float]
    consistency_ratio: float

    def vector(self, names) -> tuple[float, ...]:
        return tuple(self.weights[name] for name in names)


def ahp_weights(matrix: PairwiseMatrix, names=None) -> CriterionWeights:
    """Derive normalized weights and the consistency ratio from a matrix.

    Power iteration runs until the eigenvector residual drops below 1e-10;
    CR is ((lambda_max - n) / (n - 1)) / RI(n), defined as 0 for n <= 2.
    """
    n = matrix.n
    if names is None:
        names = [f"criterion_{i}" for i in range(n)]
    if len(names) != n:
        raise InvariantError(f"expected {n} criterion names, got {len(names)}")
    if n > len(RANDOM_INDEX):
        raise InvariantError(
            f"no random consistency index for {n} criteria (max {len(RANDOM_INDEX)})"
        )

    a = np.array(matrix.entries, dtype=float)
    w = np.full(n, 1.0 / n)
    lambda_max = float(n)
    for _ in range(POWER_ITERATION_MAX_STEPS):
        aw = a @ w
        lambda_max = float(aw.sum())  # w sums to 1, so sum(Aw) estimates the eigenvalue
        next_w = aw / aw.sum()
        if float(np.abs(next_w - w).max()) < POWER_ITERATION_RESIDUAL:
            w = next_w
            break
        w = next_w

    if n <= 2:
        cr = 0.0
    else:
        ci = (lambda_max - n) / (n - 1)
        cr = max(0.0, ci / RANDOM_INDEX[n - 1])

    return CriterionWeights(
        weights={name: float(weight) for name, weight in zip(names, w)},
        consistency_ratio=cr,
    )


def normalize_criteria(values, direction: str) -> list[float]:
    """Min-max normalize one criterion column onto a benefit scale in [0, 1].

    A constant column normalizes to all 1.0: with no spread the criterion
    cannot discriminate, so every alternative gets full credit.
    """
    if len(values) == 0:
        raise InvariantError("cannot normalize an empty column")
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    if direction == "maximize":
        return [(x - lo) / (hi - lo) for x in values]
    if direction == "minimize":
        return [(hi - x) / (hi - lo) for x in values]
    raise InvariantError(f"direction must be minimize or maximize, got '{direction}'")


def saw_score(normalized: dict[str, float], weights: CriterionWeights) -> float:
    """Weighted sum of normalized criterion values; higher is better."""
    if set(normalized) != set(weights.weights):
        missing = set(weights.weights) ^ set(normalized)
        raise InvariantError(f"criterion mismatch between values and weights: {sorted(missing)}")
    return sum(weights.weights[name] * normalized[name] for name in normalized)


def saw_rank(
    rows: dict[str, dict[str, float]] | list[dict[str, float]],
    directions: dict[str, str],
    weights: CriterionWeights,
) -> list[float]:
    """Score a table of alternatives: normalize each column, then SAW each row."""
    if isinstance(rows, dict):
        rows = list(rows.values())
    if not rows:
        return []
    names = list(directions)
    columns = {name: normalize_criteria([r[name] for r in rows], directions[name]) for name in names}
    return [
        saw_score({name: columns[name][i] for name in names}, weights)
        for i in range(len(rows))
    ]
