import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cloudselect.errors import InvariantError
from cloudselect.mcdm import (
    CriterionWeights,
    PairwiseMatrix,
    ahp_weights,
    normalize_criteria,
    saw_score,
)


def eig_oracle(rows):
    """Dense eigen-solve: principal eigenvector and eigenvalue via numpy."""
    a = np.array(rows, dtype=float)
    values, vectors = np.linalg.eig(a)
    principal = np.argmax(values.real)
    w = np.abs(vectors[:, principal].real)
    return w / w.sum(), values[principal].real


INCONSISTENT_3X3 = [[1, 2, 6], [0.5, 1, 2], [1 / 6, 0.5, 1]]


class TestPairwiseMatrix:
    def test_rejects_non_reciprocal(self):
        with pytest.raises(InvariantError):
            PairwiseMatrix.from_rows([[1, 2], [2, 1]])

    def test_rejects_bad_diagonal(self):
        with pytest.raises(InvariantError):
            PairwiseMatrix.from_rows([[2, 1], [1, 1]])

    def test_rejects_non_square(self):
        with pytest.raises(InvariantError):
            PairwiseMatrix.from_rows([[1, 2]])

    def test_rejects_nonpositive(self):
        with pytest.raises(InvariantError):
            PairwiseMatrix.from_rows([[1, -2], [-0.5, 1]])


class TestAhpWeights:
    def test_all_ones_gives_uniform_weights(self):
        matrix = PairwiseMatrix.from_rows([[1, 1, 1], [1, 1, 1], [1, 1, 1]])
        result = ahp_weights(matrix)
        for w in result.weights.values():
            assert w == pytest.approx(1 / 3, abs=1e-9)
        assert result.consistency_ratio == 0.0

    def test_consistent_matrix_recovers_weights(self):
        w = (4 / 7, 2 / 7, 1 / 7)
        matrix = PairwiseMatrix.consistent_from_weights(w)
        result = ahp_weights(matrix, names=["a", "b", "c"])
        for name, expected in zip("abc", w):
            assert result.weights[name] == pytest.approx(expected, abs=1e-6)
        assert result.consistency_ratio < 1e-6

    def test_recovery_randomized(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(3, 7)
            raw = [rng.uniform(0.05, 1.0) for _ in range(n)]
            total = sum(raw)
            w = [x / total for x in raw]
            result = ahp_weights(PairwiseMatrix.consistent_from_weights(w))
            for got, expected in zip(result.weights.values(), w):
                assert got == pytest.approx(expected, abs=1e-6)
            assert result.consistency_ratio < 1e-6

    def test_inconsistent_matrix_matches_eig_oracle(self):
        matrix = PairwiseMatrix.from_rows(INCONSISTENT_3X3)
        result = ahp_weights(matrix, names=["x", "y", "z"])
        oracle_w, oracle_lambda = eig_oracle(INCONSISTENT_3X3)
        for got, expected in zip(result.weights.values(), oracle_w):
            assert got == pytest.approx(expected, abs=1e-6)
        n = 3
        oracle_cr = ((oracle_lambda - n) / (n - 1)) / 0.58
        assert result.consistency_ratio == pytest.approx(oracle_cr, abs=1e-6)
        assert result.consistency_ratio > 0

    def test_cr_zero_for_small_matrices(self):
        assert ahp_weights(PairwiseMatrix.from_rows([[1]])).consistency_ratio == 0.0
        assert ahp_weights(PairwiseMatrix.from_rows([[1, 3], [1 / 3, 1]])).consistency_ratio == 0.0

    def test_weights_sum_to_one(self):
        matrix = PairwiseMatrix.from_rows(INCONSISTENT_3X3)
        result = ahp_weights(matrix)
        assert sum(result.weights.values()) == pytest.approx(1.0, abs=1e-9)

    def test_too_many_criteria_rejected(self):
        n = 11
        with pytest.raises(InvariantError):
            ahp_weights(PairwiseMatrix.consistent_from_weights([1 / n] * n))


class TestNormalizeCriteria:
    def test_minimize_costs(self):
        assert normalize_criteria([10, 20, 30], "minimize") == [1.0, 0.5, 0.0]

    def test_maximize(self):
        assert normalize_criteria([10, 20, 30], "maximize") == [0.0, 0.5, 1.0]

    def test_singleton_is_full_credit(self):
        assert normalize_criteria([42.0], "minimize") == [1.0]

    def test_constant_column_is_full_credit(self):
        assert normalize_criteria([5, 5, 5], "maximize") == [1.0, 1.0, 1.0]

    def test_empty_rejected(self):
        with pytest.raises(InvariantError):
            normalize_criteria([], "minimize")


class TestSawScore:
    def weights(self, **kw):
        return CriterionWeights(weights=dict(kw), consistency_ratio=0.0)

    def test_weighted_sum(self):
        score = saw_score({"a": 1.0, "b": 0.5}, self.weights(a=0.6, b=0.4))
        assert score == pytest.approx(0.8)

    def test_single_criterion_weight_one(self):
        assert saw_score({"a": 0.37}, self.weights(a=1.0)) == pytest.approx(0.37)

    def test_all_ones_scores_one(self):
        assert saw_score({"a": 1.0, "b": 1.0}, self.weights(a=0.3, b=0.7)) == pytest.approx(1.0)

    def test_criterion_mismatch_rejected(self):
        with pytest.raises(InvariantError):
            saw_score({"a": 1.0}, self.weights(a=0.5, b=0.5))

    @given(
        st.lists(st.floats(min_value=0.1, max_value=1000), min_size=2, max_size=8),
        st.floats(min_value=0.01, max_value=50),
        st.floats(min_value=-100, max_value=100),
    )
    def test_ranking_invariant_under_positive_affine_maps(self, values, scale, shift):
        """Scaling/shifting one criterion's raw values cannot change SAW order."""
        other = [float(i) for i in range(len(values))]
        weights = self.weights(a=0.5, b=0.5)

        def ranking(raw_a):
            norm_a = normalize_criteria(raw_a, "minimize")
            norm_b = normalize_criteria(other, "maximize")
            scores = [
                saw_score({"a": na, "b": nb}, weights) for na, nb in zip(norm_a, norm_b)
            ]
            return sorted(range(len(scores)), key=lambda i: (-scores[i], i))

        mapped = [scale * v + shift for v in values]
        assert ranking(values) == ranking(mapped)
