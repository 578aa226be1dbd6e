import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llull import (
    EmptySubsetError,
    LlullMatrix,
    MatrixFormatError,
    MatrixValidationError,
    OptionSet,
    RateVector,
    SingleOptionWarning,
    UndefinedRatioError,
    ZeroTurnoutError,
    margins_turnouts,
    mean_preference_scores,
    mean_ranks,
    mean_relative_scores,
    ratios,
    relative_scores,
    restrict,
)
from conftest import random_matrix

ABC = OptionSet(("a", "b", "c"))


class TestValidation:
    def test_basic_construction(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        assert M.n == 3
        assert M.labels == ("a", "b", "c")
        assert M.entry("a", "b") == 0.6
        assert not M.is_vanishing()

    def test_diagonal_within_tolerance_zeroed(self):
        M = LlullMatrix(ABC, [[5e-13, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        assert (np.diag(M.scores) == 0.0).all()

    def test_diagonal_beyond_tolerance_rejected(self):
        with pytest.raises(MatrixValidationError):
            LlullMatrix(ABC, [[0.7, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])

    def test_scores_read_only(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        with pytest.raises(ValueError):
            M.scores[0, 1] = 0.0

    def test_pair_sum_above_one_rejected(self):
        with pytest.raises(MatrixValidationError):
            LlullMatrix(ABC, [[0, 0.8, 0], [0.3, 0, 0], [0, 0, 0]])

    def test_pair_sum_within_tolerance_rescaled(self):
        eps = 5e-13
        M = LlullMatrix(ABC, [[0, 0.6 + eps, 0], [0.4, 0, 0], [0, 0, 0]])
        assert M.entry("a", "b") + M.entry("b", "a") <= 1.0

    def test_small_negative_clamped(self):
        M = LlullMatrix(ABC, [[0, -5e-13, 0], [0.4, 0, 0], [0, 0, 0]])
        assert M.entry("a", "b") == 0.0

    def test_negative_beyond_tolerance_rejected(self):
        with pytest.raises(MatrixValidationError):
            LlullMatrix(ABC, [[0, -1e-6, 0], [0.4, 0, 0], [0, 0, 0]])

    def test_non_finite_rejected(self):
        with pytest.raises(MatrixValidationError):
            LlullMatrix(ABC, [[0, np.nan, 0], [0.4, 0, 0], [0, 0, 0]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(MatrixValidationError):
            LlullMatrix(ABC, [[0, 0.5], [0.5, 0]])

    def test_vanishing(self):
        assert LlullMatrix(ABC, np.zeros((3, 3))).is_vanishing()


class TestSerialization:
    def test_json_schema(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        d = M.to_json_dict()
        assert d["options"] == ["a", "b", "c"]
        assert d["scores"][0][1] == 0.6

    def test_csv_header(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        assert M.to_csv().splitlines()[0] == "option,a,b,c"

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_roundtrips_are_exact(self, seed):
        rng = np.random.default_rng(seed)
        M = random_matrix(rng, int(rng.integers(1, 7)))
        via_json = LlullMatrix.from_json(M.to_json())
        via_csv = LlullMatrix.from_csv(M.to_csv())
        assert via_json.labels == M.labels == via_csv.labels
        assert (via_json.scores == M.scores).all()
        assert (via_csv.scores == M.scores).all()

    def test_bad_json_rejected(self):
        with pytest.raises(MatrixFormatError):
            LlullMatrix.from_json('{"options": ["a", "b"]}')
        with pytest.raises(MatrixFormatError):
            LlullMatrix.from_json('{"options": ["a"], "scores": [[0, 1]]}')
        with pytest.raises(MatrixFormatError):
            LlullMatrix.from_json("[1, 2]")

    def test_bad_csv_rejected(self):
        with pytest.raises(MatrixFormatError):
            LlullMatrix.from_csv("wrong,a\na,0.0\n")
        with pytest.raises(MatrixFormatError):
            LlullMatrix.from_csv("option,a,b\na,0.0\n")


class TestDerivedQuantities:
    def test_margin_turnout_roundtrip(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            M = random_matrix(rng, int(rng.integers(2, 8)))
            m, t = margins_turnouts(M)
            assert np.abs((t + m) / 2.0 - M.scores).max() <= 1e-15
            assert (m + m.T == 0.0).all()

    def test_relative_scores_values(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        q = relative_scores(M)
        assert q.entry("a", "b") == pytest.approx(0.75)
        assert q.entry("b", "a") == pytest.approx(0.25)
        assert q.entry("a", "c") == pytest.approx(0.5)

    def test_relative_scores_zero_turnout(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0], [0.2, 0, 0.4], [0, 0.4, 0]])
        with pytest.raises(ZeroTurnoutError):
            relative_scores(M)

    def test_ratios(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        r = ratios(M)
        assert r[0, 1] == pytest.approx(3.0)
        assert r[1, 0] == pytest.approx(1 / 3)

    def test_ratios_undefined_on_zero_reverse(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.0, 0, 0.4], [0.3, 0.4, 0]])
        with pytest.raises(UndefinedRatioError):
            ratios(M)

    def test_mean_preference_scores(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        rho = mean_preference_scores(M)
        assert rho.kind == "mean_score"
        assert rho.value("a") == pytest.approx(0.45)
        assert rho.value("b") == pytest.approx(0.3)

    def test_mean_ranks_of_unanimous_chain(self):
        M = LlullMatrix(ABC, [[0, 1, 1], [0, 0, 1], [0, 0, 0]])
        r = mean_ranks(M)
        assert r.values == pytest.approx([1.0, 2.0, 3.0])

    def test_mean_relative_scores(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        sigma = mean_relative_scores(M)
        assert sigma.value("a") == pytest.approx(0.625)

    def test_single_option_warns(self):
        M = LlullMatrix(OptionSet(("a",)), [[0.0]])
        with pytest.warns(SingleOptionWarning):
            rho = mean_preference_scores(M)
        assert rho.values == pytest.approx([1.0])


class TestRateVector:
    def test_fraction_must_sum_to_one(self):
        with pytest.raises(ValueError):
            RateVector(ABC, np.array([0.5, 0.2, 0.2]), "fraction")

    def test_mean_rank_bounds(self):
        with pytest.raises(ValueError):
            RateVector(ABC, np.array([0.5, 2.0, 3.0]), "mean_rank")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            RateVector(ABC, np.array([1.0, 0.0, 0.0]), "bogus")

    def test_negative_strength_rejected(self):
        with pytest.raises(ValueError):
            RateVector(ABC, np.array([1.1, -0.1, 0.0]), "strength")

    def test_value_lookup(self):
        r = RateVector(ABC, np.array([0.5, 0.3, 0.2]), "fraction")
        assert r.value("b") == 0.3


class TestRestrict:
    def test_square_restriction(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        sub = restrict(M, ["a", "c"])
        assert isinstance(sub, LlullMatrix)
        assert sub.labels == ("a", "c")
        assert sub.entry("a", "c") == 0.3
        assert sub.entry("c", "a") == 0.3

    def test_rectangular_fragment(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        frag = restrict(M, ["a"], ["b", "c"])
        assert isinstance(frag, np.ndarray)
        assert frag.tolist() == [[0.6, 0.3]]

    def test_empty_subset(self):
        M = LlullMatrix(ABC, [[0, 0.6, 0.3], [0.2, 0, 0.4], [0.3, 0.4, 0]])
        with pytest.raises(EmptySubsetError):
            restrict(M, [])
