"""Classification reports and inter-rater agreement statistics.

Agreement values are checked against hand-worked fixtures and against
independent formula oracles written inline (pair counting for observed
agreement, category-proportion mass for chance agreement, and a brute-force
pair enumeration for Krippendorff's alpha).
"""

import numpy as np
import pytest

from socialstance.errors import InputDataError
from socialstance.metrics import (
    MetricReport,
    agreement_report,
    average_observed_agreement,
    fleiss_kappa,
    krippendorff_alpha,
    load_ratings_csv,
    multiclass_report,
    one_vs_rest,
    ratings_to_matrix,
    ratings_to_units,
    stance_report,
)


def oracle_alpha(units):
    """Krippendorff's nominal alpha by brute-force pair enumeration."""
    usable = [u for u in units if len(u) >= 2]
    cats = sorted({v for u in usable for v in u}, key=str)
    idx = {c: i for i, c in enumerate(cats)}
    coin = np.zeros((len(cats), len(cats)))
    for u in usable:
        m = len(u)
        for i in range(m):
            for j in range(m):
                if i != j:
                    coin[idx[u[i]], idx[u[j]]] += 1.0 / (m - 1)
    n_c = coin.sum(axis=1)
    n = n_c.sum()
    d_o = coin.sum() - np.trace(coin)
    d_e = (n * n - (n_c ** 2).sum())
    return 1.0 - (n - 1) * d_o / d_e


class TestMulticlassReport:
    def test_perfect(self):
        rep = multiclass_report([0, 1, 2, 3], [0, 1, 2, 3], n_classes=4)
        assert rep == MetricReport(1.0, 1.0, 1.0, 1.0)

    def test_hand_worked_confusion(self):
        # gold:  0 0 1 1 1 2 ; pred: 0 1 1 1 2 2
        pred = [0, 1, 1, 1, 2, 2]
        gold = [0, 0, 1, 1, 1, 2]
        rep = multiclass_report(pred, gold, n_classes=3)
        assert rep.accuracy == pytest.approx(4 / 6)
        # per class precision: 1/1, 2/3, 1/2; recall: 1/2, 2/3, 1/1
        assert rep.precision == pytest.approx((1 + 2 / 3 + 1 / 2) / 3)
        assert rep.recall == pytest.approx((1 / 2 + 2 / 3 + 1) / 3)
        f1_0 = 2 * 1 * 0.5 / 1.5
        f1_1 = 2 / 3
        f1_2 = 2 * 0.5 * 1 / 1.5
        assert rep.f1 == pytest.approx((f1_0 + f1_1 + f1_2) / 3)

    def test_absent_class_contributes_zero(self):
        rep = multiclass_report([0, 0], [0, 0], n_classes=2)
        assert rep.accuracy == 1.0
        assert rep.precision == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            multiclass_report([], [], n_classes=2)
        with pytest.raises(ValueError):
            multiclass_report([0, 5], [0, 1], n_classes=4)
        with pytest.raises(ValueError):
            multiclass_report([0], [0, 1], n_classes=2)

    def test_stance_report_is_four_class(self):
        rep = stance_report([0, 1, 2, 3], [0, 1, 2, 3])
        assert rep.accuracy == 1.0
        with pytest.raises(ValueError):
            stance_report([4], [0])


class TestObservedAgreement:
    def test_perfect_is_one(self):
        matrix = np.array([[3, 0], [0, 3], [3, 0]])
        assert average_observed_agreement(matrix) == 1.0

    def test_hand_worked(self):
        # item 1: 2 vs 1 -> (2*1 + 1*0) / (3*2) = 1/3
        # item 2: 3 vs 0 -> 1
        matrix = np.array([[2, 1], [3, 0]])
        assert average_observed_agreement(matrix) == pytest.approx((1 / 3 + 1) / 2)

    def test_matches_pair_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            items, cats, r = int(rng.integers(1, 10)), int(rng.integers(2, 6)), 5
            matrix = np.zeros((items, cats), dtype=np.int64)
            for i in range(items):
                for _ in range(r):
                    matrix[i, rng.integers(cats)] += 1
            per_item = []
            for row in matrix:
                agree = sum(int(c) * (int(c) - 1) for c in row)
                per_item.append(agree / (r * (r - 1)))
            expected = float(np.mean(per_item))
            assert average_observed_agreement(matrix) == pytest.approx(expected, abs=1e-12)

    def test_raggedness_rejected(self):
        with pytest.raises(InputDataError):
            average_observed_agreement(np.array([[2, 1], [2, 0]]))
        with pytest.raises(InputDataError):
            average_observed_agreement(np.array([[1, 0]]))


class TestFleissKappa:
    def test_perfect_is_one(self):
        matrix = np.array([[4, 0, 0], [0, 4, 0], [4, 0, 0]])
        assert fleiss_kappa(matrix) == 1.0

    def test_two_rater_full_disagreement_is_minus_one(self):
        matrix = np.array([[1, 1], [1, 1], [1, 1]])
        assert fleiss_kappa(matrix) == pytest.approx(-1.0)

    def test_hand_worked(self):
        matrix = np.array([[2, 2], [4, 0], [0, 4]])
        # P_bar: items (2/12+2/12)=1/3, 1, 1 -> 7/9
        # proportions: 6/12, 6/12 -> Pe = 1/2
        expected = (7 / 9 - 0.5) / (1 - 0.5)
        assert fleiss_kappa(matrix) == pytest.approx(expected, abs=1e-12)

    def test_single_category_perfect_returns_one(self):
        matrix = np.array([[3, 0], [3, 0]])
        assert fleiss_kappa(matrix) == 1.0

    def test_matches_formula_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            items, cats, r = int(rng.integers(2, 12)), int(rng.integers(2, 6)), 4
            matrix = np.zeros((items, cats), dtype=np.int64)
            for i in range(items):
                for _ in range(r):
                    matrix[i, rng.integers(cats)] += 1
            p_bar = np.mean([(row * (row - 1)).sum() / (r * (r - 1)) for row in matrix])
            pj = matrix.sum(axis=0) / matrix.sum()
            pe = (pj ** 2).sum()
            if pe == 1.0:
                continue
            expected = (p_bar - pe) / (1 - pe)
            assert fleiss_kappa(matrix) == pytest.approx(expected, abs=1e-12)


class TestKrippendorffAlpha:
    def test_perfect_is_one(self):
        units = {"a": ["x", "x", "x"], "b": ["y", "y"]}
        assert krippendorff_alpha(units) == pytest.approx(1.0)

    def test_textbook_fixture(self):
        # classic nominal example with missing data (Krippendorff 2011):
        # 4 coders, 12 units, alpha = 0.743 (computed to full precision below)
        units = [
            [1, 1, 1],
            [2, 2, 2],
            [3, 3, 3, 3],
            [3, 3, 3, 3],
            [2, 2, 2, 2],
            [1, 2, 3, 4],
            [4, 4, 4, 4],
            [1, 1, 2, 2],
            [2, 2, 2, 2],
            [5, 5, 5, 5],
            [1, 1, 1],
            [3, 3, 3],
        ]
        assert krippendorff_alpha(units) == pytest.approx(oracle_alpha(units), abs=1e-12)

    def test_singleton_units_dropped(self):
        units = {"a": ["x"], "b": ["x", "y"], "c": ["y"]}
        # only unit b is pairable: total disagreement
        got = krippendorff_alpha(units)
        assert got == pytest.approx(oracle_alpha([["x", "y"]]), abs=1e-12)

    def test_matches_oracle_on_ragged_data(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            units = []
            for _ in range(int(rng.integers(2, 10))):
                m = int(rng.integers(1, 5))
                units.append([int(rng.integers(3)) for _ in range(m)])
            if not any(len(u) >= 2 for u in units):
                continue
            usable = [u for u in units if len(u) >= 2]
            cats = {v for u in usable for v in u}
            if len(cats) < 2:
                continue
            assert krippendorff_alpha(units) == pytest.approx(
                oracle_alpha(units), abs=1e-12)

    def test_no_pairable_units_is_error(self):
        with pytest.raises(InputDataError):
            krippendorff_alpha({"a": ["x"], "b": ["y"]})

    def test_no_variation_is_error(self):
        with pytest.raises(InputDataError, match="no variation"):
            krippendorff_alpha({"a": ["x", "x"], "b": ["x", "x"]})


class TestOneVsRest:
    def test_binarizes(self):
        matrix = np.array([[2, 1, 1], [0, 4, 0]])
        np.testing.assert_array_equal(one_vs_rest(matrix, 1), [[1, 3], [4, 0]])

    def test_range_check(self):
        with pytest.raises(InputDataError):
            one_vs_rest(np.array([[2, 2]]), 5)


class TestRatingsIO:
    def test_load_and_shape(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(
            "item_id,rater_id,label\n"
            "i1,r1,PO\ni1,r2,PO\ni2,r1,NG\ni2,r2,NE\n")
        rows = load_ratings_csv(path)
        units = ratings_to_units(rows)
        assert units == {"i1": ["PO", "PO"], "i2": ["NG", "NE"]}
        matrix, items, cats = ratings_to_matrix(rows)
        assert items == ["i1", "i2"]
        assert cats == ["NE", "NG", "PO"]
        np.testing.assert_array_equal(matrix, [[0, 0, 2], [1, 1, 0]])

    def test_duplicate_rating_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("item_id,rater_id,label\ni1,r1,PO\ni1,r1,NG\n")
        with pytest.raises(InputDataError, match="duplicate"):
            load_ratings_csv(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("item,rater,label\n")
        with pytest.raises(InputDataError, match="header"):
            load_ratings_csv(path)


class TestAgreementReport:
    def test_complete_round(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(
            "item_id,rater_id,label\n"
            "i1,r1,PO\ni1,r2,PO\ni1,r3,NG\n"
            "i2,r1,NG\ni2,r2,NG\ni2,r3,NG\n"
            "i3,r1,PO\ni3,r2,NE\ni3,r3,NE\n")
        report = agreement_report(load_ratings_csv(path))
        matrix, _, _ = ratings_to_matrix(load_ratings_csv(path))
        assert report["overall"]["average_observed_agreement"] == pytest.approx(
            average_observed_agreement(matrix))
        assert report["overall"]["fleiss_kappa"] == pytest.approx(fleiss_kappa(matrix))
        assert set(report["per_label"]) == {"PO", "NG", "NE"}
        for entry in report["per_label"].values():
            assert entry["krippendorff_alpha"] is not None

    def test_ragged_round_nulls_pair_statistics(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(
            "item_id,rater_id,label\n"
            "i1,r1,PO\ni1,r2,NG\ni1,r3,PO\n"
            "i2,r1,NG\ni2,r2,PO\n")
        report = agreement_report(load_ratings_csv(path))
        assert report["overall"]["average_observed_agreement"] is None
        assert report["overall"]["fleiss_kappa"] is None
        assert report["overall"]["krippendorff_alpha"] is not None
