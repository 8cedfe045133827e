import random

import numpy as np
import pytest
from scipy import stats

import oracle
from conftest import make_dataset
from xmlad import evaluate
from xmlad.errors import (DegenerateMatrix, LengthMismatch, SingleClass)
from xmlad.evaluate import (auc, cv_5x2, friedman_bonferroni, learning_curve,
                            paired_t_test, roc_curve)


def _labeled_blobs(rng, m_normal=120, m_anom=30, shift=1e6):
    rows = [[rng.gauss(0, 1), rng.gauss(5, 1)] for _ in range(m_normal)]
    rows += [[rng.gauss(shift, 1), rng.gauss(5, 1)] for _ in range(m_anom)]
    labels = ["normal"] * m_normal + ["anomalous"] * m_anom
    order = list(range(len(rows)))
    rng.shuffle(order)
    return make_dataset([rows[i] for i in order],
                        labels=[labels[i] for i in order])


# -- AUC / ROC -------------------------------------------------------------

def test_auc_perfect_separation():
    assert auc([1, 2, 9, 10], ["normal", "normal", "anomalous",
                               "anomalous"]) == 1.0


def test_auc_all_ties():
    assert auc([3, 3, 3, 3], ["normal", "anomalous", "normal",
                              "anomalous"]) == 0.5


def test_auc_hand_example():
    assert auc([1, 2, 3, 4], ["normal", "anomalous", "normal",
                              "anomalous"]) == 0.75


def test_auc_requires_both_classes():
    with pytest.raises(SingleClass):
        auc([1, 2], ["normal", "normal"])


def test_roc_two_points():
    curve = roc_curve([0.0, 1.0], ["normal", "anomalous"])
    assert curve.points == [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    assert curve.auc == 1.0


def test_roc_reversed_polarity():
    rng = random.Random("roc")
    scores = [rng.uniform(0, 1) for _ in range(40)]
    labels = [rng.choice(["normal", "anomalous"]) for _ in range(38)]
    labels += ["normal", "anomalous"]  # both classes guaranteed
    fwd = roc_curve(scores, labels)
    rev = roc_curve([-s for s in scores], labels)
    assert rev.auc == pytest.approx(1.0 - fwd.auc, abs=1e-12)


def test_roc_area_matches_auc():
    rng = random.Random("roc-auc")
    for _ in range(20):
        scores = [rng.randrange(6) for _ in range(30)]
        labels = (["normal"] * 15 + ["anomalous"] * 15)
        rng.shuffle(labels)
        assert roc_curve(scores, labels).auc == pytest.approx(
            auc(scores, labels), abs=1e-12)


# -- 5x2 CV ----------------------------------------------------------------

def test_cv_is_deterministic():
    rng = random.Random("cv")
    ds = _labeled_blobs(rng)
    r1 = cv_5x2(ds, "pga", seed=3)
    r2 = cv_5x2(ds, "pga", seed=3)
    assert r1.fold_aucs == r2.fold_aucs
    assert len(r1.fold_aucs) == 10


def test_cv_separated_anomalies_near_perfect():
    rng = random.Random("cv-sep")
    ds = _labeled_blobs(rng, shift=1e6)
    result = cv_5x2(ds, "adifa-gm", seed=1)
    assert result.mean_auc > 0.99


def test_cv_requires_labels():
    ds = make_dataset([[1.0], [2.0]])
    with pytest.raises(SingleClass):
        cv_5x2(ds, "pga")


# -- paired t-test ---------------------------------------------------------

def test_t_test_degenerate_conventions():
    assert paired_t_test([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]) == 1.0
    assert paired_t_test([2.0, 3.0, 4.0], [1.0, 2.0, 3.0]) == 0.0
    assert paired_t_test([1.0, 2.0, 3.0], [2.0, 3.0, 4.0]) == 1.0


def test_t_test_hand_case_matches_quadrature_oracle():
    a = (0.9, 0.8, 0.85)
    b = (0.7, 0.6, 0.65)
    d = np.array(a) - np.array(b)
    t = d.mean() / (d.std(ddof=1) / np.sqrt(3))
    assert paired_t_test(a, b) == pytest.approx(
        oracle.t_sf_quadrature(t, 2), abs=1e-6)


def test_t_test_validation():
    with pytest.raises(LengthMismatch):
        paired_t_test([1.0, 2.0], [1.0])
    with pytest.raises(LengthMismatch):
        paired_t_test([1.0], [2.0])


# -- Friedman / Bonferroni-Dunn --------------------------------------------

def test_friedman_all_equal():
    M = np.full((12, 4), 0.8)
    report = friedman_bonferroni(M)
    assert report.friedman_p == 1.0
    assert all(c == "equal" for row in report.pairwise for c in row)
    assert all(c == "equal" for c in report.post_hoc)


def test_friedman_total_dominance():
    # 30 datasets, 7 classifiers, column 0 always best, column 6 always worst
    rng = random.Random("friedman")
    M = np.array([[0.99 - 0.02 * j + rng.uniform(0, 0.001) for j in range(7)]
                  for _ in range(30)])
    report = friedman_bonferroni(M, reference=0)
    assert report.friedman_p < 0.05
    assert report.mean_ranks[0] == 1.0
    assert report.mean_ranks[6] == 7.0
    z = stats.norm.ppf(1.0 - 0.05 / 12)
    cd = z * np.sqrt(7 * 8 / (6.0 * 30))
    assert report.critical_difference == pytest.approx(cd, rel=1e-12)
    assert report.post_hoc[6] == "worse"  # worst vs the reference
    assert report.pairwise[6][0] == "better"  # reference outranks the worst


def test_friedman_antisymmetry():
    rng = random.Random("anti")
    M = np.array([[rng.uniform(0.5, 1.0) for _ in range(4)]
                  for _ in range(15)])
    report = friedman_bonferroni(M)
    flip = {"better": "worse", "worse": "better", "equal": "equal"}
    for i in range(4):
        for j in range(4):
            assert report.pairwise[i][j] == flip[report.pairwise[j][i]]


def test_friedman_validation():
    with pytest.raises(DegenerateMatrix):
        friedman_bonferroni([[0.5, 0.6]])


# -- learning curve --------------------------------------------------------

def test_learning_curve_nested_sizes():
    rng = random.Random("lc")
    ds = _labeled_blobs(rng, m_normal=200, m_anom=40)
    points = learning_curve(ds, "adifa-gm", seed=2)
    assert len(points) == 10
    sizes = [size for size, _ in points]
    assert sizes == sorted(sizes)
    assert sizes[-1] == 100  # half of all 200 normal rows
    for _, value in points:
        assert 0.0 <= value <= 1.0


def test_learning_curve_deterministic():
    rng = random.Random("lc2")
    ds = _labeled_blobs(rng, m_normal=60, m_anom=10)
    assert learning_curve(ds, "pga", seed=4) == learning_curve(ds, "pga",
                                                               seed=4)
