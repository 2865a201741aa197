import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_metrics

from tabsel.errors import AucUndefinedError, CellError, ShapeError
from tabsel.evaluation import (
    CSV_HEADER,
    best_per_column,
    confusion,
    fit_transform,
    metrics,
    roc_auc_binary,
    roc_auc_ovr,
    run_grid,
    summarize_repeats,
)
from tabsel.ingest import Dataset, split

ALL_SELECTIONS = [{"method": "none"}, {"method": "boruta", "forest": {"n_trees": 20}},
                  {"method": "ridge"}, {"method": "rff", "D": 32}]
ALL_CLASSIFIERS = [{"kind": k} for k in ("nb", "mlp", "knn", "rf", "lr", "dt")]
ALL_CLASSIFIERS[3] = {"kind": "rf", "n_trees": 20}


def test_confusion_identity():
    assert confusion([0, 1], [0, 1], 2).counts.tolist() == [[1, 0], [0, 1]]


def test_confusion_hand_count():
    cm = confusion([0, 0, 1], [0, 1, 1], 2)
    assert cm.counts.tolist() == [[1, 1], [0, 1]]
    assert cm.total == 3


@pytest.mark.parametrize("args", [([], [], 2), ([0, 1], [0], 2), ([0, 2], [0, 1], 2)])
def test_confusion_errors(args):
    with pytest.raises(ShapeError):
        confusion(*args)


def test_perfect_binary_prediction():
    y = np.array([0, 1, 1, 0])
    scores = np.eye(2)[y]
    r = metrics(confusion(y, y, 2), scores, y)
    assert r.scores() == (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)


def test_uninformative_binary():
    y_true = [0, 0, 1, 1]
    y_pred = [0, 1, 0, 1]
    r = metrics(confusion(y_true, y_pred, 2), np.full((4, 2), 0.5), y_true)
    assert r.accuracy == 0.5
    assert r.f1_macro == 0.5
    assert r.roc_auc_ovr_macro == 0.5


def test_unpredicted_class_counts_as_zero():
    y_true = [0, 1, 2, 2]
    y_pred = [0, 0, 0, 0]
    r = metrics(confusion(y_true, y_pred, 3), np.full((4, 3), 1 / 3), y_true)
    assert r.per_class_f1[1:] == [0.0, 0.0]
    assert r.precision_weighted == pytest.approx(0.25 * 0.25)


def test_auc_skips_absent_classes():
    y = np.array([0, 0, 1, 1])
    scores = np.array([[0.9, 0.1, 0], [0.6, 0.4, 0], [0.3, 0.7, 0], [0.2, 0.8, 0]])
    auc, skipped = roc_auc_ovr(y, scores)
    assert auc == 1.0 and skipped == [2]


def test_auc_undefined_for_single_class():
    with pytest.raises(AucUndefinedError):
        metrics(confusion([1, 1], [1, 1], 2), np.full((2, 2), 0.5), [1, 1])


def test_auc_binary_with_ties():
    # pairs: (0.8 vs 0.8) tie, (0.8 vs 0.1) win, (0.3 vs 0.8) loss, (0.3 vs 0.1) win
    assert roc_auc_binary([1, 1, 0, 0], [0.8, 0.3, 0.8, 0.1]) == pytest.approx(0.625, abs=1e-15)


def random_triple(rng):
    n = int(rng.integers(2, 31))
    k = int(rng.integers(2, 5))
    y_true = rng.integers(0, k, n)
    while np.unique(y_true).size < 2:
        y_true = rng.integers(0, k, n)
    y_pred = rng.integers(0, k, n)
    # coarse scores so that ties actually happen
    scores = rng.integers(0, 5, (n, k)) / 4.0
    return y_true, y_pred, scores, k


def test_metrics_match_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        y_true, y_pred, scores, k = random_triple(rng)
        r = metrics(confusion(y_true, y_pred, k), scores, y_true)
        ref = brute_metrics(y_true.tolist(), y_pred.tolist(), scores.tolist(), k)
        for name, value in ref.items():
            assert getattr(r, name) == pytest.approx(value, abs=1e-12), name


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_auc_invariant_under_monotone_transform(seed):
    rng = np.random.default_rng(seed)
    y_true, _, scores, _ = random_triple(rng)
    auc, _ = roc_auc_ovr(y_true, scores)
    for f in (lambda s: 3 * s - 1, np.exp, lambda s: s ** 3 + s, lambda s: np.arctan(10 * s)):
        assert roc_auc_ovr(y_true, f(scores))[0] == pytest.approx(auc, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_accuracy_equals_weighted_recall(seed):
    y_true, y_pred, scores, k = random_triple(np.random.default_rng(seed))
    r = metrics(confusion(y_true, y_pred, k), scores, y_true)
    assert r.accuracy == pytest.approx(r.recall_weighted, abs=1e-12)
    assert all(0.0 <= v <= 1.0 for v in r.scores())
    assert all(0.0 <= v <= 1.0 for v in r.per_class_f1)


# -- grid ---------------------------------------------------------------------


def grid_data(seed=0, n=300):
    from conftest import planted_dataset

    return split(planted_dataset(seed, n=n), 0.3, seed, True)


def test_minimal_grid():
    train, test = grid_data()
    res = run_grid(train, test, [{"method": "none"}], [{"kind": "nb"}])
    assert len(res.rows) == 1
    assert res.rows[0].report.train_time_seconds >= 0


def test_full_grid_order_and_determinism():
    train, test = grid_data(1)
    a = run_grid(train, test, ALL_SELECTIONS, ALL_CLASSIFIERS, seed=7)
    b = run_grid(train, test, ALL_SELECTIONS, ALL_CLASSIFIERS, seed=7, jobs=4)
    assert [(r.selection, r.classifier) for r in a.rows] == [
        (s["method"], c["kind"]) for s in ALL_SELECTIONS for c in ALL_CLASSIFIERS]
    assert [r.report.scores() for r in a.rows] == [r.report.scores() for r in b.rows]
    assert len(CSV_HEADER) == len(a.rows[0].csv_row())


def test_selection_sees_training_split_only():
    train, test = grid_data(2)
    perm = np.random.default_rng(0).permutation(test.n)
    shuffled = Dataset(test.X, test.y[perm], test.feature_names, test.class_names)
    for spec in ALL_SELECTIONS[1:]:
        a = run_grid(train, test, [spec], [{"kind": "nb"}], seed=3).transforms[spec["method"]]
        b = run_grid(train, shuffled, [spec], [{"kind": "nb"}], seed=3).transforms[spec["method"]]
        assert a.to_json() == b.to_json()


def test_rff_transform_replaces_features():
    train, _ = grid_data(3)
    t = fit_transform({"method": "rff", "D": 16}, train, seed=0)
    out = t.apply(train)
    assert out.d == 16 and out.feature_names[0] == "rff_0"


def test_cell_errors_name_the_cell():
    train, test = grid_data(4)
    with pytest.raises(CellError) as info:
        run_grid(train, test, [{"method": "none"}], [{"kind": "rf", "max_features": 999}])
    assert info.value.selection == "none" and info.value.classifier == "rf"


def test_best_per_column_and_repeats():
    train, test = grid_data(5)
    grids = [run_grid(train, test, [{"method": "none"}], [{"kind": "nb"}, {"kind": "dt"}], seed=s)
             for s in (1, 2)]
    best = best_per_column(grids[0].rows)
    assert set(best) >= {"accuracy", "roc_auc_ovr_macro", "train_time_seconds"}
    summary = summarize_repeats(grids)
    assert [e["classifier"] for e in summary] == ["nb", "dt"]
    # naive Bayes has no randomness, so both repeats agree
    assert summary[0]["accuracy_sd"] == 0.0
