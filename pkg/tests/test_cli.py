import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from tabsel.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_RUNTIME, main

SCHEMA = [
    {"name": "age", "kind": "numeric"},
    {"name": "state", "kind": "categorical"},
    {"name": "fever", "kind": "categorical"},
    {"name": "outcome", "kind": "label"},
]


def write_dataset(path, n=120, seed=0):
    rng = np.random.default_rng(seed)
    lines = ["age,state,fever,outcome"]
    for i in range(n):
        outcome = rng.choice(["Yes", "No"])
        fever = outcome if rng.random() < 0.85 else rng.choice(["Yes", "No"])
        state = "" if i % 15 == 14 else rng.choice(["NY", "CA", "TX"])
        lines.append(f"{rng.integers(1, 90)},{state},{fever},{outcome}")
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def project(tmp_path):
    write_dataset(tmp_path / "data.csv")
    (tmp_path / "schema.json").write_text(json.dumps({"columns": SCHEMA}))

    def config(name="config.json", **over):
        doc = {"dataset": "data.csv", "schema": "schema.json", "seed": 3,
               "selections": [{"method": "none"}], "classifiers": [{"kind": "nb"}], **over}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return tmp_path, config


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def scores_only(rows):
    return [r[:-1] for r in rows]


def test_summarize_writes_one_csv_per_column(project):
    root, config = project
    assert main(["summarize", "--config", str(config()), "--out", str(root / "s")]) == EXIT_OK
    files = sorted(p.name for p in (root / "s").iterdir())
    assert files == ["summary_age.csv", "summary_fever.csv", "summary_outcome.csv", "summary_state.csv"]
    n_kept = sum(int(r[1]) for r in read_csv(root / "s" / "summary_state.csv")[1:])
    assert sum(int(r[1]) for r in read_csv(root / "s" / "summary_outcome.csv")[1:]) == n_kept
    assert n_kept == 112  # rows with an empty state were dropped


def test_run_one_by_one(project):
    root, config = project
    assert main(["run", "--config", str(config()), "--out", str(root / "o")]) == EXIT_OK
    rows = read_csv(root / "o" / "results.csv")
    assert rows[0] == ["selection", "classifier", "accuracy", "precision", "recall",
                       "f1_weighted", "f1_macro", "roc_auc", "train_time_sec"]
    assert len(rows) == 2
    assert (root / "o" / "model_none__nb.json").exists()
    assert (root / "o" / "selection_none.json").exists()


def test_run_full_grid_and_sidecar(project):
    root, config = project
    cfg = config(selections=[{"method": "none"}, {"method": "boruta", "forest": {"n_trees": 20}},
                             {"method": "ridge"}, {"method": "rff", "D": 32}],
                 classifiers=[{"kind": k} for k in ("nb", "mlp", "knn", "rf", "lr", "dt")])
    assert main(["run", "--config", str(cfg), "--out", str(root / "g"), "--jobs", "2"]) == EXIT_OK
    rows = read_csv(root / "g" / "results.csv")[1:]
    assert len(rows) == 24
    assert [r[:2] for r in rows[:7]] == [["none", k] for k in ("nb", "mlp", "knn", "rf", "lr", "dt")] + [["boruta", "nb"]]
    side = json.loads((root / "g" / "results.json").read_text())
    # every default is materialized
    assert side["config"]["split"]["seed"] is not None
    assert side["config"]["classifiers"][0] == {"kind": "nb", "var_smoothing": 1e-9}
    assert side["config"]["selections"][1]["forest"]["n_trees"] == 20
    assert "roc_auc_ovr_macro" in side["best_per_column"]
    assert side["metric_notes"]["roc_auc"].startswith("one-vs-rest")


def test_rerun_from_sidecar_reproduces_scores(project, tmp_path_factory):
    root, config = project
    assert main(["run", "--config", str(config()), "--out", str(root / "a")]) == EXIT_OK
    elsewhere = tmp_path_factory.mktemp("elsewhere")
    assert main(["run", "--config", str(root / "a" / "results.json"), "--out", str(elsewhere)]) == EXIT_OK
    assert scores_only(read_csv(root / "a" / "results.csv")) == scores_only(read_csv(elsewhere / "results.csv"))


def test_same_config_different_working_directory(project, tmp_path_factory, monkeypatch):
    root, config = project
    cfg = config(classifiers=[{"kind": "rf", "n_trees": 10}, {"kind": "mlp"}])
    outs = []
    for name in ("w1", "w2"):
        cwd = tmp_path_factory.mktemp(name)
        monkeypatch.chdir(cwd)
        assert main(["run", "--config", str(cfg), "--out", "out"]) == EXIT_OK
        outs.append(scores_only(read_csv(cwd / "out" / "results.csv")))
    assert outs[0] == outs[1]


def test_seed_flag_overrides_config(project):
    root, config = project
    cfg = config(classifiers=[{"kind": "mlp"}])
    main(["run", "--config", str(cfg), "--out", str(root / "s1"), "--seed", "1"])
    side = json.loads((root / "s1" / "results.json").read_text())
    assert side["seeds"]["master"] == 1


def test_rank_writes_ranking(project, capsys):
    root, config = project
    assert main(["rank", "--config", str(config()), "--out", str(root / "r")]) == EXIT_OK
    rows = read_csv(root / "r" / "ranking.csv")
    assert rows[0] == ["attribute", "information_gain_bits"]
    assert rows[1][0] == "fever"
    assert sorted(r[0] for r in rows[1:]) == ["age", "fever", "state"]
    assert "fever" in capsys.readouterr().out


def test_missing_dataset_is_a_config_error(project, capsys):
    root, config = project
    assert main(["run", "--config", str(config(dataset="nope.csv"))]) == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err
    assert not (root / "out").exists()


@pytest.mark.parametrize("over", [
    {"split": {"test_fraction": 1.5}},
    {"seed": -1},
    {"classifiers": [{"kind": "svm"}]},
    {"selections": [{"method": "pca"}]},
    {"bogus": 1},
])
def test_invalid_configs(project, over):
    _, config = project
    assert main(["run", "--config", str(config(**over))]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "none.json")]) == EXIT_CONFIG


def test_ragged_row_is_a_data_error(project, capsys):
    root, config = project
    with open(root / "data.csv", "a") as fh:
        fh.write("1,NY\n")
    assert main(["summarize", "--config", str(config())]) == EXIT_DATA
    assert "row" in capsys.readouterr().err


def test_fit_failure_is_a_runtime_error(project, capsys):
    root, config = project
    cfg = config(classifiers=[{"kind": "rf", "max_features": 50}])
    assert main(["run", "--config", str(cfg), "--out", str(root / "x")]) == EXIT_RUNTIME
    err = capsys.readouterr().err
    assert "none" in err and "rf" in err


def test_module_entry_point(project):
    root, config = project
    proc = subprocess.run([sys.executable, "-m", "tabsel.cli", "rank", "--config", str(config()),
                           "--out", str(root / "m")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (root / "m" / "ranking.csv").exists()
