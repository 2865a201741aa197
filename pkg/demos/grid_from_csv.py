"""End to end: CSV + schema + config -> results grid, via the library API.

The same files drive the command line:

    tabsel summarize --config <dir>/config.json
    tabsel run       --config <dir>/config.json
    tabsel rank      --config <dir>/config.json
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from tabsel import load_config, run_experiment
from tabsel.cli import main

work = Path(tempfile.mkdtemp(prefix="tabsel_demo_"))
rng = np.random.default_rng(3)

# A small synthetic lab panel: two markers shift with the outcome.
n = 400
outcome = rng.random(n) < 0.2
panel = rng.normal(size=(n, 6))
panel[:, 0] += 1.5 * outcome
panel[:, 3] -= 1.0 * outcome
cols = [f"marker{i}" for i in range(6)]
with open(work / "panel.csv", "w") as fh:
    fh.write(",".join(cols + ["result"]) + "\n")
    for row, pos in zip(panel, outcome):
        fh.write(",".join(f"{v:.3f}" for v in row) + ("," + ("positive" if pos else "negative")) + "\n")

schema = [{"name": c, "kind": "numeric"} for c in cols] + [{"name": "result", "kind": "label"}]
(work / "schema.json").write_text(json.dumps(schema))
config = {
    "dataset": "panel.csv",
    "schema": "schema.json",
    "selections": [{"method": "none"}, {"method": "boruta"}, {"method": "ridge"}, {"method": "rff", "D": 64}],
    "classifiers": [{"kind": "nb"}, {"kind": "rf"}, {"kind": "lr"}],
    "seed": 7,
}
(work / "config.json").write_text(json.dumps(config, indent=2))

cfg = load_config(work / "config.json")
result = run_experiment(cfg)
print(f"{'selection':10s} {'classifier':10s} {'acc':>6s} {'f1_macro':>8s} {'auc':>6s}")
for row in result.grid.rows:
    r = row.report
    print(f"{row.selection:10s} {row.classifier:10s} {r.accuracy:6.3f} {r.f1_macro:8.3f} {r.roc_auc_ovr_macro:6.3f}")
print("boruta kept:", result.grid.transforms["boruta"].selection.selected_names)

# Same thing through the CLI entry point, writing files under work/out.
main(["rank", "--config", str(work / "config.json")])
print("outputs in", work / "out")
