"""Shadow-feature screening on a dataset with a known answer.

Five columns are noisy copies of the label (10% of entries flipped), fifteen
are shuffled versions of those copies.  A good screen keeps the first five.
"""

import numpy as np

from tabsel.featsel import boruta_select
from tabsel.ingest import Dataset
from tabsel.models import RandomForestParams

rng = np.random.default_rng(0)
n = 500
y = rng.integers(0, 2, n)
informative = np.stack([np.where(rng.random(n) < 0.1, 1 - y, y) for _ in range(5)], axis=1)
noise = np.stack([rng.permutation(informative[:, i % 5]) for i in range(15)], axis=1)
X = np.hstack([informative, noise]).astype(float)
names = [f"inf{i}" for i in range(5)] + [f"noise{i}" for i in range(15)]
data = Dataset(X, y, names, ["neg", "pos"])

# One round: a feature survives if it beats the best shuffled column once.
single = boruta_select(data, rounds=1, seed=1)
print("one round     :", single.selected_names)
print("  threshold   :", round(single.threshold, 4))

# Many rounds of small forests, majority vote.  Much less noisy.
voted = boruta_select(data, RandomForestParams(n_trees=30), rounds=31, seed=1)
print("31 rounds     :", voted.selected_names)
print("  votes       :", dict(zip(names, voted.votes)))
