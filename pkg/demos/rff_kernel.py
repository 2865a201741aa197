"""Random Fourier features approximate the Gaussian kernel.

z(x).z(y) estimates exp(-|x-y|^2 / (2 sigma^2)); the error shrinks like
1/sqrt(D).
"""

import numpy as np

from tabsel.featsel import rff_fit, rff_transform

rng = np.random.default_rng(0)
X = rng.random((200, 10))
Y = rng.random((200, 10))
exact = np.exp(-((X - Y) ** 2).sum(axis=1) / 2)
print("kernel values range", exact.min().round(3), "to", exact.max().round(3))

for D in (16, 64, 256, 1024, 4096):
    m = rff_fit(10, D, sigma=1.0, seed=D)
    approx = (rff_transform(m, X) * rff_transform(m, Y)).sum(axis=1)
    err = np.abs(approx - exact)
    print(f"D={D:5d}  median |err| {np.median(err):.4f}  max {err.max():.4f}  "
          f"1/sqrt(D) {1 / np.sqrt(D):.4f}")
