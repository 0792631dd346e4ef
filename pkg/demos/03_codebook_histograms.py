"""Codebooks: k-means dictionary fitting, nearest-centroid assignment, and
L1-normalized codeword histograms for two populations.

Run: python demos/03_codebook_histograms.py
"""

import numpy as np

from stylescape import assign, fit_codebook
from stylescape.codebook import histogram_from_assignments, assign_block

rng = np.random.default_rng(1)

# Six latent "styles" as well-separated blobs in 8-dim descriptor space.
centers = rng.normal(size=(6, 8)) * 8.0
def population(weights, n=4000):
    counts = (np.asarray(weights) * n).astype(int)
    rows = [centers[i] + rng.normal(0, 0.6, size=(c, 8)) for i, c in enumerate(counts)]
    return np.vstack(rows)

city_a = population([0.30, 0.25, 0.20, 0.15, 0.05, 0.05])
city_b = population([0.05, 0.05, 0.15, 0.20, 0.25, 0.30])

book = fit_codebook(np.vstack([city_a, city_b]), k=6, seed=0)
meta = book.fit_meta
print(f"fit k={book.k} on {meta['n_train']} vectors, "
      f"{meta['iterations']} iterations, final inertia {meta['inertia']:.1f}")
print("inertia per iteration:", [round(v, 1) for v in meta["inertia_history"]])

probe = centers[2] + rng.normal(0, 0.6, size=8)
print("\na vector drawn near latent style 2 lands in bin", assign(book, probe))

for name, pop in (("city A", city_a), ("city B", city_b)):
    hist = histogram_from_assignments(assign_block(book, pop), book.k, city=name)
    print(f"{name} codeword vector: {np.round(hist.bins, 3)} (support {hist.support})")
print("\nthe two populations weight the same dictionary very differently.")
