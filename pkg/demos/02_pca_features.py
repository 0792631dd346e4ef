"""Descriptor algebra: PCA compression, segment fusion, squared distances.

Run: python demos/02_pca_features.py
"""

import numpy as np

from stylescape import concat, fit_pca, project, reconstruct, sq_distance

rng = np.random.default_rng(0)

# 256-dim color histograms that really live on a 12-dim subspace + noise.
latent = rng.normal(size=(500, 12))
mixing = rng.normal(size=(12, 256))
color = latent @ mixing + rng.normal(scale=0.05, size=(500, 256))

model = fit_pca(color, output_dim=128)
print("color PCA: 256 ->", model.output_dim, "dims")
print("explained variance (top 5):", np.round(model.explained_variance[:5], 3))

compressed = project(model, color)
back = reconstruct(model, compressed)
err = np.abs(back - color).max()
print(f"max reconstruction error with 128 axes: {err:.4f}")

# Fuse a style vector with the compressed color vector, as one record's
# final descriptor.
style = rng.normal(size=128)
fused = concat([("style", style), ("color", compressed[0])])
print("\nfused layout:", fused.layout)
print("fused length:", fused.data.shape[0])
print("style segment round-trips:", bool(np.array_equal(fused.segment("style"), style)))

a, b = compressed[0], compressed[1]
print(f"\nsquared distance between two compressed vectors: {sq_distance(a, b):.3f}")
print(f"distance to self: {sq_distance(a, a):.3f}")
