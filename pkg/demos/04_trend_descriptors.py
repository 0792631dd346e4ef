"""Trend descriptors: subtract consecutive codeword vectors, threshold the
changes, and pull exemplar records for the rising bin.

Run: python demos/04_trend_descriptors.py
"""

import tempfile

import numpy as np

from stylescape import compute_ftd, fit_codebook, nearest_exemplars, top_trends, trend_series
from stylescape.codebook import CodewordVector, build_codeword_vector
from stylescape.corpus import Manifest, Record, write_vector_block

# Codeword vectors for one city across three years; between 2013 and 2014
# bin 1 gives 8% of its mass to bin 4.
v2012 = CodewordVector(np.array([0.20, 0.30, 0.25, 0.15, 0.02, 0.08]), 5000, "Tokyo", "2012")
v2013 = CodewordVector(np.array([0.20, 0.30, 0.25, 0.15, 0.02, 0.08]), 5000, "Tokyo", "2013")
v2014 = CodewordVector(np.array([0.20, 0.22, 0.25, 0.15, 0.10, 0.08]), 5000, "Tokyo", "2014")

ftd = compute_ftd(v2014, v2013, threshold=0.01)
print(f"{ftd.city} {ftd.period_from}->{ftd.period_to} at TH={ftd.threshold}")
print("  rising bins:", ftd.plus)
print("  falling bins:", ftd.minus)
print("  unchanged bins:", sorted(ftd.zero))

rising, falling = top_trends(ftd, n=3)
print("top rising:", rising, "| top falling:", falling)

series = trend_series([v2012, v2013, v2014], threshold=0.01)
print("\nseries of", len(series), "descriptors:",
      [f"{f.period_from}->{f.period_to} (+{len(f.plus)}/-{len(f.minus)})" for f in series])

# Exemplars: which records sit closest to the centroid of the rising bin?
rng = np.random.default_rng(2)
data = rng.normal(size=(300, 4)) * 5.0
book = fit_codebook(data, k=6, seed=0)
tmp = tempfile.mkdtemp(prefix="stylescape-demo-")
block = write_vector_block(tmp + "/v.tlvb", data.astype(np.float32))
records = [Record(f"snap-{i:03d}", "Tokyo", 1_300_000_000 + i, 139.7, 35.7, i)
           for i in range(len(data))]
manifest = Manifest(records, tmp + "/v.tlvb", 4)

rising_bin = rising[0][0] if rising else 0
ex = nearest_exemplars(book, rising_bin, manifest, block, n=5)
print(f"\nnearest records to bin {ex.bin}'s centroid:")
for rid, d in zip(ex.record_ids, ex.distances):
    print(f"  {rid}  sq_distance={d:.3f}")
