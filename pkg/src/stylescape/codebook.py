"""K-means dictionaries and codeword histograms.

fit_codebook runs Lloyd's algorithm from a seeded k-means++ start with a
deterministic reduction order, so the same (data, k, seed, max_iter, tol)
always produces bit-identical centroids.  Codeword vectors are L1-normalized
histograms of nearest-centroid assignments; a fixed change threshold across
populations of different sizes is only meaningful on frequencies, so the
normalization is part of the contract.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .corpus import Manifest, VectorBlock, load_vector_block, write_vector_block
from .errors import ValidationError

_CHUNK = 8192


@dataclass
class Codebook:
    k: int
    dim: int
    centroids: np.ndarray  # (k, dim) float64
    fit_meta: dict = field(default_factory=dict)


@dataclass
class CodewordVector:
    """L1-normalized k-bin histogram for one (city, period) population."""

    bins: np.ndarray
    support: int
    city: str = ""
    period: str = ""
    normalization: str = "l1"


def _nearest(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Chunked exact scan; cdist computes (x-c)^2 directly so exact ties
    # resolve to the lowest centroid index via argmin.
    n = X.shape[0]
    labels = np.empty(n, dtype=np.int64)
    d2 = np.empty(n, dtype=np.float64)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        dist = cdist(X[start:stop], centroids, "sqeuclidean")
        idx = dist.argmin(axis=1)
        labels[start:stop] = idx
        d2[start:stop] = dist[np.arange(stop - start), idx]
    return labels, d2


def _cluster_sums(X: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    # Deterministic per-cluster sums: stable sort + sequential reduceat.
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, X.shape[1]), dtype=np.float64)
    order = np.argsort(labels, kind="stable")
    starts = np.searchsorted(labels[order], np.arange(k), side="left")
    nonempty = counts > 0
    if nonempty.any():
        sums[nonempty] = np.add.reduceat(X[order], starts[nonempty], axis=0)
    return sums, counts


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(n)]
    d2 = cdist(X, centroids[:1], "sqeuclidean")[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)  # all points already covered; degenerate data
        centroids[j] = X[idx]
        d2 = np.minimum(d2, cdist(X, centroids[j : j + 1], "sqeuclidean")[:, 0])
    return centroids


def fit_codebook(
    vectors: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> Codebook:
    """Lloyd's iterations from a seeded k-means++ start.

    Stops when the Frobenius norm of the centroid shift drops below tol or
    after max_iter iterations.  An emptied cluster is re-seeded to the point
    currently farthest from its assigned centroid.  fit_meta records seed,
    n_train, iterations, final inertia, and the per-iteration inertia
    history (non-increasing by construction).
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {X.shape}")
    n, d = X.shape
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if n < k:
        raise ValidationError(f"cannot fit {k} centroids from {n} vectors (need n >= k)")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(X, k, rng)
    history: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        labels, d2 = _nearest(X, centroids)
        history.append(float(d2.sum()))
        iterations += 1
        sums, counts = _cluster_sums(X, labels, k)
        new_centroids = centroids.copy()
        occupied = counts > 0
        new_centroids[occupied] = sums[occupied] / counts[occupied, None]
        for j in np.flatnonzero(~occupied):
            far = int(np.argmax(d2))
            new_centroids[j] = X[far]
            d2[far] = -1.0  # keep later empty clusters from reusing the same point
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum()))
        centroids = new_centroids
        if shift < tol:
            break

    labels, d2 = _nearest(X, centroids)
    inertia = float(d2.sum())
    history.append(inertia)

    if k > 1:
        dup = cdist(centroids, centroids, "sqeuclidean")
        np.fill_diagonal(dup, np.inf)
        if dup.min() == 0.0:
            raise ValidationError(
                f"degenerate codebook: identical centroids (fewer than {k} distinct points?)"
            )
    return Codebook(
        k=k,
        dim=d,
        centroids=centroids,
        fit_meta={
            "seed": seed,
            "n_train": n,
            "iterations": iterations,
            "inertia": inertia,
            "inertia_history": history,
        },
    )


def assign(codebook: Codebook, v: np.ndarray) -> int:
    """Index of the nearest centroid; exact ties break to the lowest index."""
    arr = np.asarray(v, dtype=np.float64).ravel()
    if arr.shape[0] != codebook.dim:
        raise ValidationError(f"vector length {arr.shape[0]} != codebook dim {codebook.dim}")
    labels, _ = _nearest(arr[None, :], codebook.centroids)
    return int(labels[0])


def assign_block(codebook: Codebook, X: np.ndarray) -> np.ndarray:
    """Vectorized assign over the rows of a matrix."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != codebook.dim:
        raise ValidationError(f"matrix shape {arr.shape} incompatible with dim {codebook.dim}")
    labels, _ = _nearest(arr, codebook.centroids)
    return labels


def build_codeword_vector(
    codebook: Codebook,
    manifest: Manifest,
    block: VectorBlock,
    city: str | None = None,
    period: str = "",
) -> CodewordVector:
    """L1-normalized histogram of assignments over the manifest's records.

    An empty manifest yields all-zero bins with support 0; callers decide
    whether that is acceptable.
    """
    if block.dim != codebook.dim:
        raise ValidationError(f"block dim {block.dim} != codebook dim {codebook.dim}")
    if city is None:
        cities = {r.city for r in manifest.records}
        city = cities.pop() if len(cities) == 1 else "mixed"
    if not manifest.records:
        return CodewordVector(np.zeros(codebook.k), 0, city=city, period=period)
    idx = np.array([r.vector_index for r in manifest.records])
    labels = assign_block(codebook, block.data[idx])
    counts = np.bincount(labels, minlength=codebook.k).astype(np.float64)
    return CodewordVector(
        bins=counts / counts.sum(),
        support=len(manifest.records),
        city=city,
        period=period,
    )


def histogram_from_assignments(
    labels: np.ndarray, k: int, city: str = "", period: str = ""
) -> CodewordVector:
    """CodewordVector from precomputed assignments (for batched pipelines)."""
    if len(labels) == 0:
        return CodewordVector(np.zeros(k), 0, city=city, period=period)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return CodewordVector(counts / counts.sum(), int(len(labels)), city=city, period=period)


def save_codebook(codebook: Codebook, path_prefix) -> None:
    """Write <prefix>.json (meta) and <prefix>.tlvb (centroid matrix)."""
    prefix = str(path_prefix)
    write_vector_block(prefix + ".tlvb", codebook.centroids)
    meta = {
        "k": codebook.k,
        "dim": codebook.dim,
        "fit_meta": codebook.fit_meta,
        "centroid_file": os.path.basename(prefix) + ".tlvb",
    }
    with open(prefix + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_codebook(path_prefix) -> Codebook:
    prefix = str(path_prefix)
    with open(prefix + ".json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    block = load_vector_block(os.path.join(os.path.dirname(prefix), meta["centroid_file"]))
    if block.count != int(meta["k"]) or block.dim != int(meta["dim"]):
        raise ValidationError(f"{prefix}: centroid file does not match meta dims")
    return Codebook(
        k=int(meta["k"]),
        dim=int(meta["dim"]),
        centroids=np.asarray(block.data, dtype=np.float64),
        fit_meta=dict(meta.get("fit_meta", {})),
    )


def write_codeword_csv(path, vectors: list[CodewordVector]) -> None:
    """One row per vector: city, period, support, then the k bin values."""
    if not vectors:
        raise ValidationError("no codeword vectors to write")
    k = len(vectors[0].bins)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["city", "period", "support"] + [f"bin_{i}" for i in range(k)])
        for cv in vectors:
            if len(cv.bins) != k:
                raise ValidationError("codeword vectors of mixed k in one file")
            writer.writerow([cv.city, cv.period, cv.support] + [repr(float(b)) for b in cv.bins])


def read_codeword_csv(path) -> list[CodewordVector]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:3] != ["city", "period", "support"]:
            raise ValidationError(f"{path}: not a codeword CSV")
        k = len(header) - 3
        for row in reader:
            if len(row) != k + 3:
                raise ValidationError(f"{path}: row width {len(row)} != {k + 3}")
            out.append(
                CodewordVector(
                    bins=np.array([float(x) for x in row[3:]]),
                    support=int(row[2]),
                    city=row[0],
                    period=row[1],
                )
            )
    return out
