"""Descriptor-space algebra: PCA compression, segment fusion, squared distance.

PCA is fit by eigendecomposition of the sample covariance (ddof=1) with a
deterministic sign convention so repeated fits are bit-identical.  Models
serialize as a JSON header next to a binary matrix in the corpus vector
format (row 0 = mean, rows 1.. = basis).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .corpus import load_vector_block, write_vector_block
from .errors import ValidationError

_SIGN_EPS = 1e-12


@dataclass
class PcaModel:
    input_dim: int
    output_dim: int
    mean: np.ndarray                # (input_dim,)
    basis: np.ndarray               # (output_dim, input_dim), rows = principal axes
    explained_variance: np.ndarray  # (output_dim,), non-increasing
    seed: int = 0


def fit_pca(vectors: np.ndarray, output_dim: int, seed: int = 0) -> PcaModel:
    """Fit a PCA model: column mean plus the top eigenvectors of the covariance.

    Each axis is signed so its first coordinate of magnitude > 1e-12 is
    positive.  Raises if output_dim exceeds the rank of the centered data,
    naming the achievable rank.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise ValidationError(f"PCA needs at least 2 vectors, got {n}")
    if not (1 <= output_dim <= min(n - 1, d)):
        raise ValidationError(
            f"output_dim {output_dim} outside [1, min(n-1, d)] = [1, {min(n - 1, d)}]"
        )
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    axes = eigvecs[:, order].T

    rank = int(np.sum(eigvals > max(eigvals[0], 0.0) * 1e-10)) if eigvals[0] > 0 else 0
    if output_dim > rank:
        raise ValidationError(
            f"centered data has rank {rank}; cannot extract {output_dim} components"
        )

    basis = axes[:output_dim].copy()
    for row in basis:
        nz = np.flatnonzero(np.abs(row) > _SIGN_EPS)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return PcaModel(
        input_dim=d,
        output_dim=output_dim,
        mean=mean,
        basis=basis,
        explained_variance=eigvals[:output_dim].copy(),
        seed=seed,
    )


def project(model: PcaModel, v: np.ndarray) -> np.ndarray:
    """Project vector(s) onto the principal axes: basis @ (v - mean)."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape[-1] != model.input_dim:
        raise ValidationError(
            f"vector length {arr.shape[-1]} != model input_dim {model.input_dim}"
        )
    return (arr - model.mean) @ model.basis.T


def reconstruct(model: PcaModel, y: np.ndarray) -> np.ndarray:
    """Map projected vector(s) back to input space: mean + y @ basis."""
    arr = np.asarray(y, dtype=np.float64)
    if arr.shape[-1] != model.output_dim:
        raise ValidationError(
            f"vector length {arr.shape[-1]} != model output_dim {model.output_dim}"
        )
    return model.mean + arr @ model.basis


@dataclass
class FusedVector:
    """Concatenation of named segments with the recorded layout."""

    layout: list[tuple[str, int, int]]  # (name, start, stop), contiguous
    data: np.ndarray

    def segment(self, name: str) -> np.ndarray:
        for seg, start, stop in self.layout:
            if seg == name:
                return self.data[start:stop]
        raise ValidationError(f"no segment named {name!r}")


def concat(segments: list[tuple[str, np.ndarray]]) -> FusedVector:
    """Join (name, vector) segments in order, recording the layout."""
    if not segments:
        raise ValidationError("concat needs at least one segment")
    names = [name for name, _ in segments]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate segment names in {names}")
    layout = []
    parts = []
    offset = 0
    for name, vec in segments:
        arr = np.asarray(vec, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ValidationError(f"segment {name!r} is empty")
        layout.append((name, offset, offset + arr.size))
        parts.append(arr)
        offset += arr.size
    return FusedVector(layout=layout, data=np.concatenate(parts))


def sq_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Euclidean distance between two equal-length vectors."""
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    diff = x - y
    return float(diff @ diff)


def save_pca(model: PcaModel, path_prefix) -> None:
    """Write <prefix>.json (header) and <prefix>.tlvb (mean row + basis rows)."""
    prefix = str(path_prefix)
    matrix = np.vstack([model.mean[None, :], model.basis])
    write_vector_block(prefix + ".tlvb", matrix)
    header = {
        "input_dim": model.input_dim,
        "output_dim": model.output_dim,
        "seed": model.seed,
        "explained_variance": [float(v) for v in model.explained_variance],
        "matrix_file": os.path.basename(prefix) + ".tlvb",
    }
    with open(prefix + ".json", "w", encoding="utf-8") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_pca(path_prefix) -> PcaModel:
    prefix = str(path_prefix)
    with open(prefix + ".json", "r", encoding="utf-8") as fh:
        header = json.load(fh)
    block = load_vector_block(os.path.join(os.path.dirname(prefix), header["matrix_file"]))
    out_dim = int(header["output_dim"])
    if block.count != out_dim + 1 or block.dim != int(header["input_dim"]):
        raise ValidationError(f"{prefix}: matrix file does not match header dims")
    matrix = np.asarray(block.data, dtype=np.float64)
    return PcaModel(
        input_dim=int(header["input_dim"]),
        output_dim=out_dim,
        mean=matrix[0],
        basis=matrix[1:],
        explained_variance=np.asarray(header["explained_variance"], dtype=np.float64),
        seed=int(header["seed"]),
    )
