"""Trend descriptors: thresholded subtraction of consecutive codeword vectors.

The per-bin difference of two codeword vectors is split three ways around a
threshold TH: rising bins (diff > TH), falling bins (diff < -TH), and
unchanged bins (everything else, including |diff| == TH exactly, so the
three parts always partition the bins).  Stored magnitudes are |diff|.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook, CodewordVector, assign_block
from .corpus import Manifest, VectorBlock
from .errors import ValidationError

DEFAULT_THRESHOLD = 0.01


@dataclass
class TrendDescriptor:
    k: int
    threshold: float
    plus: dict[int, float]   # bin -> |diff| where diff > threshold
    minus: dict[int, float]  # bin -> |diff| where diff < -threshold
    zero: set[int]
    period_from: str
    period_to: str
    city: str


@dataclass
class ExemplarSet:
    """Records nearest to one centroid, distances ascending."""

    bin: int
    record_ids: list[str] = field(default_factory=list)
    distances: list[float] = field(default_factory=list)


def compute_ftd(
    v_now: CodewordVector, v_prev: CodewordVector, threshold: float = DEFAULT_THRESHOLD
) -> TrendDescriptor:
    if len(v_now.bins) != len(v_prev.bins):
        raise ValidationError(
            f"codeword k mismatch: {len(v_now.bins)} vs {len(v_prev.bins)}"
        )
    if v_now.city != v_prev.city:
        raise ValidationError(f"city mismatch: {v_now.city!r} vs {v_prev.city!r}")
    if threshold < 0:
        raise ValidationError(f"threshold must be >= 0, got {threshold}")
    diff = np.asarray(v_now.bins, dtype=np.float64) - np.asarray(v_prev.bins, dtype=np.float64)
    plus = {int(i): float(abs(diff[i])) for i in np.flatnonzero(diff > threshold)}
    minus = {int(i): float(abs(diff[i])) for i in np.flatnonzero(diff < -threshold)}
    zero = set(range(len(diff))) - plus.keys() - minus.keys()
    return TrendDescriptor(
        k=len(diff),
        threshold=threshold,
        plus=plus,
        minus=minus,
        zero=zero,
        period_from=v_prev.period,
        period_to=v_now.period,
        city=v_now.city,
    )


def top_trends(
    ftd: TrendDescriptor, n: int
) -> tuple[list[tuple[int, float]], list[tuple[int, float]]]:
    """(rising, falling): top-n by magnitude descending, ties to the lower bin."""
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    rank = lambda d: sorted(d.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
    return rank(ftd.plus), rank(ftd.minus)


def trend_series(
    vectors: list[CodewordVector], threshold: float = DEFAULT_THRESHOLD
) -> list[TrendDescriptor]:
    """One descriptor per adjacent pair of consecutive-year codeword vectors."""
    if len(vectors) < 2:
        raise ValidationError(f"need at least 2 periods, got {len(vectors)}")
    cities = {v.city for v in vectors}
    if len(cities) != 1:
        raise ValidationError(f"mixed cities in series: {sorted(cities)}")
    ks = {len(v.bins) for v in vectors}
    if len(ks) != 1:
        raise ValidationError(f"mixed k in series: {sorted(ks)}")
    try:
        years = [int(v.period) for v in vectors]
    except ValueError as exc:
        raise ValidationError(f"period labels must be years: {exc}") from exc
    for a, b in zip(years, years[1:]):
        if b == a:
            raise ValidationError(f"duplicated period {a}")
        if b != a + 1:
            raise ValidationError(f"non-consecutive periods: gap between {a} and {b}")
    return [compute_ftd(now, prev, threshold) for prev, now in zip(vectors, vectors[1:])]


def nearest_exemplars(
    codebook: Codebook,
    bin_index: int,
    manifest: Manifest,
    block: VectorBlock,
    n: int,
) -> ExemplarSet:
    """The n records assigned to this bin that sit closest to its centroid.

    Distance ties keep manifest order (stable sort).  Fewer than n assigned
    records, or none at all, returns what exists.
    """
    if not (0 <= bin_index < codebook.k):
        raise ValidationError(f"bin {bin_index} outside [0, {codebook.k})")
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    if not manifest.records:
        return ExemplarSet(bin=bin_index)
    idx = np.array([r.vector_index for r in manifest.records])
    vecs = np.asarray(block.data[idx], dtype=np.float64)
    labels = assign_block(codebook, vecs)
    member = np.flatnonzero(labels == bin_index)
    if member.size == 0:
        return ExemplarSet(bin=bin_index)
    centroid = codebook.centroids[bin_index]
    d2 = ((vecs[member] - centroid) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")[:n]
    chosen = member[order]
    return ExemplarSet(
        bin=bin_index,
        record_ids=[manifest.records[i].id for i in chosen],
        distances=[float(d2[i]) for i in order],
    )


def ftd_to_dict(ftd: TrendDescriptor) -> dict:
    return {
        "city": ftd.city,
        "from": ftd.period_from,
        "to": ftd.period_to,
        "threshold": ftd.threshold,
        "plus": [{"bin": b, "mag": m} for b, m in sorted(ftd.plus.items())],
        "minus": [{"bin": b, "mag": m} for b, m in sorted(ftd.minus.items())],
    }


def write_trends_json(path, descriptors: list[TrendDescriptor]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([ftd_to_dict(f) for f in descriptors], fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trends_csv(path, descriptors: list[TrendDescriptor]) -> None:
    """Long format for plotting: one row per changed bin."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["city", "period_from", "period_to", "bin", "direction", "magnitude"])
        for f in descriptors:
            for b, m in sorted(f.plus.items()):
                writer.writerow([f.city, f.period_from, f.period_to, b, "rising", repr(m)])
            for b, m in sorted(f.minus.items()):
                writer.writerow([f.city, f.period_from, f.period_to, b, "falling", repr(m)])


def exemplars_to_dict(ex: ExemplarSet) -> dict:
    return {
        "bin": ex.bin,
        "records": [
            {"id": rid, "sq_distance": d} for rid, d in zip(ex.record_ids, ex.distances)
        ],
    }
