"""Synthetic corpus generator with written ground truth.

The generator plants everything the other modules are supposed to recover:
latent style clusters (well-separated Gaussian blobs), a distinct cluster
mixture per city, and explicit mass shifts between clusters across periods.
Per-bucket cluster counts are produced by largest-remainder rounding of the
mixture, so an unshifted bin differs across periods by at most 1/per_bucket
and a planted shift shows up at its exact mass.  A truth JSON is written
beside the corpus so tests can compare against it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .corpus import (
    Manifest,
    Record,
    default_city_anchors,
    save_manifest,
    write_vector_block,
)
from .errors import ValidationError


@dataclass(frozen=True)
class PlantedShift:
    """Move `mass` of a city's mixture from cluster src to cluster dst at year_to."""

    city: str
    year_from: int
    year_to: int
    src: int
    dst: int
    mass: float


@dataclass
class SynthSpec:
    cities: list[str]
    years: list[int]                  # consecutive calendar years
    per_bucket: int                   # records per (city, year)
    clusters: int
    dim: int = 16
    noise: float = 0.5
    center_scale: float = 10.0
    shifts: list[PlantedShift] = field(default_factory=list)
    strays: int = 0                   # records far from every anchor
    seed: int = 0


def _largest_remainder_counts(probs: np.ndarray, total: int) -> np.ndarray:
    scaled = probs * total
    counts = np.floor(scaled).astype(np.int64)
    short = total - counts.sum()
    # Deterministic tie handling: biggest remainder first, then lowest index.
    order = np.lexsort((np.arange(len(probs)), -(scaled - counts)))
    counts[order[:short]] += 1
    return counts


def _year_start(year: int) -> int:
    return int(datetime(year, 1, 1, tzinfo=timezone.utc).timestamp())


def generate(spec: SynthSpec, out_dir) -> dict:
    """Write manifest.jsonl, vectors.tlvb, and truth.json under out_dir.

    Returns the truth dict: cluster centers, per-city mixtures by year,
    planted shifts, and exact per-bucket cluster counts.
    """
    if spec.per_bucket < 1:
        raise ValidationError(f"per_bucket must be >= 1, got {spec.per_bucket}")
    if spec.clusters < 2:
        raise ValidationError(f"need >= 2 latent clusters, got {spec.clusters}")
    if sorted(spec.years) != list(range(min(spec.years), max(spec.years) + 1)):
        raise ValidationError(f"years must be consecutive, got {spec.years}")
    anchors = {a.name: a for a in default_city_anchors()}
    unknown = [c for c in spec.cities if c not in anchors]
    if unknown:
        raise ValidationError(f"cities without anchors: {unknown}")

    rng = np.random.default_rng(spec.seed)
    centers = rng.normal(0.0, 1.0, size=(spec.clusters, spec.dim)) * spec.center_scale
    base_mixture = {city: rng.dirichlet(np.ones(spec.clusters)) for city in spec.cities}

    # Mixture per (city, year): base plus every shift in effect by that year.
    mixtures: dict[str, dict[int, np.ndarray]] = {}
    for city in spec.cities:
        mixtures[city] = {}
        for year in spec.years:
            mix = base_mixture[city].copy()
            for s in spec.shifts:
                if s.city == city and year >= s.year_to:
                    mix[s.src] -= s.mass
                    mix[s.dst] += s.mass
            if (mix < 0).any():
                bad = int(np.argmin(mix))
                raise ValidationError(
                    f"infeasible shifts for {city}/{year}: cluster {bad} "
                    f"mass would be {mix[bad]:.4f}"
                )
            mixtures[city][year] = mix

    records: list[Record] = []
    vectors: list[np.ndarray] = []
    truth_counts: dict[str, dict[str, list[int]]] = {}
    for city in spec.cities:
        anchor = anchors[city]
        truth_counts[city] = {}
        for year in spec.years:
            counts = _largest_remainder_counts(mixtures[city][year], spec.per_bucket)
            truth_counts[city][str(year)] = [int(c) for c in counts]
            year_seconds = _year_start(year + 1) - _year_start(year)
            step = max(1, year_seconds // (spec.per_bucket + 1))
            i = 0
            for cluster, count in enumerate(counts):
                for _ in range(count):
                    vec = centers[cluster] + rng.normal(0.0, spec.noise, spec.dim)
                    lon = anchor.lon + rng.uniform(-0.2, 0.2)
                    lat = anchor.lat + rng.uniform(-0.2, 0.2)
                    records.append(
                        Record(
                            id=f"{city.lower().replace(' ', '_')}-{year}-{i:06d}",
                            city=city,
                            ts=_year_start(year) + (i + 1) * step,
                            lon=round(lon, 6),
                            lat=round(lat, 6),
                            vector_index=len(vectors),
                        )
                    )
                    vectors.append(vec)
                    i += 1
    for i in range(spec.strays):
        # Mid-Pacific, far from every anchor in the default table.
        vec = centers[int(rng.integers(spec.clusters))] + rng.normal(0.0, spec.noise, spec.dim)
        records.append(
            Record(
                id=f"stray-{i:06d}",
                city="unassigned",
                ts=_year_start(spec.years[0]) + i + 1,
                lon=round(-140.0 + rng.uniform(-3, 3), 6),
                lat=round(-10.0 + rng.uniform(-3, 3), 6),
                vector_index=len(vectors),
            )
        )
        vectors.append(vec)

    os.makedirs(out_dir, exist_ok=True)
    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    vectors_path = os.path.join(out_dir, "vectors.tlvb")
    truth_path = os.path.join(out_dir, "truth.json")
    write_vector_block(vectors_path, np.array(vectors))
    manifest = Manifest(records, vector_file=vectors_path, dim=spec.dim)
    save_manifest(manifest, manifest_path)

    truth = {
        "seed": spec.seed,
        "dim": spec.dim,
        "clusters": spec.clusters,
        "noise": spec.noise,
        "centers": [[float(x) for x in row] for row in centers],
        "mixtures": {
            city: {str(y): [float(p) for p in mix] for y, mix in by_year.items()}
            for city, by_year in mixtures.items()
        },
        "bucket_counts": truth_counts,
        "shifts": [
            {
                "city": s.city,
                "year_from": s.year_from,
                "year_to": s.year_to,
                "src": s.src,
                "dst": s.dst,
                "mass": s.mass,
            }
            for s in spec.shifts
        ],
        "strays": spec.strays,
        "files": {"manifest": "manifest.jsonl", "vectors": "vectors.tlvb"},
    }
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return truth


def parse_shift(text: str) -> PlantedShift:
    """Parse 'CITY:year_from:year_to:src:dst:mass' (city may contain spaces)."""
    parts = text.split(":")
    if len(parts) != 6:
        raise ValidationError(
            f"bad shift spec {text!r}, expected CITY:year_from:year_to:src:dst:mass"
        )
    try:
        shift = PlantedShift(
            city=parts[0],
            year_from=int(parts[1]),
            year_to=int(parts[2]),
            src=int(parts[3]),
            dst=int(parts[4]),
            mass=float(parts[5]),
        )
    except ValueError as exc:
        raise ValidationError(f"bad shift spec {text!r}: {exc}") from exc
    if shift.mass < 0:
        raise ValidationError(f"shift mass must be >= 0, got {shift.mass}")
    if shift.year_to != shift.year_from + 1:
        raise ValidationError(f"shift years must be consecutive, got {text!r}")
    return shift
