"""Corpus data model and on-disk formats.

A corpus is a JSONL manifest (one record per line: id, city, ts, lon, lat,
vec) plus a binary vector file holding one float32 row per record.  The
vector file layout is:

    magic "TLVB" | u32 version=1 | u32 dim | u64 count | count*dim float32

all little-endian, bit-exact.  Everything in this module is immutable after
load and every operation is a pure function over its inputs.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np

from .errors import ValidationError

EARTH_RADIUS_KM = 6371.0
SCHEMA_VERSION = 1
VECTOR_MAGIC = b"TLVB"
VECTOR_VERSION = 1

# Built-in city anchor table: (name, longitude, latitude).  Overridable via
# a JSON file, see load_city_anchors().
DEFAULT_CITY_TABLE = (
    ("London", -0.12776, 51.50735),
    ("New York", -74.0059, 40.71278),
    ("Boston", -71.0589, 42.36008),
    ("Paris", 2.352222, 48.85661),
    ("Toronto", -79.3832, 43.65323),
    ("Barcelona", 2.173403, 41.38506),
    ("Tokyo", 139.6917, 35.68949),
    ("San Francisco", -122.419, 37.77493),
    ("Hong Kong", 114.1095, 22.39643),
    ("Zurich", 8.541694, 47.37689),
    ("Seoul", 126.978, 37.56654),
    ("Beijing", 116.4074, 39.90421),
    ("Bangkok", 100.5018, 13.75633),
    ("Singapore", 103.8198, 1.352083),
    ("Kuala Lumpur", 101.6869, 3.139003),
    ("New Delhi", 77.20902, 28.61394),
)


def _check_coords(lon: float, lat: float, context: str = "") -> None:
    where = f" ({context})" if context else ""
    if not (-180.0 < lon <= 180.0):
        raise ValidationError(f"longitude {lon} out of range (-180, 180]{where}")
    if not (-90.0 <= lat <= 90.0):
        raise ValidationError(f"latitude {lat} out of range [-90, 90]{where}")


@dataclass(frozen=True)
class CityAnchor:
    name: str
    lon: float
    lat: float

    def __post_init__(self):
        _check_coords(self.lon, self.lat, f"anchor {self.name!r}")


def default_city_anchors() -> list[CityAnchor]:
    return [CityAnchor(name, lon, lat) for name, lon, lat in DEFAULT_CITY_TABLE]


def load_city_anchors(path) -> list[CityAnchor]:
    """Read an anchor table from a JSON list of {name, lon, lat} objects."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list) or not raw:
        raise ValidationError(f"{path}: anchor file must be a non-empty JSON list")
    anchors = [CityAnchor(str(e["name"]), float(e["lon"]), float(e["lat"])) for e in raw]
    names = [a.name for a in anchors]
    if len(set(names)) != len(names):
        raise ValidationError(f"{path}: duplicate anchor names")
    return anchors


@dataclass(frozen=True)
class Record:
    """One person-crop observation tied to a row of a vector block."""

    id: str
    city: str
    ts: int
    lon: float
    lat: float
    vector_index: int


@dataclass
class VectorBlock:
    """count x dim matrix of float32 descriptors, row-major."""

    dim: int
    count: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.count, self.dim):
            raise ValidationError(
                f"vector block shape {self.data.shape} != ({self.count}, {self.dim})"
            )
        if not np.isfinite(self.data).all():
            raise ValidationError("vector block contains NaN/Inf entries")
        self.data.flags.writeable = False


@dataclass
class Manifest:
    records: list[Record]
    vector_file: str
    dim: int
    schema_version: int = SCHEMA_VERSION

    def __len__(self):
        return len(self.records)


def write_vector_block(path, data: np.ndarray) -> VectorBlock:
    """Write a 2-D float array to the binary vector format and return the block."""
    arr = np.ascontiguousarray(np.asarray(data, dtype="<f4"))
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {arr.shape}")
    count, dim = arr.shape
    with open(path, "wb") as fh:
        fh.write(VECTOR_MAGIC)
        fh.write(struct.pack("<IIQ", VECTOR_VERSION, dim, count))
        fh.write(arr.tobytes())
    return VectorBlock(dim=dim, count=count, data=arr)


def load_vector_block(path) -> VectorBlock:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != VECTOR_MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}, expected {VECTOR_MAGIC!r}")
        version, dim, count = struct.unpack("<IIQ", fh.read(16))
        if version != VECTOR_VERSION:
            raise ValidationError(f"{path}: unsupported version {version}")
        raw = fh.read(4 * dim * count)
        if len(raw) != 4 * dim * count:
            raise ValidationError(
                f"{path}: truncated payload, expected {4 * dim * count} bytes, got {len(raw)}"
            )
    data = np.frombuffer(raw, dtype="<f4").reshape(count, dim).copy()
    return VectorBlock(dim=dim, count=count, data=data)


def save_manifest(manifest: Manifest, path) -> None:
    """Write records as JSONL, one object per line, keys id/city/ts/lon/lat/vec."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in manifest.records:
            fh.write(
                json.dumps(
                    {"id": r.id, "city": r.city, "ts": r.ts, "lon": r.lon,
                     "lat": r.lat, "vec": r.vector_index},
                    sort_keys=True,
                )
            )
            fh.write("\n")


def parse_manifest_line(line: str, lineno: int) -> Record:
    try:
        obj = json.loads(line)
        rec = Record(
            id=str(obj["id"]),
            city=str(obj["city"]),
            ts=int(obj["ts"]),
            lon=float(obj["lon"]),
            lat=float(obj["lat"]),
            vector_index=int(obj["vec"]),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ValidationError(f"manifest line {lineno}: malformed record ({exc})") from exc
    return rec


def load_manifest(path, vector_file: str = "", dim: int = 0) -> Manifest:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            records.append(parse_manifest_line(line, lineno))
    ids = set()
    for r in records:
        if r.id in ids:
            raise ValidationError(f"{path}: duplicate record id {r.id!r}")
        ids.add(r.id)
    return Manifest(records=records, vector_file=str(vector_file), dim=dim)


def load_corpus(manifest_path, vectors_path) -> tuple[Manifest, VectorBlock]:
    """Load and cross-validate a manifest with its vector block."""
    block = load_vector_block(vectors_path)
    manifest = load_manifest(manifest_path, vector_file=str(vectors_path), dim=block.dim)
    for r in manifest.records:
        if not (0 <= r.vector_index < block.count):
            raise ValidationError(
                f"record {r.id!r}: vector index {r.vector_index} outside block of {block.count} rows"
            )
    return manifest, block


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in km on a sphere of radius 6371.0 km."""
    _check_coords(lon1, lat1)
    _check_coords(lon2, lat2)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = math.radians(lat2 - lat1)
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def _haversine_many(lats: np.ndarray, lons: np.ndarray, lat0: float, lon0: float) -> np.ndarray:
    # Same formula as haversine_km, vectorized over record arrays.
    p = np.radians(lats)
    p0 = math.radians(lat0)
    dp = np.radians(lats - lat0)
    dl = np.radians(lons - lon0)
    a = np.sin(dp / 2.0) ** 2 + np.cos(p) * math.cos(p0) * np.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(a)))


def filter_by_city(manifest: Manifest, anchor: CityAnchor, radius_km: float) -> Manifest:
    """Keep records within radius_km of the anchor (inclusive), labeled with its name.

    Input order is preserved; an empty result is a valid empty manifest.
    """
    if radius_km < 0:
        raise ValidationError(f"radius_km must be non-negative, got {radius_km}")
    if not manifest.records:
        return Manifest([], manifest.vector_file, manifest.dim, manifest.schema_version)
    lats = np.array([r.lat for r in manifest.records])
    lons = np.array([r.lon for r in manifest.records])
    bad = ~((lons > -180.0) & (lons <= 180.0) & (lats >= -90.0) & (lats <= 90.0))
    if bad.any():
        r = manifest.records[int(np.flatnonzero(bad)[0])]
        _check_coords(r.lon, r.lat, f"record {r.id!r}")
    dist = _haversine_many(lats, lons, anchor.lat, anchor.lon)
    kept = [
        r if r.city == anchor.name else replace(r, city=anchor.name)
        for r, d in zip(manifest.records, dist)
        if d <= radius_km
    ]
    return Manifest(kept, manifest.vector_file, manifest.dim, manifest.schema_version)


def sample_records(manifest: Manifest, n: int, seed: int) -> Manifest:
    """Uniform sample of min(n, count) records without replacement.

    The output order is the seed-determined permutation, so identical
    (manifest, n, seed) inputs give identical outputs.
    """
    if n < 0:
        raise ValidationError(f"sample size must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(manifest.records))
    take = perm[: min(n, len(manifest.records))]
    kept = [manifest.records[i] for i in take]
    return Manifest(kept, manifest.vector_file, manifest.dim, manifest.schema_version)


@dataclass
class PeriodPartition:
    """Year buckets plus the rejected records (reported, never dropped)."""

    buckets: dict[str, Manifest]
    rejected: Manifest


def year_of_ts(ts: int) -> int:
    return datetime.fromtimestamp(ts, tz=timezone.utc).year


def partition_by_period(
    manifest: Manifest,
    granularity: str = "year",
    year_range: tuple[int, int] = (2000, 2015),
) -> PeriodPartition:
    """Bucket records by UTC calendar year; out-of-range years go to `rejected`."""
    if granularity != "year":
        raise ValidationError(f"unsupported granularity {granularity!r}")
    lo, hi = year_range
    if lo > hi:
        raise ValidationError(f"bad year range {year_range}")
    buckets: dict[str, list[Record]] = {}
    rejected: list[Record] = []
    for r in manifest.records:
        year = year_of_ts(r.ts)
        if lo <= year <= hi:
            buckets.setdefault(str(year), []).append(r)
        else:
            rejected.append(r)
    mk = lambda recs: Manifest(recs, manifest.vector_file, manifest.dim, manifest.schema_version)
    return PeriodPartition(
        buckets={k: mk(v) for k, v in sorted(buckets.items())},
        rejected=mk(rejected),
    )
