"""Corpus basics: city anchors, great-circle distances, geo filtering,
and year partitioning.

Run: python demos/01_corpus_and_geo.py
"""

import tempfile
from datetime import datetime, timezone

from stylescape import (
    Manifest,
    Record,
    default_city_anchors,
    filter_by_city,
    haversine_km,
    partition_by_period,
    sample_records,
    save_manifest,
)

anchors = {a.name: a for a in default_city_anchors()}
print("built-in anchors:", ", ".join(sorted(anchors)))

london, paris = anchors["London"], anchors["Paris"]
print(f"\nLondon -> Paris: {haversine_km(london.lat, london.lon, paris.lat, paris.lon):.1f} km")
print(f"London -> Tokyo: {haversine_km(london.lat, london.lon, anchors['Tokyo'].lat, anchors['Tokyo'].lon):.1f} km")

# A handful of records: three near London, one near Paris, one mid-ocean.
def ts(year, month):
    return int(datetime(year, month, 1, tzinfo=timezone.utc).timestamp())

records = [
    Record("snap-001", "unassigned", ts(2013, 5), london.lon + 0.05, london.lat - 0.02, 0),
    Record("snap-002", "unassigned", ts(2013, 9), london.lon - 0.30, london.lat + 0.10, 1),
    Record("snap-003", "unassigned", ts(2014, 2), london.lon + 0.12, london.lat + 0.05, 2),
    Record("snap-004", "unassigned", ts(2014, 7), paris.lon, paris.lat, 3),
    Record("snap-005", "unassigned", ts(2013, 1), -140.0, -10.0, 4),
]
manifest = Manifest(records, vector_file="", dim=0)

for anchor in (london, paris):
    city = filter_by_city(manifest, anchor, radius_km=100.0)
    print(f"\nwithin 100 km of {anchor.name}: {[r.id for r in city.records]}")
    part = partition_by_period(city, year_range=(2000, 2015))
    for period, bucket in part.buckets.items():
        print(f"  {period}: {[r.id for r in bucket.records]}")

sampled = sample_records(manifest, 3, seed=7)
print("\nseeded 3-record sample:", [r.id for r in sampled.records])

out = tempfile.mkdtemp(prefix="stylescape-demo-") + "/manifest.jsonl"
save_manifest(manifest, out)
print("manifest JSONL written to", out)
