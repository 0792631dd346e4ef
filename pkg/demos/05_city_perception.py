"""City perception: build disjoint train/test codeword vectors per city and
classify which city a histogram came from.

Run: python demos/05_city_perception.py
"""

import tempfile

import numpy as np

from stylescape import evaluate, fit_codebook, make_labeled_sets, train_classifier
from stylescape.corpus import load_corpus
from stylescape.synth import SynthSpec, generate

tmp = tempfile.mkdtemp(prefix="stylescape-demo-")
spec = SynthSpec(
    cities=["London", "Paris", "Tokyo", "New York"],
    years=[2013],
    per_bucket=2400,
    clusters=12,
    dim=12,
    seed=4,
)
generate(spec, tmp)
manifest, block = load_corpus(tmp + "/manifest.jsonl", tmp + "/vectors.tlvb")
print(f"synthetic corpus: {len(manifest.records)} records across {len(spec.cities)} cities")

by_city = {}
for r in manifest.records:
    by_city.setdefault(r.city, []).append(r)
from stylescape.corpus import Manifest  # noqa: E402
per_city = {c: Manifest(rs, manifest.vector_file, manifest.dim) for c, rs in by_city.items()}

book = fit_codebook(block.data, k=16, seed=0)
train, test = make_labeled_sets(
    per_city, book, block, train_n=20, test_n=5, sample_size=800, seed=1
)
print(f"train vectors: {len(train.vectors)}, test vectors: {len(test.vectors)} "
      f"(each aggregates {train.per_vector_sample_size} records)")

for kind in ("nearest_class_mean", "rbf_svm"):
    model = train_classifier(train, kind, {"C": 0.01, "seed": 0})
    cm = evaluate(model, test)
    print(f"\n{kind}: accuracy {cm.accuracy:.3f} on {cm.total} test vectors")
    width = max(len(c) for c in cm.classes)
    header = " ".join(f"{c[:6]:>6}" for c in cm.classes)
    print(f"{'':>{width}}  {header}")
    for city, row in zip(cm.classes, cm.counts):
        print(f"{city:>{width}}  " + " ".join(f"{int(x):>6}" for x in row))
