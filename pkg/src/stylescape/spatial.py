"""Spatial analyses: city classification over codeword vectors and the
thresholded city-similarity graph.

The default classifier is nearest-class-mean: dependency-free, deterministic,
and adequate for codeword vectors averaged over thousands of records.  A
minimal one-vs-rest RBF SVM (simplified SMO) is available for comparison
runs; its hyperparameters are recorded so results stay attributable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .codebook import Codebook, CodewordVector, assign_block, histogram_from_assignments
from .corpus import Manifest, VectorBlock
from .errors import ValidationError

SIMILARITY_MEASURES = ("cosine", "histogram_intersection")
CLASSIFIER_KINDS = ("nearest_class_mean", "rbf_svm")


@dataclass
class LabeledCodewordSet:
    vectors: list[CodewordVector]
    labels: list[str]
    per_vector_sample_size: int

    def __post_init__(self):
        if len(self.vectors) != len(self.labels):
            raise ValidationError(
                f"{len(self.vectors)} vectors vs {len(self.labels)} labels"
            )

    def matrix(self) -> np.ndarray:
        return np.array([v.bins for v in self.vectors], dtype=np.float64)


@dataclass
class ConfusionMatrix:
    classes: list[str]
    counts: np.ndarray  # counts[i][j] = true class i predicted as j

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else 0.0


@dataclass
class SimilarityGraph:
    nodes: list[str]
    edges: list[tuple[str, str, float]]  # (a, b, weight), a < b, weight >= threshold
    threshold: float
    measure: str = "cosine"


@dataclass
class ClassifierModel:
    kind: str
    classes: list[str]
    means: np.ndarray | None = None          # nearest_class_mean: (n_classes, k)
    svms: list[dict] | None = None           # rbf_svm: one binary machine per class
    params: dict = field(default_factory=dict)


def make_labeled_sets(
    per_city_manifests: dict[str, Manifest],
    codebook: Codebook,
    block: VectorBlock,
    train_n: int,
    test_n: int,
    sample_size: int,
    seed: int = 0,
) -> tuple[LabeledCodewordSet, LabeledCodewordSet]:
    """Build train/test codeword vectors per city from disjoint record pools.

    Each city's records are split (proportionally to train_n:test_n, with
    both pools floored at sample_size) into a train pool and a test pool;
    every codeword vector aggregates an independent sample_size-record
    sample from its pool.  Identical seeds give identical sets.
    """
    if train_n < 1 or test_n < 1:
        raise ValidationError(f"train_n and test_n must be >= 1, got {train_n}/{test_n}")
    if sample_size < 1:
        raise ValidationError(f"sample_size must be >= 1, got {sample_size}")
    rng = np.random.default_rng(seed)
    train_vecs, train_labels, test_vecs, test_labels = [], [], [], []
    for city in sorted(per_city_manifests):
        manifest = per_city_manifests[city]
        n = len(manifest.records)
        if n < 2 * sample_size:
            raise ValidationError(
                f"city {city!r}: {n} records, need {2 * sample_size} "
                f"for disjoint train/test pools (short by {2 * sample_size - n})"
            )
        n_train_pool = round(n * train_n / (train_n + test_n))
        n_train_pool = min(max(n_train_pool, sample_size), n - sample_size)
        perm = rng.permutation(n)
        pools = {"train": perm[:n_train_pool], "test": perm[n_train_pool:]}

        idx_all = np.array([r.vector_index for r in manifest.records])
        labels_all = assign_block(codebook, block.data[idx_all])
        for part, count, vecs, labels in (
            ("train", train_n, train_vecs, train_labels),
            ("test", test_n, test_vecs, test_labels),
        ):
            pool = pools[part]
            for i in range(count):
                pick = rng.choice(pool.size, size=sample_size, replace=False)
                cv = histogram_from_assignments(
                    labels_all[pool[pick]], codebook.k, city=city, period=f"{part}-{i:03d}"
                )
                vecs.append(cv)
                labels.append(city)
    return (
        LabeledCodewordSet(train_vecs, train_labels, sample_size),
        LabeledCodewordSet(test_vecs, test_labels, sample_size),
    )


def _rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(A, B, "sqeuclidean"))


def _smo_binary(K, y, C, tol=1e-3, max_passes=5, max_sweeps=200, rng=None):
    # Simplified SMO over a precomputed kernel matrix.
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    rng = rng or np.random.default_rng(0)
    passes = 0
    sweeps = 0
    while passes < max_passes and sweeps < max_sweeps:
        sweeps += 1
        changed = 0
        for i in range(n):
            Ei = float(alpha * y @ K[:, i]) + b - y[i]
            if (y[i] * Ei < -tol and alpha[i] < C) or (y[i] * Ei > tol and alpha[i] > 0):
                j = int(rng.integers(n - 1))
                if j >= i:
                    j += 1
                Ej = float(alpha * y @ K[:, j]) + b - y[j]
                ai_old, aj_old = alpha[i], alpha[j]
                if y[i] != y[j]:
                    L, H = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
                else:
                    L, H = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
                if L == H:
                    continue
                eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
                if eta >= 0:
                    continue
                aj = np.clip(aj_old - y[j] * (Ei - Ej) / eta, L, H)
                if abs(aj - aj_old) < 1e-7:
                    continue
                ai = ai_old + y[i] * y[j] * (aj_old - aj)
                b1 = b - Ei - y[i] * (ai - ai_old) * K[i, i] - y[j] * (aj - aj_old) * K[i, j]
                b2 = b - Ej - y[i] * (ai - ai_old) * K[i, j] - y[j] * (aj - aj_old) * K[j, j]
                if 0 < ai < C:
                    b = b1
                elif 0 < aj < C:
                    b = b2
                else:
                    b = (b1 + b2) / 2.0
                alpha[i], alpha[j] = ai, aj
                changed += 1
        passes = passes + 1 if changed == 0 else 0
    return alpha, b


def train_classifier(
    train: LabeledCodewordSet, kind: str = "nearest_class_mean", params: dict | None = None
) -> ClassifierModel:
    """Fit a city classifier on labeled codeword vectors.

    rbf_svm params: C (default 0.01), gamma (default 1/k), seed for the SMO
    working-pair shuffling.
    """
    if kind not in CLASSIFIER_KINDS:
        raise ValidationError(f"unknown classifier kind {kind!r}")
    if not train.vectors:
        raise ValidationError("training set is empty")
    params = dict(params or {})
    classes = sorted(set(train.labels))
    X = train.matrix()
    for cls in classes:
        if train.labels.count(cls) < 1:
            raise ValidationError(f"class {cls!r} has no vectors")

    if kind == "nearest_class_mean":
        means = np.array([X[np.array(train.labels) == cls].mean(axis=0) for cls in classes])
        return ClassifierModel(kind=kind, classes=classes, means=means, params=params)

    C = float(params.get("C", 0.01))
    gamma = float(params.get("gamma") or 1.0 / X.shape[1])
    seed = int(params.get("seed", 0))
    K = _rbf_kernel(X, X, gamma)
    labels_arr = np.array(train.labels)
    svms = []
    for ci, cls in enumerate(classes):
        y = np.where(labels_arr == cls, 1.0, -1.0)
        alpha, b = _smo_binary(K, y, C, rng=np.random.default_rng(seed + ci))
        svms.append({"class": cls, "alpha": alpha, "y": y, "b": b})
    return ClassifierModel(
        kind=kind,
        classes=classes,
        svms=svms,
        params={"C": C, "gamma": gamma, "seed": seed, "support": X},
    )


def predict(model: ClassifierModel, vector: CodewordVector) -> str:
    return predict_matrix(model, np.asarray(vector.bins, dtype=np.float64)[None, :])[0]


def predict_matrix(model: ClassifierModel, X: np.ndarray) -> list[str]:
    if model.kind == "nearest_class_mean":
        d2 = cdist(X, model.means, "sqeuclidean")
        return [model.classes[i] for i in d2.argmin(axis=1)]
    K = _rbf_kernel(np.asarray(model.params["support"]), X, model.params["gamma"])
    scores = np.array([(svm["alpha"] * svm["y"]) @ K + svm["b"] for svm in model.svms])
    return [model.classes[i] for i in scores.argmax(axis=0)]


def evaluate(model: ClassifierModel, test: LabeledCodewordSet) -> ConfusionMatrix:
    """counts[i][j] = test vectors of class i predicted as class j."""
    unseen = set(test.labels) - set(model.classes)
    if unseen:
        raise ValidationError(f"test labels not known to the model: {sorted(unseen)}")
    index = {cls: i for i, cls in enumerate(model.classes)}
    counts = np.zeros((len(model.classes), len(model.classes)), dtype=np.int64)
    predictions = predict_matrix(model, test.matrix())
    for truth, pred in zip(test.labels, predictions):
        counts[index[truth], index[pred]] += 1
    return ConfusionMatrix(classes=list(model.classes), counts=counts)


def similarity(a: CodewordVector, b: CodewordVector, measure: str = "cosine") -> float:
    """Similarity in [0, 1] between two L1-normalized codeword vectors."""
    if measure not in SIMILARITY_MEASURES:
        raise ValidationError(f"unknown measure {measure!r}")
    if len(a.bins) != len(b.bins):
        raise ValidationError(f"k mismatch: {len(a.bins)} vs {len(b.bins)}")
    if a.support == 0 or b.support == 0:
        raise ValidationError("similarity is undefined for zero-support vectors")
    x = np.asarray(a.bins, dtype=np.float64)
    y = np.asarray(b.bins, dtype=np.float64)
    for name, v in (("a", x), ("b", y)):
        if abs(v.sum() - 1.0) > 1e-6:
            raise ValidationError(f"vector {name} is not L1-normalized (sum {v.sum()})")
    if measure == "histogram_intersection":
        return float(np.minimum(x, y).sum())
    return float(np.clip((x @ y) / (np.linalg.norm(x) * np.linalg.norm(y)), 0.0, 1.0))


def build_similarity_graph(
    city_vectors: dict[str, CodewordVector],
    threshold: float,
    measure: str = "cosine",
) -> SimilarityGraph:
    """Score all unordered city pairs; keep edges with weight >= threshold."""
    if len(city_vectors) < 2:
        raise ValidationError(f"need >= 2 cities, got {len(city_vectors)}")
    nodes = sorted(city_vectors)
    edges = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            w = similarity(city_vectors[a], city_vectors[b], measure)
            if w >= threshold:
                edges.append((a, b, w))
    return SimilarityGraph(nodes=nodes, edges=edges, threshold=threshold, measure=measure)


def mean_codeword_vector(vectors: list[CodewordVector], city: str = "") -> CodewordVector:
    """Mean of same-k codeword vectors, skipping zero-support entries.

    The mean of L1-normalized histograms is itself L1-normalized.
    """
    live = [v for v in vectors if v.support > 0]
    if not live:
        raise ValidationError(f"no non-empty codeword vectors for {city or 'city'}")
    ks = {len(v.bins) for v in live}
    if len(ks) != 1:
        raise ValidationError(f"mixed k: {sorted(ks)}")
    bins = np.mean([v.bins for v in live], axis=0)
    return CodewordVector(
        bins=bins,
        support=sum(v.support for v in live),
        city=city or live[0].city,
        period="mean",
    )


def confusion_to_csv(path, cm: ConfusionMatrix) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\predicted"] + cm.classes)
        for cls, row in zip(cm.classes, cm.counts):
            writer.writerow([cls] + [int(x) for x in row])


def confusion_to_dict(cm: ConfusionMatrix) -> dict:
    return {
        "classes": cm.classes,
        "counts": [[int(x) for x in row] for row in cm.counts],
        "total": cm.total,
        "accuracy": cm.accuracy,
    }


def graph_to_dot(graph: SimilarityGraph, name: str = "city_similarity") -> str:
    """Graphviz DOT text; edge penwidth scales with the similarity weight."""
    lines = [f'graph "{name}" {{']
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for a, b, w in graph.edges:
        lines.append(f'  "{a}" -- "{b}" [weight="{w:.6f}", penwidth="{6.0 * w:.3f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(graph: SimilarityGraph) -> dict:
    return {
        "measure": graph.measure,
        "threshold": graph.threshold,
        "nodes": graph.nodes,
        "edges": [{"a": a, "b": b, "weight": w} for a, b, w in graph.edges],
    }
