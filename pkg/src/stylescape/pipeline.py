"""End-to-end run orchestration: config, staged execution, reproducible report.

A run is fully determined by its RunConfig: every random choice flows from a
named seed (sampling, codebook init, pool splits, classifier shuffling), so
re-running with the same config and inputs reproduces every numeric artifact
byte for byte.  The report lists each output file with its content hash to
make that checkable.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import codebook as cb
from . import corpus, features, spatial, trend
from .errors import StageError, ValidationError

DEFAULT_SEEDS = {"sample": 1, "codebook": 2, "split": 3, "classifier": 4}


@dataclass
class RunConfig:
    manifest: str = ""
    vectors: str = ""
    out: str = "run"
    codebook: str | None = None          # reuse a fitted codebook instead of training
    anchors: str | None = None           # anchor table override (JSON)
    radius_km: float = 100.0
    years: tuple[int, int] = (2000, 2015)
    k: int = 1000
    threshold: float = 0.01
    codebook_sample: int = 1_600_000
    segments: list[dict] | None = None   # [{"name","dim","pca_dim"}, ...] or None
    classifier: str = "nearest_class_mean"
    svm_c: float = 0.01
    svm_gamma: float | None = None
    measure: str = "cosine"
    graph_threshold: float = 0.2
    train_n: int = 500
    test_n: int = 100
    sample_size: int = 10_000
    seeds: dict = field(default_factory=lambda: dict(DEFAULT_SEEDS))

    def validate(self) -> None:
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.threshold < 0:
            raise ValidationError(f"threshold must be >= 0, got {self.threshold}")
        if self.radius_km < 0:
            raise ValidationError(f"radius_km must be >= 0, got {self.radius_km}")
        if self.graph_threshold < 0 or self.graph_threshold > 1:
            raise ValidationError(f"graph_threshold outside [0, 1]: {self.graph_threshold}")
        if self.classifier not in spatial.CLASSIFIER_KINDS:
            raise ValidationError(f"unknown classifier {self.classifier!r}")
        if self.measure not in spatial.SIMILARITY_MEASURES:
            raise ValidationError(f"unknown measure {self.measure!r}")
        if self.years[0] > self.years[1]:
            raise ValidationError(f"bad year range {self.years}")
        missing = set(DEFAULT_SEEDS) - set(self.seeds)
        if missing:
            raise ValidationError(f"missing seeds: {sorted(missing)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["years"] = list(self.years)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**{k: v for k, v in d.items() if k in known})
        cfg.years = tuple(cfg.years)
        seeds = dict(DEFAULT_SEEDS)
        seeds.update(cfg.seeds or {})
        cfg.seeds = seeds
        return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return RunConfig.from_dict(json.load(fh))


def save_config(config: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunReport:
    config: dict
    stages: list[dict] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    outputs: list[dict] = field(default_factory=list)

    def add_output(self, path) -> None:
        self.outputs.append({"path": os.path.basename(str(path)), "sha256": sha256_file(path)})

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "stages": self.stages,
            "counts": self.counts,
            "warnings": self.warnings,
            "outputs": sorted(self.outputs, key=lambda o: o["path"]),
        }


class _Stages:
    def __init__(self, report: RunReport):
        self.report = report

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(name, exc) from exc
        self.report.stages.append({"name": name, "seconds": round(time.perf_counter() - t0, 4)})
        return result


def _fuse_segments(block, segments, out_dir, report):
    """Optionally compress named segments with PCA, rescale, re-concatenate.

    Segment spec: {"name", "dim", "pca_dim": int | null, "scale": float},
    scale defaulting to 1.0 (plain concatenation).
    """
    layout = []
    offset = 0
    for seg in segments:
        layout.append((str(seg["name"]), offset, offset + int(seg["dim"])))
        offset += int(seg["dim"])
    if offset != block.dim:
        raise ValidationError(f"segment dims sum to {offset}, block dim is {block.dim}")
    parts = []
    for (name, start, stop), seg in zip(layout, segments):
        data = np.asarray(block.data[:, start:stop], dtype=np.float64)
        pca_dim = seg.get("pca_dim")
        if pca_dim:
            model = features.fit_pca(data, int(pca_dim))
            features.save_pca(model, os.path.join(out_dir, f"pca_{name}"))
            report.add_output(os.path.join(out_dir, f"pca_{name}.json"))
            report.add_output(os.path.join(out_dir, f"pca_{name}.tlvb"))
            data = features.project(model, data)
        scale = float(seg.get("scale", 1.0))
        parts.append(data * scale if scale != 1.0 else data)
    fused = np.concatenate(parts, axis=1)
    path = os.path.join(out_dir, "fused.tlvb")
    fused_block = corpus.write_vector_block(path, fused)
    report.add_output(path)
    return fused_block


def run_pipeline(config: RunConfig) -> RunReport:
    """filter -> (optional PCA/fusion) -> codebook -> histograms -> trends
    -> classifier eval -> similarity graph, with all artifacts written."""
    config.validate()
    report = RunReport(config=config.to_dict())
    stages = _Stages(report)
    out_dir = str(config.out)
    os.makedirs(out_dir, exist_ok=True)

    manifest, block = stages.run("load", corpus.load_corpus, config.manifest, config.vectors)
    anchors = (
        corpus.load_city_anchors(config.anchors)
        if config.anchors
        else corpus.default_city_anchors()
    )

    def do_filter():
        per_city = {}
        assigned = 0
        for anchor in anchors:
            m = corpus.filter_by_city(manifest, anchor, config.radius_km)
            if m.records:
                per_city[anchor.name] = m
                assigned += len(m.records)
        if not per_city:
            raise ValidationError("no records within radius of any anchor")
        report.counts["cities"] = {c: len(m.records) for c, m in sorted(per_city.items())}
        dropped = len(manifest.records) - assigned
        report.counts["outside_all_anchors"] = dropped
        if dropped:
            report.warnings.append(f"{dropped} records outside every anchor radius")
        merged = corpus.Manifest(
            [r for c in sorted(per_city) for r in per_city[c].records],
            manifest.vector_file,
            manifest.dim,
        )
        corpus.save_manifest(merged, os.path.join(out_dir, "filtered.jsonl"))
        report.add_output(os.path.join(out_dir, "filtered.jsonl"))
        return per_city

    per_city = stages.run("filter", do_filter)

    def do_partition():
        per_city_periods = {}
        rejected_total = 0
        period_counts = {}
        for city in sorted(per_city):
            part = corpus.partition_by_period(per_city[city], "year", config.years)
            per_city_periods[city] = part.buckets
            rejected_total += len(part.rejected.records)
            period_counts[city] = {p: len(m.records) for p, m in part.buckets.items()}
        report.counts["periods"] = period_counts
        report.counts["rejected_period"] = rejected_total
        if rejected_total:
            report.warnings.append(f"{rejected_total} records outside year range {config.years}")
        return per_city_periods

    per_city_periods = stages.run("partition", do_partition)

    if config.segments:
        work_block = stages.run(
            "fuse", _fuse_segments, block, config.segments, out_dir, report
        )
    else:
        work_block = block

    def do_codebook():
        if config.codebook:
            book = cb.load_codebook(config.codebook)
            if book.dim != work_block.dim:
                raise ValidationError(
                    f"codebook dim {book.dim} != vector dim {work_block.dim}"
                )
            return book
        used = [r.vector_index for c in sorted(per_city) for r in per_city[c].records]
        X = work_block.data[np.array(used)]
        if len(X) > config.codebook_sample:
            rng = np.random.default_rng(config.seeds["sample"])
            X = X[rng.permutation(len(X))[: config.codebook_sample]]
        book = cb.fit_codebook(X, config.k, seed=config.seeds["codebook"])
        cb.save_codebook(book, os.path.join(out_dir, "codebook"))
        report.add_output(os.path.join(out_dir, "codebook.json"))
        report.add_output(os.path.join(out_dir, "codebook.tlvb"))
        return book

    book = stages.run("codebook", do_codebook)

    def do_histograms():
        vectors = []
        for city in sorted(per_city_periods):
            for period in sorted(per_city_periods[city]):
                vectors.append(
                    cb.build_codeword_vector(
                        book, per_city_periods[city][period], work_block,
                        city=city, period=period,
                    )
                )
        empty = [f"{v.city}/{v.period}" for v in vectors if v.support == 0]
        if empty:
            report.warnings.append(f"empty buckets: {empty}")
        cb.write_codeword_csv(os.path.join(out_dir, "histograms.csv"), vectors)
        report.add_output(os.path.join(out_dir, "histograms.csv"))
        return vectors

    histograms = stages.run("histograms", do_histograms)

    def do_trends():
        descriptors = []
        for city in sorted(per_city_periods):
            series = [v for v in histograms if v.city == city and v.support > 0]
            if len(series) >= 2:
                descriptors.extend(trend.trend_series(series, config.threshold))
        trend.write_trends_json(os.path.join(out_dir, "trends.json"), descriptors)
        trend.write_trends_csv(os.path.join(out_dir, "trends.csv"), descriptors)
        report.add_output(os.path.join(out_dir, "trends.json"))
        report.add_output(os.path.join(out_dir, "trends.csv"))
        report.counts["trend_descriptors"] = len(descriptors)
        return descriptors

    stages.run("trends", do_trends)

    def do_classify():
        train, test = spatial.make_labeled_sets(
            per_city, book, work_block,
            train_n=config.train_n, test_n=config.test_n,
            sample_size=config.sample_size, seed=config.seeds["split"],
        )
        params = {"C": config.svm_c, "gamma": config.svm_gamma, "seed": config.seeds["classifier"]}
        model = spatial.train_classifier(train, config.classifier, params)
        cm = spatial.evaluate(model, test)
        spatial.confusion_to_csv(os.path.join(out_dir, "confusion.csv"), cm)
        with open(os.path.join(out_dir, "confusion.json"), "w", encoding="utf-8") as fh:
            out = spatial.confusion_to_dict(cm)
            out["classifier"] = config.classifier
            if config.classifier == "rbf_svm":
                out["params"] = {"C": config.svm_c, "gamma": config.svm_gamma or 1.0 / config.k}
            json.dump(out, fh, indent=2, sort_keys=True)
            fh.write("\n")
        report.add_output(os.path.join(out_dir, "confusion.csv"))
        report.add_output(os.path.join(out_dir, "confusion.json"))
        report.counts["accuracy"] = cm.accuracy
        return cm

    stages.run("classify", do_classify)

    def do_simgraph():
        city_means = {}
        for city in sorted(per_city_periods):
            vecs = [v for v in histograms if v.city == city and v.support > 0]
            if vecs:
                city_means[city] = spatial.mean_codeword_vector(vecs, city=city)
        graph = spatial.build_similarity_graph(city_means, config.graph_threshold, config.measure)
        with open(os.path.join(out_dir, "simgraph.dot"), "w", encoding="utf-8") as fh:
            fh.write(spatial.graph_to_dot(graph))
        with open(os.path.join(out_dir, "simgraph.json"), "w", encoding="utf-8") as fh:
            json.dump(spatial.graph_to_dict(graph), fh, indent=2, sort_keys=True)
            fh.write("\n")
        report.add_output(os.path.join(out_dir, "simgraph.dot"))
        report.add_output(os.path.join(out_dir, "simgraph.json"))
        report.counts["graph_edges"] = len(graph.edges)
        return graph

    stages.run("simgraph", do_simgraph)

    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
