"""Subcommand front-end over the library.

Exit codes: 0 success, 2 validation error (bad input or flags), 3 stage
failure inside a pipeline run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import codebook as cb
from . import corpus, features, pipeline, spatial, synth, trend
from .errors import StageError, ValidationError


def _anchors(args):
    if getattr(args, "anchors", None):
        return corpus.load_city_anchors(args.anchors)
    return corpus.default_city_anchors()


def cmd_ingest(args) -> int:
    """Validate a raw manifest + vector file pair and write a clean workspace.

    Structurally malformed rows abort with their line numbers; rows with
    out-of-range coordinates or vector indexes are rejected and listed in
    the ingest report.  Duplicate ids are a hard error.
    """
    block = corpus.load_vector_block(args.vectors)
    accepted, rejected, bad_lines = [], [], []
    seen = {}
    with open(args.manifest, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = corpus.parse_manifest_line(line, lineno)
            except ValidationError as exc:
                bad_lines.append(str(exc))
                continue
            if rec.id in seen:
                raise ValidationError(
                    f"duplicate id {rec.id!r} on lines {seen[rec.id]} and {lineno}"
                )
            seen[rec.id] = lineno
            reason = None
            if not (-180.0 < rec.lon <= 180.0):
                reason = f"longitude {rec.lon} out of range"
            elif not (-90.0 <= rec.lat <= 90.0):
                reason = f"latitude {rec.lat} out of range"
            elif not (0 <= rec.vector_index < block.count):
                reason = f"vector index {rec.vector_index} outside block of {block.count}"
            if reason:
                rejected.append({"line": lineno, "id": rec.id, "reason": reason})
            else:
                accepted.append(rec)
    if bad_lines:
        raise ValidationError("malformed manifest rows:\n  " + "\n  ".join(bad_lines))

    os.makedirs(args.out, exist_ok=True)
    vectors_out = os.path.join(args.out, "vectors.tlvb")
    corpus.write_vector_block(vectors_out, block.data)
    manifest = corpus.Manifest(accepted, vector_file=vectors_out, dim=block.dim)
    corpus.save_manifest(manifest, os.path.join(args.out, "manifest.jsonl"))
    report = {
        "accepted": len(accepted),
        "rejected": rejected,
        "dim": block.dim,
        "source_manifest": str(args.manifest),
        "source_vectors": str(args.vectors),
    }
    with open(os.path.join(args.out, "ingest_report.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"ingested {len(accepted)} records ({len(rejected)} rejected) -> {args.out}")
    return 0


def cmd_filter(args) -> int:
    manifest, _ = corpus.load_corpus(args.manifest, args.vectors)
    anchors = _anchors(args)
    if args.city:
        anchors = [a for a in anchors if a.name == args.city]
        if not anchors:
            raise ValidationError(f"no anchor named {args.city!r}")
    kept = []
    counts = {}
    for anchor in anchors:
        m = corpus.filter_by_city(manifest, anchor, args.radius_km)
        counts[anchor.name] = len(m.records)
        kept.extend(m.records)
    out_manifest = corpus.Manifest(kept, manifest.vector_file, manifest.dim)
    corpus.save_manifest(out_manifest, args.out)
    for city in sorted(counts):
        print(f"{city}: {counts[city]}")
    print(f"kept {len(kept)}/{len(manifest.records)} records -> {args.out}")
    return 0


def cmd_pca(args) -> int:
    block = corpus.load_vector_block(args.vectors)
    model = features.fit_pca(np.asarray(block.data, dtype=np.float64), args.dim, seed=args.seed)
    features.save_pca(model, args.out)
    if args.project_out:
        corpus.write_vector_block(args.project_out, features.project(model, block.data))
        print(f"projected block -> {args.project_out}")
    print(f"pca {block.dim} -> {args.dim} dims, "
          f"explained variance {[round(float(v), 6) for v in model.explained_variance[:5]]}...")
    return 0


def cmd_codebook(args) -> int:
    block = corpus.load_vector_block(args.vectors)
    X = np.asarray(block.data, dtype=np.float64)
    seed_sample = pipeline.DEFAULT_SEEDS["sample"] if args.seed_sample is None else args.seed_sample
    seed_codebook = (
        pipeline.DEFAULT_SEEDS["codebook"] if args.seed_codebook is None else args.seed_codebook
    )
    if args.sample and len(X) > args.sample:
        rng = np.random.default_rng(seed_sample)
        X = X[rng.permutation(len(X))[: args.sample]]
    book = cb.fit_codebook(X, args.k, seed=seed_codebook,
                           max_iter=args.max_iter, tol=args.tol)
    cb.save_codebook(book, args.out)
    print(f"codebook k={args.k} fit on {book.fit_meta['n_train']} vectors, "
          f"{book.fit_meta['iterations']} iterations, inertia {book.fit_meta['inertia']:.4f}")
    return 0


def cmd_histogram(args) -> int:
    manifest, block = corpus.load_corpus(args.manifest, args.vectors)
    book = cb.load_codebook(args.codebook)
    by_city: dict[str, list[corpus.Record]] = {}
    for r in manifest.records:
        by_city.setdefault(r.city, []).append(r)
    vectors = []
    rejected = 0
    for city in sorted(by_city):
        m = corpus.Manifest(by_city[city], manifest.vector_file, manifest.dim)
        part = corpus.partition_by_period(m, "year", tuple(args.years))
        rejected += len(part.rejected.records)
        for period, bucket in part.buckets.items():
            vectors.append(cb.build_codeword_vector(book, bucket, block, city=city, period=period))
    if not vectors:
        raise ValidationError("no (city, period) buckets produced")
    cb.write_codeword_csv(args.out, vectors)
    print(f"wrote {len(vectors)} codeword vectors -> {args.out}"
          + (f" ({rejected} records outside year range)" if rejected else ""))
    return 0


def cmd_ftd(args) -> int:
    vectors = cb.read_codeword_csv(args.histograms)
    by_city: dict[str, list] = {}
    for v in vectors:
        if v.support > 0:
            by_city.setdefault(v.city, []).append(v)
    descriptors = []
    for city in sorted(by_city):
        series = sorted(by_city[city], key=lambda v: v.period)
        if len(series) >= 2:
            descriptors.extend(trend.trend_series(series, args.th))
    trend.write_trends_json(args.out + ".json", descriptors)
    trend.write_trends_csv(args.out + ".csv", descriptors)
    print(f"{len(descriptors)} trend descriptors at TH={args.th} -> {args.out}.json/.csv")
    return 0


def cmd_classify(args) -> int:
    manifest, block = corpus.load_corpus(args.manifest, args.vectors)
    book = cb.load_codebook(args.codebook)
    by_city: dict[str, list[corpus.Record]] = {}
    for r in manifest.records:
        by_city.setdefault(r.city, []).append(r)
    per_city = {
        c: corpus.Manifest(rs, manifest.vector_file, manifest.dim) for c, rs in by_city.items()
    }
    seed_split = pipeline.DEFAULT_SEEDS["split"] if args.seed_split is None else args.seed_split
    seed_clf = (
        pipeline.DEFAULT_SEEDS["classifier"]
        if args.seed_classifier is None
        else args.seed_classifier
    )
    train, test = spatial.make_labeled_sets(
        per_city, book, block,
        train_n=args.train_n, test_n=args.test_n,
        sample_size=args.sample_size, seed=seed_split,
    )
    params = {"C": args.svm_c, "gamma": args.svm_gamma, "seed": seed_clf}
    model = spatial.train_classifier(train, args.classifier, params)
    cm = spatial.evaluate(model, test)
    spatial.confusion_to_csv(args.out + ".csv", cm)
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        out = spatial.confusion_to_dict(cm)
        out["classifier"] = args.classifier
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{args.classifier} accuracy {cm.accuracy:.4f} "
          f"on {cm.total} test vectors -> {args.out}.csv/.json")
    return 0


def cmd_simgraph(args) -> int:
    vectors = cb.read_codeword_csv(args.histograms)
    by_city: dict[str, list] = {}
    for v in vectors:
        if v.support > 0:
            by_city.setdefault(v.city, []).append(v)
    city_means = {c: spatial.mean_codeword_vector(vs, city=c) for c, vs in by_city.items()}
    graph = spatial.build_similarity_graph(city_means, args.graph_threshold, args.measure)
    with open(args.out + ".dot", "w", encoding="utf-8") as fh:
        fh.write(spatial.graph_to_dot(graph))
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(spatial.graph_to_dict(graph), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{len(graph.edges)} edges at threshold {args.graph_threshold} -> {args.out}.dot/.json")
    return 0


def cmd_exemplars(args) -> int:
    manifest, block = corpus.load_corpus(args.manifest, args.vectors)
    book = cb.load_codebook(args.codebook)
    ex = trend.nearest_exemplars(book, args.bin, manifest, block, args.n)
    out = trend.exemplars_to_dict(ex)
    if args.display_sample and args.display_sample < len(ex.record_ids):
        rng = np.random.default_rng(args.seed_display)
        pick = sorted(rng.choice(len(ex.record_ids), size=args.display_sample, replace=False))
        out["display"] = [ex.record_ids[i] for i in pick]
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"bin {args.bin}: {len(ex.record_ids)} exemplars -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    if args.cities.isdigit():
        cities = [a.name for a in corpus.default_city_anchors()[: int(args.cities)]]
    else:
        cities = [c.strip() for c in args.cities.split(",")]
    lo, hi = (int(x) for x in args.years.split(":"))
    spec = synth.SynthSpec(
        cities=cities,
        years=list(range(lo, hi + 1)),
        per_bucket=args.per_bucket,
        clusters=args.clusters,
        dim=args.dim,
        noise=args.noise,
        shifts=[synth.parse_shift(s) for s in (args.shift or [])],
        strays=args.strays,
        seed=args.seed,
    )
    synth.generate(spec, args.out)
    print(f"synthetic corpus: {len(cities)} cities x years {lo}..{hi} "
          f"x {args.per_bucket}/bucket -> {args.out}")
    return 0


def cmd_pipeline(args) -> int:
    if args.config:
        config = pipeline.load_config(args.config)
    else:
        config = pipeline.RunConfig()
    for flag, attr in [
        ("manifest", "manifest"), ("vectors", "vectors"), ("out", "out"),
        ("k", "k"), ("th", "threshold"), ("radius_km", "radius_km"),
        ("measure", "measure"), ("classifier", "classifier"),
        ("graph_threshold", "graph_threshold"), ("train_n", "train_n"),
        ("test_n", "test_n"), ("sample_size", "sample_size"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, attr, value)
    for name in pipeline.DEFAULT_SEEDS:
        value = getattr(args, f"seed_{name}", None)
        if value is not None:
            config.seeds[name] = value
    if not config.manifest or not config.vectors:
        raise ValidationError("pipeline needs --config or --manifest/--vectors")
    report = pipeline.run_pipeline(config)
    for stage in report.stages:
        print(f"  {stage['name']:<12} {stage['seconds']:.3f}s")
    for warning in report.warnings:
        print(f"  warning: {warning}")
    print(f"pipeline done -> {config.out} ({len(report.outputs)} artifacts)")
    return 0


def _add_seed_flags(p, names=("sample", "codebook", "split", "classifier")):
    for name in names:
        p.add_argument(f"--seed-{name}", type=int, default=None, dest=f"seed_{name}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stylescape",
        description="Geo-temporal style trend mining over descriptor corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a raw corpus into a workspace")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("filter", help="geo-filter records around city anchors")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--anchors", default=None)
    p.add_argument("--city", default=None)
    p.add_argument("--radius-km", type=float, default=100.0, dest="radius_km")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_filter)

    p = sub.add_parser("pca", help="fit a PCA model on a vector block")
    p.add_argument("--vectors", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--project-out", default=None, dest="project_out")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_pca)

    p = sub.add_parser("codebook", help="fit a k-means codebook")
    p.add_argument("--vectors", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--sample", type=int, default=1_600_000)
    p.add_argument("--max-iter", type=int, default=100, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_seed_flags(p, ("sample", "codebook"))
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_codebook)

    p = sub.add_parser("histogram", help="codeword histograms per (city, year)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--codebook", required=True, help="codebook path prefix")
    p.add_argument("--years", type=int, nargs=2, default=[2000, 2015])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_histogram)

    p = sub.add_parser("ftd", help="trend descriptors from consecutive histograms")
    p.add_argument("--histograms", required=True)
    p.add_argument("--th", type=float, default=trend.DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_ftd)

    p = sub.add_parser("classify", help="city classification over codeword vectors")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--train-n", type=int, default=500, dest="train_n")
    p.add_argument("--test-n", type=int, default=100, dest="test_n")
    p.add_argument("--sample-size", type=int, default=10_000, dest="sample_size")
    p.add_argument("--classifier", choices=spatial.CLASSIFIER_KINDS,
                   default="nearest_class_mean")
    p.add_argument("--svm-c", type=float, default=0.01, dest="svm_c")
    p.add_argument("--svm-gamma", type=float, default=None, dest="svm_gamma")
    _add_seed_flags(p, ("split", "classifier"))
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("simgraph", help="thresholded city-similarity graph")
    p.add_argument("--histograms", required=True)
    p.add_argument("--graph-threshold", type=float, default=0.2, dest="graph_threshold")
    p.add_argument("--measure", choices=spatial.SIMILARITY_MEASURES, default="cosine")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_simgraph)

    p = sub.add_parser("exemplars", help="records nearest to one codeword centroid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--bin", type=int, required=True)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--display-sample", type=int, default=None, dest="display_sample")
    p.add_argument("--seed-display", type=int, default=0, dest="seed_display")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_exemplars)

    p = sub.add_parser("synth", help="synthetic corpus with planted ground truth")
    p.add_argument("--cities", default="4", help="count into the anchor table, or names")
    p.add_argument("--years", default="2013:2014", help="LO:HI inclusive")
    p.add_argument("--per-bucket", type=int, default=5000, dest="per_bucket")
    p.add_argument("--clusters", type=int, default=24)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--shift", action="append",
                   help="CITY:year_from:year_to:src:dst:mass, repeatable")
    p.add_argument("--strays", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("--config", default=None)
    p.add_argument("--manifest", default=None)
    p.add_argument("--vectors", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--th", type=float, default=None)
    p.add_argument("--radius-km", type=float, default=None, dest="radius_km")
    p.add_argument("--measure", choices=spatial.SIMILARITY_MEASURES, default=None)
    p.add_argument("--classifier", choices=spatial.CLASSIFIER_KINDS, default=None)
    p.add_argument("--graph-threshold", type=float, default=None, dest="graph_threshold")
    p.add_argument("--train-n", type=int, default=None, dest="train_n")
    p.add_argument("--test-n", type=int, default=None, dest="test_n")
    p.add_argument("--sample-size", type=int, default=None, dest="sample_size")
    _add_seed_flags(p)
    p.set_defaults(fn=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
