"""Geo-temporal style trend mining over descriptor corpora.

The pipeline: geo-filter records around city anchors, optionally compress
descriptor segments with PCA, quantize against a k-means codebook, build
L1-normalized codeword histograms per (city, period), subtract consecutive
periods into thresholded trend descriptors, and compare cities by codeword
similarity (classification and a thresholded similarity graph).
"""

from .codebook import (
    Codebook,
    CodewordVector,
    assign,
    assign_block,
    build_codeword_vector,
    fit_codebook,
    load_codebook,
    read_codeword_csv,
    save_codebook,
    write_codeword_csv,
)
from .corpus import (
    CityAnchor,
    Manifest,
    Record,
    VectorBlock,
    default_city_anchors,
    filter_by_city,
    haversine_km,
    load_city_anchors,
    load_corpus,
    load_manifest,
    load_vector_block,
    partition_by_period,
    sample_records,
    save_manifest,
    write_vector_block,
)
from .errors import StageError, ValidationError
from .features import (
    FusedVector,
    PcaModel,
    concat,
    fit_pca,
    load_pca,
    project,
    reconstruct,
    save_pca,
    sq_distance,
)
from .pipeline import RunConfig, RunReport, load_config, run_pipeline, save_config
from .spatial import (
    ClassifierModel,
    ConfusionMatrix,
    LabeledCodewordSet,
    SimilarityGraph,
    build_similarity_graph,
    evaluate,
    graph_to_dot,
    make_labeled_sets,
    mean_codeword_vector,
    predict,
    similarity,
    train_classifier,
)
from .synth import PlantedShift, SynthSpec, generate
from .trend import (
    ExemplarSet,
    TrendDescriptor,
    compute_ftd,
    nearest_exemplars,
    top_trends,
    trend_series,
)

__version__ = "0.1.0"
