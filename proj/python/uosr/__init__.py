"""Post-hoc uncertainty scoring and open-set evaluation.

Turns exported classifier features/logits/labels into InC/InW/OoD outcomes,
computes uncertainty scores (softmax-family, KNN, few-shot KNN and the
sigmoid-gated fusion), and evaluates them under the UOSR/OSR/SP ground truths
with AUROC, AUPR, AURC and ECE.
"""

from ._core import (
    Beta,
    ClusterSpec,
    EvaluationBundle,
    Gaussian,
    GroupSpec,
    OutcomeVector,
    Point,
    UosrError,
    additive_fuse,
    aupr,
    auroc,
    aurc,
    calibration_scenarios,
    classify_outcomes,
    closed_set_accuracy,
    draw_reference_partition,
    ece,
    energy_score,
    entropy_score,
    evaluate,
    fsknn_score,
    fsknns_fuse,
    gen_bundle,
    gen_scores,
    gini_score,
    ground_truth,
    knn_score,
    load_labels,
    load_matrix,
    maxlogit_score,
    msp_score,
    multiplicative_fuse,
    predictions_from_logits,
    ref_stats,
    risk_coverage_curve,
    run_fewshot,
    select_lambda,
    softmax,
    sweep,
    topk_similarity,
    write_labels,
    write_matrix,
)

__all__ = [
    "Beta",
    "ClusterSpec",
    "EvaluationBundle",
    "Gaussian",
    "GroupSpec",
    "OutcomeVector",
    "Point",
    "UosrError",
    "additive_fuse",
    "aupr",
    "auroc",
    "aurc",
    "calibration_scenarios",
    "classify_outcomes",
    "closed_set_accuracy",
    "draw_reference_partition",
    "ece",
    "energy_score",
    "entropy_score",
    "evaluate",
    "fsknn_score",
    "fsknns_fuse",
    "gen_bundle",
    "gen_scores",
    "gini_score",
    "ground_truth",
    "knn_score",
    "load_labels",
    "load_matrix",
    "maxlogit_score",
    "msp_score",
    "multiplicative_fuse",
    "predictions_from_logits",
    "ref_stats",
    "risk_coverage_curve",
    "run_fewshot",
    "select_lambda",
    "softmax",
    "sweep",
    "topk_similarity",
    "write_labels",
    "write_matrix",
]
