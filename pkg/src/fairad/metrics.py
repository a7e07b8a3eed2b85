"""Reconstruction-error scoring and evaluation metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ShapeError, UndefinedMetricError
from .nn import Autoencoder, reconstruct

METRICS_SCHEMA_VERSION = 1


def anomaly_scores(model: Autoencoder, features) -> np.ndarray:
    """Squared Euclidean reconstruction error per row."""
    x = np.asarray(getattr(features, "features", features), dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ShapeError(f"features have shape {x.shape}, model expects {model.input_dim} columns")
    diff = x - reconstruct(model, x)
    return np.einsum("ij,ij->i", diff, diff)


@dataclass
class RankingResult:
    scores: np.ndarray
    order: np.ndarray
    top_k_flags: np.ndarray
    k: int


def rank_scores(scores, k: int) -> RankingResult:
    """Descending ranking with ties broken by ascending original index."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 0 <= k <= scores.size:
        raise ValueError(f"k={k} outside [0, {scores.size}]")
    # stable sort on -scores keeps earlier indices first among ties
    order = np.argsort(-scores, kind="stable")
    flags = np.zeros(scores.size, dtype=bool)
    flags[order[:k]] = True
    return RankingResult(scores, order, flags, int(k))


def _binary(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0/1")
    return labels.astype(bool)


def recall_at_k(scores, labels, k: int) -> float:
    """Fraction of all true anomalies found among the k highest scores."""
    labels = _binary(labels)
    if labels.shape != np.shape(scores):
        raise ShapeError("scores and labels differ in length")
    total = int(labels.sum())
    if total == 0:
        raise UndefinedMetricError("recall@k is undefined without positive labels")
    flags = rank_scores(scores, k).top_k_flags
    return float(np.sum(flags & labels)) / total


def rocauc(scores, labels) -> float:
    """Area under the ROC curve via the Mann-Whitney rank-sum (ties count 1/2)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = _binary(labels)
    if labels.shape != scores.shape:
        raise ShapeError("scores and labels differ in length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROCAUC needs both positive and negative labels")
    ranks = rankdata(scores)  # average ranks for ties
    u_stat = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


@dataclass
class MetricsReport:
    k: int
    recall_at_k: float
    rocauc: float
    rec_diff: float
    acc_diff: float
    recall_p: float
    recall_u: float
    accuracy_p: float
    accuracy_u: float
    identified_p: int
    identified_u: int
    true_identified_p: int
    true_identified_u: int
    anomalies_p: int
    anomalies_u: int

    def to_dict(self) -> dict:
        d = {"schema_version": METRICS_SCHEMA_VERSION}
        d.update(asdict(self))
        return d


def group_metrics(scores, labels, protected, k: int) -> MetricsReport:
    """Global top-k metrics plus per-group recall and accuracy gaps.

    The top-k set is chosen over all rows; each group's recall is the share
    of that group's anomalies that landed in it. Accuracy treats the top-k
    flags as predicted anomalies.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = _binary(labels)
    protected = np.asarray(protected, dtype=bool)
    if not (scores.shape == labels.shape == protected.shape):
        raise ShapeError("scores, labels and group tags differ in length")
    for name, mask in (("protected", protected), ("unprotected", ~protected)):
        if not np.any(labels & mask):
            raise UndefinedMetricError(f"{name} group has no anomalies; per-group recall is undefined")

    flags = rank_scores(scores, k).top_k_flags
    hits = flags & labels
    per = {}
    for key, mask in (("p", protected), ("u", ~protected)):
        n_anom = int(np.sum(labels & mask))
        per[key] = dict(
            recall=float(np.sum(hits & mask)) / n_anom,
            accuracy=float(np.mean(flags[mask] == labels[mask])),
            identified=int(np.sum(flags & mask)),
            true_identified=int(np.sum(hits & mask)),
            anomalies=n_anom,
        )
    return MetricsReport(
        k=int(k),
        recall_at_k=float(hits.sum()) / int(labels.sum()),
        rocauc=rocauc(scores, labels),
        rec_diff=abs(per["p"]["recall"] - per["u"]["recall"]),
        acc_diff=abs(per["p"]["accuracy"] - per["u"]["accuracy"]),
        recall_p=per["p"]["recall"],
        recall_u=per["u"]["recall"],
        accuracy_p=per["p"]["accuracy"],
        accuracy_u=per["u"]["accuracy"],
        identified_p=per["p"]["identified"],
        identified_u=per["u"]["identified"],
        true_identified_p=per["p"]["true_identified"],
        true_identified_u=per["u"]["true_identified"],
        anomalies_p=per["p"]["anomalies"],
        anomalies_u=per["u"]["anomalies"],
    )
