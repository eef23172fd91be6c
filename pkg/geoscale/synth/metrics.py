"""Clustering quality: normalized mutual information and pair-counting F."""

import warnings
from contextlib import contextmanager

import numpy as np
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from ..detect.graph import Partition
from .generator import GroundTruth

__all__ = ["nmi", "pair_counts", "precision_recall", "f_beta", "f_measure"]


@contextmanager
def _quiet_label_checks():
    # sklearn warns about label arrays that look like regression targets,
    # which singleton noise clusters always do
    with warnings.catch_warnings():
        warnings.filterwarnings(
            "ignore", message="The number of unique classes", category=UserWarning,
        )
        yield


def _labels(pred, truth, records=None):
    if isinstance(pred, Partition):
        pred = pred.labels
    if isinstance(truth, GroundTruth):
        if records is None:
            truth = np.array(list(truth.labels.values()))
        else:
            truth = truth.labels_for(records)
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"invalid labels: {pred.shape} != {truth.shape}")
    if pred.size == 0:
        raise ValueError("invalid labels: empty corpus")
    return pred, truth


def nmi(pred, truth, records=None) -> float:
    """Mutual information normalized by the arithmetic mean of entropies.

    A GroundTruth is aligned to ``records`` when given, else taken in its
    insertion order.
    """
    pred, truth = _labels(pred, truth, records)
    with _quiet_label_checks():
        score = normalized_mutual_info_score(truth, pred, average_method="arithmetic")
    return float(score)


def _n_pairs(counts):
    counts = np.asarray(counts, dtype=np.int64)
    return int(np.sum(counts * (counts - 1) // 2))


def pair_counts(pred, truth, records=None):
    """(tp, fp, fn) over unordered record pairs.

    A pair is positive when both records share a predicted cluster; it is
    true when they also share a true cluster.
    """
    pred, truth = _labels(pred, truth, records)
    with _quiet_label_checks():
        C = contingency_matrix(truth, pred, sparse=True)
    tp = _n_pairs(C.data)
    pred_pairs = _n_pairs(np.asarray(C.sum(axis=0)).ravel())
    true_pairs = _n_pairs(np.asarray(C.sum(axis=1)).ravel())
    return tp, pred_pairs - tp, true_pairs - tp


def precision_recall(pred, truth, records=None):
    tp, fp, fn = pair_counts(pred, truth, records)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall


def f_measure(precision, recall, beta=2.0) -> float:
    """F_beta of a precision and recall; 0 when both are 0."""
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (1 + b2) * precision * recall / denom


def f_beta(pred, truth, beta=2.0, records=None) -> float:
    """Pair-counting F_beta; beta > 1 weighs recall more.

    No true positive pairs gives 0.
    """
    if not beta > 0:
        raise ValueError(f"invalid 'beta': {beta!r}")
    tp, _, _ = pair_counts(pred, truth, records)
    if tp == 0:
        return 0.0
    return f_measure(*precision_recall(pred, truth, records), beta=beta)
