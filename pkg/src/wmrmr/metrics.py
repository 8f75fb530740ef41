"""Binary classification metrics and the composite quality index.

The composite index averages test accuracy, Cohen's kappa and ROC-AUC into
one number so configurations with different error profiles compare on a
single scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata


def _paired(a, b):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty inputs")
    return a, b


def accuracy(predictions, labels) -> float:
    """Fraction of predictions equal to the labels."""
    predictions, labels = _paired(predictions, labels)
    return float(np.mean(predictions == labels))


def kappa(predictions, labels) -> float:
    """Cohen's kappa: agreement corrected for chance.

    Defined as (p_o - p_e) / (1 - p_e) with observed agreement p_o and
    the marginal chance agreement p_e; p_e = 1 maps to 0 by convention.
    """
    predictions, labels = _paired(predictions, labels)
    classes = np.unique(np.concatenate([predictions, labels]))
    if classes.size > 2:
        raise ValueError(f"binary inputs required, saw values {classes.tolist()}")
    n = labels.size
    p_observed = float(np.mean(predictions == labels))
    p_expected = float(sum(
        np.sum(predictions == c) * np.sum(labels == c) for c in classes
    ) / (n * n))
    if p_expected == 1.0:
        return 0.0
    return (p_observed - p_expected) / (1.0 - p_expected)


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve from continuous scores.

    Rank-based (ties get their midrank), equivalent to the normalized
    Mann-Whitney U statistic.  The larger label value is the positive
    class; both classes must be present.
    """
    scores, labels = _paired(scores, labels)
    if not np.isfinite(scores).all():
        raise ValueError("scores contain NaN or infinite entries")
    classes = np.unique(labels)
    if classes.size != 2:
        raise ValueError(f"need exactly two classes, saw values {classes.tolist()}")
    positive = labels == classes[-1]
    n_pos = int(positive.sum())
    n_neg = labels.size - n_pos
    ranks = rankdata(scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def composite_index(a_test: float, kappa_value: float, auc: float) -> float:
    """Mean of test accuracy, kappa and ROC-AUC."""
    return (a_test + kappa_value + auc) / 3.0


@dataclass(frozen=True)
class MetricsBundle:
    """Test-set metrics of one final model; ``eta`` is derived on build."""

    a_test: float
    kappa: float
    auc: float
    eta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a_test", float(self.a_test))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "auc", float(self.auc))
        object.__setattr__(
            self, "eta", composite_index(self.a_test, self.kappa, self.auc)
        )

    def to_dict(self) -> dict:
        # 4-decimal rendering keeps reports stable across platforms
        return {
            "a_test": round(self.a_test, 4),
            "kappa": round(self.kappa, 4),
            "auc": round(self.auc, 4),
            "eta": round(self.eta, 4),
        }


def bundle_from_predictions(predictions, scores, labels) -> MetricsBundle:
    """Build a bundle from hard predictions plus the decision scores behind them."""
    return MetricsBundle(
        a_test=accuracy(predictions, labels),
        kappa=kappa(predictions, labels),
        auc=roc_auc(scores, labels),
    )
