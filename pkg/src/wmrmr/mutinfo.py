"""Plug-in entropy and mutual information over discrete codes, in bits.

Estimates use empirical cell frequencies directly; zero-probability cells
contribute nothing.  Per-cell terms are summed in sorted order, which makes
the result invariant to argument order and to any relabeling of the codes,
so I(a, b) == I(b, a) holds bitwise and not merely within rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import DiscretizedDataset, _frozen_array


def _dense_codes(column) -> np.ndarray:
    arr = np.asarray(column)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D column, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty column")
    _, inverse = np.unique(arr, return_inverse=True)
    return inverse.astype(np.int64)


def _canonical_sum(terms: np.ndarray) -> float:
    # sorting fixes one accumulation order for any labeling of the cells
    return float(np.sum(np.sort(terms)))


def entropy(column) -> float:
    """Shannon entropy of one discrete column, in bits."""
    codes = _dense_codes(column)
    p = np.bincount(codes) / codes.size
    p = p[p > 0]
    return _canonical_sum(-p * np.log2(p))


def mutual_information(a, b) -> float:
    """Mutual information between two equal-length discrete columns, in bits.

    Computed from the joint cell table as sum over occupied cells of
    p(x, y) * log2(p(x, y) / (p(x) p(y))).  Individual terms may be
    negative; callers clamp at report boundaries, never here.
    """
    ca = _dense_codes(a)
    cb = _dense_codes(b)
    if ca.size != cb.size:
        raise ValueError(f"length mismatch: {ca.size} vs {cb.size}")
    na = int(ca.max()) + 1
    nb = int(cb.max()) + 1
    joint = np.bincount(ca * nb + cb, minlength=na * nb).reshape(na, nb)
    n = ca.size
    pxy = joint / n
    # marginals from integer counts: exact, so relabeling or swapping the
    # arguments permutes cells without perturbing any term
    px = joint.sum(axis=1) / n
    py = joint.sum(axis=0) / n
    occupied = pxy > 0
    independent = np.outer(px, py)
    terms = pxy[occupied] * np.log2(pxy[occupied] / independent[occupied])
    return _canonical_sum(terms)


@dataclass(frozen=True)
class BinConfig:
    """Discretization actually used for an MI matrix."""

    requested_bins: int
    effective_bins: tuple


@dataclass(frozen=True)
class MIMatrix:
    """All pairwise feature MI values plus each feature's MI with the label.

    ``pairwise[i, j]`` is I(x_i; x_j) in bits including the diagonal
    self-information, and ``class_relevance[i]`` is I(x_i; c).  Computed
    once per run and shared by every criterion evaluation.
    """

    pairwise: np.ndarray
    class_relevance: np.ndarray
    bin_config: BinConfig
    feature_names: tuple = field(default=())

    def __post_init__(self):
        pairwise = _frozen_array(self.pairwise, np.float64)
        relevance = _frozen_array(self.class_relevance, np.float64)
        if pairwise.ndim != 2 or pairwise.shape[0] != pairwise.shape[1]:
            raise ValueError(f"pairwise must be square, got shape {pairwise.shape}")
        if relevance.shape != (pairwise.shape[0],):
            raise ValueError("class_relevance length does not match pairwise")
        if not (pairwise == pairwise.T).all():
            raise ValueError("pairwise matrix is not exactly symmetric")
        names = tuple(self.feature_names)
        if names and len(names) != pairwise.shape[0]:
            raise ValueError("feature_names length does not match pairwise")
        object.__setattr__(self, "pairwise", pairwise)
        object.__setattr__(self, "class_relevance", relevance)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_features(self) -> int:
        return self.pairwise.shape[0]


def class_relevance_vector(discretized: DiscretizedDataset, labels) -> np.ndarray:
    """MI of each discretized feature with the class labels, in bits."""
    labels = np.asarray(labels)
    if labels.shape != (discretized.n_samples,):
        raise ValueError(
            f"labels shape {labels.shape} does not match {discretized.n_samples} samples"
        )
    return np.array([
        mutual_information(discretized.bins[:, f], labels)
        for f in range(discretized.n_features)
    ])


def pairwise_mi_matrix(discretized: DiscretizedDataset, labels,
                       feature_names=()) -> MIMatrix:
    """Compute the full MI matrix for one discretized dataset.

    Each unordered pair is computed once and mirrored, so symmetry holds by
    construction on top of the canonical accumulation order.
    """
    n = discretized.n_features
    pairwise = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            value = mutual_information(discretized.bins[:, i], discretized.bins[:, j])
            pairwise[i, j] = value
            pairwise[j, i] = value
    return MIMatrix(
        pairwise=pairwise,
        class_relevance=class_relevance_vector(discretized, labels),
        bin_config=BinConfig(
            requested_bins=discretized.requested_bins,
            effective_bins=discretized.bin_count_per_feature,
        ),
        feature_names=tuple(feature_names),
    )


def mi_matrix_to_dict(mi: MIMatrix) -> dict:
    """JSON-ready view of an MI matrix; values are clamped at 0 here only."""
    clamped = np.maximum(mi.pairwise, 0.0)
    relevance = np.maximum(mi.class_relevance, 0.0)
    return {
        "feature_names": list(mi.feature_names),
        "pairwise_bits": [[float(v) for v in row] for row in clamped],
        "class_relevance_bits": [float(v) for v in relevance],
        "bin_config": {
            "requested_bins": mi.bin_config.requested_bins,
            "effective_bins": list(mi.bin_config.effective_bins),
        },
    }
