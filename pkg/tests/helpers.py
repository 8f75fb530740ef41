"""Independent oracles and small data builders shared across test modules.

Oracles here deliberately use different arithmetic paths than the library
(collections.Counter and math.log2 instead of bincount and numpy) so an
agreement between the two is meaningful.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from wmrmr.dataset import Dataset
from wmrmr.mutinfo import pairwise_mi_matrix
from wmrmr.dataset import DiscretizedDataset


def entropy_oracle(column) -> float:
    counts = Counter(tuple(np.asarray(column).tolist()))
    n = sum(counts.values())
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def mi_entropy_oracle(a, b) -> float:
    """I(a; b) = H(a) + H(b) - H(a, b), all by Counter arithmetic."""
    pairs = list(zip(np.asarray(a).tolist(), np.asarray(b).tolist()))
    return entropy_oracle(a) + entropy_oracle(b) - entropy_oracle_joint(pairs)


def entropy_oracle_joint(pairs) -> float:
    counts = Counter(pairs)
    n = sum(counts.values())
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def greedy_oracle(pairwise, relevance, alpha):
    """Brute-force per-step argmax with the lowest-index tie rule.

    Accumulates each candidate's MI sum in selection order, mirroring the
    library's running-sum updates so score arithmetic is bit-identical.
    """
    pairwise = np.asarray(pairwise, dtype=np.float64)
    relevance = np.asarray(relevance, dtype=np.float64)
    n = relevance.size

    first = 0
    for j in range(1, n):
        if relevance[j] > relevance[first]:
            first = j
    order = [first]
    scores = [alpha * relevance[first]]
    sums = pairwise[:, first].copy()

    while len(order) < n:
        m = len(order) + 1
        best_j = -1
        best_v = None
        for j in range(n):
            if j in order:
                continue
            value = alpha * relevance[j] - (1.0 - alpha) * (sums[j] / (m - 1))
            if best_v is None or value > best_v:
                best_j = j
                best_v = value
        order.append(best_j)
        scores.append(best_v)
        sums += pairwise[:, best_j]
    return order, scores


def unweighted_greedy_oracle(pairwise, relevance):
    """Greedy ranking under the plain difference objective I(x;c) - mean MI."""
    pairwise = np.asarray(pairwise, dtype=np.float64)
    relevance = np.asarray(relevance, dtype=np.float64)
    n = relevance.size
    first = 0
    for j in range(1, n):
        if relevance[j] > relevance[first]:
            first = j
    order = [first]
    sums = pairwise[:, first].copy()
    while len(order) < n:
        m = len(order) + 1
        best_j = -1
        best_v = None
        for j in range(n):
            if j in order:
                continue
            value = relevance[j] - sums[j] / (m - 1)
            if best_v is None or value > best_v:
                best_j = j
                best_v = value
        order.append(best_j)
        sums += pairwise[:, best_j]
    return order


def kappa_oracle(predictions, labels) -> float:
    """Cohen's kappa straight from the 2x2 confusion counts."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    classes = sorted(set(predictions.tolist()) | set(labels.tolist()))
    n = labels.size
    p_observed = int(np.sum(predictions == labels)) / n
    chance = 0
    for c in classes:
        chance += int(np.sum(predictions == c)) * int(np.sum(labels == c))
    p_expected = chance / (n * n)
    if p_expected == 1.0:
        return 0.0
    return (p_observed - p_expected) / (1.0 - p_expected)


def auc_pairwise_oracle(scores, labels) -> float:
    """O(n^2) comparison count: wins + half-credit for score ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    classes = sorted(set(labels.tolist()))
    assert len(classes) == 2
    pos = scores[labels == classes[-1]]
    neg = scores[labels == classes[0]]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def random_discrete_column(rng, n, alphabet) -> np.ndarray:
    return rng.integers(0, alphabet, size=n)


def random_mi_matrix(rng, n_features, n_samples=60, max_alphabet=5):
    """An honest MIMatrix built from random discrete data."""
    bins = rng.integers(0, rng.integers(2, max_alphabet + 1),
                        size=(n_samples, n_features))
    counts = tuple(len(np.unique(bins[:, f])) for f in range(n_features))
    # recode each column densely so DiscretizedDataset's range check holds
    dense = np.empty_like(bins)
    for f in range(n_features):
        _, dense[:, f] = np.unique(bins[:, f], return_inverse=True)
    discretized = DiscretizedDataset(
        bins=dense,
        bin_count_per_feature=counts,
        source_edges=tuple(np.arange(c - 1, dtype=np.float64) + 0.5
                           for c in counts),
        requested_bins=max(max(counts), 2),
    )
    labels = rng.integers(0, 2, size=n_samples)
    return pairwise_mi_matrix(discretized, labels)


def two_blob_dataset(n_per_class=30, separation=3.0, scale=0.5, seed=0,
                     n_features=2) -> Dataset:
    """Widely separated Gaussian blobs; trivially separable with margin."""
    rng = np.random.default_rng(seed)
    center = np.full(n_features, separation)
    stable = rng.normal(loc=-center, scale=scale, size=(n_per_class, n_features))
    unstable = rng.normal(loc=center, scale=scale, size=(n_per_class, n_features))
    values = np.vstack([stable, unstable])
    labels = np.array([0] * n_per_class + [1] * n_per_class)
    order = rng.permutation(len(labels))
    return Dataset(
        values=values[order],
        labels=labels[order],
        feature_names=tuple(f"x{i}" for i in range(n_features)),
    )
