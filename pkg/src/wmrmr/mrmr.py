"""Weighted relevance/redundancy criterion and the greedy incremental ranking.

For a feature subset S the criterion balances mean MI with the class
(relevance D) against mean pairwise MI within S (redundancy R, diagonal
included) as alpha * D - (1 - alpha) * R.  alpha = 0.5 reproduces the
unweighted difference criterion up to a constant factor; alpha = 1 is pure
relevance ranking and alpha = 0 pure redundancy avoidance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mutinfo import MIMatrix


@dataclass(frozen=True)
class MrmrConfig:
    """Criterion weight; 0 <= alpha <= 1."""

    alpha: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class RankingResult:
    """Full greedy ordering of all features for one alpha.

    ``order`` is a permutation of all feature indices; ``step_scores[m-1]``
    is the greedy objective value of the feature chosen at step m.  The
    relevance and redundancy curves evaluate D and R on each prefix of the
    ordering.
    """

    alpha: float
    order: tuple
    step_scores: tuple
    relevance_curve: tuple
    redundancy_curve: tuple

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError("order is not a permutation of all feature indices")
        for name in ("step_scores", "relevance_curve", "redundancy_curve"):
            seq = tuple(float(v) for v in getattr(self, name))
            if len(seq) != len(order):
                raise ValueError(f"{name} length does not match order")
            object.__setattr__(self, name, seq)
        object.__setattr__(self, "order", order)

    def prefix(self, size: int) -> tuple:
        if not 1 <= size <= len(self.order):
            raise ValueError(f"prefix size {size} outside [1, {len(self.order)}]")
        return self.order[:size]


def _check_subset(subset, n_features) -> np.ndarray:
    idx = np.asarray(list(subset), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("empty feature subset")
    if idx.min() < 0 or idx.max() >= n_features:
        raise ValueError(f"subset indices outside [0, {n_features})")
    if len(np.unique(idx)) != idx.size:
        raise ValueError("subset contains duplicate indices")
    return idx


def relevance(subset, mi: MIMatrix) -> float:
    """Mean MI between the subset's features and the class."""
    idx = _check_subset(subset, mi.n_features)
    return float(mi.class_relevance[idx].sum() / idx.size)


def redundancy(subset, mi: MIMatrix) -> float:
    """Mean pairwise MI within the subset, self-information included."""
    idx = _check_subset(subset, mi.n_features)
    block = mi.pairwise[np.ix_(idx, idx)]
    return float(block.sum() / (idx.size * idx.size))


def weighted_criterion(relevance_value: float, redundancy_value: float,
                       config: MrmrConfig) -> float:
    """alpha-weighted difference of relevance and redundancy."""
    return config.alpha * relevance_value - (1.0 - config.alpha) * redundancy_value


def incremental_rank(mi: MIMatrix, config: MrmrConfig) -> RankingResult:
    """Greedy forward ranking of every feature under one criterion weight.

    The first pick maximizes MI with the class for every alpha.  Step m
    then adds the unselected feature maximizing

        alpha * I(x; c) - (1 - alpha) * mean over selected x_i of I(x; x_i)

    Ties resolve to the lowest feature index.  Running MI sums against the
    selected set make the whole ranking O(N^2) given the matrix.
    """
    n = mi.n_features
    if n == 0:
        raise ValueError("MI matrix has no features")
    rel = mi.class_relevance
    order = np.empty(n, dtype=np.int64)
    step_scores = np.empty(n, dtype=np.float64)
    selected = np.zeros(n, dtype=bool)

    first = int(np.argmax(rel))
    order[0] = first
    step_scores[0] = config.alpha * rel[first]
    selected[first] = True
    mi_sum = mi.pairwise[:, first].copy()

    for m in range(2, n + 1):
        objective = config.alpha * rel - (1.0 - config.alpha) * (mi_sum / (m - 1))
        objective[selected] = -np.inf
        pick = int(np.argmax(objective))
        order[m - 1] = pick
        step_scores[m - 1] = objective[pick]
        selected[pick] = True
        if m < n:
            mi_sum += mi.pairwise[:, pick]

    relevance_curve = [relevance(order[:m], mi) for m in range(1, n + 1)]
    redundancy_curve = [redundancy(order[:m], mi) for m in range(1, n + 1)]
    return RankingResult(
        alpha=config.alpha,
        order=tuple(order.tolist()),
        step_scores=tuple(step_scores.tolist()),
        relevance_curve=tuple(relevance_curve),
        redundancy_curve=tuple(redundancy_curve),
    )


def ranking_to_dict(ranking: RankingResult, feature_names) -> dict:
    """JSON-ready view of one ranking with names substituted for indices."""
    names = list(feature_names)
    return {
        "alpha": ranking.alpha,
        "order": [names[i] for i in ranking.order],
        "step_scores": list(ranking.step_scores),
        "relevance_curve": list(ranking.relevance_curve),
        "redundancy_curve": list(ranking.redundancy_curve),
    }
