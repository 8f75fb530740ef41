"""End-to-end selection run: rank per alpha, score prefixes, pick a winner.

One run shares a single fold assignment and a single MI matrix across every
alpha and every candidate subset, so criterion scores and wrapper scores are
always comparable within the run.  Candidate subsets are the nested prefixes
of each alpha's greedy ordering; each is scored by cross-validated SVM
accuracy with a coarse per-subset hyperparameter search.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .baseline_pca import pca_fit, pca_transform
from .dataset import Dataset, stratified_kfold, discretize_equal_frequency, \
    zscore_normalize, NormalizationRecord
from .metrics import MetricsBundle, bundle_from_predictions
from .mrmr import MrmrConfig, RankingResult, incremental_rank, ranking_to_dict
from .mutinfo import pairwise_mi_matrix
from .svm import SvmConfig, grid_search, train as train_svm, decision_function

DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)

CURVES_HEADER = "alpha,subset_size,j_score"


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of one selection run; defaults match the reference protocol."""

    bins: int = 10
    folds: int = 5
    seed: int = 42
    subset_c_grid: tuple = (2.0 ** -1, 2.0 ** 3, 2.0 ** 7, 2.0 ** 11)
    subset_gamma_grid: tuple = (2.0 ** -7, 2.0 ** -3, 2.0 ** 1)
    final_c_grid: tuple = tuple(2.0 ** e for e in range(-5, 16, 2))
    final_gamma_grid: tuple = tuple(2.0 ** e for e in range(-15, 4, 2))
    variance_threshold: float = 0.95
    svm_tolerance: float = 1e-3
    svm_max_passes: int = 200_000
    threads: int = 1

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        for name in ("subset_c_grid", "subset_gamma_grid",
                     "final_c_grid", "final_gamma_grid"):
            grid = tuple(float(v) for v in getattr(self, name))
            if not grid:
                raise ValueError(f"{name} must be non-empty")
            if min(grid) <= 0:
                raise ValueError(f"{name} entries must be positive")
            object.__setattr__(self, name, grid)
        if not 0.0 < self.variance_threshold <= 1.0:
            raise ValueError(
                f"variance_threshold must lie in (0, 1], got {self.variance_threshold}"
            )
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class AlphaResult:
    """Everything produced for one criterion weight."""

    ranking: RankingResult
    accuracy_curve: tuple
    best_size: int
    best_score: float
    best_subset: tuple
    evaluations: tuple = field(default=(), compare=False)

    def __post_init__(self):
        curve = tuple(float(v) for v in self.accuracy_curve)
        if len(curve) != len(self.ranking.order):
            raise ValueError("accuracy_curve length does not match ranking")
        if not 1 <= self.best_size <= len(curve):
            raise ValueError("best_size outside the curve range")
        object.__setattr__(self, "accuracy_curve", curve)
        object.__setattr__(self, "best_subset",
                           tuple(int(i) for i in self.best_subset))


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one full run, ready for serialization."""

    alpha_results: tuple
    global_best_subset: tuple
    global_best_alpha: float
    global_best_score: float
    final_metrics: dict
    feature_names: tuple
    provenance: dict


def _best_prefix(curve) -> int:
    """1-based size of the best-scoring prefix; ties go to the smallest."""
    best_size = 1
    for size in range(2, len(curve) + 1):
        if curve[size - 1] > curve[best_size - 1]:
            best_size = size
    return best_size


def select_features(train: Dataset, alphas=DEFAULT_ALPHAS,
                    config: PipelineConfig = PipelineConfig(),
                    test: Dataset | None = None) -> SelectionReport:
    """Run the full selection protocol on one training set.

    For each alpha the features are greedily ranked once, then every prefix
    of the ordering is scored by cross-validated SVM accuracy under a coarse
    (C, gamma) search.  The winner maximizes that score; ties prefer fewer
    features, then the smaller alpha.  When ``test`` is given, the winning
    subset, the full feature set and a PCA baseline are each retuned on the
    full grid and measured on the test split.
    """
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise ValueError("alphas must be non-empty")
    if len(set(alphas)) != len(alphas):
        raise ValueError("alphas contains duplicates")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {a}")
    folds = stratified_kfold(train, config.folds, config.seed)
    discretized = discretize_equal_frequency(train, config.bins)
    mi = pairwise_mi_matrix(discretized, train.labels, train.feature_names)
    rankings = [incremental_rank(mi, MrmrConfig(alpha=a)) for a in alphas]

    jobs = [(ai, size)
            for ai in range(len(alphas))
            for size in range(1, train.n_features + 1)]

    def run_job(job):
        ai, size = job
        return job, grid_search(
            train, rankings[ai].prefix(size),
            config.subset_c_grid, config.subset_gamma_grid, folds,
            tolerance=config.svm_tolerance, max_passes=config.svm_max_passes,
        )

    evaluations = {}
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for job, result in pool.map(run_job, jobs):
                evaluations[job] = result
    else:
        for job in jobs:
            evaluations[job] = run_job(job)[1]

    alpha_results = []
    for ai, ranking in enumerate(rankings):
        per_size = tuple(evaluations[(ai, size)]
                         for size in range(1, train.n_features + 1))
        curve = tuple(e.j_score for e in per_size)
        best_size = _best_prefix(curve)
        alpha_results.append(AlphaResult(
            ranking=ranking,
            accuracy_curve=curve,
            best_size=best_size,
            best_score=curve[best_size - 1],
            best_subset=ranking.prefix(best_size),
            evaluations=per_size,
        ))

    winner = min(
        alpha_results,
        key=lambda r: (-r.best_score, r.best_size, r.ranking.alpha),
    )

    final_metrics = {}
    if test is not None:
        final_metrics["selected"] = evaluate_final(
            train, test, winner.best_subset, config)
        final_metrics["full"] = evaluate_final(
            train, test, tuple(range(train.n_features)), config)
        final_metrics["pca_baseline"] = _pca_baseline_metrics(train, test, config)

    provenance = {
        "package_version": __version__,
        "n_samples": train.n_samples,
        "n_features": train.n_features,
        "alphas": list(alphas),
        "bins": config.bins,
        "folds": config.folds,
        "seed": config.seed,
        "subset_c_grid": list(config.subset_c_grid),
        "subset_gamma_grid": list(config.subset_gamma_grid),
        "final_c_grid": list(config.final_c_grid),
        "final_gamma_grid": list(config.final_gamma_grid),
        "variance_threshold": config.variance_threshold,
        "test_samples": test.n_samples if test is not None else None,
    }
    return SelectionReport(
        alpha_results=tuple(alpha_results),
        global_best_subset=winner.best_subset,
        global_best_alpha=winner.ranking.alpha,
        global_best_score=winner.best_score,
        final_metrics=final_metrics,
        feature_names=train.feature_names,
        provenance=provenance,
    )


def evaluate_final(train: Dataset, test: Dataset, subset,
                   config: PipelineConfig = PipelineConfig(),
                   return_details: bool = False):
    """Tune one subset on the full grid, refit on all of train, score test.

    Normalization and hyperparameter choice never see the test split: the
    grid search cross-validates inside train and the final z-scoring is
    fitted on train only.
    """
    if train.feature_names != test.feature_names:
        raise ValueError("train and test do not share a feature schema")
    folds = stratified_kfold(train, config.folds, config.seed)
    tuned = grid_search(
        train, subset, config.final_c_grid, config.final_gamma_grid, folds,
        tolerance=config.svm_tolerance, max_passes=config.svm_max_passes,
    )
    columns = list(tuned.subset)
    x_train = train.values[:, columns]
    record = NormalizationRecord(
        mean=x_train.mean(axis=0), stddev=x_train.std(axis=0))
    model = train_svm(
        record.apply(x_train), 2.0 * train.labels - 1.0, tuned.chosen_config,
        feature_subset=tuned.subset,
    )
    scores = decision_function(model, record.apply(test.values[:, columns]))
    predicted01 = (scores >= 0).astype(np.int64)
    bundle = bundle_from_predictions(predicted01, scores, test.labels)
    if return_details:
        return bundle, {
            "chosen_config": tuned.chosen_config.to_dict(),
            "cv_j_score": tuned.j_score,
            "cv_fold_accuracies": list(tuned.fold_accuracies),
            "model_diagnostics": model.diagnostics,
            "subset": list(tuned.subset),
        }
    return bundle


def _pca_baseline_metrics(train: Dataset, test: Dataset,
                          config: PipelineConfig) -> MetricsBundle:
    # correlation PCA: fit on z-scored train, replay both transforms on test
    train_z, record = zscore_normalize(train)
    projection = pca_fit(train_z, config.variance_threshold)
    test_z = dataclasses.replace(test, values=record.apply(test.values))
    train_pca = pca_transform(projection, train_z)
    test_pca = pca_transform(projection, test_z)
    return evaluate_final(
        train_pca, test_pca, tuple(range(train_pca.n_features)), config)


def emit_curves(report: SelectionReport) -> list:
    """Rows of (alpha, subset_size, j_score), one per scored prefix."""
    rows = []
    for result in report.alpha_results:
        for size, score in enumerate(result.accuracy_curve, start=1):
            rows.append((result.ranking.alpha, size, score))
    return rows


def write_curves_csv(report: SelectionReport, path) -> None:
    """Write the accuracy curves; scores carry six decimals."""
    lines = [CURVES_HEADER]
    for alpha, size, score in emit_curves(report):
        lines.append(f"{alpha!r},{size},{score:.6f}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def report_to_dict(report: SelectionReport) -> dict:
    """JSON-ready view of a report with feature names in place of indices."""
    names = list(report.feature_names)
    alpha_payload = []
    for result in report.alpha_results:
        entry = ranking_to_dict(result.ranking, names)
        entry["accuracy_curve"] = list(result.accuracy_curve)
        entry["best_size"] = result.best_size
        entry["best_score"] = result.best_score
        entry["best_subset"] = [names[i] for i in result.best_subset]
        if result.evaluations:
            best_eval = result.evaluations[result.best_size - 1]
            entry["best_config"] = best_eval.chosen_config.to_dict()
            entry["notes"] = sorted(set(
                note for e in result.evaluations for note in e.notes))
        alpha_payload.append(entry)
    return {
        "feature_names": names,
        "alpha_results": alpha_payload,
        "global_best_subset": [names[i] for i in report.global_best_subset],
        "global_best_alpha": report.global_best_alpha,
        "global_best_score": report.global_best_score,
        "final_metrics": {key: bundle.to_dict()
                          for key, bundle in report.final_metrics.items()},
        "provenance": dict(report.provenance),
    }
