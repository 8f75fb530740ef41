"""Feature selection by weighted relevance/redundancy with SVM validation."""

__version__ = "0.1.0"

from .dataset import (
    Dataset,
    DiscretizedDataset,
    FoldAssignment,
    GeneratorRecipe,
    NormalizationRecord,
    discretize_equal_frequency,
    generate_synthetic,
    load_csv,
    stratified_kfold,
    tz_catalog,
    write_csv,
    zscore_normalize,
)
from .mutinfo import MIMatrix, entropy, mutual_information, pairwise_mi_matrix
from .mrmr import (
    MrmrConfig,
    RankingResult,
    incremental_rank,
    redundancy,
    relevance,
    weighted_criterion,
)
from .metrics import MetricsBundle, accuracy, composite_index, kappa, roc_auc
from .baseline_pca import PcaProjection, pca_fit, pca_transform
from .svm import (
    SubsetEvaluation,
    SvmConfig,
    SvmModel,
    cross_validated_accuracy,
    decision_function,
    grid_search,
    predict,
    rbf_kernel,
    train,
)
from .pipeline import (
    DEFAULT_ALPHAS,
    AlphaResult,
    PipelineConfig,
    SelectionReport,
    emit_curves,
    evaluate_final,
    report_to_dict,
    select_features,
    write_curves_csv,
)

__all__ = [
    "Dataset", "DiscretizedDataset", "FoldAssignment", "GeneratorRecipe",
    "NormalizationRecord", "discretize_equal_frequency", "generate_synthetic",
    "load_csv", "stratified_kfold", "tz_catalog", "write_csv",
    "zscore_normalize",
    "MIMatrix", "entropy", "mutual_information", "pairwise_mi_matrix",
    "MrmrConfig", "RankingResult", "incremental_rank", "redundancy",
    "relevance", "weighted_criterion",
    "MetricsBundle", "accuracy", "composite_index", "kappa", "roc_auc",
    "PcaProjection", "pca_fit", "pca_transform",
    "SubsetEvaluation", "SvmConfig", "SvmModel", "cross_validated_accuracy",
    "decision_function", "grid_search", "predict", "rbf_kernel", "train",
    "DEFAULT_ALPHAS", "AlphaResult", "PipelineConfig", "SelectionReport",
    "emit_curves", "evaluate_final", "report_to_dict", "select_features",
    "write_curves_csv",
    "__version__",
]
