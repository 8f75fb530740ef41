"""PCA projection used as the dimensionality-reduction baseline.

Fitted by SVD of the centered data matrix.  Retention keeps the smallest
number of leading components whose cumulative explained-variance ratio
reaches the threshold.  When fitted on z-scored data this is correlation
PCA, the form the comparison pipeline uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, _frozen_array


@dataclass(frozen=True)
class PcaProjection:
    """Affine map onto the retained principal directions.

    ``component_matrix`` has one orthonormal column per retained component,
    ordered by decreasing explained variance.  Each column's
    largest-magnitude entry is positive, which pins the otherwise arbitrary
    sign of every direction.
    """

    mean_vector: np.ndarray
    component_matrix: np.ndarray
    explained_ratio: np.ndarray
    retained_k: int
    variance_threshold: float

    def __post_init__(self):
        mean = _frozen_array(self.mean_vector, np.float64)
        comps = _frozen_array(self.component_matrix, np.float64)
        ratio = _frozen_array(self.explained_ratio, np.float64)
        if comps.ndim != 2 or comps.shape != (mean.shape[0], self.retained_k):
            raise ValueError(
                f"component matrix shape {comps.shape} does not match "
                f"{mean.shape[0]} features x {self.retained_k} components"
            )
        if ratio.shape != (self.retained_k,):
            raise ValueError("explained_ratio length does not match retained_k")
        if (np.diff(ratio) > 1e-12).any():
            raise ValueError("explained ratios must be non-increasing")
        gram = comps.T @ comps
        if not np.allclose(gram, np.eye(self.retained_k), atol=1e-8):
            raise ValueError("components are not orthonormal")
        object.__setattr__(self, "mean_vector", mean)
        object.__setattr__(self, "component_matrix", comps)
        object.__setattr__(self, "explained_ratio", ratio)

    def transform_values(self, values) -> np.ndarray:
        """Project raw rows (single sample or batch) onto the components.

        Rows are projected one at a time so a single-sample call returns
        exactly the corresponding row of a batch call.
        """
        values = np.asarray(values, dtype=np.float64)
        single = values.ndim == 1
        if single:
            values = values[None, :]
        if values.shape[1] != self.mean_vector.shape[0]:
            raise ValueError(
                f"projection fitted on {self.mean_vector.shape[0]} features, "
                f"got {values.shape[1]}"
            )
        centered = values - self.mean_vector
        scores = np.empty((centered.shape[0], self.retained_k))
        for i in range(centered.shape[0]):
            scores[i] = centered[i] @ self.component_matrix
        return scores[0] if single else scores


def pca_fit(dataset: Dataset, variance_threshold: float = 0.95) -> PcaProjection:
    """Fit a projection retaining the threshold's worth of variance.

    A small slack (1e-12) on the cumulative-ratio comparison keeps the
    retained count stable when the threshold sits on a ratio boundary.
    All-constant data has no variance direction and is rejected.
    """
    if not 0.0 < variance_threshold <= 1.0:
        raise ValueError(
            f"variance_threshold must lie in (0, 1], got {variance_threshold}"
        )
    if dataset.n_samples < 2:
        raise ValueError("need at least 2 samples to fit")
    mean = dataset.values.mean(axis=0)
    centered = dataset.values - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    variance = singular ** 2
    total = variance.sum()
    if total == 0.0:
        raise ValueError("all features are constant; nothing to project")
    ratios = variance / total
    cumulative = np.cumsum(ratios)
    retained_k = int(np.searchsorted(cumulative, variance_threshold - 1e-12) + 1)
    components = vt[:retained_k].T.copy()
    for col in range(retained_k):
        anchor = np.argmax(np.abs(components[:, col]))
        if components[anchor, col] < 0:
            components[:, col] = -components[:, col]
    return PcaProjection(
        mean_vector=mean,
        component_matrix=components,
        explained_ratio=ratios[:retained_k],
        retained_k=retained_k,
        variance_threshold=variance_threshold,
    )


def pca_transform(projection: PcaProjection, dataset: Dataset) -> Dataset:
    """Project a dataset; labels pass through, features become PC scores."""
    scores = projection.transform_values(dataset.values)
    names = tuple(f"PC{i + 1}" for i in range(projection.retained_k))
    metadata = dict(dataset.metadata)
    metadata["pca"] = {
        "retained_k": projection.retained_k,
        "variance_threshold": projection.variance_threshold,
        "explained_ratio": [float(r) for r in projection.explained_ratio],
    }
    return Dataset(
        values=scores,
        labels=dataset.labels,
        feature_names=names,
        metadata=metadata,
    )


def pca_to_dict(projection: PcaProjection) -> dict:
    return {
        "mean_vector": [float(v) for v in projection.mean_vector],
        "component_matrix": [[float(v) for v in row]
                             for row in projection.component_matrix],
        "explained_ratio": [float(v) for v in projection.explained_ratio],
        "retained_k": projection.retained_k,
        "variance_threshold": projection.variance_threshold,
    }


def pca_from_dict(payload: dict) -> PcaProjection:
    try:
        return PcaProjection(
            mean_vector=np.array(payload["mean_vector"], dtype=np.float64),
            component_matrix=np.array(payload["component_matrix"], dtype=np.float64),
            explained_ratio=np.array(payload["explained_ratio"], dtype=np.float64),
            retained_k=int(payload["retained_k"]),
            variance_threshold=float(payload["variance_threshold"]),
        )
    except KeyError as missing:
        raise ValueError(f"projection payload missing field {missing}") from None
