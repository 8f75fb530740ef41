"""Dataset loading, normalization, discretization, fold splitting and synthesis.

All tabular data flows through the :class:`Dataset` container: a float64
sample matrix, integer class labels (0 = stable, 1 = unstable) and one name
per feature column.  Downstream code never touches raw CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_LABEL_VALUES = ("0", "1")

SNAPSHOT_TAGS = ("static", "t0", "tcl", "tcl+3c", "tcl+6c", "tcl+9c")


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Real-valued samples with binary labels and named feature columns.

    Parameters
    ----------
    values : ndarray, shape (n_samples, n_features)
        Finite float64 matrix, one row per sample.
    labels : ndarray, shape (n_samples,)
        Integer class per sample, 0 for stable and 1 for unstable.  Both
        classes must be present with at least two samples each.
    feature_names : tuple of str
        Unique column names, one per feature.
    metadata : dict
        Free-form provenance (source path, generator recipe and so on).
        Excluded from equality.
    """

    values: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        names = tuple(str(n) for n in self.feature_names)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if labels.shape != (values.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {values.shape[0]} samples"
            )
        if not np.isfinite(values).all():
            raise ValueError("values contain NaN or infinite entries")
        if len(names) != values.shape[1]:
            raise ValueError(
                f"{len(names)} feature names for {values.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise ValueError("feature names are not unique")
        present = np.unique(labels)
        if not np.isin(present, (0, 1)).all():
            raise ValueError(f"labels must be 0 or 1, got values {present.tolist()}")
        if len(present) < 2:
            raise ValueError("single-class dataset: both classes are required")
        if min(np.sum(labels == 0), np.sum(labels == 1)) < 2:
            raise ValueError("each class needs at least two samples")
        values.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise ValueError(f"unknown feature {name!r}") from None


@dataclass(frozen=True)
class NormalizationRecord:
    """Per-feature mean and population stddev fitted on one dataset.

    A stddev of 0 marks a constant feature; :meth:`apply` maps such columns
    to 0 instead of dividing by zero.
    """

    mean: np.ndarray
    stddev: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(self.mean, np.float64)
        stddev = _frozen_array(self.stddev, np.float64)
        if mean.shape != stddev.shape or mean.ndim != 1:
            raise ValueError("mean and stddev must be 1-D and the same length")
        if (stddev < 0).any():
            raise ValueError("stddev must be non-negative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "stddev", stddev)

    def apply(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != self.mean.shape[0]:
            raise ValueError(
                f"record fitted on {self.mean.shape[0]} features, "
                f"got {values.shape[-1]}"
            )
        scale = np.where(self.stddev > 0, self.stddev, 1.0)
        out = (values - self.mean) / scale
        out[..., self.stddev == 0] = 0.0
        return out


@dataclass(frozen=True)
class DiscretizedDataset:
    """Integer bin codes produced by equal-frequency discretization."""

    bins: np.ndarray
    bin_count_per_feature: tuple
    source_edges: tuple
    requested_bins: int

    def __post_init__(self):
        bins = _frozen_array(self.bins, np.int64)
        counts = tuple(int(k) for k in self.bin_count_per_feature)
        edges = tuple(_frozen_array(e, np.float64) for e in self.source_edges)
        if bins.ndim != 2:
            raise ValueError("bins must be 2-D")
        if len(counts) != bins.shape[1] or len(edges) != bins.shape[1]:
            raise ValueError("per-feature metadata does not match bin columns")
        for f, k in enumerate(counts):
            col = bins[:, f]
            if col.min() < 0 or col.max() >= k:
                raise ValueError(f"feature {f} has bin codes outside [0, {k})")
            if (np.diff(edges[f]) <= 0).any():
                raise ValueError(f"feature {f} cut points are not strictly increasing")
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "bin_count_per_feature", counts)
        object.__setattr__(self, "source_edges", edges)

    @property
    def n_samples(self) -> int:
        return self.bins.shape[0]

    @property
    def n_features(self) -> int:
        return self.bins.shape[1]


@dataclass(frozen=True)
class FoldAssignment:
    """Stratified fold index per sample, reused by every consumer of one run."""

    fold_of_sample: np.ndarray
    k: int
    seed: int

    def __post_init__(self):
        folds = _frozen_array(self.fold_of_sample, np.int64)
        if folds.ndim != 1:
            raise ValueError("fold_of_sample must be 1-D")
        if self.k < 2:
            raise ValueError(f"need at least 2 folds, got {self.k}")
        if folds.size and (folds.min() < 0 or folds.max() >= self.k):
            raise ValueError("fold indices outside [0, k)")
        object.__setattr__(self, "fold_of_sample", folds)

    def val_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.fold_of_sample == fold)[0]

    def train_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.fold_of_sample != fold)[0]


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    snapshot: str
    description: str


@dataclass(frozen=True)
class FeatureCatalog:
    """Named catalog of the transient-stability feature set."""

    entries: tuple

    def names(self) -> tuple:
        return tuple(e.id for e in self.entries)

    def entry(self, feature_id: str) -> CatalogEntry:
        for e in self.entries:
            if e.id == feature_id:
                return e
        raise ValueError(f"unknown catalog id {feature_id!r}")

    def by_snapshot(self, tag: str) -> tuple:
        if tag not in SNAPSHOT_TAGS:
            raise ValueError(f"unknown snapshot tag {tag!r}")
        return tuple(e for e in self.entries if e.snapshot == tag)


@dataclass(frozen=True)
class GeneratorRecipe:
    """Recipe for synthetic binary-labelled data.

    Informative features are independent standard normals; the label is the
    sign of their sum plus Gaussian noise of scale ``label_noise``.  Each
    entry of ``redundant_sources`` appends a copy of that informative column
    (optionally rescaled, shifted and jittered), and ``n_noise`` appends
    label-independent standard normals.
    """

    n_informative: int
    redundant_sources: tuple = ()
    n_noise: int = 0
    label_noise: float = 0.5
    redundant_noise: float = 0.0
    redundant_scale: float = 1.0
    redundant_offset: float = 0.0
    feature_names: tuple | None = None

    @property
    def n_features(self) -> int:
        return self.n_informative + len(self.redundant_sources) + self.n_noise


def load_csv(path, label_column: str, label_values=DEFAULT_LABEL_VALUES) -> Dataset:
    """Load a delimited text file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or Path
        CSV file with a header row.  Every non-label cell must parse as a
        finite float.
    label_column : str
        Header name of the label column.
    label_values : pair of str
        Cell values encoding class 0 and class 1, in that order.

    Raises
    ------
    ValueError
        On a missing or duplicated column, a ragged row, a non-numeric or
        non-finite cell, an unknown label value, or a single-class file.
    """
    path = Path(path)
    if len(label_values) != 2 or label_values[0] == label_values[1]:
        raise ValueError(f"label_values must be two distinct strings, got {label_values!r}")
    if not path.is_file():
        raise ValueError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValueError(
                f"{path}: no column named {label_column!r}; columns are {header}"
            )
        label_pos = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != label_pos]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"{path}: duplicated feature columns {dupes}")
        rows = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {len(header)}"
                )
            cell = row[label_pos].strip()
            if cell not in label_values:
                raise ValueError(
                    f"{path}: line {lineno}: label {cell!r} not in {tuple(label_values)}"
                )
            labels.append(label_values.index(cell))
            sample = []
            for i, raw in enumerate(row):
                if i == label_pos:
                    continue
                try:
                    value = float(raw)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}, column {header[i]!r}: "
                        f"non-numeric cell {raw.strip()!r}"
                    ) from None
                if not np.isfinite(value):
                    raise ValueError(
                        f"{path}: line {lineno}, column {header[i]!r}: non-finite cell"
                    )
                sample.append(value)
            rows.append(sample)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if len(set(labels)) < 2:
        raise ValueError(f"{path}: single-class dataset in column {label_column!r}")
    return Dataset(
        values=np.array(rows, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        feature_names=tuple(names),
        metadata={
            "source": str(path),
            "label_column": label_column,
            "label_values": tuple(label_values),
        },
    )


def write_csv(dataset: Dataset, path, label_column: str = "label",
              label_values=DEFAULT_LABEL_VALUES) -> None:
    """Write a dataset back to CSV; inverse of :func:`load_csv`."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [label_column])
        for row, label in zip(dataset.values, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [label_values[label]])


def zscore_normalize(dataset: Dataset):
    """Center and scale each feature to mean 0, population stddev 1.

    Constant features are mapped to all zeros.  Returns the normalized
    dataset and the fitted :class:`NormalizationRecord` so the same affine
    map can be replayed on held-out data.
    """
    mean = dataset.values.mean(axis=0)
    stddev = dataset.values.std(axis=0)
    record = NormalizationRecord(mean=mean, stddev=stddev)
    normalized = dataclasses.replace(dataset, values=record.apply(dataset.values))
    return normalized, record


def discretize_equal_frequency(dataset: Dataset, requested_bins: int) -> DiscretizedDataset:
    """Discretize each feature into (at most) ``requested_bins`` codes.

    Samples are ranked per feature; a tie group takes the bin of its middle
    rank, so equal values never split across bins.  A feature with fewer
    distinct values than ``requested_bins`` uses one bin per distinct value.
    Bin codes depend only on rank order, so they are invariant to sample
    order and to any strictly increasing transform of a feature.
    """
    if requested_bins < 2:
        raise ValueError(f"requested_bins must be >= 2, got {requested_bins}")
    n = dataset.n_samples
    bins = np.empty((n, dataset.n_features), dtype=np.int64)
    counts_out = []
    edges_out = []
    for f in range(dataset.n_features):
        uniq, inverse, counts = np.unique(
            dataset.values[:, f], return_inverse=True, return_counts=True
        )
        k_eff = min(requested_bins, len(uniq))
        # middle 0-based rank of each tie group: (first + last) / 2
        ends = np.cumsum(counts)
        mid = ends - (counts + 1) / 2.0
        code_of_value = np.floor(mid * k_eff / n).astype(np.int64)
        bins[:, f] = code_of_value[inverse]
        boundary = np.nonzero(np.diff(code_of_value) > 0)[0]
        edges_out.append((uniq[boundary] + uniq[boundary + 1]) / 2.0)
        counts_out.append(k_eff)
    return DiscretizedDataset(
        bins=bins,
        bin_count_per_feature=tuple(counts_out),
        source_edges=tuple(edges_out),
        requested_bins=requested_bins,
    )


def stratified_kfold(dataset: Dataset, k: int, seed: int) -> FoldAssignment:
    """Assign each sample to one of ``k`` folds, stratified by class.

    Within each class the samples are shuffled with ``default_rng(seed)``
    and dealt round-robin; the deal continues across classes so overall
    fold sizes also differ by at most one.  Deterministic in (dataset
    order, k, seed).
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    rng = np.random.default_rng(seed)
    fold = np.empty(dataset.n_samples, dtype=np.int64)
    cursor = 0
    for cls in (0, 1):
        members = np.nonzero(dataset.labels == cls)[0]
        if len(members) < k:
            raise ValueError(
                f"class {cls} has {len(members)} samples, fewer than k={k}"
            )
        for pos, sample in enumerate(rng.permutation(members)):
            fold[sample] = (cursor + pos) % k
        cursor = (cursor + len(members)) % k
    return FoldAssignment(fold_of_sample=fold, k=k, seed=seed)


def generate_synthetic(n_samples: int, recipe: GeneratorRecipe, seed: int) -> Dataset:
    """Draw a labelled sample from a :class:`GeneratorRecipe`.

    Column order is informative, redundant, noise.  Draws happen in a fixed
    order (informative block, label noise, redundant jitter, noise block) so
    a given (recipe, seed, n_samples) always yields the same dataset.
    """
    if n_samples < 20:
        raise ValueError(f"need at least 20 samples, got {n_samples}")
    if recipe.n_informative < 1:
        raise ValueError("recipe needs at least one informative feature")
    if recipe.n_noise < 0:
        raise ValueError("n_noise must be non-negative")
    if recipe.label_noise < 0 or recipe.redundant_noise < 0:
        raise ValueError("noise scales must be non-negative")
    for src in recipe.redundant_sources:
        if not 0 <= src < recipe.n_informative:
            raise ValueError(f"redundant source {src} outside informative range")
    rng = np.random.default_rng(seed)
    informative = rng.normal(size=(n_samples, recipe.n_informative))
    margin = informative.sum(axis=1) + rng.normal(scale=recipe.label_noise,
                                                  size=n_samples)
    labels = (margin > 0).astype(np.int64)
    blocks = [informative]
    if recipe.redundant_sources:
        redundant = (informative[:, list(recipe.redundant_sources)]
                     * recipe.redundant_scale + recipe.redundant_offset)
        if recipe.redundant_noise > 0:
            redundant = redundant + rng.normal(scale=recipe.redundant_noise,
                                               size=redundant.shape)
        blocks.append(redundant)
    if recipe.n_noise:
        blocks.append(rng.normal(size=(n_samples, recipe.n_noise)))
    values = np.hstack(blocks)
    if recipe.feature_names is not None:
        if len(recipe.feature_names) != recipe.n_features:
            raise ValueError(
                f"{len(recipe.feature_names)} names for {recipe.n_features} features"
            )
        names = tuple(recipe.feature_names)
    else:
        width = max(2, len(str(recipe.n_features - 1)))
        names = tuple(f"f{i:0{width}d}" for i in range(recipe.n_features))
    return Dataset(
        values=values,
        labels=labels,
        feature_names=names,
        metadata={
            "generator": {
                "n_samples": n_samples,
                "seed": seed,
                "recipe": dataclasses.asdict(recipe),
            }
        },
    )


# (id, snapshot, description) rows for the 33-feature transient-stability set.
# Snapshots: fault inception (t0), fault clearing (tcl) and 3/6/9 cycles after
# clearing; "static" is the pre-fault operating point.
_TZ_ROWS = (
    ("Tz1", "static", "total system load active power at the operating point"),
    ("Tz2", "t0", "mean of all generator accelerations at fault inception"),
    ("Tz3", "t0", "initial acceleration of the generator closest to the fault"),
    ("Tz4", "t0", "kinetic energy injected over the first cycle after inception"),
    ("Tz5", "tcl", "total kinetic energy of all generators at clearing"),
    ("Tz6", "tcl", "kinetic energy of the most accelerated generator at clearing"),
    ("Tz7", "tcl", "maximum rotor angle spread between generators at clearing"),
    ("Tz8", "tcl", "mean rotor speed deviation at clearing"),
    ("Tz9", "tcl", "maximum rotor speed deviation at clearing"),
    ("Tz10", "tcl", "accelerating power of the critical generator at clearing"),
    ("Tz11", "tcl", "system impedance change seen from the critical bus at clearing"),
    ("Tz12", "tcl", "duration of the fault-on period"),
    ("Tz13", "tcl+3c", "maximum rotor angle spread 3 cycles after clearing"),
    ("Tz14", "tcl+3c", "mean rotor angle advance 3 cycles after clearing"),
    ("Tz15", "tcl+3c", "kinetic energy of the most advanced generator 3 cycles after clearing"),
    ("Tz16", "tcl+3c", "total kinetic energy 3 cycles after clearing"),
    ("Tz17", "tcl+3c", "maximum rotor speed deviation 3 cycles after clearing"),
    ("Tz18", "tcl+3c", "mean accelerating power 3 cycles after clearing"),
    ("Tz19", "tcl+3c", "spread of accelerating power 3 cycles after clearing"),
    ("Tz20", "tcl+6c", "maximum rotor angle spread 6 cycles after clearing"),
    ("Tz21", "tcl+6c", "mean rotor angle advance 6 cycles after clearing"),
    ("Tz22", "tcl+6c", "kinetic energy of the most advanced generator 6 cycles after clearing"),
    ("Tz23", "tcl+6c", "total kinetic energy 6 cycles after clearing"),
    ("Tz24", "tcl+6c", "maximum rotor speed deviation 6 cycles after clearing"),
    ("Tz25", "tcl+6c", "mean accelerating power 6 cycles after clearing"),
    ("Tz26", "tcl+6c", "spread of accelerating power 6 cycles after clearing"),
    ("Tz27", "tcl+9c", "maximum rotor angle spread 9 cycles after clearing"),
    ("Tz28", "tcl+9c", "kinetic energy of the maximum-angle generator 9 cycles after clearing"),
    ("Tz29", "tcl+9c", "mean rotor angle advance 9 cycles after clearing"),
    ("Tz30", "tcl+9c", "total kinetic energy 9 cycles after clearing"),
    ("Tz31", "tcl+9c", "maximum rotor speed deviation 9 cycles after clearing"),
    ("Tz32", "tcl+9c", "maximum relative swing angle 9 cycles after clearing"),
    ("Tz33", "tcl+9c", "mean accelerating power 9 cycles after clearing"),
)


def tz_catalog() -> FeatureCatalog:
    """Catalog of the 33 transient-stability indicators Tz1 through Tz33."""
    return FeatureCatalog(
        entries=tuple(CatalogEntry(*row) for row in _TZ_ROWS)
    )


RECIPE_PRESETS = {
    # 2 informative, 2 exact copies of the first informative column, 6 noise.
    "small": GeneratorRecipe(n_informative=2, redundant_sources=(0, 0), n_noise=6,
                             label_noise=0.5),
    # 33 features named after the catalog: 4 informative, 4 jittered copies,
    # 25 noise.  Stands in for a transient-stability table at full width.
    "default": GeneratorRecipe(n_informative=4, redundant_sources=(0, 1, 2, 3),
                               n_noise=25, label_noise=0.5, redundant_noise=0.05,
                               feature_names=tuple(r[0] for r in _TZ_ROWS)),
}


def load_recipe(source) -> GeneratorRecipe:
    """Resolve a preset name or a JSON file path into a recipe."""
    if source in RECIPE_PRESETS:
        return RECIPE_PRESETS[source]
    path = Path(source)
    if not path.is_file():
        raise ValueError(
            f"unknown recipe {source!r}: not a preset "
            f"({', '.join(sorted(RECIPE_PRESETS))}) and not a file"
        )
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: recipe file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(GeneratorRecipe)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"{path}: unknown recipe fields {unknown}")
    for key in ("redundant_sources", "feature_names"):
        if key in raw and raw[key] is not None:
            raw[key] = tuple(raw[key])
    return GeneratorRecipe(**raw)
