"""Datasets, metrics, and CSV plumbing shared by the learning modules.

Holds the labeled-dataset container, the bundled Fisher iris table, the
seeded Gaussian-blob generator that stands in for the unpublished 4-class
demo datasets, stratified splitting, confusion matrices, and the CSV dialect
used by the command-line tools (header row, final ``label`` column that may
be blank for unlabeled data, floats at 17 significant digits).
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from .qsim import as_rng

__all__ = [
    "LabeledDataset",
    "ConfusionMatrix",
    "load_iris",
    "gen_blobs",
    "stratified_split",
    "best_permutation_agreement",
    "read_dataset_csv",
    "write_dataset_csv",
    "DataFormatError",
]

IRIS_FEATURE_NAMES = (
    "sepal_length",
    "sepal_width",
    "petal_length",
    "petal_width",
)
IRIS_CLASS_NAMES = ("setosa", "versicolor", "virginica")

# Fisher's iris measurements (cm): 150 rows of 4 features plus a class id
# (0=setosa, 1=versicolor, 2=virginica), 50 rows per class.
_IRIS_ROWS = (
    (5.1, 3.5, 1.4, 0.2, 0),
    (4.9, 3.0, 1.4, 0.2, 0),
    (4.7, 3.2, 1.3, 0.2, 0),
    (4.6, 3.1, 1.5, 0.2, 0),
    (5.0, 3.6, 1.4, 0.2, 0),
    (5.4, 3.9, 1.7, 0.4, 0),
    (4.6, 3.4, 1.4, 0.3, 0),
    (5.0, 3.4, 1.5, 0.2, 0),
    (4.4, 2.9, 1.4, 0.2, 0),
    (4.9, 3.1, 1.5, 0.1, 0),
    (5.4, 3.7, 1.5, 0.2, 0),
    (4.8, 3.4, 1.6, 0.2, 0),
    (4.8, 3.0, 1.4, 0.1, 0),
    (4.3, 3.0, 1.1, 0.1, 0),
    (5.8, 4.0, 1.2, 0.2, 0),
    (5.7, 4.4, 1.5, 0.4, 0),
    (5.4, 3.9, 1.3, 0.4, 0),
    (5.1, 3.5, 1.4, 0.3, 0),
    (5.7, 3.8, 1.7, 0.3, 0),
    (5.1, 3.8, 1.5, 0.3, 0),
    (5.4, 3.4, 1.7, 0.2, 0),
    (5.1, 3.7, 1.5, 0.4, 0),
    (4.6, 3.6, 1.0, 0.2, 0),
    (5.1, 3.3, 1.7, 0.5, 0),
    (4.8, 3.4, 1.9, 0.2, 0),
    (5.0, 3.0, 1.6, 0.2, 0),
    (5.0, 3.4, 1.6, 0.4, 0),
    (5.2, 3.5, 1.5, 0.2, 0),
    (5.2, 3.4, 1.4, 0.2, 0),
    (4.7, 3.2, 1.6, 0.2, 0),
    (4.8, 3.1, 1.6, 0.2, 0),
    (5.4, 3.4, 1.5, 0.4, 0),
    (5.2, 4.1, 1.5, 0.1, 0),
    (5.5, 4.2, 1.4, 0.2, 0),
    (4.9, 3.1, 1.5, 0.2, 0),
    (5.0, 3.2, 1.2, 0.2, 0),
    (5.5, 3.5, 1.3, 0.2, 0),
    (4.9, 3.6, 1.4, 0.1, 0),
    (4.4, 3.0, 1.3, 0.2, 0),
    (5.1, 3.4, 1.5, 0.2, 0),
    (5.0, 3.5, 1.3, 0.3, 0),
    (4.5, 2.3, 1.3, 0.3, 0),
    (4.4, 3.2, 1.3, 0.2, 0),
    (5.0, 3.5, 1.6, 0.6, 0),
    (5.1, 3.8, 1.9, 0.4, 0),
    (4.8, 3.0, 1.4, 0.3, 0),
    (5.1, 3.8, 1.6, 0.2, 0),
    (4.6, 3.2, 1.4, 0.2, 0),
    (5.3, 3.7, 1.5, 0.2, 0),
    (5.0, 3.3, 1.4, 0.2, 0),
    (7.0, 3.2, 4.7, 1.4, 1),
    (6.4, 3.2, 4.5, 1.5, 1),
    (6.9, 3.1, 4.9, 1.5, 1),
    (5.5, 2.3, 4.0, 1.3, 1),
    (6.5, 2.8, 4.6, 1.5, 1),
    (5.7, 2.8, 4.5, 1.3, 1),
    (6.3, 3.3, 4.7, 1.6, 1),
    (4.9, 2.4, 3.3, 1.0, 1),
    (6.6, 2.9, 4.6, 1.3, 1),
    (5.2, 2.7, 3.9, 1.4, 1),
    (5.0, 2.0, 3.5, 1.0, 1),
    (5.9, 3.0, 4.2, 1.5, 1),
    (6.0, 2.2, 4.0, 1.0, 1),
    (6.1, 2.9, 4.7, 1.4, 1),
    (5.6, 2.9, 3.6, 1.3, 1),
    (6.7, 3.1, 4.4, 1.4, 1),
    (5.6, 3.0, 4.5, 1.5, 1),
    (5.8, 2.7, 4.1, 1.0, 1),
    (6.2, 2.2, 4.5, 1.5, 1),
    (5.6, 2.5, 3.9, 1.1, 1),
    (5.9, 3.2, 4.8, 1.8, 1),
    (6.1, 2.8, 4.0, 1.3, 1),
    (6.3, 2.5, 4.9, 1.5, 1),
    (6.1, 2.8, 4.7, 1.2, 1),
    (6.4, 2.9, 4.3, 1.3, 1),
    (6.6, 3.0, 4.4, 1.4, 1),
    (6.8, 2.8, 4.8, 1.4, 1),
    (6.7, 3.0, 5.0, 1.7, 1),
    (6.0, 2.9, 4.5, 1.5, 1),
    (5.7, 2.6, 3.5, 1.0, 1),
    (5.5, 2.4, 3.8, 1.1, 1),
    (5.5, 2.4, 3.7, 1.0, 1),
    (5.8, 2.7, 3.9, 1.2, 1),
    (6.0, 2.7, 5.1, 1.6, 1),
    (5.4, 3.0, 4.5, 1.5, 1),
    (6.0, 3.4, 4.5, 1.6, 1),
    (6.7, 3.1, 4.7, 1.5, 1),
    (6.3, 2.3, 4.4, 1.3, 1),
    (5.6, 3.0, 4.1, 1.3, 1),
    (5.5, 2.5, 4.0, 1.3, 1),
    (5.5, 2.6, 4.4, 1.2, 1),
    (6.1, 3.0, 4.6, 1.4, 1),
    (5.8, 2.6, 4.0, 1.2, 1),
    (5.0, 2.3, 3.3, 1.0, 1),
    (5.6, 2.7, 4.2, 1.3, 1),
    (5.7, 3.0, 4.2, 1.2, 1),
    (5.7, 2.9, 4.2, 1.3, 1),
    (6.2, 2.9, 4.3, 1.3, 1),
    (5.1, 2.5, 3.0, 1.1, 1),
    (5.7, 2.8, 4.1, 1.3, 1),
    (6.3, 3.3, 6.0, 2.5, 2),
    (5.8, 2.7, 5.1, 1.9, 2),
    (7.1, 3.0, 5.9, 2.1, 2),
    (6.3, 2.9, 5.6, 1.8, 2),
    (6.5, 3.0, 5.8, 2.2, 2),
    (7.6, 3.0, 6.6, 2.1, 2),
    (4.9, 2.5, 4.5, 1.7, 2),
    (7.3, 2.9, 6.3, 1.8, 2),
    (6.7, 2.5, 5.8, 1.8, 2),
    (7.2, 3.6, 6.1, 2.5, 2),
    (6.5, 3.2, 5.1, 2.0, 2),
    (6.4, 2.7, 5.3, 1.9, 2),
    (6.8, 3.0, 5.5, 2.1, 2),
    (5.7, 2.5, 5.0, 2.0, 2),
    (5.8, 2.8, 5.1, 2.4, 2),
    (6.4, 3.2, 5.3, 2.3, 2),
    (6.5, 3.0, 5.5, 1.8, 2),
    (7.7, 3.8, 6.7, 2.2, 2),
    (7.7, 2.6, 6.9, 2.3, 2),
    (6.0, 2.2, 5.0, 1.5, 2),
    (6.9, 3.2, 5.7, 2.3, 2),
    (5.6, 2.8, 4.9, 2.0, 2),
    (7.7, 2.8, 6.7, 2.0, 2),
    (6.3, 2.7, 4.9, 1.8, 2),
    (6.7, 3.3, 5.7, 2.1, 2),
    (7.2, 3.2, 6.0, 1.8, 2),
    (6.2, 2.8, 4.8, 1.8, 2),
    (6.1, 3.0, 4.9, 1.8, 2),
    (6.4, 2.8, 5.6, 2.1, 2),
    (7.2, 3.0, 5.8, 1.6, 2),
    (7.4, 2.8, 6.1, 1.9, 2),
    (7.9, 3.8, 6.4, 2.0, 2),
    (6.4, 2.8, 5.6, 2.2, 2),
    (6.3, 2.8, 5.1, 1.5, 2),
    (6.1, 2.6, 5.6, 1.4, 2),
    (7.7, 3.0, 6.1, 2.3, 2),
    (6.3, 3.4, 5.6, 2.4, 2),
    (6.4, 3.1, 5.5, 1.8, 2),
    (6.0, 3.0, 4.8, 1.8, 2),
    (6.9, 3.1, 5.4, 2.1, 2),
    (6.7, 3.1, 5.6, 2.4, 2),
    (6.9, 3.1, 5.1, 2.3, 2),
    (5.8, 2.7, 5.1, 1.9, 2),
    (6.8, 3.2, 5.9, 2.3, 2),
    (6.7, 3.3, 5.7, 2.5, 2),
    (6.7, 3.0, 5.2, 2.3, 2),
    (6.3, 2.5, 5.0, 1.9, 2),
    (6.5, 3.0, 5.2, 2.0, 2),
    (6.2, 3.4, 5.4, 2.3, 2),
    (5.9, 3.0, 5.1, 1.8, 2),
)


class DataFormatError(ValueError):
    """Malformed dataset file; carries a line/column diagnostic."""


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with integer class labels in [0, class_count)."""

    features: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self) -> None:
        feats = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {feats.shape}")
        if labels.shape != (feats.shape[0],):
            raise ValueError(
                f"label count {labels.shape} does not match {feats.shape[0]} rows"
            )
        if labels.size and (labels.min() < 0 or labels.max() >= self.class_count):
            raise ValueError(
                f"labels must lie in [0, {self.class_count}), got "
                f"[{labels.min()}, {labels.max()}]"
            )
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            self.features[indices], self.labels[indices], self.class_count
        )

    def select_classes(self, classes: list[int]) -> "LabeledDataset":
        """Rows of the named classes, relabeled 0..len(classes)-1 in list order."""
        classes = list(classes)
        mask = np.isin(self.labels, classes)
        remap = {c: i for i, c in enumerate(classes)}
        labels = np.array([remap[c] for c in self.labels[mask]], dtype=int)
        return LabeledDataset(self.features[mask], labels, len(classes))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted; optionally row-normalized."""

    counts: np.ndarray
    normalized: bool

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion matrix must be square, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("confusion matrix entries must be nonnegative")
        if self.normalized:
            sums = counts.sum(axis=1)
            if np.any(np.abs(sums[sums > 0] - 1.0) > 1e-9):
                raise ValueError("normalized rows must each sum to 1")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_predictions(
        cls, true_labels: np.ndarray, predicted: np.ndarray, class_count: int
    ) -> "ConfusionMatrix":
        counts = np.zeros((class_count, class_count))
        for t, p in zip(np.asarray(true_labels), np.asarray(predicted)):
            counts[int(t), int(p)] += 1
        return cls(counts, normalized=False)

    def normalize(self) -> "ConfusionMatrix":
        """Divide each row by its total (rows with no samples stay zero)."""
        counts = self.counts.copy()
        sums = counts.sum(axis=1, keepdims=True)
        np.divide(counts, sums, out=counts, where=sums > 0)
        return ConfusionMatrix(counts, normalized=True)

    def diagonal_mean(self) -> float:
        return float(np.mean(np.diag(self.normalize().counts)))


def load_iris() -> LabeledDataset:
    """The bundled 150-row, 4-feature, 3-class iris dataset."""
    rows = np.array(_IRIS_ROWS, dtype=float)
    return LabeledDataset(rows[:, :4], rows[:, 4].astype(int), 3)


def gen_blobs(
    classes: int = 4,
    per_class: int = 25,
    seed: int | np.random.Generator = 0,
    sigma: float = 0.7,
    means: np.ndarray | None = None,
) -> LabeledDataset:
    """Seeded isotropic Gaussian blobs, one cluster per class, 2-D by default.

    Stand-in for the unpublished 4-cluster demo datasets: the default means
    put one well-separated blob in each quadrant, away from the origin so
    every sample is safely nonzero for amplitude encoding.
    """
    if classes < 1 or per_class < 1:
        raise ValueError("classes and per_class must be >= 1")
    rng = as_rng(seed)
    if means is None:
        angles = 2.0 * np.pi * (np.arange(classes) + 0.5) / classes
        means = 4.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    means = np.asarray(means, dtype=float)
    if means.shape[0] != classes:
        raise ValueError(f"got {means.shape[0]} means for {classes} classes")
    feats = np.concatenate(
        [rng.normal(m, sigma, size=(per_class, means.shape[1])) for m in means]
    )
    labels = np.repeat(np.arange(classes), per_class)
    return LabeledDataset(feats, labels, classes)


def stratified_split(
    dataset: LabeledDataset, train_fraction: float, seed: int | np.random.Generator
) -> tuple[LabeledDataset, LabeledDataset]:
    """Per-class shuffled split into (train, test) at the given fraction."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = as_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in range(dataset.class_count):
        members = np.flatnonzero(dataset.labels == c)
        perm = rng.permutation(members)
        cut = int(round(train_fraction * perm.size))
        train_idx.extend(perm[:cut])
        test_idx.extend(perm[cut:])
    return dataset.subset(np.array(sorted(train_idx), dtype=int)), dataset.subset(
        np.array(sorted(test_idx), dtype=int)
    )


def best_permutation_agreement(truth: np.ndarray, assigned: np.ndarray) -> float:
    """Clustering agreement: best accuracy over relabelings of the clusters."""
    truth = np.asarray(truth, dtype=int)
    assigned = np.asarray(assigned, dtype=int)
    if truth.shape != assigned.shape:
        raise ValueError("label arrays must have matching shapes")
    k = int(max(truth.max(), assigned.max())) + 1
    best = 0.0
    for perm in itertools.permutations(range(k)):
        mapped = np.array(perm)[assigned]
        best = max(best, float(np.mean(mapped == truth)))
    return best


def write_dataset_csv(
    path: str,
    features: np.ndarray,
    labels: np.ndarray | None = None,
    feature_names: tuple[str, ...] | None = None,
) -> None:
    """Write one row per vector: named feature columns then a ``label`` column.

    The label cell is blank for unlabeled data; floats carry 17 significant
    digits so a write/read round trip is lossless.
    """
    features = np.asarray(features, dtype=float)
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(features.shape[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["label"])
        for i, row in enumerate(features):
            cells = [format(x, ".17g") for x in row]
            cells.append("" if labels is None else str(int(labels[i])))
            writer.writerow(cells)


def read_dataset_csv(path: str) -> tuple[np.ndarray, np.ndarray | None, tuple[str, ...]]:
    """Read the dialect written by write_dataset_csv.

    Returns (features, labels or None, feature names); labels are None when
    every label cell is blank.  Raises DataFormatError with a line/column
    diagnostic for malformed content.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if len(header) < 2 or header[-1] != "label":
            raise DataFormatError(
                f"{path}: line 1: expected feature columns plus a final "
                f"'label' column, got {header!r}"
            )
        feature_names = tuple(header[:-1])
        feats: list[list[float]] = []
        labels: list[int | None] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {len(header)} cells, "
                    f"got {len(row)}"
                )
            values = []
            for col, cell in enumerate(row[:-1], start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {line_no}, column {col}: "
                        f"not a number: {cell!r}"
                    ) from None
            feats.append(values)
            cell = row[-1].strip()
            if cell == "":
                labels.append(None)
            else:
                try:
                    labels.append(int(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {line_no}, column {len(header)}: "
                        f"label must be an integer or blank, got {cell!r}"
                    ) from None
    if not feats:
        raise DataFormatError(f"{path}: no data rows")
    features = np.array(feats, dtype=float)
    if all(l is None for l in labels):
        return features, None, feature_names
    if any(l is None for l in labels):
        raise DataFormatError(f"{path}: mixed labeled and unlabeled rows")
    return features, np.array(labels, dtype=int), feature_names
