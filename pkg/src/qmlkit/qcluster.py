"""Quantum KNN classification and k-means clustering, their exact classical
baselines, and the computational-cost crossover model.

The quantum variants estimate every squared Euclidean distance with the
SWAP-test construction (``n_st`` shots per distance, ``None`` for exact) and
pick minima with repeated Grover threshold minimization (``n_qma`` repetitions
per selection, ``None`` for an exact argmin).  With both set to ``None`` the
quantum route must reproduce the classical baselines decision-for-decision;
the baselines are implemented independently with plain vectorized numpy so
that equivalence is a genuine cross-check.

Cost model: classical KNN costs n*m*(k + d) and the quantum version
n*m*(k*n_qma + n_st*log2 d); k-means costs k*n*d classically and
k*n*(n_qma + n_st*log2 d) quantumly.  The crossover finder returns the
smallest dimension where the quantum route is cheaper.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import ConfusionMatrix, LabeledDataset
from .qsim import as_rng
from .qsub import qma_minimize, quantum_distance

__all__ = [
    "CostModelParams",
    "qknn_classify",
    "classical_knn_classify",
    "qkmeans_cluster",
    "classical_kmeans_cluster",
    "kmeans_objective",
    "knn_cost",
    "kmeans_cost",
    "find_crossover",
]


@dataclass(frozen=True)
class CostModelParams:
    """Problem sizes and per-operation repetition constants for cost curves."""

    n: int  # training set size
    m: int  # test set size
    k: int  # neighbors / clusters
    d: int  # feature-space dimension
    n_st: int  # SWAP-test repetitions per distance estimate
    n_qma: int  # QMA repetitions per minimum selection

    def __post_init__(self) -> None:
        for name in ("n", "m", "k", "d", "n_st", "n_qma"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")


def _vote(labels: np.ndarray, class_count: int) -> int:
    """Majority vote; ties go to the smallest class id."""
    counts = np.bincount(labels, minlength=class_count)
    return int(np.argmax(counts))  # argmax takes the first (smallest id) on ties


def _select_minimum(
    table: np.ndarray,
    n_qma: int | None,
    rng: np.random.Generator,
) -> int:
    """Index of the table minimum: exact argmin, or best of n_qma QMA runs."""
    if n_qma is None:
        return int(np.argmin(table))
    best_idx, best_val = -1, np.inf
    for _ in range(n_qma):
        result = qma_minimize(table, seed=rng)
        if result.min_value < best_val:
            best_idx, best_val = result.argmin_index, result.min_value
    return best_idx


def _distance_row(
    x: np.ndarray,
    points: np.ndarray,
    n_st: int | None,
    rng: np.random.Generator,
) -> np.ndarray:
    """Squared distances from x to every row of points, via the quantum route."""
    return np.array(
        [quantum_distance(x, p, shots=n_st, seed=rng) for p in points]
    )


def qknn_classify(
    train: LabeledDataset,
    test: LabeledDataset,
    k: int,
    n_st: int | None = None,
    n_qma: int | None = None,
    seed: int | np.random.Generator = 0,
) -> tuple[np.ndarray, ConfusionMatrix]:
    """Classify test vectors by majority vote over the k nearest neighbors,
    with SWAP-test distances and QMA neighbor selection.

    Each of the k selections runs QMA ``n_qma`` times on the current distance
    table (already-selected entries masked to +inf) and keeps the best.
    Returns the predicted labels and the confusion matrix against the test
    labels (counts; normalize separately).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(train):
        raise ValueError(f"k={k} exceeds training set size {len(train)}")
    if len(train) == 0 or len(test) == 0:
        raise ValueError("datasets must be nonempty")
    rng = as_rng(seed)
    predictions = np.empty(len(test), dtype=int)
    for i, x in enumerate(test.features):
        distances = _distance_row(x, train.features, n_st, rng)
        table = distances.copy()
        neighbor_labels = []
        for _ in range(k):
            chosen = _select_minimum(table, n_qma, rng)
            neighbor_labels.append(train.labels[chosen])
            table[chosen] = np.inf
        predictions[i] = _vote(np.array(neighbor_labels), train.class_count)
    matrix = ConfusionMatrix.from_predictions(
        test.labels, predictions, train.class_count
    )
    return predictions, matrix


def classical_knn_classify(
    train: LabeledDataset, test: LabeledDataset, k: int
) -> tuple[np.ndarray, ConfusionMatrix]:
    """Plain KNN baseline: vectorized exact distances, the same vote rule."""
    if k < 1 or k > len(train):
        raise ValueError(f"k must be in [1, {len(train)}], got {k}")
    diffs = test.features[:, None, :] - train.features[None, :, :]
    distances = np.sum(diffs**2, axis=2)
    predictions = np.empty(len(test), dtype=int)
    for i in range(len(test)):
        order = np.argsort(distances[i], kind="stable")[:k]
        predictions[i] = _vote(train.labels[order], train.class_count)
    matrix = ConfusionMatrix.from_predictions(
        test.labels, predictions, train.class_count
    )
    return predictions, matrix


def _init_centroids(
    data: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k distinct data points drawn uniformly as the starting centroids."""
    picks = rng.choice(data.shape[0], size=k, replace=False)
    return data[picks].copy()


def _repair_empty_clusters(
    data: np.ndarray, centroids: np.ndarray, assignments: np.ndarray
) -> np.ndarray:
    """Re-seed each empty cluster with the point farthest from its centroid."""
    for c in range(centroids.shape[0]):
        if np.any(assignments == c):
            continue
        gaps = np.sum((data - centroids[c]) ** 2, axis=1)
        assignments[int(np.argmax(gaps))] = c
    return assignments


def qkmeans_cluster(
    data: np.ndarray,
    k: int,
    n_st: int | None = None,
    n_qma: int | None = None,
    seed: int | np.random.Generator = 0,
    max_iters: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iteration with quantum distance estimates and QMA assignment.

    Points are reassigned to the centroid selected by QMA over the k
    estimated distances; centroids update as classical means.  Stops when
    assignments are unchanged or at ``max_iters``.  Returns (assignments,
    centroids).
    """
    data = np.asarray(data, dtype=float)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if data.shape[0] < k:
        raise ValueError(f"need at least k={k} points, got {data.shape[0]}")
    rng = as_rng(seed)
    centroids = _init_centroids(data, k, rng)
    assignments = np.full(data.shape[0], -1, dtype=int)
    for _ in range(max_iters):
        new_assignments = np.empty_like(assignments)
        for i, x in enumerate(data):
            table = _distance_row(x, centroids, n_st, rng)
            new_assignments[i] = _select_minimum(table, n_qma, rng)
        new_assignments = _repair_empty_clusters(data, centroids, new_assignments)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for c in range(k):
            centroids[c] = data[assignments == c].mean(axis=0)
    return assignments, centroids


def classical_kmeans_cluster(
    data: np.ndarray,
    k: int,
    seed: int | np.random.Generator = 0,
    max_iters: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """Plain Lloyd baseline sharing only the seeded init and repair rules."""
    data = np.asarray(data, dtype=float)
    if k < 2 or data.shape[0] < k:
        raise ValueError(f"need k >= 2 and at least k points, got k={k}")
    rng = as_rng(seed)
    centroids = _init_centroids(data, k, rng)
    assignments = np.full(data.shape[0], -1, dtype=int)
    for _ in range(max_iters):
        distances = np.sum(
            (data[:, None, :] - centroids[None, :, :]) ** 2, axis=2
        )
        new_assignments = np.argmin(distances, axis=1)
        new_assignments = _repair_empty_clusters(data, centroids, new_assignments)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for c in range(k):
            centroids[c] = data[assignments == c].mean(axis=0)
    return assignments, centroids


def kmeans_objective(
    data: np.ndarray, assignments: np.ndarray, centroids: np.ndarray
) -> float:
    """Exact sum of squared distances to the assigned centroids."""
    return float(np.sum((data - centroids[assignments]) ** 2))


def knn_cost(params: CostModelParams, mode: str) -> float:
    """KNN cost units: classical n*m*(k+d), quantum n*m*(k*n_qma + n_st*log2 d)."""
    if mode == "classical":
        return float(params.n * params.m * (params.k + params.d))
    if mode == "quantum":
        return float(
            params.n
            * params.m
            * (params.k * params.n_qma + params.n_st * np.log2(params.d))
        )
    raise ValueError(f"mode must be 'classical' or 'quantum', got {mode!r}")


def kmeans_cost(params: CostModelParams, mode: str) -> float:
    """K-means cost units: classical k*n*d, quantum k*n*(n_qma + n_st*log2 d)."""
    if mode == "classical":
        return float(params.k * params.n * params.d)
    if mode == "quantum":
        return float(
            params.k * params.n * (params.n_qma + params.n_st * np.log2(params.d))
        )
    raise ValueError(f"mode must be 'classical' or 'quantum', got {mode!r}")


def find_crossover(
    params: CostModelParams,
    algorithm: str = "knn",
    d_max: int = 2**60,
) -> int | None:
    """Smallest dimension d where the quantum cost drops below the classical.

    Binary search over integers; both cost curves are monotone in d
    (classical linear, quantum logarithmic).  Returns None when no crossover
    exists at or below ``d_max``.
    """
    cost = {"knn": knn_cost, "kmeans": kmeans_cost}.get(algorithm)
    if cost is None:
        raise ValueError(f"algorithm must be 'knn' or 'kmeans', got {algorithm!r}")

    def quantum_wins(d: int) -> bool:
        p = replace(params, d=d)
        return cost(p, "quantum") < cost(p, "classical")

    if not quantum_wins(d_max):
        return None
    lo, hi = 2, d_max  # smallest meaningful dimension is 2
    if quantum_wins(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if quantum_wins(mid):
            hi = mid
        else:
            lo = mid
    return hi
