"""Tree-shaped variational quantum classifiers.

A binary-tree circuit consumes one qubit per (angle-encoded) feature: every
level applies a two-qubit block to each surviving pair — RY rotations on both
qubits followed by a CNOT — and passes the CNOT target on to the next level,
until one qubit remains.  A final RY acts on that qubit and its |0>
probability is the classifier output: label 0 when P(|0>) < 0.5, label 1
otherwise.  With f features the circuit has 2*(f - 1) + 1 angles; for four
features that is the familiar seven-parameter tree.

Training minimizes the squared error between P(|0>) and the 0/1 label by
minibatch gradient descent with parameter-shift gradients (exact for RY
generators).  The discrete sum of (predicted label - label)^2 is logged
alongside as the paper-style loss curve.

The multiclass generalization runs one independent branch per class on the
same encoded features and predicts the argmax of the branch |0>
probabilities; branches never share gates, so simulating them separately is
mathematically identical to one wide product circuit.  Training uses softmax
cross-entropy over the branch probabilities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .encode import RescaleParams, angle_encode, fit_rescaler
from .qsim import GateOp, StateVector, apply_gate, as_rng, measure_qubit_probability, sample_shots

__all__ = [
    "TtnModel",
    "MulticlassTtnModel",
    "TrainConfig",
    "TrainHistory",
    "tree_blocks",
    "ttn_forward",
    "ttn_predict",
    "ttn_train",
    "ttn_accuracy",
    "shot_accuracy_curve",
    "multiclass_train",
    "multiclass_predict",
    "multiclass_forward",
]

TWO_PI = 2.0 * np.pi


def tree_blocks(num_features: int) -> tuple[list[tuple[int, int]], int]:
    """Pairing plan of the tree: block qubit pairs in angle order, output qubit.

    Each block (a, b) rotates both qubits and applies CNOT with control a and
    target b; b survives to the next level.
    """
    if num_features < 2 or num_features & (num_features - 1):
        raise ValueError(f"num_features must be a power of two >= 2, got {num_features}")
    active = list(range(num_features))
    blocks: list[tuple[int, int]] = []
    while len(active) > 1:
        survivors = []
        for i in range(0, len(active), 2):
            blocks.append((active[i], active[i + 1]))
            survivors.append(active[i + 1])
        active = survivors
    return blocks, active[0]


def theta_count(num_features: int) -> int:
    return 2 * (num_features - 1) + 1


@dataclass(frozen=True)
class TtnModel:
    """Binary tree of RY+CNOT blocks plus a final output rotation."""

    num_features: int
    thetas: np.ndarray
    rescaler: RescaleParams

    def __post_init__(self) -> None:
        thetas = np.asarray(self.thetas, dtype=float)
        expected = theta_count(self.num_features)
        if thetas.shape != (expected,):
            raise ValueError(
                f"{self.num_features} features need {expected} angles, "
                f"got shape {thetas.shape}"
            )
        if not np.all(np.isfinite(thetas)):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "thetas", thetas)

    @property
    def output_qubit(self) -> int:
        return tree_blocks(self.num_features)[1]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "ttn_binary",
            "num_features": self.num_features,
            "thetas": (np.mod(self.thetas, TWO_PI)).tolist(),
            "rescaler": self.rescaler.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TtnModel":
        if d.get("kind") != "ttn_binary":
            raise ValueError(f"not a binary tree model: kind={d.get('kind')!r}")
        return cls(
            num_features=int(d["num_features"]),
            thetas=np.array(d["thetas"], dtype=float),
            rescaler=RescaleParams.from_dict(d["rescaler"]),
        )

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "TtnModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class MulticlassTtnModel:
    """One tree branch per class over a shared rescaler and encoding."""

    branches: tuple[TtnModel, ...]

    def __post_init__(self) -> None:
        if len(self.branches) < 2:
            raise ValueError("need at least two branches")
        sizes = {b.num_features for b in self.branches}
        if len(sizes) != 1:
            raise ValueError(f"branches disagree on num_features: {sizes}")

    @property
    def class_count(self) -> int:
        return len(self.branches)

    @property
    def num_features(self) -> int:
        return self.branches[0].num_features

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "ttn_multiclass",
            "num_features": self.num_features,
            "class_count": self.class_count,
            "branch_thetas": [
                (np.mod(b.thetas, TWO_PI)).tolist() for b in self.branches
            ],
            "rescaler": self.branches[0].rescaler.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MulticlassTtnModel":
        if d.get("kind") != "ttn_multiclass":
            raise ValueError(f"not a multiclass tree model: kind={d.get('kind')!r}")
        rescaler = RescaleParams.from_dict(d["rescaler"])
        branches = tuple(
            TtnModel(int(d["num_features"]), np.array(t, dtype=float), rescaler)
            for t in d["branch_thetas"]
        )
        return cls(branches)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "MulticlassTtnModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    batch_size: int = 10
    epochs: int = 40
    seed: int = 0
    train_fraction: float = 0.7

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class TrainHistory:
    """Per-epoch losses: the smoothed objective and the discrete label loss."""

    smooth_loss: np.ndarray
    discrete_loss: np.ndarray


def encode_features(model_features: int, rescaler: RescaleParams, x: np.ndarray) -> StateVector:
    """Rescale, zero-pad to the tree width, and angle-encode one vector."""
    angles = rescaler.transform(np.asarray(x, dtype=float))
    if angles.size > model_features:
        raise ValueError(
            f"vector has {angles.size} features, model takes {model_features}"
        )
    if angles.size < model_features:
        padded = np.zeros(model_features)
        padded[: angles.size] = angles
        angles = padded
    return angle_encode(angles)


def _run_tree(state: StateVector, num_features: int, thetas: np.ndarray) -> StateVector:
    blocks, output = tree_blocks(num_features)
    idx = 0
    for a, b in blocks:
        state = apply_gate(state, GateOp.ry(a, thetas[idx]))
        state = apply_gate(state, GateOp.ry(b, thetas[idx + 1]))
        state = apply_gate(state, GateOp.cnot(a, b))
        idx += 2
    return apply_gate(state, GateOp.ry(output, thetas[idx]))


def _p0_from_state(
    encoded: StateVector,
    num_features: int,
    thetas: np.ndarray,
    shots: int | None,
    rng: np.random.Generator | None,
) -> float:
    output = tree_blocks(num_features)[1]
    final = _run_tree(encoded, num_features, thetas)
    if shots is None:
        return measure_qubit_probability(final, output, 0)
    record = sample_shots(final, [output], shots, rng)
    return record.frequency("0")


def ttn_forward(
    model: TtnModel,
    x: np.ndarray,
    shots: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> float:
    """P(|0>) of the output qubit for one raw feature vector.

    ``shots=None`` gives the exact Born probability; otherwise the empirical
    |0> frequency over ``shots`` seeded circuit samples.
    """
    encoded = encode_features(model.num_features, model.rescaler, x)
    rng = as_rng(seed) if shots is not None else None
    return _p0_from_state(encoded, model.num_features, model.thetas, shots, rng)


def ttn_predict(p0: float) -> int:
    """Label 0 when P(|0>) < 0.5, label 1 otherwise (0.5 goes to 1)."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must be a probability, got {p0}")
    return 0 if p0 < 0.5 else 1


def _p0_gradient(
    encoded: StateVector, num_features: int, thetas: np.ndarray
) -> np.ndarray:
    """Parameter-shift gradient of P(|0>): [p0(t + pi/2) - p0(t - pi/2)] / 2."""
    grad = np.empty_like(thetas)
    for j in range(thetas.size):
        plus = thetas.copy()
        plus[j] += np.pi / 2.0
        minus = thetas.copy()
        minus[j] -= np.pi / 2.0
        up = _p0_from_state(encoded, num_features, plus, None, None)
        down = _p0_from_state(encoded, num_features, minus, None, None)
        grad[j] = 0.5 * (up - down)
    return grad


def _prepare_training(
    train: LabeledDataset,
) -> tuple[int, RescaleParams, list[StateVector]]:
    d = train.num_features
    num_features = 2 if d == 1 else 2 ** int(np.ceil(np.log2(d)))
    rescaler = fit_rescaler(train.features)
    encoded = [
        encode_features(num_features, rescaler, x) for x in train.features
    ]
    return num_features, rescaler, encoded


def ttn_train(
    train: LabeledDataset, config: TrainConfig = TrainConfig()
) -> tuple[TtnModel, TrainHistory]:
    """Fit the binary tree by minibatch gradient descent on sum (p0 - y)^2.

    The rescaler is fit on the given training data; angles start uniform in
    [-pi, pi] from the config seed, so identical configs give identical
    trajectories.  Returns the model and per-epoch loss curves (the smoothed
    objective plus the discrete misclassification count).
    """
    labels = np.asarray(train.labels)
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("binary training requires labels in {0, 1}")
    if config.batch_size > len(train):
        raise ValueError(
            f"batch_size {config.batch_size} exceeds training set size {len(train)}"
        )
    rng = as_rng(config.seed)
    num_features, rescaler, encoded = _prepare_training(train)
    thetas = rng.uniform(-np.pi, np.pi, size=theta_count(num_features))

    y = labels.astype(float)
    smooth_hist = np.empty(config.epochs)
    discrete_hist = np.empty(config.epochs)
    for epoch in range(config.epochs):
        order = rng.permutation(len(train))
        for start in range(0, len(train), config.batch_size):
            batch = order[start : start + config.batch_size]
            grad = np.zeros_like(thetas)
            for i in batch:
                p0 = _p0_from_state(encoded[i], num_features, thetas, None, None)
                grad += 2.0 * (p0 - y[i]) * _p0_gradient(
                    encoded[i], num_features, thetas
                )
            thetas -= config.learning_rate * grad / batch.size
        p0_all = np.array(
            [_p0_from_state(e, num_features, thetas, None, None) for e in encoded]
        )
        smooth_hist[epoch] = float(np.sum((p0_all - y) ** 2))
        discrete_hist[epoch] = float(
            np.sum((np.array([ttn_predict(p) for p in p0_all]) - y) ** 2)
        )
    model = TtnModel(num_features, thetas, rescaler)
    return model, TrainHistory(smooth_hist, discrete_hist)


def ttn_accuracy(
    model: TtnModel,
    dataset: LabeledDataset,
    shots: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> float:
    """Fraction of dataset rows whose predicted label matches."""
    rng = as_rng(seed) if shots is not None else None
    correct = 0
    for x, label in zip(dataset.features, dataset.labels):
        encoded = encode_features(model.num_features, model.rescaler, x)
        p0 = _p0_from_state(encoded, model.num_features, model.thetas, shots, rng)
        correct += ttn_predict(p0) == label
    return correct / len(dataset)


def shot_accuracy_curve(
    model: TtnModel,
    test: LabeledDataset,
    shot_counts: list[int],
    trials: int = 50,
    seed: int | np.random.Generator = 0,
) -> np.ndarray:
    """Mean accuracy when classifying from s-shot estimates, per shot count.

    Shot counts must be odd so an empirical frequency can never sit exactly
    on the 0.5 decision boundary.
    """
    for s in shot_counts:
        if s < 1 or s % 2 == 0:
            raise ValueError(f"shot counts must be odd and >= 1, got {s}")
    rng = as_rng(seed)
    encoded = [
        encode_features(model.num_features, model.rescaler, x) for x in test.features
    ]
    means = np.empty(len(shot_counts))
    for si, s in enumerate(shot_counts):
        total = 0.0
        for _ in range(trials):
            correct = 0
            for e, label in zip(encoded, test.labels):
                p0 = _p0_from_state(e, model.num_features, model.thetas, s, rng)
                correct += ttn_predict(p0) == label
            total += correct / len(test)
        means[si] = total / trials
    return means


def multiclass_forward(
    model: MulticlassTtnModel,
    x: np.ndarray,
    shots: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> np.ndarray:
    """Vector of branch P(|0>) values for one raw feature vector."""
    encoded = encode_features(model.num_features, model.branches[0].rescaler, x)
    rng = as_rng(seed) if shots is not None else None
    return np.array(
        [
            _p0_from_state(encoded, model.num_features, b.thetas, shots, rng)
            for b in model.branches
        ]
    )


def multiclass_predict(p0_values: np.ndarray) -> int:
    """Class of the largest branch probability; ties go to the smallest id."""
    return int(np.argmax(p0_values))


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def multiclass_train(
    train: LabeledDataset, config: TrainConfig = TrainConfig()
) -> tuple[MulticlassTtnModel, TrainHistory]:
    """Fit one branch per class with softmax cross-entropy over branch P(|0>).

    The gradient of -log softmax(p0)[y] with respect to each branch angle is
    (softmax - one-hot) chained through that branch's parameter-shift
    gradient.  The discrete history column counts misclassifications.
    """
    if train.class_count < 2:
        raise ValueError("multiclass training needs class_count >= 2")
    if config.batch_size > len(train):
        raise ValueError(
            f"batch_size {config.batch_size} exceeds training set size {len(train)}"
        )
    rng = as_rng(config.seed)
    num_features, rescaler, encoded = _prepare_training(train)
    k = train.class_count
    thetas = rng.uniform(-np.pi, np.pi, size=(k, theta_count(num_features)))

    smooth_hist = np.empty(config.epochs)
    discrete_hist = np.empty(config.epochs)
    for epoch in range(config.epochs):
        order = rng.permutation(len(train))
        for start in range(0, len(train), config.batch_size):
            batch = order[start : start + config.batch_size]
            grad = np.zeros_like(thetas)
            for i in batch:
                p0 = np.array(
                    [
                        _p0_from_state(encoded[i], num_features, thetas[c], None, None)
                        for c in range(k)
                    ]
                )
                delta = _softmax(p0)
                delta[train.labels[i]] -= 1.0
                for c in range(k):
                    if delta[c] == 0.0:
                        continue
                    grad[c] += delta[c] * _p0_gradient(
                        encoded[i], num_features, thetas[c]
                    )
            thetas -= config.learning_rate * grad / batch.size
        loss = 0.0
        wrong = 0
        for i, e in enumerate(encoded):
            p0 = np.array(
                [
                    _p0_from_state(e, num_features, thetas[c], None, None)
                    for c in range(k)
                ]
            )
            probs = _softmax(p0)
            loss -= float(np.log(max(probs[train.labels[i]], 1e-12)))
            wrong += multiclass_predict(p0) != train.labels[i]
        smooth_hist[epoch] = loss
        discrete_hist[epoch] = float(wrong)
    branches = tuple(TtnModel(num_features, thetas[c], rescaler) for c in range(k))
    return MulticlassTtnModel(branches), TrainHistory(smooth_hist, discrete_hist)
