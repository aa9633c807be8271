"""Classical-to-quantum feature encodings.

Two routes from a real feature vector to a register state:

* amplitude encoding — the L2-normalized entries become the amplitudes of a
  log2(d)-qubit state (d zero-padded to a power of two), so d numbers fit in
  log2(d) qubits;
* angle encoding — one qubit per feature, cos(x)|0> + sin(x)|1>, after an
  affine rescale of each feature into [0, pi/2].

The rescaler is fit on training data only and clips out-of-range values so
that test vectors always land in the valid angle range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qsim import StateVector

__all__ = [
    "RescaleParams",
    "amplitude_encode",
    "fit_rescaler",
    "angle_encode",
    "pad_to_power_of_two",
]

HALF_PI = np.pi / 2.0


def _as_feature_vector(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D feature vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("feature vector contains non-finite values")
    return v


def pad_to_power_of_two(values: np.ndarray) -> np.ndarray:
    """Zero-pad a vector to length max(2, next power of two)."""
    v = _as_feature_vector(values)
    padded = 2 if v.size == 1 else 2 ** int(np.ceil(np.log2(v.size)))
    if padded == v.size:
        return v
    out = np.zeros(padded, dtype=float)
    out[: v.size] = v
    return out


@dataclass(frozen=True)
class RescaleParams:
    """Per-feature affine map of the observed [min, max] onto [0, pi/2]."""

    feature_min: np.ndarray
    feature_max: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.feature_min, dtype=float)
        hi = np.asarray(self.feature_max, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("feature_min and feature_max must be matching 1-D arrays")
        if np.any(hi < lo):
            raise ValueError("feature_max must be >= feature_min for every feature")
        object.__setattr__(self, "feature_min", lo)
        object.__setattr__(self, "feature_max", hi)

    @property
    def constant_features(self) -> np.ndarray:
        """Indices where max == min; those map to the pi/4 midpoint."""
        return np.flatnonzero(self.feature_max == self.feature_min)

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Rescale one vector into [0, pi/2], clipping out-of-range entries."""
        v = _as_feature_vector(values)
        if v.size != self.feature_min.size:
            raise ValueError(
                f"vector has {v.size} features, rescaler was fit on "
                f"{self.feature_min.size}"
            )
        span = self.feature_max - self.feature_min
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = (v - self.feature_min) / span * HALF_PI
        scaled[span == 0] = np.pi / 4.0
        return np.clip(scaled, 0.0, HALF_PI)

    def to_dict(self) -> dict:
        return {
            "feature_min": self.feature_min.tolist(),
            "feature_max": self.feature_max.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RescaleParams":
        return cls(np.array(d["feature_min"]), np.array(d["feature_max"]))


def amplitude_encode(values: np.ndarray) -> StateVector:
    """Encode a nonzero real vector as the amplitudes of a quantum state.

    The vector is zero-padded to the next power of two and L2-normalized, so
    the state is invariant under positive rescaling of the input.
    """
    v = _as_feature_vector(values)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot amplitude-encode the zero vector")
    padded = pad_to_power_of_two(v / norm)
    return StateVector.from_amplitudes(padded.astype(complex))


def fit_rescaler(dataset: np.ndarray) -> RescaleParams:
    """Fit per-feature min/max on a (rows, features) training array."""
    data = np.asarray(dataset, dtype=float)
    if data.ndim != 2 or data.shape[0] < 1:
        raise ValueError(f"expected a nonempty (rows, features) array, got {data.shape}")
    if not np.all(np.isfinite(data)):
        raise ValueError("dataset contains non-finite values")
    return RescaleParams(data.min(axis=0), data.max(axis=0))


def angle_encode(angles: np.ndarray) -> StateVector:
    """Product state over d qubits: qubit i carries cos(x_i)|0> + sin(x_i)|1>.

    Inputs must already be rescaled into [0, pi/2].
    """
    x = _as_feature_vector(angles)
    if np.any(x < 0.0) or np.any(x > HALF_PI):
        raise ValueError("angle-encoding inputs must lie in [0, pi/2]; rescale first")
    amps = np.array([1.0 + 0.0j])
    for xi in x:
        amps = np.kron(amps, np.array([np.cos(xi), np.sin(xi)], dtype=complex))
    return StateVector(x.size, amps)
