"""Exact pure-state simulator plus a small single-qubit density-matrix engine.

State vectors are dense complex arrays over the 2**n computational basis
states.  Qubit 0 is the most significant bit of the basis-state index, so a
circuit diagram read top to bottom matches the bit string read left to right:
for ``n`` qubits, qubit ``q`` of basis index ``i`` is ``(i >> (n - 1 - q)) & 1``.

Everything here is deterministic given a seed.  Sampling routines accept
either an integer seed or a ``numpy.random.Generator`` so that experiments can
thread one master generator through all of their draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StateVector",
    "GateOp",
    "DensityMatrix",
    "MeasurementRecord",
    "apply_gate",
    "apply_unitary",
    "measure_qubit_probability",
    "sample_shots",
    "apply_kraus",
    "random_state",
]

NORM_ATOL = 1e-10

# 2x2 / 4x4 building blocks
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def _ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def as_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Coerce an int seed (or an existing generator) into a Generator."""
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class StateVector:
    """Pure n-qubit register: 2**num_qubits complex amplitudes, unit norm."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be >= 1, got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} "
                f"qubits, got shape {amps.shape}"
            )
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm^2 = {norm2!r} is not 1 within {NORM_ATOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        """|0...0> on ``num_qubits`` qubits."""
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(np.log2(amps.size)))
        if amps.size < 2 or 2**n != amps.size:
            raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
        return cls(n, amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        """Register composition; self occupies the high (leading) qubits."""
        return StateVector(
            self.num_qubits + other.num_qubits,
            np.kron(self.amplitudes, other.amplitudes),
        )

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class GateOp:
    """One circuit operation: a named gate, its target qubits, optional controls."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    _N_TARGETS = {"H": 1, "X": 1, "RY": 1, "U3": 1, "CNOT": 1, "CSWAP": 2}
    _N_PARAMS = {"H": 0, "X": 0, "RY": 1, "U3": 3, "CNOT": 0, "CSWAP": 0}

    def __post_init__(self) -> None:
        if self.kind not in self._N_TARGETS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != self._N_TARGETS[self.kind]:
            raise ValueError(f"{self.kind} takes {self._N_TARGETS[self.kind]} target(s)")
        if len(self.params) != self._N_PARAMS[self.kind]:
            raise ValueError(f"{self.kind} takes {self._N_PARAMS[self.kind]} parameter(s)")
        if self.kind in ("CNOT", "CSWAP") and len(self.controls) < 1:
            raise ValueError(f"{self.kind} requires at least one control qubit")
        touched = self.targets + self.controls
        if len(set(touched)) != len(touched):
            raise ValueError(f"gate indices must be distinct, got {touched}")

    @classmethod
    def h(cls, qubit: int) -> "GateOp":
        return cls("H", (qubit,))

    @classmethod
    def x(cls, qubit: int) -> "GateOp":
        return cls("X", (qubit,))

    @classmethod
    def ry(cls, qubit: int, theta: float) -> "GateOp":
        return cls("RY", (qubit,), params=(theta,))

    @classmethod
    def u3(cls, qubit: int, theta: float, phi: float, lam: float) -> "GateOp":
        return cls("U3", (qubit,), params=(theta, phi, lam))

    @classmethod
    def cnot(cls, control: int, target: int) -> "GateOp":
        return cls("CNOT", (target,), controls=(control,))

    @classmethod
    def cswap(cls, control: int, a: int, b: int) -> "GateOp":
        return cls("CSWAP", (a, b), controls=(control,))

    def matrix(self) -> np.ndarray:
        """Base unitary on the target qubits (controls handled by apply_gate)."""
        if self.kind == "H":
            return _H
        if self.kind == "X" or self.kind == "CNOT":
            return _X
        if self.kind == "RY":
            return _ry_matrix(*self.params)
        if self.kind == "U3":
            return _u3_matrix(*self.params)
        return _SWAP  # CSWAP


@dataclass(frozen=True)
class DensityMatrix:
    """Single-qubit mixed state: Hermitian, unit trace, positive semidefinite."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.entries, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(rho).real - 1.0) > 1e-10 or abs(np.trace(rho).imag) > 1e-10:
            raise ValueError(f"density matrix trace {np.trace(rho)!r} is not 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise ValueError("density matrix has an eigenvalue below -1e-10")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_ket(cls, ket: np.ndarray) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex)
        return cls(np.outer(ket, ket.conj()))


@dataclass(frozen=True)
class MeasurementRecord:
    """Counts of observed bit-strings; counts sum to total_shots."""

    outcome_counts: dict[str, int]
    total_shots: int

    def __post_init__(self) -> None:
        total = sum(self.outcome_counts.values())
        if total != self.total_shots:
            raise ValueError(
                f"counts sum to {total}, expected total_shots={self.total_shots}"
            )
        if any(c < 0 for c in self.outcome_counts.values()):
            raise ValueError("negative count")

    def frequency(self, outcome: str) -> float:
        return self.outcome_counts.get(outcome, 0) / self.total_shots


def _check_indices(state: StateVector, qubits: tuple[int, ...] | list[int]) -> None:
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise IndexError(
                f"qubit index {q} out of range for a {state.num_qubits}-qubit state"
            )


def apply_unitary(
    state: StateVector,
    matrix: np.ndarray,
    targets: tuple[int, ...],
    controls: tuple[int, ...] = (),
) -> StateVector:
    """Apply a (controlled) k-qubit unitary to the given target qubits.

    The matrix acts on the targets in the order listed; with controls present
    it is applied only on the subspace where every control qubit is |1>.
    """
    _check_indices(state, tuple(targets) + tuple(controls))
    k = len(targets)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2**k, 2**k):
        raise ValueError(f"matrix shape {matrix.shape} does not act on {k} qubit(s)")
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(2**k))) > 1e-10:
        raise ValueError("matrix is not unitary within 1e-10")

    n = state.num_qubits
    amps = state.amplitudes.copy()
    tensor = amps.reshape((2,) * n)

    # Restrict to the all-controls-on block; integer indexing drops those axes.
    index: list[object] = [slice(None)] * n
    for c in controls:
        index[c] = 1
    block = tensor[tuple(index)]

    # Axis positions of the targets after the control axes were dropped.
    positions = [t - sum(1 for c in controls if c < t) for t in targets]
    moved = np.moveaxis(block, positions, range(k))
    shape = moved.shape
    moved[...] = (matrix @ moved.reshape(2**k, -1)).reshape(shape)
    return StateVector(n, amps)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return U|psi> for one gate operation; the norm is preserved."""
    return apply_unitary(state, gate.matrix(), gate.targets, gate.controls)


def measure_qubit_probability(state: StateVector, qubit: int, outcome: int) -> float:
    """Exact Born-rule probability of reading ``outcome`` on one qubit."""
    _check_indices(state, (qubit,))
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    n = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * n)
    sub = np.take(tensor, outcome, axis=qubit)
    return float(np.sum(np.abs(sub) ** 2))


def _marginal_probabilities(state: StateVector, qubits: list[int]) -> np.ndarray:
    """Joint outcome distribution of the listed qubits, indexed by bit-string value."""
    n = state.num_qubits
    k = len(qubits)
    tensor = state.amplitudes.reshape((2,) * n)
    moved = np.moveaxis(tensor, qubits, range(k))
    probs = np.sum(np.abs(moved.reshape(2**k, -1)) ** 2, axis=1)
    # Guard against float drift; sampling needs an exact simplex point.
    return probs / probs.sum()


def sample_shots(
    state: StateVector,
    qubits: list[int],
    shots: int,
    seed: int | np.random.Generator,
) -> MeasurementRecord:
    """Draw i.i.d. computational-basis outcomes of the listed qubits.

    The returned record maps bit-strings (one character per listed qubit, in
    list order) to counts; outcomes that never occurred are omitted.
    Deterministic for a fixed seed.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    _check_indices(state, tuple(qubits))
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit in {qubits}")
    rng = as_rng(seed)
    probs = _marginal_probabilities(state, list(qubits))
    counts = rng.multinomial(shots, probs)
    k = len(qubits)
    outcome_counts = {
        format(i, f"0{k}b"): int(c) for i, c in enumerate(counts) if c > 0
    }
    return MeasurementRecord(outcome_counts, shots)


def apply_kraus(rho: DensityMatrix, kraus_ops: list[np.ndarray]) -> DensityMatrix:
    """Apply a trace-preserving channel given by its Kraus operators."""
    ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
    completeness = sum(k.conj().T @ k for k in ops)
    if np.max(np.abs(completeness - np.eye(2))) > 1e-10:
        raise ValueError("Kraus operators are not trace preserving (sum K^dag K != I)")
    out = sum(k @ rho.entries @ k.conj().T for k in ops)
    # Trim float dust so the DensityMatrix invariants hold exactly enough.
    out = (out + out.conj().T) / 2.0
    return DensityMatrix(out)


def random_state(
    num_qubits: int, seed: int | np.random.Generator
) -> StateVector:
    """Haar-ish random pure state (normalized complex Gaussian amplitudes)."""
    rng = as_rng(seed)
    amps = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(num_qubits, amps)
