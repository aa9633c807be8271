"""Quantum subroutines: SWAP-test fidelity, Euclidean distance, and
threshold-descent Grover minimization (QMA).

The SWAP-test circuit (ancilla Hadamard, qubit-wise controlled-SWAP, Hadamard)
reads the overlap of two registers off the ancilla: P(|0>) = 1/2 + F/2, where
F is the squared overlap for pure inputs (and the state-overlap trace when one
side is a subsystem of an entangled register).

The distance routine prepares |psi> = (|0,a> + |1,b>)/sqrt(2) from the
normalized inputs and |phi> = (||u|| |0> - ||v|| |1>)/sqrt(Z), Z = ||u||^2 +
||v||^2, and swap-tests |phi> against the ancilla of |psi>; then
||u - v||^2 = 2 Z (2 P(|0>) - 1).

All three operations run either in exact mode (``shots=None``, Born-rule
probabilities) or with seeded finite-shot sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qsim
from .encode import amplitude_encode
from .qsim import GateOp, StateVector, apply_gate

__all__ = [
    "FidelityEstimate",
    "QmaResult",
    "swap_test",
    "quantum_distance",
    "qma_minimize",
]


@dataclass(frozen=True)
class FidelityEstimate:
    """SWAP-test readout: ancilla-|0> probability and the implied fidelity.

    ``raw_fidelity`` is exactly 2*p0_hat - 1 and may dip below zero under shot
    noise; ``fidelity_hat`` is its clamp into [0, 1] for downstream use.
    """

    p0_hat: float
    raw_fidelity: float
    fidelity_hat: float
    shots_used: int
    std_error: float


def _finish_swap_test(
    state: StateVector,
    swap_pairs: list[tuple[int, int]],
    shots: int | None,
    seed: int | np.random.Generator | None,
) -> FidelityEstimate:
    """Run ancilla-H, controlled-SWAPs, H on qubit 0 and read the ancilla."""
    state = apply_gate(state, GateOp.h(0))
    for a, b in swap_pairs:
        state = apply_gate(state, GateOp.cswap(0, a, b))
    state = apply_gate(state, GateOp.h(0))

    if shots is None:
        p0 = qsim.measure_qubit_probability(state, 0, 0)
        shots_used, std_error = 0, 0.0
    else:
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        record = qsim.sample_shots(state, [0], shots, seed)
        p0 = record.frequency("0")
        shots_used = shots
        std_error = float(np.sqrt(p0 * (1.0 - p0) / shots))

    raw = 2.0 * p0 - 1.0
    return FidelityEstimate(
        p0_hat=p0,
        raw_fidelity=raw,
        fidelity_hat=float(np.clip(raw, 0.0, 1.0)),
        shots_used=shots_used,
        std_error=std_error,
    )


def swap_test(
    a: StateVector,
    b: StateVector,
    shots: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> FidelityEstimate:
    """Estimate |<a|b>|^2 from the SWAP-test circuit on registers a and b.

    ``shots=None`` returns the exact ancilla probability; otherwise p0_hat is
    the empirical |0> frequency over ``shots`` seeded samples.
    """
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"register sizes differ: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    n = a.num_qubits
    combined = StateVector.zero(1).tensor(a).tensor(b)
    pairs = [(1 + i, 1 + n + i) for i in range(n)]
    return _finish_swap_test(combined, pairs, shots, seed)


def quantum_distance(
    u: np.ndarray,
    v: np.ndarray,
    shots: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> float:
    """Squared Euclidean distance ||u - v||^2 via the two-state SWAP-test.

    Negative shot-noise fidelities are clamped to zero, so the result is
    always >= 0; exact mode (``shots=None``) reproduces the brute-force value.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        raise ValueError("quantum_distance requires nonzero input vectors")
    z = norm_u**2 + norm_v**2

    ket_a = amplitude_encode(u)
    ket_b = amplitude_encode(v)
    # |psi> = (|0,a> + |1,b>)/sqrt(2): the data ancilla is the leading qubit.
    psi = np.concatenate([ket_a.amplitudes, ket_b.amplitudes]) / np.sqrt(2.0)
    phi = np.array([norm_u, -norm_v], dtype=complex) / np.sqrt(z)

    # Register layout: control (qubit 0), phi (qubit 1), psi (qubits 2..).
    combined = StateVector.zero(1).tensor(StateVector(1, phi))
    combined = combined.tensor(StateVector(1 + ket_a.num_qubits, psi))
    estimate = _finish_swap_test(combined, [(1, 2)], shots, seed)
    return 2.0 * z * estimate.fidelity_hat


@dataclass(frozen=True)
class QmaResult:
    """Outcome of one threshold-descent minimization run."""

    argmin_index: int
    min_value: float
    threshold_history: list[float]
    oracle_calls: int


def _grover_measure(
    values: np.ndarray,
    threshold: float,
    iterations: int,
    rng: np.random.Generator,
) -> int:
    """Amplify {x : f(x) < threshold} for ``iterations`` rounds, then measure."""
    n_states = values.size
    marked = values < threshold
    amps = np.full(n_states, 1.0 / np.sqrt(n_states))
    for _ in range(iterations):
        amps[marked] *= -1.0  # oracle phase flip
        amps = 2.0 * amps.mean() - amps  # inversion about the mean
    probs = amps**2
    return int(rng.choice(n_states, p=probs / probs.sum()))


def qma_minimize(
    objective: np.ndarray,
    seed: int | np.random.Generator | None = None,
    max_rounds: int | None = None,
    fail_limit: int = 20,
) -> QmaResult:
    """Locate the minimum of a value table by Grover search under a
    descending threshold.

    Starts from a random entry, repeatedly amplifies the set of entries below
    the current threshold with a randomly drawn number of Grover iterations,
    measures, and lowers the threshold whenever the measured entry improves
    it.  The iteration-count cap grows by 8/7 per unsuccessful round up to
    ceil(sqrt(N)).  Stops when no entry beats the threshold, after
    ``fail_limit`` consecutive non-improving rounds, or at ``max_rounds``
    (default 3*ceil(sqrt(N))).  The default fail limit of 20 leaves room for
    the cap to grow to sqrt(N) before the run is declared stuck; smaller
    limits abort the endgame where the marked set is a single entry.

    Entries equal to +inf are treated as masked: never selectable and never
    marked.  The table is zero-padded (with +inf) to a power-of-two size so
    any length works.
    """
    values = np.asarray(objective, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("objective must be a nonempty 1-D value table")
    if np.any(np.isnan(values)):
        raise ValueError("objective contains NaN")
    finite = np.flatnonzero(np.isfinite(values))
    if finite.size == 0:
        raise ValueError("objective has no finite entries")

    n_qubits = max(1, int(np.ceil(np.log2(values.size))))
    n_states = 2**n_qubits
    table = np.full(n_states, np.inf)
    table[: values.size] = values

    rng = qsim.as_rng(seed)
    sqrt_n = int(np.ceil(np.sqrt(n_states)))
    if max_rounds is None:
        max_rounds = 3 * sqrt_n

    best = int(rng.choice(finite))
    threshold = float(table[best])
    history = [threshold]
    oracle_calls = 1  # evaluating f at the start point
    cap = 1.0
    consecutive_fails = 0

    for _ in range(max_rounds):
        if not np.any(table < threshold):
            break  # threshold is already the minimum
        r = int(rng.integers(0, int(cap) + 1))
        measured = _grover_measure(table, threshold, r, rng)
        oracle_calls += r + 1  # r Grover oracle calls + one candidate evaluation
        if table[measured] < threshold:
            best = measured
            threshold = float(table[measured])
            history.append(threshold)
            consecutive_fails = 0
        else:
            consecutive_fails += 1
            cap = min(cap * 8.0 / 7.0, float(sqrt_n))
            if consecutive_fails >= fail_limit:
                break

    return QmaResult(
        argmin_index=best,
        min_value=float(table[best]),
        threshold_history=history,
        oracle_calls=oracle_calls,
    )
