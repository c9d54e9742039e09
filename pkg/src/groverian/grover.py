"""State-vector simulation of Grover's search.

The iterate is ``D O`` with the phase oracle ``O = I - 2 sum_m |m><m|`` and the
inversion about the mean ``D = 2|eta><eta| - I``, where ``|eta>`` is the
uniform superposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import PureState, StateError

MAX_QUBITS = 12


@dataclass(frozen=True)
class Oracle:
    num_qubits: int
    marked: frozenset

    def __post_init__(self):
        marked = frozenset(int(m) for m in self.marked)
        dim = 2**self.num_qubits
        if not marked:
            raise StateError("oracle needs at least one marked index")
        if len(marked) >= dim:
            raise StateError("oracle may not mark every basis state")
        bad = sorted(m for m in marked if not 0 <= m < dim)
        if bad:
            raise StateError(f"marked indices {bad} out of range for {self.num_qubits} qubits")
        object.__setattr__(self, "marked", marked)

    @property
    def indices(self) -> np.ndarray:
        return np.array(sorted(self.marked), dtype=int)


@dataclass(frozen=True)
class GroverRun:
    iterations: int
    final_state: PureState
    success_probability: float


def uniform_state(n: int) -> PureState:
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"qubit count {n} outside 1..{MAX_QUBITS}")
    dim = 2**n
    return PureState(np.full(dim, 1 / math.sqrt(dim), dtype=complex))


def _check(state: PureState, oracle: Oracle):
    if state.num_qubits != oracle.num_qubits:
        raise StateError(
            f"state has {state.num_qubits} qubits but oracle acts on {oracle.num_qubits}"
        )


def _oracle_vec(vec: np.ndarray, indices: np.ndarray) -> np.ndarray:
    out = vec.copy()
    out[indices] *= -1
    return out


def _diffusion_vec(vec: np.ndarray) -> np.ndarray:
    return 2 * vec.mean() - vec


def oracle_apply(state: PureState, oracle: Oracle) -> PureState:
    _check(state, oracle)
    return PureState(_oracle_vec(state.amplitudes, oracle.indices))


def diffusion_apply(state: PureState) -> PureState:
    """Inversion about the mean, ``(2|eta><eta| - I)|state>``."""
    return PureState.normalized(_diffusion_vec(state.amplitudes))


def success_probability(state: PureState, oracle: Oracle) -> float:
    _check(state, oracle)
    return float(np.sum(np.abs(state.amplitudes[oracle.indices]) ** 2))


def optimal_iterations(n: int, num_marked: int) -> int:
    """Number of Grover iterations that maximizes success from ``|eta>``.

    The success probability after ``k`` steps is ``sin^2((2k+1) theta)`` with
    ``sin(theta) = sqrt(M/N)``; the best integer ``k`` is one of the two
    neighbours of ``pi/(4 theta) - 1/2``. Ties go to the smaller ``k``.
    """
    dim = 2**n
    if not 1 <= num_marked < dim:
        raise StateError(f"num_marked={num_marked} must lie in [1, {dim})")
    theta = math.asin(math.sqrt(num_marked / dim))
    ideal = math.pi / (4 * theta) - 0.5
    candidates = {max(0, math.floor(ideal)), max(0, math.ceil(ideal))}
    return max(sorted(candidates), key=lambda k: math.sin((2 * k + 1) * theta) ** 2)


def grover_run(initial: PureState, oracle: Oracle, iterations: int | None = None) -> GroverRun:
    """Apply ``iterations`` Grover steps (default: optimal for the oracle) to ``initial``."""
    _check(initial, oracle)
    if iterations is None:
        iterations = optimal_iterations(oracle.num_qubits, len(oracle.marked))
    if iterations < 0:
        raise StateError("iterations must be non-negative")
    idx = oracle.indices
    vec = initial.amplitudes.copy()
    for _ in range(iterations):
        vec = _diffusion_vec(_oracle_vec(vec, idx))
    final = PureState.normalized(vec)
    return GroverRun(iterations, final, success_probability(final, oracle))


def grover_adjoint(state: PureState, oracle: Oracle, iterations: int) -> PureState:
    """Apply ``U_G^dagger = (O D)^k``; both factors are Hermitian involutions."""
    _check(state, oracle)
    idx = oracle.indices
    vec = state.amplitudes.copy()
    for _ in range(iterations):
        vec = _oracle_vec(_diffusion_vec(vec), idx)
    return PureState.normalized(vec)


def predicted_success(psi: PureState) -> float:
    """Leading-order success probability ``|<eta|psi>|^2`` for initial state ``psi``."""
    amps = psi.amplitudes
    return float(abs(amps.sum()) ** 2 / amps.size)


def success_scan(n: int, num_marked: int, max_iterations: int) -> np.ndarray:
    """Success probability from ``|eta>`` for k = 0..max_iterations, by direct simulation."""
    oracle = Oracle(n, frozenset(range(num_marked)))
    idx = oracle.indices
    vec = uniform_state(n).amplitudes.copy()
    out = []
    for _ in range(max_iterations + 1):
        out.append(float(np.sum(np.abs(vec[idx]) ** 2)))
        vec = _diffusion_vec(_oracle_vec(vec, idx))
    return np.array(out)
