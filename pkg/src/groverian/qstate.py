"""Dense linear algebra for multi-qubit pure states and density matrices.

Qubit 0 is the most significant bit of a computational-basis index, so the
amplitude of ``|x_0 x_1 ... x_{n-1}>`` sits at ``int("x_0 x_1 ...", 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

NORM_TOL = 1e-10
UNITARY_TOL = 1e-9
EIG_CLIP = 1e-8


class StateError(ValueError):
    """Raised when an array does not describe a valid state or operator."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise StateError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector over ``num_qubits`` qubits."""

    amplitudes: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise StateError("amplitudes must be a one-dimensional array")
        n = _qubits_for(amps.size)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state norm squared is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "num_qubits", n)

    @classmethod
    def normalized(cls, vector) -> "PureState":
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        return cls(vector / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix over ``num_qubits`` qubits."""

    matrix: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise StateError(f"density matrix must be square, got shape {mat.shape}")
        n = _qubits_for(mat.shape[0])
        herm = np.linalg.norm(mat - mat.conj().T)
        if herm > NORM_TOL:
            raise StateError(f"matrix is not Hermitian (deviation {herm:.3e})")
        trace = np.trace(mat).real
        if abs(trace - 1.0) > NORM_TOL:
            raise StateError(f"trace is {trace!r}, expected 1")
        lowest = np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]
        if lowest < -NORM_TOL:
            raise StateError(f"matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "num_qubits", n)

    @classmethod
    def from_unnormalized(cls, matrix) -> "DensityMatrix":
        """Hermitize and rescale to unit trace before validating."""
        matrix = np.asarray(matrix, dtype=complex)
        matrix = (matrix + matrix.conj().T) / 2
        return cls(matrix / np.trace(matrix).real)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class UnitaryMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise StateError(f"unitary must be square, got shape {mat.shape}")
        _qubits_for(mat.shape[0])
        residual = np.linalg.norm(mat @ mat.conj().T - np.eye(mat.shape[0]))
        if residual > UNITARY_TOL:
            raise StateError(f"matrix is not unitary (residual {residual:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix.conj().T)

    def apply(self, state: PureState) -> PureState:
        if state.dim != self.dim:
            raise StateError(f"unitary of dim {self.dim} applied to state of dim {state.dim}")
        return PureState.normalized(self.matrix @ state.amplitudes)


def _check_same_dim(a, b):
    if a.dim != b.dim:
        raise StateError(f"dimension mismatch: {a.dim} vs {b.dim}")


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Return ``a ⊗ b``; the qubits of ``a`` become the high-order block."""
    return PureState.normalized(np.kron(a.amplitudes, b.amplitudes))


def overlap(phi: PureState, psi: PureState) -> complex:
    """Inner product ``<phi|psi>``, conjugate-linear in ``phi``."""
    _check_same_dim(phi, psi)
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def equal_up_to_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """True if ``a = e^{i alpha} b`` for some real alpha, within ``tol`` in norm."""
    _check_same_dim(a, b)
    inner = np.vdot(b.amplitudes, a.amplitudes)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return bool(np.linalg.norm(a.amplitudes - phase * b.amplitudes) <= tol)


def density_of(psi: PureState) -> DensityMatrix:
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every qubit not listed in ``keep``.

    ``keep`` holds qubit indices (0 = most significant). The kept qubits
    retain their relative order.
    """
    n = rho.num_qubits
    keep = [int(q) for q in keep]
    if not keep or len(set(keep)) != len(keep) or any(q < 0 or q >= n for q in keep):
        raise StateError(f"invalid qubit selector {keep!r} for {n} qubits")
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    tensor = rho.matrix.reshape((2,) * (2 * n))
    # axes 0..n-1 are row qubits, n..2n-1 column qubits
    for offset, q in enumerate(traced):
        axis = q - offset
        remaining = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + remaining)
    k = len(keep)
    return DensityMatrix(tensor.reshape(2**k, 2**k))


def _psd_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    herm = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(herm)
    if values[0] < -EIG_CLIP:
        raise StateError(f"matrix is not positive semidefinite (eigenvalue {values[0]:.3e})")
    return np.clip(values, 0.0, None), vectors


def sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD array via diagonalization.

    Eigenvalues below ``dim * eps * max_eigenvalue`` are treated as exact
    zeros so rank-deficient inputs do not pick up ``sqrt(eps)``-sized noise.
    """
    values, vectors = _psd_eigh(np.asarray(matrix, dtype=complex))
    cutoff = len(values) * np.finfo(float).eps * max(values[-1], 0.0)
    values = np.where(values > cutoff, values, 0.0)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def matrix_sqrt(rho: DensityMatrix) -> np.ndarray:
    """Hermitian PSD square root of ``rho``.

    Eigenvalues in ``[-1e-8, 0)`` are clipped to zero; anything more negative
    raises :class:`StateError`.
    """
    return sqrt_psd(rho.matrix)


def trace_norm(matrix) -> float:
    """Sum of the singular values of a square matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StateError(f"trace norm needs a square matrix, got shape {matrix.shape}")
    return float(np.linalg.svd(matrix, compute_uv=False).sum())


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Squared Uhlmann fidelity ``(Tr|sqrt(rho) sqrt(sigma)|)^2``.

    Uses the squared convention, so two pure states give ``|<phi|psi>|^2``.
    """
    _check_same_dim(rho, sigma)
    value = trace_norm(matrix_sqrt(rho) @ matrix_sqrt(sigma)) ** 2
    return float(min(max(value, 0.0), 1.0))


def basis_state(index: int, num_qubits: int) -> PureState:
    dim = 2**num_qubits
    if not 0 <= index < dim:
        raise StateError(f"basis index {index} out of range for {num_qubits} qubits")
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return PureState(vec)


def ghz_state(num_qubits: int) -> PureState:
    vec = np.zeros(2**num_qubits, dtype=complex)
    vec[0] = vec[-1] = 1 / np.sqrt(2)
    return PureState(vec)


def w_state(num_qubits: int) -> PureState:
    vec = np.zeros(2**num_qubits, dtype=complex)
    vec[[2**k for k in range(num_qubits)]] = 1 / np.sqrt(num_qubits)
    return PureState(vec)


def bell_state() -> PureState:
    """``(|00> + |11>)/sqrt(2)``."""
    return ghz_state(2)


def random_pure_state(num_qubits: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    dim = 2**num_qubits
    return PureState.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_density_matrix(
    num_qubits: int, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Random density matrix ``G G^dagger / Tr`` with a Ginibre ``G`` of the given rank."""
    dim = 2**num_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return DensityMatrix.from_unnormalized(g @ g.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryMatrix:
    return UnitaryMatrix(unitary_group.rvs(dim, random_state=rng))


def kron_all(matrices: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in matrices:
        out = np.kron(out, m)
    return out


def apply_local(state: PureState, unitaries: Sequence[np.ndarray]) -> PureState:
    """Apply one 2x2 matrix per qubit, ``(U_0 ⊗ ... ⊗ U_{n-1}) |state>``."""
    n = state.num_qubits
    if len(unitaries) != n:
        raise StateError(f"expected {n} single-qubit operators, got {len(unitaries)}")
    tensor = state.amplitudes.reshape((2,) * n)
    for q, u in enumerate(unitaries):
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [q])), 0, q)
    return PureState.normalized(tensor.reshape(-1))
