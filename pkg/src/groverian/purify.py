"""Purifications on a doubled register and the Uhlmann alignment between them.

A purification of an ``n``-qubit state lives on ``2n`` qubits: the reference
block ``R`` is the high-order half of the index, the original system ``Q`` the
low-order half. Reshaping a ``2n``-qubit amplitude vector to a ``d x d``
matrix ``Psi[r, q]`` is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mixed_measure import SeparableEnsemble, ensemble_to_density
from .qstate import (
    DensityMatrix,
    PureState,
    StateError,
    UnitaryMatrix,
    density_of,
    partial_trace,
    sqrt_psd,
)

GRAM_SCHMIDT_SKIP = 1e-8


@dataclass(frozen=True)
class Purification:
    source: DensityMatrix
    state: PureState

    def reduced(self) -> DensityMatrix:
        """Trace out the reference block."""
        n = self.source.num_qubits
        return partial_trace(density_of(self.state), range(n, 2 * n))


def _as_matrix(u, dim: int, name: str) -> np.ndarray:
    if u is None:
        return np.eye(dim)
    mat = u.matrix if isinstance(u, UnitaryMatrix) else np.asarray(u, dtype=complex)
    if mat.shape != (dim, dim):
        raise StateError(f"{name} must be {dim}x{dim}, got {mat.shape}")
    return mat


def purify(
    rho: DensityMatrix, u_r: UnitaryMatrix | None = None, u_q: UnitaryMatrix | None = None
) -> Purification:
    """``(U_R ⊗ sqrt(rho) U_Q) sum_i |i_R>|i_Q>``; identity unitaries by default.

    Since ``(A ⊗ B) sum_i |i>|i>`` reshapes to ``A B^T``, the amplitude matrix
    is ``U_R (sqrt(rho) U_Q)^T``. Its ``Q`` marginal is ``rho`` for every
    choice of ``U_R`` and ``U_Q``.
    """
    dim = rho.dim
    ur = _as_matrix(u_r, dim, "U_R")
    uq = _as_matrix(u_q, dim, "U_Q")
    psi = ur @ (sqrt_psd(rho.matrix) @ uq).T
    return Purification(rho, PureState.normalized(psi.reshape(-1)))


def ensemble_purification(e: SeparableEnsemble) -> Purification:
    """``sum_mu sqrt(P_mu) |mu_R> ⊗ |pi_mu>`` for an ensemble of at most ``2^n`` terms."""
    dim = 2**e.num_qubits
    if e.num_terms > dim:
        raise StateError(
            f"{e.num_terms} terms do not fit a {e.num_qubits}-qubit reference register"
        )
    psi = np.zeros((dim, dim), dtype=complex)
    psi[: e.num_terms] = np.sqrt(e.weights)[:, None] * e.product_vectors()
    return Purification(ensemble_to_density(e), PureState.normalized(psi.reshape(-1)))


def hadamard_matrix(total_qubits: int) -> np.ndarray:
    """``H^{⊗ total_qubits}``; column ``i`` is ``|eta_i>``."""
    idx = np.arange(2**total_qubits)
    parity = np.zeros((idx.size, idx.size), dtype=int)
    anded = idx[:, None] & idx[None, :]
    for b in range(total_qubits):
        parity ^= (anded >> b) & 1
    return (1 - 2 * parity) / np.sqrt(idx.size)


def hadamard_basis_state(i: int, total_qubits: int) -> PureState:
    """``|eta_i> = H^{⊗ total_qubits} |i>``, amplitude ``(-1)^{popcount(i & j)} / sqrt(N)``."""
    dim = 2**total_qubits
    if not 0 <= i < dim:
        raise StateError(f"index {i} out of range for {total_qubits} qubits")
    j = np.arange(dim)
    signs = np.array([1 - 2 * (bin(v).count("1") & 1) for v in (i & j)])
    return PureState(signs / np.sqrt(dim) + 0j)


def _gram_schmidt_matrix(phi0: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis whose first column is ``phi0``.

    Candidates after ``phi0`` are the computational basis vectors in order;
    one whose residual after projection is below 1e-8 is skipped. Each
    projection is applied twice for numerical orthogonality.
    """
    dim = phi0.size
    basis = np.empty((dim, dim), dtype=complex)
    basis[:, 0] = phi0
    filled = 1
    for j in range(dim):
        if filled == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[j] = 1.0
        for _ in range(2):
            q = basis[:, :filled]
            v = v - q @ (q.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm < GRAM_SCHMIDT_SKIP:
            continue
        basis[:, filled] = v / norm
        filled += 1
    if filled != dim:
        raise StateError("Gram-Schmidt completion ran out of candidates")
    return basis


def gram_schmidt_complete(phi0: PureState) -> list[PureState]:
    basis = _gram_schmidt_matrix(phi0.amplitudes)
    return [PureState.normalized(col) for col in basis.T]


def build_u_phi(phi: PureState) -> UnitaryMatrix:
    """``U_phi`` with ``U_phi^dagger = sum_i |phi_i><eta_i|``, so ``U_phi^dagger |eta> = |phi>``."""
    basis = _gram_schmidt_matrix(phi.amplitudes)
    hadamard = hadamard_matrix(phi.num_qubits)
    # hadamard is real symmetric, so <eta_i| is row i of it
    return UnitaryMatrix(hadamard @ basis.conj().T)


def _split(state: PureState) -> np.ndarray:
    dim = int(round(np.sqrt(state.dim)))
    if dim * dim != state.dim:
        raise StateError("state does not span an even number of qubits")
    return state.amplitudes.reshape(dim, dim)


def cross_overlap(phi: PureState, psi: PureState) -> np.ndarray:
    """``C[r', r] = sum_q conj(Phi[r', q]) Psi[r, q]``.

    For a reference unitary ``V``, ``<(V ⊗ I) phi | psi> = Tr(conj(V) C)``.
    """
    if phi.dim != psi.dim:
        raise StateError(f"dimension mismatch: {phi.dim} vs {psi.dim}")
    return _split(phi).conj() @ _split(psi).T


def align_reference(phi: PureState, psi: PureState) -> PureState:
    """Rotate the reference block of ``phi`` to maximize ``|<phi|psi>|``.

    With ``C = U S W^dagger`` the optimum is ``conj(V) = W U^dagger`` and the
    overlap becomes the trace norm of ``C``.
    """
    c = cross_overlap(phi, psi)
    u, _, wh = np.linalg.svd(c)
    v = (wh.conj().T @ u.conj().T).conj()
    return PureState.normalized((v @ _split(phi)).reshape(-1))


def uhlmann_max_overlap(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``max |<phi|psi>|^2`` over purifications ``phi`` of ``sigma``, ``psi`` fixed.

    ``psi`` is the identity-unitary purification of ``rho``. The maximum over
    reference-side unitaries equals the trace norm of the cross-overlap
    matrix, which is computed from the two state vectors directly.
    """
    if rho.dim != sigma.dim:
        raise StateError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    psi = purify(rho).state
    phi = purify(sigma).state
    value = np.linalg.svd(cross_overlap(phi, psi), compute_uv=False).sum() ** 2
    return float(min(value, 1.0))
