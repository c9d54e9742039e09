"""Groverian measure of mixed states and the LOCC machinery used to probe it.

``G(rho) = sqrt(1 - max_{sigma separable} F(rho, sigma))``.

The search space is separable ensembles of ``m`` weighted product states.
Writing ``X`` for the ``d x m`` matrix whose columns are
``sqrt(P_mu) |pi_mu>``, one has ``sigma = X X^dagger`` and
``sqrt(F(rho, sigma)) = ||sqrt(rho) X||_1``. Each restart first runs a
block-ascent on that expression, then polishes with L-BFGS using its
analytic gradient. The block-ascent steps are:

* the Uhlmann partial isometry ``W`` from the SVD of ``sqrt(rho) X``;
* one single-qubit sweep per term against ``sqrt(rho) W``;
* the closed-form optimal weights ``P_mu ~ |<pi_mu|sqrt(rho) w_mu>|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from ._restarts import run_restarts
from .pure_measure import MeasureResult, _angles_to_factors, _factors_to_angles
from .qstate import DensityMatrix, StateError, fidelity, sqrt_psd

WEIGHT_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
PPT_TOL = 1e-12
MAX_TERMS = 32
SEPARABLE_EXIT = 1 - 1e-10


@dataclass(frozen=True)
class SeparableEnsemble:
    """Weights ``P_mu`` and per-qubit Bloch angles, ``angles[mu, k] = (theta, phi)``."""

    weights: np.ndarray
    angles: np.ndarray
    num_qubits: int = field(init=False)
    num_terms: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        a = np.array(self.angles, dtype=float)
        if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != w.size or a.shape[1] < 1:
            raise StateError(
                f"angles must have shape ({w.size}, n, 2) to match the weights, got {a.shape}"
            )
        if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1) > WEIGHT_TOL:
            raise StateError("weights must be non-negative and sum to 1")
        a = _factors_to_angles(_angles_to_factors(a))
        w.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "num_qubits", a.shape[1])
        object.__setattr__(self, "num_terms", w.size)

    @classmethod
    def from_factors(cls, factors) -> "SeparableEnsemble":
        """Build from unnormalized per-qubit vectors, shape ``(m, n, 2)``.

        The weight of term ``mu`` is proportional to the squared norm of its
        product vector.
        """
        factors = np.asarray(factors, dtype=complex)
        norms = np.prod(np.linalg.norm(factors, axis=2), axis=1) ** 2
        return cls(norms / norms.sum(), _factors_to_angles(factors))

    @classmethod
    def uniform_basis(cls, num_qubits: int) -> "SeparableEnsemble":
        """Equal mixture of all computational basis states."""
        dim = 2**num_qubits
        bits = (np.arange(dim)[:, None] >> np.arange(num_qubits - 1, -1, -1)) & 1
        angles = np.stack([np.pi * bits, np.zeros_like(bits, dtype=float)], axis=2)
        return cls(np.full(dim, 1 / dim), angles)

    def factors(self) -> np.ndarray:
        return _angles_to_factors(self.angles)

    def product_vectors(self) -> np.ndarray:
        """Unit product states, one row per term."""
        return _product_rows(self.factors())


def _product_rows(factors: np.ndarray) -> np.ndarray:
    rows = factors[:, 0, :]
    for k in range(1, factors.shape[1]):
        rows = np.einsum("za,zb->zab", rows, factors[:, k, :]).reshape(len(factors), -1)
    return rows


def random_ensemble(
    num_qubits: int, num_terms: int, rng: np.random.Generator
) -> SeparableEnsemble:
    """Dirichlet(1) weights with Haar-random single-qubit states."""
    u = rng.random((num_terms, num_qubits))
    v = rng.random((num_terms, num_qubits))
    angles = np.stack([np.arccos(1 - 2 * u), 2 * np.pi * v], axis=2)
    return SeparableEnsemble(rng.dirichlet(np.ones(num_terms)), angles)


def ensemble_to_density(e: SeparableEnsemble) -> DensityMatrix:
    x = e.product_vectors().T * np.sqrt(e.weights)
    return DensityMatrix.from_unnormalized(x @ x.conj().T)


def fidelity_objective(rho: DensityMatrix, e: SeparableEnsemble) -> float:
    if rho.num_qubits != e.num_qubits:
        raise StateError(f"state has {rho.num_qubits} qubits, ensemble {e.num_qubits}")
    return fidelity(rho, ensemble_to_density(e))


@dataclass(frozen=True)
class MixedMeasureConfig:
    """Optimizer settings; ``terms=None`` means ``min(4**n, 32)``."""

    terms: int | None = None
    restarts: int = 10
    warm_iterations: int = 200
    polish_iterations: int = 3000
    tol: float = 1e-9
    seed: int = 0
    threads: int = 1

    def num_terms(self, num_qubits: int) -> int:
        return self.terms if self.terms is not None else min(4**num_qubits, MAX_TERMS)


def _sqrt_fidelity(sqrt_rho: np.ndarray, factors: np.ndarray) -> float:
    x = _product_rows(factors).T
    return float(np.linalg.svd(sqrt_rho @ x, compute_uv=False).sum() / np.linalg.norm(x))


def _block_ascent_step(sqrt_rho: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """One Uhlmann / product-state / weight update; returns new unnormalized factors."""
    m, n, _ = factors.shape
    unit = factors / np.linalg.norm(factors, axis=2, keepdims=True)
    x = _product_rows(factors).T
    u, _, vh = np.linalg.svd(sqrt_rho @ x, full_matrices=False)
    targets = (sqrt_rho @ (u @ vh)).T.reshape((m,) + (2,) * n)
    letters = "abcdefghijkl"[:n]
    for k in range(n):
        ops, subs = [targets], ["z" + letters]
        for j in range(n):
            if j != k:
                ops.append(unit[:, j, :].conj())
                subs.append("z" + letters[j])
        c = np.einsum(",".join(subs) + "->z" + letters[k], *ops)
        norms = np.linalg.norm(c, axis=1)
        ok = norms > 1e-14
        unit[ok, k, :] = c[ok] / norms[ok, None]
    rows = _product_rows(unit)
    inner = np.einsum("zd,zd->z", targets.reshape(m, -1).conj(), rows)
    t = np.abs(inner)
    if t.sum() == 0:
        return factors
    scale = (t / np.linalg.norm(t)) * np.exp(-1j * np.angle(inner))
    out = unit.copy()
    out[:, 0, :] *= scale[:, None]
    return out


def _polish(sqrt_rho: np.ndarray, factors: np.ndarray, maxiter: int) -> np.ndarray:
    """L-BFGS on ``||sqrt(rho) X||_1 / ||X||_F`` over unconstrained complex factors."""
    m, n, _ = factors.shape
    size = m * n * 2
    letters = "abcdefghijkl"[:n]

    def objective(p):
        a = (p[:size] + 1j * p[size:]).reshape(m, n, 2)
        x = _product_rows(a).T
        xnorm = np.linalg.norm(x)
        u, s, vh = np.linalg.svd(sqrt_rho @ x, full_matrices=False)
        value = s.sum() / xnorm
        # d value = Re <grad_x, dX>
        grad_x = (sqrt_rho @ (u @ vh)) / xnorm - value * x / xnorm**2
        gt = grad_x.T.reshape((m,) + (2,) * n)
        grad = np.empty((m, n, 2), dtype=complex)
        for k in range(n):
            ops, subs = [gt], ["z" + letters]
            for j in range(n):
                if j != k:
                    ops.append(a[:, j, :].conj())
                    subs.append("z" + letters[j])
            grad[:, k, :] = np.einsum(",".join(subs) + "->z" + letters[k], *ops)
        return -value, -np.concatenate([grad.real.ravel(), grad.imag.ravel()])

    p0 = np.concatenate([factors.real.ravel(), factors.imag.ravel()])
    res = minimize(
        objective,
        p0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": maxiter, "gtol": 1e-14, "ftol": 1e-16, "maxcor": 30},
    )
    best = res.x if -res.fun >= -objective(p0)[0] else p0
    return (best[:size] + 1j * best[size:]).reshape(m, n, 2)


@dataclass
class _Restart:
    value: float
    factors: np.ndarray
    iterations: int
    residual: float


def _optimize_restart(
    sqrt_rho: np.ndarray, n: int, m: int, config: MixedMeasureConfig, rng: np.random.Generator
) -> _Restart:
    factors = random_ensemble(n, m, rng).factors()
    factors[:, 0, :] *= np.sqrt(rng.dirichlet(np.ones(m)))[:, None]
    value = _sqrt_fidelity(sqrt_rho, factors)
    iterations = 0
    for _ in range(config.warm_iterations):
        factors = _block_ascent_step(sqrt_rho, factors)
        new = _sqrt_fidelity(sqrt_rho, factors)
        iterations += 1
        done = new - value < 1e-14
        value = max(value, new)
        if done:
            break
    if value ** 2 < SEPARABLE_EXIT:
        factors = _polish(sqrt_rho, factors, config.polish_iterations)
    value = _sqrt_fidelity(sqrt_rho, factors)
    check = _block_ascent_step(sqrt_rho, factors)
    checked = _sqrt_fidelity(sqrt_rho, check)
    residual = checked**2 - value**2
    if checked > value:
        factors, value = check, checked
    return _Restart(min(value, 1.0) ** 2, factors, iterations, residual)


@dataclass(frozen=True)
class SeparableFit:
    """Best separable ensemble found, with optimizer diagnostics."""

    fidelity: float
    ensemble: SeparableEnsemble
    restarts_used: int
    converged: bool
    residual: float
    iterations: int


def fit_separable(rho: DensityMatrix, config: MixedMeasureConfig | None = None) -> SeparableFit:
    config = config or MixedMeasureConfig()
    n = rho.num_qubits
    if not 1 <= n <= 4:
        raise StateError("mixed-state optimization supports 1 to 4 qubits")
    m = config.num_terms(n)
    sqrt_rho = sqrt_psd(rho.matrix)

    runs = run_restarts(
        lambda _, rng: _optimize_restart(sqrt_rho, n, m, config, rng),
        config.restarts,
        config.seed,
        config.threads,
        stop=lambda r: r.value >= SEPARABLE_EXIT,
    )
    best = max(runs, key=lambda r: r.value)
    ensemble = SeparableEnsemble.from_factors(best.factors)
    return SeparableFit(
        fidelity=best.value,
        ensemble=ensemble,
        restarts_used=len(runs),
        converged=bool(best.residual <= config.tol or best.value >= SEPARABLE_EXIT),
        residual=float(best.residual),
        iterations=best.iterations,
    )


def max_fidelity_separable(
    rho: DensityMatrix, config: MixedMeasureConfig | None = None
) -> tuple[float, SeparableEnsemble]:
    """Largest fidelity of ``rho`` with a separable state found by the optimizer.

    The value is a lower bound on the true maximum.
    """
    fit = fit_separable(rho, config)
    return fit.fidelity, fit.ensemble


def groverian_mixed(rho: DensityMatrix, config: MixedMeasureConfig | None = None) -> MeasureResult:
    """``G(rho)``; ``p_max`` carries the separable fidelity maximum.

    Since the optimizer under-estimates the fidelity, the reported ``g`` is
    an upper bound.
    """
    fit = fit_separable(rho, config)
    return MeasureResult.from_p_max(
        fit.fidelity,
        best_params=fit.ensemble,
        restarts_used=fit.restarts_used,
        converged=fit.converged,
        residual=fit.residual,
        iterations=fit.iterations,
    )


def werner_state(p: float) -> DensityMatrix:
    """``p |Psi-><Psi-| + (1 - p) I/4`` on two qubits."""
    if not 0 <= p <= 1:
        raise StateError(f"Werner parameter {p} outside [0, 1]")
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    return DensityMatrix(p * np.outer(singlet, singlet) + (1 - p) * np.eye(4) / 4)


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose of the second qubit of a two-qubit density matrix."""
    if rho.num_qubits != 2:
        raise StateError("partial transpose is defined here for two qubits only")
    return rho.matrix.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_check(rho: DensityMatrix) -> tuple[bool, float]:
    """Peres-Horodecki test: ``(is_ppt, smallest eigenvalue of the partial transpose)``.

    For two qubits, PPT is equivalent to separability.
    """
    pt = partial_transpose(rho)
    lowest = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    return lowest >= -PPT_TOL, lowest


@dataclass(frozen=True)
class KrausSet:
    """Product Kraus operators; ``factors[i, k]`` is the 2x2 factor of ``M_i`` on qubit ``k``."""

    factors: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        f = np.array(self.factors, dtype=complex)
        if f.ndim != 4 or f.shape[2:] != (2, 2) or f.shape[0] < 1 or f.shape[1] < 1:
            raise StateError(f"factors must have shape (m, n, 2, 2), got {f.shape}")
        f.setflags(write=False)
        object.__setattr__(self, "factors", f)
        object.__setattr__(self, "num_qubits", f.shape[1])
        residual = np.linalg.norm(self.completeness() - np.eye(2**self.num_qubits))
        if residual > COMPLETENESS_TOL:
            raise StateError(f"Kraus operators are not complete (residual {residual:.3e})")

    def operators(self) -> list[np.ndarray]:
        out = []
        for per_qubit in self.factors:
            op = np.ones((1, 1), dtype=complex)
            for f in per_qubit:
                op = np.kron(op, f)
            out.append(op)
        return out

    def completeness(self) -> np.ndarray:
        """``sum_i M_i^dagger M_i``."""
        return sum(op.conj().T @ op for op in self.operators())


def _inverse_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    return (vectors / np.sqrt(values)) @ vectors.conj().T


def _haar_2x2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus_set(n: int, m: int, seed: int | np.random.Generator = 0) -> KrausSet:
    """Random ``m``-outcome one-way LOCC instrument on ``n`` qubits.

    A randomly chosen qubit performs an ``m``-outcome POVM
    ``E_i = S^{-1/2} A_i S^{-1/2}`` (``A_i`` random positive, ``S = sum A_i``)
    realized by ``K_i = V_i sqrt(E_i)``; every other qubit applies a random
    unitary conditioned on the outcome ``i``. Then
    ``sum_i M_i^dagger M_i = sum_i E_i ⊗ I = I`` exactly.
    """
    if m < 1 or n < 1:
        raise StateError("need at least one qubit and one Kraus operator")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    measurer = int(rng.integers(n))
    factors = np.empty((m, n, 2, 2), dtype=complex)
    if m == 1:
        effects = [np.eye(2)]
    else:
        gs = rng.normal(size=(m, 2, 2)) + 1j * rng.normal(size=(m, 2, 2))
        positives = [g @ g.conj().T for g in gs]
        norm = _inverse_sqrt(sum(positives))
        effects = [norm @ a @ norm for a in positives]
    for i in range(m):
        for k in range(n):
            u = _haar_2x2(rng)
            factors[i, k] = u @ sqrt_psd(effects[i]) if k == measurer else u
    return KrausSet(factors)


def apply_channel(rho: DensityMatrix, kraus: KrausSet) -> DensityMatrix:
    """``sum_i M_i rho M_i^dagger``."""
    if rho.num_qubits != kraus.num_qubits:
        raise StateError(f"state has {rho.num_qubits} qubits, channel acts on {kraus.num_qubits}")
    out = sum(op @ rho.matrix @ op.conj().T for op in kraus.operators())
    return DensityMatrix((out + out.conj().T) / 2)


def local_conjugate(rho: DensityMatrix, unitaries: Sequence[np.ndarray]) -> DensityMatrix:
    """``(U_0 ⊗ ... ⊗ U_{n-1}) rho (...)^dagger``."""
    u = np.ones((1, 1), dtype=complex)
    for f in unitaries:
        u = np.kron(u, f)
    out = u @ rho.matrix @ u.conj().T
    return DensityMatrix((out + out.conj().T) / 2)
