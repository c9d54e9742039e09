"""Maximal Grover success probability and Groverian measure of pure states.

``P_max(psi)`` is the largest squared overlap of ``psi`` with a tensor-product
state, and ``G(psi) = sqrt(1 - P_max)``. The maximization runs alternating
single-qubit updates: with all other factors fixed, the best factor for qubit
``k`` is the normalized contraction of ``psi`` against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize

from ._restarts import run_restarts
from .grover import Oracle, grover_run
from .qstate import PureState, StateError, apply_local

DEGENERATE_NORM = 1e-14


@dataclass(frozen=True)
class ProductStateParams:
    """Bloch angles ``(theta_k, phi_k)`` for each qubit, shape ``(n, 2)``.

    Qubit ``k`` is ``cos(theta_k/2)|0> + exp(i phi_k) sin(theta_k/2)|1>``.
    Angles are canonicalized to ``theta in [0, pi]`` and ``phi in [0, 2 pi)``.
    """

    angles: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        raw = np.array(self.angles, dtype=float)
        if raw.ndim != 2 or raw.shape[1] != 2 or raw.shape[0] < 1:
            raise StateError(f"angles must have shape (n, 2), got {raw.shape}")
        canon = _factors_to_angles(_angles_to_factors(raw))
        canon.setflags(write=False)
        object.__setattr__(self, "angles", canon)
        object.__setattr__(self, "num_qubits", canon.shape[0])

    @classmethod
    def from_factors(cls, factors) -> "ProductStateParams":
        """Angles of the single-qubit states ``factors[k]`` (any phase, any norm)."""
        return cls(_factors_to_angles(np.asarray(factors, dtype=complex)))

    def factors(self) -> np.ndarray:
        return _angles_to_factors(self.angles)


def _angles_to_factors(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles[..., 0], angles[..., 1]
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _factors_to_angles(factors: np.ndarray) -> np.ndarray:
    r0, r1 = np.abs(factors[..., 0]), np.abs(factors[..., 1])
    theta = 2 * np.arctan2(r1, r0)
    phi = np.where(
        (r0 > 0) & (r1 > 0), np.angle(factors[..., 1]) - np.angle(factors[..., 0]), 0.0
    )
    phi = np.mod(phi, 2 * np.pi)
    phi = np.where(np.isclose(phi, 2 * np.pi, rtol=0, atol=1e-15), 0.0, phi)
    return np.stack([theta, phi], axis=-1)


@dataclass(frozen=True)
class MeasureResult:
    """Outcome of a Groverian-measure optimization.

    ``best_params`` is a :class:`ProductStateParams` for pure states and a
    separable ensemble for mixed states. ``residual`` is the objective change
    of the final step of the best restart.
    """

    p_max: float
    g: float
    best_params: Any
    restarts_used: int
    converged: bool
    residual: float
    iterations: int = 0

    @classmethod
    def from_p_max(cls, p_max: float, **kwargs) -> "MeasureResult":
        p_max = float(min(max(p_max, 0.0), 1.0))
        return cls(p_max=p_max, g=math.sqrt(1.0 - p_max), **kwargs)


@dataclass(frozen=True)
class PureMeasureConfig:
    restarts: int = 20
    tol: float = 1e-10
    max_sweeps: int = 500
    seed: int = 0
    threads: int = 1


def product_state(params: ProductStateParams) -> PureState:
    vec = np.ones(1, dtype=complex)
    for factor in params.factors():
        vec = np.kron(vec, factor)
    return PureState.normalized(vec)


def _check_qubits(psi: PureState, params: ProductStateParams):
    if psi.num_qubits != params.num_qubits:
        raise StateError(
            f"state has {psi.num_qubits} qubits but parameters describe {params.num_qubits}"
        )


def _contract_except(tensor: np.ndarray, factors: np.ndarray, k: int) -> np.ndarray:
    """Contract every axis but ``k`` of ``tensor`` with the conjugated factors."""
    for j in range(len(factors) - 1, -1, -1):
        if j != k:
            tensor = np.tensordot(tensor, factors[j].conj(), axes=([j], [0]))
    return tensor


def _overlap_value(tensor: np.ndarray, factors: np.ndarray) -> float:
    c = _contract_except(tensor, factors, 0)
    return float(abs(np.vdot(factors[0], c)) ** 2)


def overlap_objective(psi: PureState, params: ProductStateParams) -> float:
    """``|<product_state(params)|psi>|^2``."""
    _check_qubits(psi, params)
    return float(abs(np.vdot(product_state(params).amplitudes, psi.amplitudes)) ** 2)


def _sweep(tensor: np.ndarray, factors: np.ndarray) -> float:
    """One in-place pass of single-qubit updates; returns the final objective."""
    value = 0.0
    for k in range(len(factors)):
        c = _contract_except(tensor, factors, k)
        norm = np.linalg.norm(c)
        if norm > DEGENERATE_NORM:
            factors[k] = c / norm
            value = norm**2
        else:
            value = float(abs(np.vdot(factors[k], c)) ** 2)
    return float(value)


def local_update(psi: PureState, params: ProductStateParams, k: int) -> ProductStateParams:
    """Replace qubit ``k``'s state by the best one given the other qubits.

    If the contraction vanishes (norm below 1e-14) every choice is equally
    good and the previous angles are kept.
    """
    _check_qubits(psi, params)
    n = psi.num_qubits
    if not 0 <= k < n:
        raise StateError(f"qubit index {k} out of range for {n} qubits")
    factors = params.factors()
    c = _contract_except(psi.amplitudes.reshape((2,) * n), factors, k)
    norm = np.linalg.norm(c)
    if norm <= DEGENERATE_NORM:
        return params
    factors[k] = c / norm
    return ProductStateParams.from_factors(factors)


def random_params(num_qubits: int, rng: np.random.Generator) -> ProductStateParams:
    """Haar-uniform single-qubit states: ``theta = arccos(1 - 2u)``, ``phi = 2 pi v``."""
    u, v = rng.random(num_qubits), rng.random(num_qubits)
    return ProductStateParams(np.stack([np.arccos(1 - 2 * u), 2 * np.pi * v], axis=1))


@dataclass
class _Ascent:
    value: float
    factors: np.ndarray
    sweeps: int
    residual: float


def _ascend(tensor: np.ndarray, factors: np.ndarray, tol: float, max_sweeps: int) -> _Ascent:
    value = _overlap_value(tensor, factors)
    residual = math.inf
    sweeps = 0
    while sweeps < max_sweeps:
        new = _sweep(tensor, factors)
        sweeps += 1
        residual = new - value
        value = new
        if residual < tol:
            break
    return _Ascent(value, factors, sweeps, residual)


def p_max_pure(psi: PureState, config: PureMeasureConfig | None = None) -> MeasureResult:
    """Maximal squared overlap of ``psi`` with product states, with ``G = sqrt(1 - P_max)``."""
    config = config or PureMeasureConfig()
    n = psi.num_qubits
    if n > 12:
        raise StateError("pure states are limited to 12 qubits")
    tensor = psi.amplitudes.reshape((2,) * n)

    def restart(_, rng):
        factors = random_params(n, rng).factors()
        return _ascend(tensor, factors, config.tol, config.max_sweeps)

    runs = run_restarts(restart, config.restarts, config.seed, config.threads)
    # max() keeps the first of equal values, i.e. the lowest restart index
    best = max(runs, key=lambda r: r.value)
    params = ProductStateParams.from_factors(best.factors)
    # 1 - |<phi|psi>|^2 as a squared distance stays accurate when it is tiny
    phi = product_state(params).amplitudes
    rest = psi.amplitudes - np.vdot(phi, psi.amplitudes) * phi
    complement = min(float(np.vdot(rest, rest).real), 1.0)
    return MeasureResult(
        p_max=1.0 - complement,
        g=math.sqrt(complement),
        best_params=params,
        restarts_used=len(runs),
        converged=bool(best.residual < config.tol),
        residual=float(best.residual),
        iterations=best.sweeps,
    )


def groverian_pure(psi: PureState, config: PureMeasureConfig | None = None) -> float:
    return p_max_pure(psi, config).g


def grid_oracle_pure(psi: PureState, resolution: int = 32) -> float:
    """Brute-force ``P_max`` for up to three qubits, used as a test oracle.

    All but the last qubit are scanned over a ``resolution x resolution``
    grid of ``(theta, phi)``; the last qubit is maximized exactly (the norm of
    the remaining contraction). The best grid point is then polished by BFGS
    over all angles.
    """
    n = psi.num_qubits
    if n > 3:
        raise StateError("grid oracle supports at most 3 qubits")
    if not 2 <= resolution <= 64:
        raise StateError("resolution must lie in 2..64")
    tensor = psi.amplitudes.reshape((2,) * n)
    if n == 1:
        return 1.0
    theta = np.linspace(0, np.pi, resolution)
    phi = 2 * np.pi * np.arange(resolution) / resolution
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    grid_angles = np.stack([tt.ravel(), pp.ravel()], axis=1)
    grid_states = _angles_to_factors(grid_angles)  # (r*r, 2)

    # contract the first n-1 qubits with every grid combination
    first = np.einsum("ga,a...->g...", grid_states.conj(), tensor)
    if n == 2:
        values = np.sum(np.abs(first) ** 2, axis=-1)
        picks = (int(np.argmax(values)),)
        best_value = values[picks]
        last = first[picks]
    else:
        best_value, picks, last = -1.0, None, None
        for start in range(0, len(first), 256):
            block = np.einsum("hb,gbc->ghc", grid_states.conj(), first[start : start + 256])
            values = np.sum(np.abs(block) ** 2, axis=-1)
            g, h = np.unravel_index(int(np.argmax(values)), values.shape)
            if values[g, h] > best_value:
                best_value, picks, last = values[g, h], (start + g, h), block[g, h]
    start_angles = [grid_angles[i] for i in picks]
    start_angles.append(_factors_to_angles(last / np.linalg.norm(last)))
    x0 = np.concatenate(start_angles)

    def negative_overlap(x):
        vec = np.ones(1, dtype=complex)
        for f in _angles_to_factors(x.reshape(n, 2)):
            vec = np.kron(vec, f)
        return -abs(np.vdot(vec, psi.amplitudes)) ** 2

    polished = minimize(negative_overlap, x0, method="BFGS", options={"gtol": 1e-12})
    return float(max(-polished.fun, best_value))


def fig1_preprocess(psi: PureState, params: ProductStateParams) -> PureState:
    """Apply local unitaries taking each ``|phi_k>`` to ``|+>``.

    Afterwards ``<eta|state> = <product_state(params)|psi>``.
    """
    _check_qubits(psi, params)
    plus = np.array([1, 1]) / math.sqrt(2)
    minus = np.array([1, -1]) / math.sqrt(2)
    unitaries = []
    for a in params.factors():
        perp = np.array([-a[1].conj(), a[0].conj()])
        unitaries.append(np.outer(plus, a.conj()) + np.outer(minus, perp.conj()))
    return apply_local(psi, unitaries)


def fig1_success(psi: PureState, params: ProductStateParams, oracle: Oracle) -> float:
    """Simulated success probability of local pre-processing followed by Grover search."""
    if oracle.num_qubits != psi.num_qubits:
        raise StateError("oracle and state act on different qubit counts")
    return grover_run(fig1_preprocess(psi, params), oracle).success_probability
