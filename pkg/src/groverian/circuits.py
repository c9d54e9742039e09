"""Simulated pre-processing + Grover circuits and entanglement tracking.

The mixed-state circuit purifies ``rho`` to ``|psi>`` on ``2n`` qubits,
applies ``U_phi`` (with ``U_phi^dagger |eta> = |phi>``, ``|phi>`` a
purification of a separable state) and runs Grover search on the doubled
register. Its success probability is ``|<phi|psi>|^2`` up to O(1/N).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calibration import STATE_CONSTANT
from .grover import Oracle, grover_run, optimal_iterations, uniform_state
from .mixed_measure import (
    MixedMeasureConfig,
    SeparableEnsemble,
    ensemble_to_density,
    fit_separable,
)
from .pure_measure import PureMeasureConfig, p_max_pure
from .purify import align_reference, build_u_phi, ensemble_purification, purify
from .qstate import DensityMatrix, PureState, StateError, overlap


@dataclass(frozen=True)
class Fig2Run:
    success: float
    overlap: float

    @property
    def gap(self) -> float:
        return self.success - self.overlap


@dataclass(frozen=True)
class Fig2Optimum:
    """``value`` is the Uhlmann-aligned overlap, ``measured`` its simulated success."""

    value: float
    measured: float
    tolerance: float
    ensemble: SeparableEnsemble
    groverian: float

    @property
    def gap(self) -> float:
        return self.measured - self.value

    @property
    def confirmed(self) -> bool:
        return abs(self.gap) <= self.tolerance


@dataclass(frozen=True)
class TrackRecord:
    iteration: int
    success_probability: float
    groverian: float


def simulate_fig2(psi: PureState, phi: PureState, marked: int = 0) -> Fig2Run:
    """Run ``U_phi |psi>`` through Grover search with one marked index."""
    if psi.dim != phi.dim:
        raise StateError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    oracle = Oracle(psi.num_qubits, frozenset({marked}))
    run = grover_run(build_u_phi(phi).apply(psi), oracle)
    return Fig2Run(run.success_probability, abs(overlap(phi, psi)) ** 2)


def _ensemble_state(e: SeparableEnsemble) -> PureState:
    if e.num_terms <= 2**e.num_qubits:
        return ensemble_purification(e).state
    # too many terms to label in the reference register
    return purify(ensemble_to_density(e)).state


def fig2_run(rho: DensityMatrix, e: SeparableEnsemble, marked: int = 0) -> Fig2Run:
    """Simulated circuit for the canonical purification of ``rho`` and the ensemble's purification."""
    if rho.num_qubits != e.num_qubits:
        raise StateError(f"state has {rho.num_qubits} qubits, ensemble {e.num_qubits}")
    if rho.num_qubits > 4:
        raise StateError("circuit simulation is limited to n <= 4 (8 simulated qubits)")
    return simulate_fig2(purify(rho).state, _ensemble_state(e), marked)


def fig2_optimal_success(
    rho: DensityMatrix, config: MixedMeasureConfig | None = None, marked: int = 0
) -> Fig2Optimum:
    """Best separable ensemble, Uhlmann-aligned purification, and one confirming run."""
    n = rho.num_qubits
    if n > 3:
        raise StateError("fig2_optimal_success supports n <= 3")
    fit = fit_separable(rho, config)
    psi = purify(rho).state
    phi = align_reference(purify(ensemble_to_density(fit.ensemble)).state, psi)
    run = simulate_fig2(psi, phi, marked)
    return Fig2Optimum(
        value=run.overlap,
        measured=run.success,
        tolerance=STATE_CONSTANT / 4**n,
        ensemble=fit.ensemble,
        groverian=float(np.sqrt(max(0.0, 1.0 - fit.fidelity))),
    )


def track_groverian(
    n: int,
    marked: int,
    initial: PureState | None = None,
    max_iter: int | None = None,
    config: PureMeasureConfig | None = None,
) -> list[TrackRecord]:
    """Groverian measure and success probability after each Grover step.

    ``max_iter`` defaults to the optimal iteration count.
    """
    if n > 8:
        raise StateError("tracking is limited to 8 qubits")
    oracle = Oracle(n, frozenset({marked}))
    state = uniform_state(n) if initial is None else initial
    if max_iter is None:
        max_iter = optimal_iterations(n, 1)
    records = []
    run = grover_run(state, oracle, 0)
    for t in range(max_iter + 1):
        if t:
            run = grover_run(run.final_state, oracle, 1)
        g = p_max_pure(run.final_state, config).g
        records.append(TrackRecord(t, run.success_probability, g))
    return records


def write_track_csv(records: list[TrackRecord], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "success", "G"])
        for r in records:
            writer.writerow([r.iteration, repr(r.success_probability), repr(r.groverian)])
