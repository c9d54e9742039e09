"""Empirical constants for the O(1/N) corrections of Grover search.

``STATE_CONSTANT`` (c) bounds ``||U_G^dagger |m> - |eta>|| <= c / sqrt(N)``
at the optimal iteration count. ``SUCCESS_CONSTANT`` (c') bounds
``|P_s(psi) - |<eta|psi>|^2| <= c' / N`` for random initial states.

The frozen values are twice the maxima measured by :func:`calibrate` with
its default arguments; ``python -m groverian.calibration`` reruns it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grover import Oracle, grover_adjoint, grover_run, predicted_success, uniform_state
from .qstate import basis_state, random_pure_state

SAFETY_MARGIN = 2.0
CALIBRATION_SEED = 20050101
CALIBRATION_QUBITS = (6, 8, 10)

# measured: c = 0.7428, c' = 0.3909 (seed 20050101, 1000 states)
STATE_CONSTANT = 1.4856
SUCCESS_CONSTANT = 0.7819


@dataclass(frozen=True)
class Calibration:
    state_constant: float
    success_constant: float
    samples: int


def calibrate(samples: int = 1000, seed: int = CALIBRATION_SEED) -> Calibration:
    """Measure the raw (unmargined) constants over ``samples`` random states."""
    rng = np.random.default_rng(seed)
    c_state = 0.0
    c_success = 0.0
    for i in range(samples):
        n = CALIBRATION_QUBITS[i % len(CALIBRATION_QUBITS)]
        dim = 2**n
        mark = int(rng.integers(dim))
        oracle = Oracle(n, frozenset({mark}))
        run = grover_run(uniform_state(n), oracle)
        back = grover_adjoint(basis_state(mark, n), oracle, run.iterations)
        gap = np.linalg.norm(back.amplitudes - uniform_state(n).amplitudes)
        c_state = max(c_state, gap * math.sqrt(dim))
        psi = random_pure_state(n, rng)
        actual = grover_run(psi, oracle).success_probability
        c_success = max(c_success, abs(actual - predicted_success(psi)) * dim)
    return Calibration(c_state, c_success, samples)


if __name__ == "__main__":
    cal = calibrate()
    print(f"c  = {cal.state_constant:.4f} -> frozen {SAFETY_MARGIN * cal.state_constant:.4f}")
    print(f"c' = {cal.success_constant:.4f} -> frozen {SAFETY_MARGIN * cal.success_constant:.4f}")
