"""Groverian entanglement measure for pure and mixed multi-qubit states."""

from .grover import Oracle, grover_run, optimal_iterations, predicted_success, uniform_state
from .mixed_measure import (
    KrausSet,
    MixedMeasureConfig,
    SeparableEnsemble,
    apply_channel,
    ensemble_to_density,
    groverian_mixed,
    max_fidelity_separable,
    ppt_check,
    random_kraus_set,
    werner_state,
)
from .pure_measure import MeasureResult, ProductStateParams, PureMeasureConfig, p_max_pure
from .purify import build_u_phi, purify, uhlmann_max_overlap
from .qstate import DensityMatrix, PureState, StateError, UnitaryMatrix, fidelity

__version__ = "0.1.0"
