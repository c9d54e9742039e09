import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import haar_qubit_unitaries
from groverian.grover import Oracle, uniform_state
from groverian.pure_measure import (
    MeasureResult,
    ProductStateParams,
    PureMeasureConfig,
    fig1_preprocess,
    fig1_success,
    grid_oracle_pure,
    groverian_pure,
    local_update,
    overlap_objective,
    p_max_pure,
    product_state,
    random_params,
)
from groverian.qstate import (
    PureState,
    StateError,
    apply_local,
    basis_state,
    bell_state,
    ghz_state,
    overlap,
    random_pure_state,
    w_state,
)

seeds = st.integers(0, 2**32 - 1)


def _permute(psi, perm):
    n = psi.num_qubits
    return PureState(psi.amplitudes.reshape((2,) * n).transpose(perm).reshape(-1))


def test_params_canonicalization():
    p = ProductStateParams(np.array([[-np.pi / 2, 0.0], [3 * np.pi, 1.0], [0.5, -1.0]]))
    assert np.all((p.angles[:, 0] >= 0) & (p.angles[:, 0] <= np.pi))
    assert np.all((p.angles[:, 1] >= 0) & (p.angles[:, 1] < 2 * np.pi))
    with pytest.raises(StateError):
        ProductStateParams(np.zeros(3))


def test_params_round_trip_through_factors(rng):
    p = random_params(4, rng)
    q = ProductStateParams.from_factors(p.factors() * np.exp(1j * rng.random((4, 1))))
    assert abs(overlap(product_state(p), product_state(q))) == pytest.approx(1, abs=1e-12)


def test_product_state_examples():
    assert product_state(ProductStateParams(np.zeros((3, 2)))).amplitudes[0] == pytest.approx(1)
    eta = product_state(ProductStateParams(np.tile([np.pi / 2, 0.0], (4, 1))))
    np.testing.assert_allclose(eta.amplitudes, uniform_state(4).amplitudes, atol=1e-15)
    ten = product_state(ProductStateParams(np.array([[np.pi, 0.3], [0.0, 1.0]])))
    assert abs(ten.amplitudes[2]) == pytest.approx(1)


def test_overlap_objective_examples(rng):
    p = random_params(3, rng)
    assert overlap_objective(product_state(p), p) == pytest.approx(1, abs=1e-12)
    zeros = ProductStateParams(np.zeros((3, 2)))
    assert overlap_objective(ghz_state(3), zeros) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(StateError):
        overlap_objective(ghz_state(2), zeros)


@given(seeds, st.integers(1, 5))
@settings(max_examples=50, deadline=None)
def test_overlap_objective_in_unit_interval(seed, n):
    rng = np.random.default_rng(seed)
    value = overlap_objective(random_pure_state(n, rng), random_params(n, rng))
    assert 0 <= value <= 1 + 1e-12


def test_local_update_recovers_product_state(rng):
    target = random_params(4, rng)
    psi = product_state(target)
    p = random_params(4, rng)
    for k in range(4):
        p = local_update(psi, p, k)
    assert overlap_objective(psi, p) == pytest.approx(1, abs=1e-9)


def test_local_update_ghz2_from_tilted_start():
    psi = ghz_state(2)
    p = ProductStateParams(np.array([[0.1, 0.0], [0.1, 0.0]]))
    for _ in range(200):
        for k in range(2):
            p = local_update(psi, p, k)
    assert abs(overlap_objective(psi, p) - 0.5) <= 1e-9
    assert abs(grid_oracle_pure(psi) - 0.5) <= 1e-9


def test_local_update_is_monotone_and_coordinate_optimal():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        psi = random_pure_state(n, rng)
        p = random_params(n, rng)
        k = int(rng.integers(n))
        before = overlap_objective(psi, p)
        updated = local_update(psi, p, k)
        after = overlap_objective(psi, updated)
        assert after >= before - 1e-12
        trial = p.angles.copy()
        trial[k] = rng.random(2) * [np.pi, 2 * np.pi]
        assert overlap_objective(psi, ProductStateParams(trial)) <= after + 1e-12


def test_local_update_degenerate_keeps_angles():
    # contraction against |1> on qubit 1 annihilates |00>
    p = ProductStateParams(np.array([[0.4, 1.0], [np.pi, 0.0]]))
    assert np.array_equal(local_update(basis_state(0, 2), p, 0).angles, p.angles)


def test_p_max_examples(rng):
    product = product_state(random_params(5, rng))
    result = p_max_pure(product)
    assert result.p_max == pytest.approx(1, abs=1e-9)
    assert result.g <= 1e-4
    for n in range(2, 6):
        r = p_max_pure(ghz_state(n))
        assert abs(r.p_max - 0.5) <= 1e-6
        assert abs(r.g - 1 / math.sqrt(2)) <= 1e-6
    assert abs(p_max_pure(w_state(3)).p_max - 4 / 9) <= 1e-6


def test_result_algebra(rng):
    r = p_max_pure(random_pure_state(4, rng))
    assert r.g**2 + r.p_max == pytest.approx(1, abs=1e-12)
    assert r.restarts_used >= 1
    assert isinstance(r.best_params, ProductStateParams)
    assert overlap_objective(random_pure_state(1, rng), ProductStateParams(np.zeros((1, 2)))) <= 1
    assert MeasureResult.from_p_max(1 + 1e-15, best_params=None, restarts_used=1, converged=True, residual=0).g == 0


def test_restart_reduction_is_deterministic_and_thread_independent(rng):
    psi = random_pure_state(5, rng)
    a = p_max_pure(psi, PureMeasureConfig(seed=3, threads=1))
    b = p_max_pure(psi, PureMeasureConfig(seed=3, threads=4))
    assert a.p_max == b.p_max
    assert np.array_equal(a.best_params.angles, b.best_params.angles)
    assert a.restarts_used == b.restarts_used


@given(seeds, st.integers(2, 5))
@settings(max_examples=25, deadline=None)
def test_range_bounds(seed, n):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(n, rng)
    r = p_max_pure(psi, PureMeasureConfig(restarts=5, seed=seed % 1000))
    assert 0 <= r.p_max <= 1
    assert r.p_max >= np.max(np.abs(psi.amplitudes) ** 2) - 1e-12
    assert r.p_max >= 1 / 2**n


def test_local_unitary_invariance():
    rng = np.random.default_rng(77)
    for n in (2, 3, 4):
        for _ in range(5):
            psi = random_pure_state(n, rng)
            moved = apply_local(psi, haar_qubit_unitaries(n, rng))
            assert abs(p_max_pure(psi).p_max - p_max_pure(moved).p_max) <= 1e-6


def test_permutation_invariance():
    rng = np.random.default_rng(78)
    for n in (3, 4):
        for _ in range(5):
            psi = random_pure_state(n, rng)
            perm = rng.permutation(n)
            assert abs(p_max_pure(psi).p_max - p_max_pure(_permute(psi, perm)).p_max) <= 1e-6


def test_grid_oracle_examples(rng):
    assert grid_oracle_pure(basis_state(0, 2)) == pytest.approx(1)
    assert abs(grid_oracle_pure(bell_state()) - 0.5) <= 1e-4
    for n in (1, 2, 3):
        psi = random_pure_state(n, rng)
        assert grid_oracle_pure(psi, resolution=16) <= p_max_pure(psi).p_max + 1e-6
    with pytest.raises(StateError):
        grid_oracle_pure(random_pure_state(4, rng))


def test_grid_oracle_matches_schmidt_coefficient(rng):
    # two-qubit p_max is the largest squared Schmidt coefficient
    for _ in range(10):
        psi = random_pure_state(2, rng)
        top = np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False)[0] ** 2
        assert abs(grid_oracle_pure(psi) - top) <= 1e-9


def test_groverian_pure_ghz():
    assert groverian_pure(ghz_state(3)) == pytest.approx(1 / math.sqrt(2), abs=1e-6)


def test_fig1_preprocess_maps_product_state_to_uniform(rng):
    p = random_params(4, rng)
    out = fig1_preprocess(product_state(p), p)
    assert abs(abs(overlap(uniform_state(4), out)) - 1) <= 1e-12
    psi = random_pure_state(4, rng)
    assert abs(overlap(uniform_state(4), fig1_preprocess(psi, p))) == pytest.approx(
        abs(overlap(product_state(p), psi)), abs=1e-12
    )


def test_fig1_examples():
    plus = ProductStateParams(np.tile([np.pi / 2, 0.0], (8, 1)))
    assert fig1_success(uniform_state(8), plus, Oracle(8, frozenset({17}))) >= 1 - 1 / 256
    r = p_max_pure(ghz_state(3))
    assert abs(fig1_success(ghz_state(3), r.best_params, Oracle(3, frozenset({0}))) - 0.5) <= 0.15
    with pytest.raises(StateError):
        fig1_success(ghz_state(3), r.best_params, Oracle(2, frozenset({0})))
