import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groverian.qstate import (
    DensityMatrix,
    PureState,
    StateError,
    UnitaryMatrix,
    basis_state,
    bell_state,
    density_of,
    equal_up_to_phase,
    fidelity,
    matrix_sqrt,
    overlap,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    tensor_product,
    trace_norm,
)
from groverian.grover import uniform_state

seeds = st.integers(0, 2**32 - 1)
H = 1 / np.sqrt(2)


def test_pure_state_rejects_bad_norm_and_length():
    with pytest.raises(StateError):
        PureState(np.array([1.0, 1.0]))
    with pytest.raises(StateError):
        PureState(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(StateError):
        PureState.normalized(np.zeros(4))


def test_pure_state_is_immutable():
    psi = basis_state(0, 2)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_density_matrix_invariants():
    with pytest.raises(StateError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(StateError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(StateError, match="negative"):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(StateError, match="square"):
        DensityMatrix(np.ones((2, 4)) / 4)


def test_tensor_product_examples(rng):
    np.testing.assert_allclose(
        tensor_product(basis_state(0, 1), basis_state(0, 1)).amplitudes, [1, 0, 0, 0]
    )
    plus = PureState(np.array([H, H]))
    np.testing.assert_allclose(tensor_product(plus, plus).amplitudes, [0.5] * 4, atol=1e-15)
    a, b = random_pure_state(2, rng), random_pure_state(1, rng)
    ab = tensor_product(a, b)
    assert ab.num_qubits == 3
    assert abs(np.linalg.norm(ab.amplitudes) - 1) <= 1e-12
    for i in range(4):
        for j in range(2):
            assert abs(ab.amplitudes[2 * i + j] - a.amplitudes[i] * b.amplitudes[j]) < 1e-15


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_tensor_product_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_pure_state(k, rng) for k in (1, 2, 1))
    left = tensor_product(tensor_product(a, b), c).amplitudes
    right = tensor_product(a, tensor_product(b, c)).amplitudes
    np.testing.assert_allclose(left, right, atol=1e-15)


def test_overlap_examples(rng):
    x = random_pure_state(3, rng)
    assert abs(overlap(x, x) - 1) < 1e-12
    assert overlap(basis_state(0, 1), basis_state(1, 1)) == 0
    for n in (1, 3, 5):
        for i in (0, 2**n - 1):
            assert abs(overlap(uniform_state(n), basis_state(i, n)) - 2 ** (-n / 2)) < 1e-15
    with pytest.raises(StateError):
        overlap(basis_state(0, 1), basis_state(0, 2))


def test_overlap_is_conjugate_linear_in_first_argument():
    a = PureState(np.array([1j, 0]))
    b = basis_state(0, 1)
    assert overlap(a, b) == -1j


def test_equal_up_to_phase(rng):
    x = random_pure_state(2, rng)
    assert equal_up_to_phase(PureState(np.exp(0.7j) * x.amplitudes), x)
    assert not equal_up_to_phase(x, random_pure_state(2, rng))


def test_density_of_examples(rng):
    np.testing.assert_allclose(density_of(basis_state(0, 1)).matrix, [[1, 0], [0, 0]])
    np.testing.assert_allclose(density_of(uniform_state(1)).matrix, np.full((2, 2), 0.5), atol=1e-15)
    for _ in range(20):
        rho = density_of(random_pure_state(3, rng)).matrix
        assert abs(np.trace(rho @ rho) - 1) <= 1e-10
        assert np.linalg.norm(rho @ rho - rho) <= 1e-10


def _partial_trace_oracle(matrix, keep_first):
    out = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                if keep_first:
                    out[a, b] += matrix[2 * a + c, 2 * b + c]
                else:
                    out[a, b] += matrix[2 * c + a, 2 * c + b]
    return out


def test_partial_trace_examples(rng):
    reduced = partial_trace(density_of(bell_state()), [0])
    np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-15)

    psi = random_pure_state(2, rng)
    joint = density_of(tensor_product(psi, basis_state(0, 1)))
    np.testing.assert_allclose(partial_trace(joint, [0, 1]).matrix, density_of(psi).matrix, atol=1e-14)

    for _ in range(10):
        rho = random_density_matrix(2, rng)
        for keep, first in (([0], True), ([1], False)):
            np.testing.assert_allclose(
                partial_trace(rho, keep).matrix, _partial_trace_oracle(rho.matrix, first), atol=1e-14
            )


def test_partial_trace_middle_qubit(rng):
    a, b, c = (random_pure_state(1, rng) for _ in range(3))
    joint = density_of(tensor_product(tensor_product(a, b), c))
    np.testing.assert_allclose(partial_trace(joint, [1]).matrix, density_of(b).matrix, atol=1e-14)
    np.testing.assert_allclose(
        partial_trace(joint, [0, 2]).matrix,
        density_of(tensor_product(a, c)).matrix,
        atol=1e-14,
    )


@pytest.mark.parametrize("keep", [[], [2], [0, 0], [-1]])
def test_partial_trace_rejects_bad_selector(keep):
    with pytest.raises(StateError):
        partial_trace(density_of(bell_state()), keep)


def test_matrix_sqrt_examples(rng):
    np.testing.assert_allclose(matrix_sqrt(DensityMatrix(np.eye(2) / 2)), np.eye(2) / np.sqrt(2), atol=1e-15)
    proj = density_of(random_pure_state(2, rng))
    np.testing.assert_allclose(matrix_sqrt(proj), proj.matrix, atol=1e-12)
    for n in (1, 2, 3, 4):
        rho = random_density_matrix(n, rng, rank=int(rng.integers(1, 2**n + 1)))
        root = matrix_sqrt(rho)
        assert np.linalg.norm(root @ root - rho.matrix) <= 1e-9
        assert np.linalg.norm(root - root.conj().T) <= 1e-12
        assert np.linalg.eigvalsh(root)[0] >= -1e-12


def test_matrix_sqrt_clips_small_negative_and_rejects_large():
    from groverian.qstate import sqrt_psd

    root = sqrt_psd(np.diag([1.0, -1e-9]))
    np.testing.assert_allclose(root, np.diag([1.0, 0.0]))
    with pytest.raises(StateError):
        sqrt_psd(np.diag([1.0, -1e-6]))


def test_trace_norm_examples(rng):
    assert trace_norm(np.eye(5)) == pytest.approx(5)
    assert trace_norm(np.zeros((3, 3))) == 0
    for _ in range(20):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        oracle = np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(m.conj().T @ m), 0, None)))
        assert trace_norm(m) == pytest.approx(oracle, rel=1e-12)


def test_fidelity_examples(rng):
    rho = random_density_matrix(2, rng)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-12)
    assert fidelity(density_of(basis_state(0, 1)), density_of(basis_state(1, 1))) == 0
    for _ in range(50):
        psi, phi = random_pure_state(2, rng), random_pure_state(2, rng)
        expected = abs(overlap(phi, psi)) ** 2
        assert abs(fidelity(density_of(psi), density_of(phi)) - expected) <= 1e-10
    with pytest.raises(StateError):
        fidelity(rho, DensityMatrix(np.eye(2) / 2))


@given(seeds, st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_fidelity_range_and_symmetry(seed, n):
    rng = np.random.default_rng(seed)
    dim = 2**n
    rho = random_density_matrix(n, rng, rank=int(rng.integers(1, dim + 1)))
    sigma = random_density_matrix(n, rng, rank=int(rng.integers(1, dim + 1)))
    f = fidelity(rho, sigma)
    assert 0 <= f <= 1
    assert abs(f - fidelity(sigma, rho)) <= 1e-9


def test_unitary_matrix_validation(rng):
    u = random_unitary(4, rng)
    assert np.linalg.norm(u.matrix @ u.dagger.matrix - np.eye(4)) <= 1e-9
    with pytest.raises(StateError):
        UnitaryMatrix(np.array([[1, 1], [0, 1]]))
