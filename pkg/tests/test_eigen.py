import numpy as np
import pytest

from polar_lab.eigen import eigen_gap, jacobi_eigh, matrix_power


def random_spd(rng, d):
    a = rng.normal(size=(d, d))
    return a @ a.T + d * np.eye(d)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_jacobi_matches_numpy(rng, d):
    m = random_spd(rng, d)
    values, vectors = jacobi_eigh(m)
    assert np.allclose(values, np.linalg.eigvalsh(m), atol=1e-10)
    assert np.allclose(vectors @ np.diag(values) @ vectors.T, m, atol=1e-9)
    assert np.allclose(vectors.T @ vectors, np.eye(d), atol=1e-10)


def test_jacobi_on_a_stack(rng):
    stack = np.stack([random_spd(rng, 3) for _ in range(20)])
    values, vectors = jacobi_eigh(stack)
    assert values.shape == (20, 3)
    assert vectors.shape == (20, 3, 3)
    for k in range(20):
        assert np.allclose(values[k], np.linalg.eigvalsh(stack[k]))


def test_jacobi_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


def test_eigen_gap_of_a_diagonal():
    gap = eigen_gap(np.diag([2.0, 0.5, 1.0]))
    assert gap.lam_max == pytest.approx(2.0)
    assert gap.lam_min == pytest.approx(0.5)
    assert gap.gap == pytest.approx(1.5)


def test_matrix_power_square_root(rng):
    m = random_spd(rng, 4)
    root = matrix_power(m, 0.5)
    assert np.allclose(root @ root, m, atol=1e-9)
