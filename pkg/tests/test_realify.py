import numpy as np
import pytest

from invdet.matcore import MatrixError, identity, lu_det, random_gated
from invdet.realify import psi, real_det

from conftest import gated_sample


def test_psi_examples():
    assert np.array_equal(psi(identity(3)), np.eye(6))
    assert np.array_equal(psi([[1j]]), [[0, -1], [1, 0]])
    expected = np.array([
        [1, 0, -1, 0],
        [0, 1, 0, 0],
        [1, 0, 1, 0],
        [0, 0, 0, 1],
    ], dtype=float)
    assert np.array_equal(psi([[1 + 1j, 0], [0, 1]]), expected)


def test_real_det_examples():
    assert real_det(np.eye(4)) == 1
    assert real_det([[0, -1], [1, 0]]) == pytest.approx(1, abs=1e-15)
    assert real_det([[2.0]]) == 2
    assert real_det(psi([[1 + 1j, 0], [0, 1]])) == pytest.approx(2, abs=1e-14)


def test_real_det_rejects():
    with pytest.raises(MatrixError):
        real_det([[1, 2, 3]])
    with pytest.raises(MatrixError):
        real_det([[np.inf]])
    # singular input is not an error
    assert real_det([[1, 1], [1, 1]]) == 0


def test_det_identity(rng):
    # det psi(A) = |det A|^2
    for _ in range(500):
        k = int(rng.integers(1, 6))
        a = gated_sample(rng, k)
        assert abs(real_det(psi(a)) - abs(lu_det(a)) ** 2) <= 1e-9


def test_psi_is_an_algebra_morphism(rng):
    for _ in range(50):
        k = int(rng.integers(1, 5))
        a = random_gated(rng, k, 0.9) * (1 + 2j)
        b = random_gated(rng, k, 0.5) - 0.3j
        c = 0.7 - 1.1j
        assert np.allclose(psi(a @ b), psi(a) @ psi(b), atol=1e-13)
        assert np.allclose(psi(a + b), psi(a) + psi(b), atol=1e-15)
        assert np.allclose(psi(c * a), psi(c * identity(k)) @ psi(a), atol=1e-13)
        # trace of the real form doubles the real part
        assert np.trace(psi(a)) == pytest.approx(2 * np.trace(a).real, abs=1e-13)
        assert np.allclose(psi(a.conj().T), psi(a).T)
