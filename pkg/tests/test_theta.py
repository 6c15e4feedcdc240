import numpy as np
import pytest

from hmltori.theta import InvalidRiemannMatrixError, RiemannMatrix, theta, theta_quasi_factor


def direct_sum_g1(z, b, nmax=40):
    # brute-force series oracle, genus 1
    m = np.arange(-nmax, nmax + 1)
    return np.sum(np.exp(1j * np.pi * b * m * m + 2j * np.pi * m * z))


def random_B(g, rng):
    X = rng.normal(size=(g, g))
    X = 0.5 * (X + X.T) * 0.3
    Y = rng.normal(size=(g, g))
    Y = Y @ Y.T * 0.3 + np.eye(g)
    return RiemannMatrix(X + 1j * Y)


def test_value_genus1_unit_modulus():
    val = theta([0.0], [[1j]], tol=1e-12)
    oracle = direct_sum_g1(0.0, 1j)
    assert abs(val - oracle) < 1e-12
    assert abs(val - 1.0864348112133080) < 1e-9


def test_matches_direct_sum_random_arguments():
    rng = np.random.default_rng(3)
    b = 0.31 + 1.2j
    for _ in range(20):
        z = rng.normal(scale=0.7) + 1j * rng.normal(scale=0.3)
        v = theta([z], [[b]], tol=1e-12)
        assert abs(v - direct_sum_g1(z, b)) < 1e-10 * (1 + abs(v))


def test_integer_periodicity():
    rng = np.random.default_rng(5)
    for g in (1, 2, 3):
        B = random_B(g, rng)
        for _ in range(10):
            z = rng.normal(size=g, scale=0.5) + 1j * rng.normal(size=g, scale=0.2)
            m = rng.integers(-3, 4, size=g)
            v1 = theta(z, B, tol=1e-12)
            v2 = theta(z + m, B, tol=1e-12)
            assert abs(v1 - v2) <= 1e-10 * (1 + abs(v1))


def test_quasi_periodicity():
    rng = np.random.default_rng(9)
    for g in (1, 2, 3):
        B = random_B(g, rng)
        for _ in range(10):
            z = rng.normal(size=g, scale=0.4) + 1j * rng.normal(size=g, scale=0.2)
            m = rng.integers(-2, 3, size=g)
            lhs = theta(z + B.entries @ m, B, tol=1e-12)
            rhs = theta_quasi_factor(z, m, B) * theta(z, B, tol=1e-12)
            assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_evenness_exact():
    rng = np.random.default_rng(13)
    for g in (1, 2, 3):
        B = random_B(g, rng)
        z = rng.normal(size=g) + 1j * rng.normal(size=g, scale=0.3)
        assert theta(z, B) == theta(-z, B)  # bit-for-bit by symmetric enumeration


def test_diagonal_B_factorizes():
    B = RiemannMatrix(np.diag([1j, 2j]))
    rng = np.random.default_rng(2)
    for _ in range(5):
        z = rng.normal(size=2) + 1j * rng.normal(size=2, scale=0.2)
        v = theta(z, B, tol=1e-12)
        v1 = theta([z[0]], [[1j]], tol=1e-13)
        v2 = theta([z[1]], [[2j]], tol=1e-13)
        assert abs(v - v1 * v2) < 1e-10 * (1 + abs(v))


def test_quasi_factor_trivial_and_g1():
    assert theta_quasi_factor([0.3], [0], [[1j]]) == 1.0
    val = theta_quasi_factor([0.0], [1], [[1j]])
    assert abs(val - np.exp(np.pi)) < 1e-12


def test_invalid_matrix_rejected():
    with pytest.raises(InvalidRiemannMatrixError):
        theta([0.0], [[-1j]])
    with pytest.raises(InvalidRiemannMatrixError):
        RiemannMatrix(np.array([[1j, 0.5], [0.2, 1j]]))


def test_truncation_consistency():
    B = [[0.4 + 0.9j]]
    z = [0.27 - 0.33j]
    a = theta(z, B, tol=1e-6)
    b = theta(z, B, tol=1e-12)
    assert abs(a - b) < 1e-6 * (1 + abs(b))
