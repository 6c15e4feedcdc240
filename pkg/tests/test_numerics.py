import numpy as np
import pytest

from hmltori.numerics import (
    Jet,
    MultipleRootError,
    NumericsError,
    Path,
    SingularSystemError,
    cauchy_coefficients,
    central_diff,
    circle,
    integrate_path,
    line,
    poly_roots,
    solve_dense,
)


def test_cauchy_integral_one_over_z():
    val, err = integrate_path(lambda z: 1.0 / z, circle(0.0, 1.0), tol=1e-12)
    assert abs(val - 2j * np.pi) < 1e-12
    assert err < 1e-10


def test_segment_antiderivative():
    path = Path((line(0.0, 1.0),))
    val, _ = integrate_path(lambda z: z * z, path, tol=1e-13)
    assert abs(val - 1.0 / 3.0) < 1e-13


def test_argument_principle_counts_roots():
    # P = (x^2-1)(x^2-4); circle |x-1| = 0.5 encloses the simple root x=1
    P = np.array([1.0, 0.0, -5.0, 0.0, 4.0])
    dP = np.polyder(P)
    f = lambda z: np.polyval(dP, z) / np.polyval(P, z)
    val, _ = integrate_path(f, circle(1.0, 0.5), tol=1e-12)
    assert abs(val - 2j * np.pi) < 1e-9


def test_log_derivative_winding_is_integer():
    # zeros minus poles enclosed, for a rational function
    f = lambda z: (2.0 / (z - 0.2) + 1.0 / (z + 0.3) - 1.0 / (z - 0.1))
    val, _ = integrate_path(f, circle(0.0, 1.0), tol=1e-12)
    n = val / (2j * np.pi)
    assert abs(n - round(n.real)) < 1e-8
    assert round(n.real) == 2


def test_cauchy_coefficients_exponential():
    jet = cauchy_coefficients(np.exp, 0.0, 0.7, 3)
    expect = [1.0, 1.0, 0.5, 1.0 / 6.0]
    assert np.max(np.abs(jet.coefficients - expect)) < 1e-12


def test_cauchy_principal_part_residue():
    jet = cauchy_coefficients(lambda z: 1.0 / z, 0.0, 0.5, 2, principal=True)
    assert abs(jet.residue - 1.0) < 1e-12
    assert np.max(np.abs(jet.coefficients)) < 1e-12


def test_cauchy_residue_rational_closed_form():
    # residue at 2i of -z/((z-2i)(z+2i)(z-i/4)(z-i)) equals 2/7
    # partial-fraction oracle: -2i/((4i)(2i-i/4)(2i-i)) = 2/7
    def f(z):
        return -z / ((z - 2j) * (z + 2j) * (z - 0.25j) * (z - 1j))

    jet = cauchy_coefficients(f, 2j, 0.4, 0, principal=True)
    assert abs(jet.residue - 2.0 / 7.0) < 1e-12


def test_cauchy_polynomial_is_exact():
    import math

    rng = np.random.default_rng(7)
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)  # lowest order first
    f = lambda z: np.polyval(coeffs[::-1], z)
    center = 0.3 + 0.1j
    jet = cauchy_coefficients(f, center, 1.1, 4)
    for k in range(5):
        d = coeffs[::-1]
        for _ in range(k):
            d = np.polyder(d)
        want = np.polyval(d, center) / math.factorial(k)
        assert abs(jet.coefficients[k] - want) < 1e-12


def test_central_diff_first_derivative():
    h = 1e-3
    x = 1.0 + h * np.arange(-1, 2)
    d = central_diff(x**2, h, order=1)
    assert abs(d[0] - 2.0) < 1e-6


def test_central_diff_second_derivative_sin():
    h = 1e-3
    x = h * np.arange(-1, 2)
    d2 = central_diff(np.sin(x), h, order=2)
    assert abs(d2[0]) < 1e-6


def test_central_diff_mixed_partial():
    h = 1e-3
    x = h * np.arange(-1, 2)
    grid = np.exp(x[:, None] + x[None, :])
    d = central_diff(grid, h)
    assert abs(d["dxy"][0, 0] - 1.0) < 1e-5


def test_central_diff_second_order_convergence():
    f = lambda x: np.sin(3 * x) * np.exp(x)
    x0 = 0.4
    errs = []
    for h in (1e-2, 5e-3):
        x = x0 + h * np.arange(-1, 2)
        d = central_diff(f(x), h, order=1)[0]
        exact = 3 * np.cos(3 * x0) * np.exp(x0) + f(x0)
        errs.append(abs(d - exact))
    ratio = errs[0] / errs[1]
    assert 4 * 0.8 < ratio < 4 * 1.2


def test_central_diff_grid_too_small():
    with pytest.raises(NumericsError):
        central_diff(np.array([1.0, 2.0]), 0.1)


def test_solve_dense_identity():
    b = np.array([1.0, 2.0, 3.0 + 1j])
    assert np.allclose(solve_dense(np.eye(3), b), b)


def test_solve_dense_2x2_hermitian():
    A = np.array([[1.0, 1j], [-1j, 1.0]]) + np.eye(2)  # make nonsingular
    b = np.array([1.0, 0.0])
    x = solve_dense(A, b)
    assert np.linalg.norm(A @ x - b) < 1e-12


def test_solve_dense_random_10x10_residual():
    rng = np.random.default_rng(11)
    for _ in range(5):
        A = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10)) + 5 * np.eye(10)
        b = rng.normal(size=10) + 1j * rng.normal(size=10)
        x = solve_dense(A, b)
        assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b) * 10


def test_solve_dense_singular_rejected():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularSystemError):
        solve_dense(A, np.array([1.0, 1.0]))


def test_poly_roots_quadratic():
    r = poly_roots([1.0, 0.0, 1.0])
    assert np.allclose(sorted(r, key=lambda z: z.imag), [-1j, 1j])


def test_poly_roots_quartic():
    r = poly_roots([1.0, 0.0, -5.0, 0.0, 4.0])
    assert np.allclose(r, [-2.0, -1.0, 1.0, 2.0])


def test_poly_roots_multiple_rejected():
    with pytest.raises(MultipleRootError):
        poly_roots([1.0, -2.0, 1.0])  # (x-1)^2
