"""Tests for the structured-function data model and its shifted solves."""

import cmath

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from linfnorm.errors import DimensionMismatch, SingularShift
from linfnorm.problems import delay_coupling_matrix, make_delay_fixture
from linfnorm.structured import MatrixFactor, ScalarTerm, StructuredTF

from conftest import siso_one_pole


class TestScalarTerm:
    def test_monomial(self):
        assert ScalarTerm(degree=1).value(2j) == 2j

    def test_pure_delay(self):
        assert ScalarTerm(delay=1.0).value(1j * np.pi) == pytest.approx(-1.0)

    def test_product(self):
        assert ScalarTerm(degree=1, delay=1.0).value(1.0) == pytest.approx(
            np.exp(-1.0))

    def test_constant_derivative(self):
        assert ScalarTerm().derivative(3.7 + 2j) == 0

    def test_monomial_derivative(self):
        assert ScalarTerm(degree=1).derivative(5j) == 1

    def test_delay_derivative_at_zero(self):
        assert ScalarTerm(delay=2.0).derivative(0.0) == pytest.approx(-2.0)

    def test_rejects_negative_parameters(self):
        with pytest.raises(ValueError):
            ScalarTerm(degree=-1)
        with pytest.raises(ValueError):
            ScalarTerm(delay=-0.5)

    @given(k=st.integers(0, 4), tau=st.floats(0.0, 3.0),
           re=st.floats(-2.0, 2.0), im=st.floats(-5.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_derivative_matches_finite_difference(self, k, tau, re, im):
        term = ScalarTerm(degree=k, delay=tau)
        s = complex(re, im)
        h = 1e-6
        fd = (term.value(s + h) - term.value(s - h)) / (2 * h)
        d = term.derivative(s)
        assert abs(d - fd) <= 1e-6 * (1 + abs(d))


def _delay_ingredients(n, tau=1.0, beta=0.01, theta=5.0):
    t = np.asarray(delay_coupling_matrix(n).todense())
    e = theta * np.eye(n) + t
    a0 = (1 / tau) * (1 / beta + 1) * (t - theta * np.eye(n))
    a1 = (1 / tau) * (1 / beta - 1) * (t - theta * np.eye(n))
    return e, a0, a1


class TestMatrixFactor:
    def test_affine_in_s(self):
        # s*I + 1 in 1x1
        f = MatrixFactor([(ScalarTerm(degree=1), np.eye(1)),
                          (ScalarTerm(), np.array([[1.0]]))])
        assert f.eval(2.0) == pytest.approx(np.array([[3.0]]))

    def test_constant_factor(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        f = MatrixFactor([(ScalarTerm(), m)])
        np.testing.assert_allclose(f.eval(1.7 + 0.3j).real, m)

    def test_delay_d_factor_at_zero(self):
        # at s=0 the D-factor reduces to -A0 - A1 (independent assembly)
        n = 3
        tf = make_delay_fixture(n)
        e, a0, a1 = _delay_ingredients(n)
        np.testing.assert_allclose(np.asarray(tf.d_factor.eval(0.0)).real,
                                   -a0 - a1, atol=1e-12)

    def test_pencil_derivative_is_e(self):
        tf = siso_one_pole()
        for s in (0.0, 2j, 1 + 1j):
            np.testing.assert_allclose(tf.d_factor.eval_derivative(s),
                                       np.eye(1))

    def test_constant_derivative_is_zero(self):
        tf = siso_one_pole()
        np.testing.assert_allclose(tf.b_factor.eval_derivative(3j),
                                   np.zeros((1, 1)))

    def test_delay_d_factor_derivative_at_zero(self):
        n = 4
        tf = make_delay_fixture(n)
        e, a0, a1 = _delay_ingredients(n)
        np.testing.assert_allclose(
            np.asarray(tf.d_factor.eval_derivative(0.0)).real, e + a1,
            atol=1e-12)

    def test_rejects_empty_and_mismatched(self):
        with pytest.raises(ValueError):
            MatrixFactor([])
        with pytest.raises(DimensionMismatch):
            MatrixFactor([(ScalarTerm(), np.eye(2)),
                          (ScalarTerm(), np.eye(3))])


def _random_sparse_stable(n, seed, density=0.05):
    rng = np.random.default_rng(seed)
    a = sp.random(n, n, density=density, random_state=rng, format="csc")
    a = a - (abs(sp.linalg.eigs(a, k=1, which="LR",
                                return_eigenvectors=False)[0].real) + 1.0) \
        * sp.identity(n, format="csc")
    d = MatrixFactor([(ScalarTerm(degree=1), sp.identity(n, format="csc")),
                      (ScalarTerm(), -a)])
    b = MatrixFactor([(ScalarTerm(), rng.standard_normal((n, 2)))])
    c = MatrixFactor([(ScalarTerm(), rng.standard_normal((2, n)))])
    return StructuredTF(c_factor=c, d_factor=d, b_factor=b)


class TestSolves:
    def test_scalar_solve(self):
        tf = siso_one_pole()
        np.testing.assert_allclose(tf.solve_d(0.0, np.array([[1.0]])),
                                   np.array([[1.0]]))

    def test_diagonal_solve(self):
        import linfnorm.problems as prob
        tf = prob.descriptor_tf(np.eye(2), np.diag([-1.0, -2.0]),
                                np.eye(2), np.eye(2))
        np.testing.assert_allclose(tf.solve_d(0.0, np.eye(2)),
                                   np.diag([1.0, 0.5]))

    def test_sparse_residual(self):
        tf = _random_sparse_stable(50, seed=7)
        rng = np.random.default_rng(11)
        rhs = rng.standard_normal((50, 3))
        for s in (0.0, 2j, 0.5 + 3j):
            x = tf.solve_d(s, rhs)
            d = np.asarray(tf.d_factor.eval(s).todense())
            res = np.linalg.norm(d @ x - rhs) / np.linalg.norm(rhs)
            assert res <= 1e-10

    def test_adjoint_scalar(self):
        tf = siso_one_pole()
        x = tf.solve_d_adjoint(1j, np.array([[1.0]]))
        assert x[0, 0] == pytest.approx(0.5 + 0.5j)

    def test_adjoint_equals_direct_for_hermitian(self):
        # D(s) = s*I + S with S symmetric real, evaluated at real s
        rng = np.random.default_rng(3)
        s_mat = rng.standard_normal((6, 6))
        s_mat = s_mat + s_mat.T
        d = MatrixFactor([(ScalarTerm(degree=1), np.eye(6)),
                          (ScalarTerm(), s_mat + 20 * np.eye(6))])
        b = MatrixFactor([(ScalarTerm(), rng.standard_normal((6, 2)))])
        c = MatrixFactor([(ScalarTerm(), rng.standard_normal((2, 6)))])
        tf = StructuredTF(c, d, b)
        rhs = rng.standard_normal((6, 2))
        np.testing.assert_allclose(tf.solve_d(3.0, rhs),
                                   tf.solve_d_adjoint(3.0, rhs), atol=1e-12)

    def test_adjoint_residual(self):
        rng = np.random.default_rng(21)
        a = rng.standard_normal((30, 30)) - 35 * np.eye(30)
        import linfnorm.problems as prob
        tf = prob.descriptor_tf(np.eye(30), a, rng.standard_normal((30, 2)),
                                rng.standard_normal((2, 30)))
        rhs = rng.standard_normal((30, 4)) + 1j * rng.standard_normal((30, 4))
        s = 0.3 + 2.1j
        x = tf.solve_d_adjoint(s, rhs)
        d = tf.d_factor.eval(s)
        assert np.linalg.norm(d.conj().T @ x - rhs) / np.linalg.norm(rhs) <= 1e-10

    def test_singular_shift_dense(self):
        import linfnorm.problems as prob
        # D(s) = s*I is exactly singular at s=0
        tf = prob.descriptor_tf(np.eye(2), np.zeros((2, 2)),
                                np.eye(2), np.eye(2))
        with pytest.raises(SingularShift):
            tf.solve_d(0.0, np.eye(2))

    def test_singular_shift_sparse(self):
        d = MatrixFactor([(ScalarTerm(degree=1), sp.identity(300, format="csc"))])
        b = MatrixFactor([(ScalarTerm(), sp.identity(300, format="csc"))])
        tf = StructuredTF(b, d, b)
        with pytest.raises(SingularShift):
            tf.solve_d(0.0, np.ones((300, 1)))

    def test_factorization_cache_shared_with_adjoint(self):
        tf = siso_one_pole()
        tf.solve_d(2j, np.array([[1.0]]))
        fact = tf._cache[2j]
        tf.solve_d_adjoint(2j, np.array([[1.0]]))
        assert tf._cache[2j] is fact
        assert len(tf._cache) == 1


class TestEvalH:
    def test_scalar(self, one_pole):
        assert one_pole.eval(2.0)[0, 0] == pytest.approx(1 / 3)

    def test_partial_fractions(self, two_pole):
        assert two_pole.eval(0.0)[0, 0] == pytest.approx(1.5)

    def test_delay_example_peak_value(self):
        # published optimum of the n=100 delay benchmark
        tf = make_delay_fixture(100)
        sigma = np.linalg.svd(tf.eval(3.07547j), compute_uv=False)[0]
        assert sigma == pytest.approx(0.23766, rel=1e-4)

    def test_derivative_scalar(self, one_pole):
        assert one_pole.eval_derivative(2.0)[0, 0] == pytest.approx(-1 / 9)

    def test_derivative_resolvent_square(self, one_pole):
        # H'(s) = -C (sI-A)^{-2} B = -1/(s+1)^2 at s=0
        assert one_pole.eval_derivative(0.0)[0, 0] == pytest.approx(-1.0)

    def test_derivative_finite_difference(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((20, 20)) - 25 * np.eye(20)
        import linfnorm.problems as prob
        tf = prob.descriptor_tf(np.eye(20), a, rng.standard_normal((20, 2)),
                                rng.standard_normal((3, 20)))
        s = 0.4 + 1.3j
        h = 1e-5
        fd = (tf.eval(s + h) - tf.eval(s - h)) / (2 * h)
        d = tf.eval_derivative(s)
        assert np.linalg.norm(d - fd) <= 1e-6 * np.linalg.norm(d)

    def test_derivative_finite_difference_delay(self):
        tf = make_delay_fixture(30)
        s = 2.2j
        h = 1e-5
        fd = (tf.eval(s + h) - tf.eval(s - h)) / (2 * h)
        d = tf.eval_derivative(s)
        assert np.linalg.norm(d - fd) <= 1e-6 * np.linalg.norm(d)

    def test_conjugate_symmetry(self):
        tf = make_delay_fixture(40)
        assert tf.is_real
        for w in (0.3, 1.7, 6.2):
            h = tf.eval(1j * w)
            h_conj = tf.eval(-1j * w)
            assert np.linalg.norm(h_conj - h.conj()) <= 1e-12 * np.linalg.norm(h)

    def test_matches_dense_explicit_inverse(self):
        rng = np.random.default_rng(17)
        for n in (10, 50):
            a = rng.standard_normal((n, n)) - (n + 5) * np.eye(n)
            import linfnorm.problems as prob
            tf = prob.descriptor_tf(np.eye(n), a, rng.standard_normal((n, 2)),
                                    rng.standard_normal((2, n)))
            for s in (1j, 0.5 + 2j):
                d = tf.d_factor.eval(s)
                explicit = (tf.c_factor.eval(s)
                            @ np.linalg.inv(d) @ tf.b_factor.eval(s))
                got = tf.eval(s)
                assert (np.linalg.norm(got - explicit)
                        <= 1e-10 * np.linalg.norm(explicit))

    def test_dimension_checks(self):
        d = MatrixFactor([(ScalarTerm(degree=1), np.eye(3))])
        b = MatrixFactor([(ScalarTerm(), np.ones((4, 1)))])
        c = MatrixFactor([(ScalarTerm(), np.ones((1, 3)))])
        with pytest.raises(DimensionMismatch):
            StructuredTF(c, d, b)
