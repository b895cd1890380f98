import unittest

import numpy as np

from elastocorner.poly import Polynomial, PolynomialError, PolynomialField


class TestPolynomial(unittest.TestCase):
    def test_arithmetic(self):
        x = Polynomial.variable(0, 2)
        y = Polynomial.variable(1, 2)
        self.assertEqual((x + 1) ** 2, x * x + 2 * x + 1)
        self.assertEqual((x + y) - (y + x), 0)
        self.assertEqual(3 - x, -(x - 3))
        self.assertEqual(((x + y) ** 3).degree, 3)
        self.assertTrue((x - x).is_zero())

    def test_diff_and_eval(self):
        p = Polynomial.parse("1 + 2j*x^2*y - y^3", 2)
        points = np.array([[0.5, -1.0], [2.0, 0.25]])
        np.testing.assert_allclose(p(points), 1 + 2j * points[:, 0] ** 2 * points[:, 1] - points[:, 1] ** 3)
        self.assertEqual(p.diff(0), Polynomial.parse("4j*x*y", 2))
        self.assertEqual(p.diff(1), Polynomial.parse("2j*x^2 - 3*y^2", 2))
        self.assertEqual(Polynomial.constant(5.0, 2).diff(0), 0)

    def test_errors(self):
        x = Polynomial.variable(0, 2)
        self.assertRaises(PolynomialError, lambda: Polynomial(nvars=4))
        self.assertRaises(PolynomialError, lambda: Polynomial({(1,): 1.0}, 2))
        self.assertRaises(PolynomialError, lambda: Polynomial({(0, 0): float("nan")}, 2))
        self.assertRaises(PolynomialError, lambda: x ** -1)
        self.assertRaises(PolynomialError, lambda: x + Polynomial.variable(0, 3))
        self.assertRaises(PolynomialError, lambda: x(np.zeros((4, 3))))


class TestPolynomialField(unittest.TestCase):
    def test_derivatives(self):
        field = PolynomialField.parse(["x^2*y", "1j*x + y^3"])
        point = np.array([[1.5, -0.5]])
        np.testing.assert_allclose(field.values(point), [[1.5 ** 2 * -0.5, 1.5j - 0.125]])
        np.testing.assert_allclose(field.jacobian(point)[0], [[2 * 1.5 * -0.5, 1.5 ** 2], [1j, 3 * 0.25]])
        hessian = field.hessian(point)[0]
        np.testing.assert_allclose(hessian[0], [[-1.0, 3.0], [3.0, 0.0]])
        np.testing.assert_allclose(hessian[1], [[0.0, 0.0], [0.0, -3.0]])

    def test_construction(self):
        self.assertTrue(PolynomialField.zero(3, 3).is_zero())
        field = PolynomialField.constant([1.0, 2.0j, 0.0], 3)
        self.assertEqual((field.dim, field.ncomp, field.degree), (3, 3, 0))
        self.assertFalse(field.is_zero())
        self.assertTrue((field - field).is_zero())
        self.assertEqual(field.scale(2).components[1], Polynomial.constant(4j, 3))
        self.assertRaises(PolynomialError, lambda: PolynomialField([]))
        self.assertRaises(PolynomialError, lambda: PolynomialField([Polynomial(nvars=2), Polynomial(nvars=3)]))
