import math
import os
import tempfile
import unittest

import numpy as np
from scipy import special as sp

from elastocorner.config import Convention, ElasFlag
from elastocorner.corner import nonradiating_polygon_scene
from elastocorner.elastic import (AccuracyError, LameParameters, SingularityError, SourceScene, StrongConvexityError,
                                  Wavenumbers, boundary_traction, far_field, far_field_asymptotic_check,
                                  far_field_constants, far_field_pattern, green_tensor, helmholtz_fundamental,
                                  helmholtz_split, navier_apply, navier_polynomial, volume_potential)
from elastocorner.fields import CapabilityError, FiniteDifferenceField, SampledField
from elastocorner.geometry import BallSupport, ConvexPolygon
from elastocorner.poly import PolynomialField
from elastocorner.special import DomainError


SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
TRIANGLE = ConvexPolygon([[0, 0], [1.2, 0.1], [0.4, 0.9]])
UNIT = LameParameters(1.0, 1.0)


class TestMaterial(unittest.TestCase):
    def test_lame_parameters(self):
        self.assertEqual(LameParameters(1.0, 2.0).convexity_margin, 6.0)
        self.assertEqual(LameParameters(-0.5, 1.0, 3).convexity_margin, 0.5)
        freq = Wavenumbers.of(4.0, UNIT)
        self.assertAlmostEqual(freq.omega_p, 4 / math.sqrt(3), places=14)
        self.assertAlmostEqual(freq.omega_s, 4.0, places=14)

    def test_strong_convexity(self):
        error = None
        try:
            LameParameters(-1.0, 0.5)
        except StrongConvexityError as e:
            error = e

        self.assertIsNotNone(error)
        self.assertAlmostEqual(error.margin, -1.0)
        self.assertRaises(StrongConvexityError, lambda: LameParameters(1.0, 0.0))
        self.assertRaises(StrongConvexityError, lambda: LameParameters(-1.0, 1.0, 3))
        self.assertRaises(DomainError, lambda: LameParameters(1.0, 1.0, 4))
        self.assertRaises(DomainError, lambda: LameParameters(float("nan"), 1.0))
        self.assertRaises(DomainError, lambda: Wavenumbers.of(0.0, UNIT))

    def test_scene(self):
        density = PolynomialField.parse(["1 + x", "y"])
        scene = SourceScene(SQUARE, density, UNIT, 2.0)
        self.assertEqual(scene.dim, 2)
        self.assertFalse(scene.is_zero())
        self.assertTrue(scene.with_density(PolynomialField.zero()).is_zero())
        np.testing.assert_allclose(scene.source_values([[0.5, 0.5], [2.0, 0.5]]), [[1.5, 0.5], [0, 0]])
        self.assertRaises(DomainError, lambda: SourceScene(SQUARE, PolynomialField.zero(3, 3), UNIT, 1.0))
        self.assertRaises(DomainError, lambda: SourceScene(BallSupport(), PolynomialField.zero(3, 3), UNIT, 1.0))
        self.assertRaises(DomainError, lambda: SourceScene(SQUARE, density, UNIT, 1.0, holder_alpha=0.0))
        self.assertRaises(DomainError, lambda: SourceScene(SQUARE, density, UNIT, -1.0))


class TestOperators(unittest.TestCase):
    def test_navier_conventions(self):
        field = PolynomialField.parse(["x^2", "0"])
        material = LameParameters(1.0, 2.0)
        # Δu = (2, 0) and ∇(∇·u) = (2, 0)
        np.testing.assert_allclose(navier_apply(field, material, [0.3, 0.4], Convention.PAPER), [8.0, 0.0])
        np.testing.assert_allclose(navier_apply(field, material, [0.3, 0.4], Convention.STANDARD), [10.0, 0.0])

    def test_navier_polynomial(self):
        field = PolynomialField.parse(["x^3*y + 1j*y^2", "x*y - y^3"])
        material = LameParameters(0.7, 1.3)
        points = np.array([[0.1, -0.4], [1.5, 0.2], [-0.8, 0.9]])
        for convention in Convention:
            np.testing.assert_allclose(navier_polynomial(field, material, convention).values(points),
                                       navier_apply(field, material, points, convention), atol=1e-13)

    def test_navier_3d(self):
        field = PolynomialField.parse(["x*z", "y^2", "x*y*z"], 3)
        material = LameParameters(0.5, 1.0, 3)
        # div u = z + 2y + xy, so ∇(∇·u) = (y, 2 + x, 1) and Δu = (0, 2, 0)
        np.testing.assert_allclose(navier_apply(field, material, [0.2, 0.3, 0.4], Convention.STANDARD),
                                   [1.5 * 0.3, 2.0 + 1.5 * 2.2, 1.5])

    def test_finite_difference_fallback(self):
        field = PolynomialField.parse(["x^2*y", "x - y^2"])
        sampled = SampledField(field.values)
        points = np.array([[0.3, 0.7], [1.1, -0.2]])
        self.assertRaises(CapabilityError, lambda: navier_apply(sampled, UNIT, points))
        expected = navier_apply(field, UNIT, points)
        np.testing.assert_allclose(navier_apply(sampled, UNIT, points, flags=ElasFlag.FD_FALLBACK), expected,
                                   atol=1e-6)
        np.testing.assert_allclose(navier_apply(FiniteDifferenceField(sampled, step=1e-2), UNIT, points), expected,
                                   atol=1e-6)

    def test_traction(self):
        material = LameParameters(0.7, 1.3)
        normals = np.array([[1.0, 0.0], [0.6, 0.8]])
        points = np.array([[0.2, 0.1], [0.5, 0.5]])
        dilation = PolynomialField.parse(["x", "y"])
        np.testing.assert_allclose(boundary_traction(dilation, material, points, normals), 2 * 2.0 * normals)
        rotation = PolynomialField.parse(["-y", "x"])
        np.testing.assert_allclose(boundary_traction(rotation, material, points, normals), 0, atol=1e-15)
        dilation_3d = PolynomialField.parse(["x", "y", "z"], 3)
        material_3d = LameParameters(0.7, 1.3, 3)
        np.testing.assert_allclose(boundary_traction(dilation_3d, material_3d, [0.1, 0.2, 0.3], [0.0, 0.0, 1.0]),
                                   [0.0, 0.0, 2 * 1.3 + 3 * 0.7])
        self.assertRaises(DomainError, lambda: boundary_traction(dilation, material, points, [[2.0, 0.0]]))


class TestGreen(unittest.TestCase):
    def test_fundamental_solution(self):
        x = np.array([[1.0, 0.5], [-0.2, 2.0]])
        y = np.zeros(2)
        r = np.linalg.norm(x, axis=-1)
        np.testing.assert_allclose(helmholtz_fundamental(x, y, 1.5), 0.25j * sp.hankel1(0, 1.5 * r), atol=1e-10)
        x3 = np.array([0.3, -0.4, 1.2])
        r3 = np.linalg.norm(x3)
        self.assertAlmostEqual(helmholtz_fundamental(x3, np.zeros(3), 2.0), np.exp(2j * r3) / (4 * math.pi * r3),
                               places=14)
        self.assertRaises(SingularityError, lambda: helmholtz_fundamental(y, y, 1.0))
        self.assertRaises(DomainError, lambda: helmholtz_fundamental(x, y, 0.0))

    def test_green_tensor(self):
        material = LameParameters(1.7, 0.9)
        x = np.array([[0.8, 0.3], [-0.5, 0.9]])
        y = np.array([[0.1, -0.2], [0.4, 0.4]])
        forward = green_tensor(x, y, material, 2.0)
        np.testing.assert_allclose(forward, np.swapaxes(forward, -1, -2), atol=1e-15)
        np.testing.assert_allclose(forward, green_tensor(y, x, material, 2.0), atol=1e-14)
        self.assertEqual(green_tensor(np.ones((2, 3)), np.zeros(3), LameParameters(1.0, 1.0, 3), 1.0).shape,
                         (2, 3, 3))
        self.assertRaises(SingularityError, lambda: green_tensor(x, x, material, 2.0))


class TestRadiation(unittest.TestCase):
    def test_far_field_of_square(self):
        scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.0]), UNIT, 2.0)
        e = np.array([0.6, 0.8])

        def transform(k):
            return np.prod([(1 - np.exp(-1j * k * c)) / (1j * k * c) for c in e])

        up, us = far_field(scene, e)
        freq = scene.freq
        np.testing.assert_allclose(up, transform(freq.omega_p) * e[0] * e, atol=1e-11)
        np.testing.assert_allclose(us, transform(freq.omega_s) * (np.array([1.0, 0.0]) - e[0] * e), atol=1e-11)

        self.assertRaises(DomainError, lambda: far_field(scene, [1.0, 1.0]))
        self.assertRaises(DomainError, lambda: far_field(scene, e, method="series"))
        self.assertRaises(CapabilityError, lambda: far_field(scene, e, method="closed"))

    def test_pattern(self):
        scene = SourceScene(TRIANGLE, PolynomialField.parse(["1 + x", "2j*y"]), UNIT, 1.5)
        pattern = far_field_pattern(scene, 12)
        self.assertEqual(len(pattern), 12)
        self.assertLess(pattern.projection_defect(), 1e-12)
        self.assertGreater(pattern.max_magnitude, 0.1)

        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "pattern.csv")
            pattern.to_csv(path)
            with open(path, encoding="utf-8") as f:
                self.assertEqual(f.readline().strip().split(",")[:3], ["dir_x", "dir_y", "up_x_re"])
            table = np.loadtxt(path, delimiter=",", skiprows=1)
        self.assertEqual(table.shape, (12, 10))
        np.testing.assert_allclose(table[:, 2] + 1j * table[:, 3], pattern.up_inf[:, 0])

    def test_zero_scene(self):
        scene = SourceScene(SQUARE, PolynomialField.zero(), UNIT, 1.0)
        self.assertEqual(far_field_pattern(scene, 8).max_magnitude, 0.0)
        np.testing.assert_array_equal(volume_potential(scene, [[3.0, 0.0], [0.5, 0.5]]), 0)
        report = far_field_asymptotic_check(scene, np.array([1.0, 0.0]))
        self.assertEqual(report["max_sample"], 0.0)
        self.assertIsNone(report["remainder_slope"])

    def test_nonradiating_potential(self):
        scene, bump = nonradiating_polygon_scene(TRIANGLE, (1.0, 0.5j), UNIT, 1.5)
        points = np.array([[0.55, 0.35], [2.5, 1.5]])
        scale = abs(bump.values(points[:1])[0, 0])
        expected = bump.values(points) * np.array([[1.0], [0.0]])
        self.assertLess(np.max(np.abs(volume_potential(scene, points) - expected)), 1e-5 * scale)
        self.assertLess(far_field_pattern(scene, 8).max_magnitude, 1e-8)

    def test_errors(self):
        scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.5]), UNIT, 2.0)
        ball = SourceScene(BallSupport(), PolynomialField.constant([1.0, 0.0, 0.0], 3),
                           LameParameters(1.0, 1.0, 3), 1.0)
        self.assertRaises(CapabilityError, lambda: volume_potential(ball, [2.0, 0.0, 0.0]))
        self.assertRaises(CapabilityError, lambda: helmholtz_split(ball, [2.0, 0.0, 0.0]))
        self.assertRaises(AccuracyError, lambda: helmholtz_split(scene, [0.5, 0.5]))
        self.assertRaises(AccuracyError, lambda: far_field_asymptotic_check(scene, [1.0, 0.0], [5, 10, 20, 40]))
        self.assertRaises(DomainError, lambda: far_field_asymptotic_check(scene, [1.0, 0.0], [50, 100, 200]))

    def test_far_field_constants(self):
        cp, cs = far_field_constants(UNIT, 2.0)
        # |c| = (1/(4·modulus))·√(2/(πk))
        self.assertAlmostEqual(abs(cs), 0.25 * math.sqrt(2 / (math.pi * 2.0)), places=14)
        self.assertAlmostEqual(abs(cp), 0.25 / 3 * math.sqrt(2 / (math.pi * 2 / math.sqrt(3))), places=14)


def split_stencil(scene, x, step):
    '''u_p and u_s at x, x ± step·e₁ and x ± step·e₂, in that order.'''
    shifts = np.array([[0, 0], [step, 0], [-step, 0], [0, step], [0, -step]])
    parts = [helmholtz_split(scene, np.asarray(x, dtype=float) + shift) for shift in shifts]
    return np.array([up for up, _ in parts]), np.array([us for _, us in parts])


def laplacian(stencil, step):
    return (np.sum(stencil[1:], axis=0) - 4 * stencil[0]) / step ** 2


class TestHelmholtzSplit(unittest.TestCase):
    SCENE = SourceScene(SQUARE, PolynomialField.parse(["1 + x", "2j*y"]), UNIT, 2.0)
    # More than half a diameter from the square, so every stencil point uses the same quadrature.
    POINTS = ([2.5, 0.5], [-1.0, 1.8], [0.5, -1.5])
    STEP = 1e-2

    def test_parts_sum_to_field(self):
        for x in self.POINTS:
            up, us = helmholtz_split(self.SCENE, x)
            u = volume_potential(self.SCENE, x)
            self.assertGreater(np.linalg.norm(up), 1e-3 * np.linalg.norm(u))
            self.assertGreater(np.linalg.norm(us), 1e-3 * np.linalg.norm(u))
            self.assertLess(np.linalg.norm(up + us - u), 1e-4 * np.linalg.norm(u))

    def test_irrotational_and_solenoidal(self):
        freq = self.SCENE.freq
        h = self.STEP
        for x in self.POINTS:
            up, us = split_stencil(self.SCENE, x, h)
            with self.subTest(x=x):
                rot_up = ((up[1, 1] - up[2, 1]) - (up[3, 0] - up[4, 0])) / (2 * h)
                div_us = ((us[1, 0] - us[2, 0]) + (us[3, 1] - us[4, 1])) / (2 * h)
                self.assertLess(abs(rot_up), 1e-2 * freq.omega_p * np.linalg.norm(up[0]))
                self.assertLess(abs(div_us), 1e-2 * freq.omega_s * np.linalg.norm(us[0]))
                # The other two derivatives do not vanish.
                rot_us = ((us[1, 1] - us[2, 1]) - (us[3, 0] - us[4, 0])) / (2 * h)
                div_up = ((up[1, 0] - up[2, 0]) + (up[3, 1] - up[4, 1])) / (2 * h)
                self.assertGreater(abs(rot_us), 0.02 * freq.omega_s * np.linalg.norm(us[0]))
                self.assertGreater(abs(div_up), 0.02 * freq.omega_p * np.linalg.norm(up[0]))

    def test_helmholtz_equations(self):
        freq = self.SCENE.freq
        h = self.STEP
        for x in self.POINTS:
            up, us = split_stencil(self.SCENE, x, h)
            with self.subTest(x=x):
                residual_p = laplacian(up, h) + freq.omega_p ** 2 * up[0]
                residual_s = laplacian(us, h) + freq.omega_s ** 2 * us[0]
                self.assertLess(np.linalg.norm(residual_p), 1e-2 * freq.omega_p ** 2 * np.linalg.norm(up[0]))
                self.assertLess(np.linalg.norm(residual_s), 1e-2 * freq.omega_s ** 2 * np.linalg.norm(us[0]))


class TestVolumePotential(unittest.TestCase):
    SCENE = SourceScene(SQUARE, PolynomialField.parse(["1 + x", "2j*y"]), UNIT, 2.0)

    def test_interior_equation(self):
        # Far enough inside that the inner disk radius of the quadrature is the same at every stencil point.
        points = np.array([[0.5, 0.5], [0.45, 0.55]])
        u = volume_potential(self.SCENE, points)
        f = self.SCENE.density.values(points)
        omega = self.SCENE.omega
        residuals = []
        for step in (0.1, 0.05, 0.025):
            sampled = FiniteDifferenceField(SampledField(lambda p: volume_potential(self.SCENE, p)), step=step)
            residual = navier_apply(sampled, UNIT, points, Convention.STANDARD) + omega ** 2 * u - f
            residuals.append(np.max(np.abs(residual)))
        orders = np.log2(np.array(residuals[:-1]) / np.array(residuals[1:]))
        self.assertGreaterEqual(np.min(orders), 1.8)
        self.assertLess(residuals[-1], 1e-2 * np.max(np.abs(f)))

    def test_linear_in_density(self):
        first = PolynomialField.parse(["1 + x", "0"])
        second = PolynomialField.parse(["y", "x*y - 2"])
        combined = PolynomialField.parse(["1 + x + 2j*y", "2j*x*y - 4j"])

        def scene(density):
            return SourceScene(TRIANGLE, density, UNIT, 1.5)

        points = np.array([[3.0, 1.0], [0.5, 0.3], [-0.4, 2.2]])
        expected = volume_potential(scene(first), points) + 2j * volume_potential(scene(second), points)
        np.testing.assert_allclose(volume_potential(scene(combined), points), expected, rtol=1e-10, atol=1e-13)
        patterns = [far_field_pattern(scene(density), 12) for density in (first, second, combined)]
        np.testing.assert_allclose(patterns[2].up_inf, patterns[0].up_inf + 2j * patterns[1].up_inf,
                                   rtol=1e-10, atol=1e-13)
        np.testing.assert_allclose(patterns[2].us_inf, patterns[0].us_inf + 2j * patterns[1].us_inf,
                                   rtol=1e-10, atol=1e-13)


class TestFarFieldAsymptotics(unittest.TestCase):
    def test_remainder_slope(self):
        scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.0]), UNIT, 2.0)
        report = far_field_asymptotic_check(scene, np.array([0.6, 0.8]))
        self.assertAlmostEqual(report["leading_slope"], -0.5, delta=0.15)
        self.assertAlmostEqual(report["remainder_slope"], -1.5, delta=0.1)
        self.assertLess(report["remainder_naive_slope"], -1.0)
        self.assertEqual(report["nominal_constant"], 1 / (4 * math.pi))
        for wave in ("p", "s"):
            theory = complex(*report[f"theory_constant_{wave}"])
            fitted = complex(*report[f"fitted_constant_{wave}"])
            self.assertLess(abs(fitted - theory), 0.1 * abs(theory))
