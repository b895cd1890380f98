import math
import unittest

import numpy as np

from elastocorner.geometry import (BallSupport, ConvexPolygon, CornerChart, GeometryError, Sector, arc_rule,
                                   ball_rule, circle_directions, corner_chart, fibonacci_sphere, polar_fan_rule,
                                   polygon_rule, sector_ball_rule, sector_rule, singular_disk_rule)


SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
PENTAGON = ConvexPolygon([[math.cos(t), math.sin(t)] for t in 2 * math.pi * np.arange(5) / 5 + 0.1])


class TestShapes(unittest.TestCase):
    def test_polygon(self):
        self.assertEqual(len(SQUARE), 4)
        self.assertAlmostEqual(SQUARE.area, 1.0, places=15)
        np.testing.assert_allclose(SQUARE.centroid, [0.5, 0.5], atol=1e-15)
        self.assertAlmostEqual(SQUARE.diameter, math.sqrt(2), places=15)
        np.testing.assert_array_equal(SQUARE.contains([[0.5, 0.5], [1.5, 0.5], [0.0, 0.5]]), [True, False, False])
        np.testing.assert_allclose(SQUARE.distance_to_boundary([[0.5, 0.2], [2.0, 0.5]]), [0.2, 1.0], atol=1e-15)
        self.assertAlmostEqual(SQUARE.interior_angle(2), math.pi / 2, places=14)
        self.assertAlmostEqual(PENTAGON.interior_angle(3), 3 * math.pi / 5, places=13)

    def test_polygon_errors(self):
        self.assertRaises(GeometryError, lambda: ConvexPolygon([[0, 0], [1, 0]]))
        self.assertRaises(GeometryError, lambda: ConvexPolygon([[0, 0], [0, 1], [1, 1], [1, 0]]))
        self.assertRaises(GeometryError, lambda: ConvexPolygon([[0, 0], [1, 0], [2, 0], [1, 1]]))
        self.assertRaises(GeometryError, lambda: ConvexPolygon([[0, 0], [1, 0], [1, 0], [0, 1]]))
        self.assertRaises(GeometryError, lambda: ConvexPolygon([[0, 0], [1, 0], [float("inf"), 1]]))

    def test_sector(self):
        K = Sector(-math.pi / 4, math.pi / 4)
        self.assertAlmostEqual(K.opening, math.pi / 2, places=15)
        self.assertAlmostEqual(K.delta_K, math.cos(math.pi / 8), places=15)
        np.testing.assert_array_equal(K.contains([[1.0, 0.5], [0.0, 1.0], [-1.0, 0.0]]), [True, False, False])
        self.assertRaises(GeometryError, lambda: Sector(1.0, 0.5))
        self.assertRaises(GeometryError, lambda: Sector(-math.pi, 0.0))
        self.assertRaises(GeometryError, lambda: BallSupport(0.0))
        self.assertAlmostEqual(BallSupport(2.0).volume, 32 * math.pi / 3, places=12)


class TestCornerChart(unittest.TestCase):
    def test_square_corner(self):
        chart = corner_chart(SQUARE, 0)
        self.assertAlmostEqual(chart.sector.opening, math.pi / 2, places=14)
        self.assertAlmostEqual(chart.rotation, math.pi / 4, places=14)
        self.assertAlmostEqual(chart.h, 0.5, places=14)
        np.testing.assert_allclose(chart.to_local([0.3, 0.3]), [0.3 * math.sqrt(2), 0.0], atol=1e-15)
        points = np.array([[0.2, 0.1], [0.7, 0.9]])
        np.testing.assert_allclose(chart.to_global(chart.to_local(points)), points, atol=1e-15)
        vectors = np.array([[1.0 + 1j, 2.0, 5.0]])
        np.testing.assert_allclose(chart.vectors_to_global(chart.vectors_to_local(vectors)), vectors, atol=1e-15)
        self.assertEqual(chart.vectors_to_local(vectors)[0, 2], 5.0)

    def test_chart_matches_polygon(self):
        chart = corner_chart(PENTAGON, 2)
        rule = sector_ball_rule(chart, radial_levels=6, angular_order=6)
        self.assertTrue(np.all(PENTAGON.contains(chart.to_global(rule.nodes))))
        self.assertAlmostEqual(chart.sector.opening, 3 * math.pi / 5, places=13)

    def test_errors(self):
        self.assertRaises(GeometryError, lambda: corner_chart(SQUARE, 4))
        self.assertRaises(GeometryError, lambda: corner_chart(SQUARE, 0.5))
        self.assertRaises(GeometryError, lambda: CornerChart.from_sector(Sector(-2.0, 2.0), 1.0))
        self.assertRaises(GeometryError, lambda: CornerChart.from_sector(Sector(-0.5, 0.5), 0.0))


class TestQuadrature(unittest.TestCase):
    def test_sector_rule(self):
        K = Sector(0.2, 1.4)
        rule = sector_rule(K, 2.0)
        self.assertAlmostEqual(rule.measure, 0.5 * 1.2 * 4.0, places=12)
        rho = np.linalg.norm(rule.nodes, axis=-1)
        # ∫ ρ^{-1/2} over the truncated cone: opening·(2/3)·R^{3/2}
        self.assertAlmostEqual(rule.integrate(rho ** -0.5), 1.2 * (2 / 3) * 2.0 ** 1.5, places=9)
        annulus = sector_rule(K, 2.0, inner_radius=1.0)
        self.assertAlmostEqual(annulus.measure, 0.5 * 1.2 * 3.0, places=12)
        self.assertRaises(GeometryError, lambda: sector_rule(K, 1.0, inner_radius=1.0))

    def test_polygon_rule(self):
        rule = polygon_rule(PENTAGON)
        self.assertAlmostEqual(rule.measure, PENTAGON.area, places=13)
        np.testing.assert_allclose(rule.integrate(rule.nodes) / PENTAGON.area, PENTAGON.centroid, atol=1e-14)
        rule = polygon_rule(SQUARE, subdivisions=1)
        self.assertAlmostEqual(rule.integrate(rule.nodes[:, 0] ** 3 * rule.nodes[:, 1] ** 2), 1 / 12, places=13)

    def test_singular_rules(self):
        rule = singular_disk_rule([0.1, 0.2], 0.5)
        self.assertAlmostEqual(rule.measure, math.pi * 0.25, places=12)
        distance = np.linalg.norm(rule.nodes - [0.1, 0.2], axis=-1)
        self.assertAlmostEqual(rule.integrate(1 / distance), 2 * math.pi * 0.5, places=10)

        center = np.array([0.3, 0.6])
        fan = polar_fan_rule(SQUARE, center, 0.1)
        self.assertAlmostEqual(fan.measure + math.pi * 0.01, 1.0, places=10)
        outside = polar_fan_rule(SQUARE, [1.5, 0.5], 0.2)
        self.assertAlmostEqual(outside.measure, 1.0, places=10)
        self.assertRaises(GeometryError, lambda: polar_fan_rule(SQUARE, center, 0.5))

    def test_arc_and_ball(self):
        arc = arc_rule([1.0, -1.0], 2.0, 0.0, math.pi)
        self.assertAlmostEqual(arc.measure, 2 * math.pi, places=13)
        np.testing.assert_allclose(np.linalg.norm(arc.normals, axis=-1), 1.0)
        np.testing.assert_allclose(arc.nodes, [1.0, -1.0] + 2.0 * arc.normals)
        self.assertRaises(GeometryError, lambda: arc_rule([0, 0], 1.0, 1.0, 0.5))

        ball = ball_rule(2.0, 16, center=(1.0, 0.0, 0.0))
        self.assertAlmostEqual(ball.measure, 32 * math.pi / 3, places=10)
        np.testing.assert_allclose(ball.integrate(ball.nodes) / ball.measure, [1.0, 0.0, 0.0], atol=1e-13)
        composite = arc + arc
        self.assertEqual(len(composite), 2 * len(arc))
        self.assertEqual(composite.domain, "composite")

    def test_directions(self):
        np.testing.assert_allclose(circle_directions(4), [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
        sphere = fibonacci_sphere(200)
        np.testing.assert_allclose(np.linalg.norm(sphere, axis=-1), 1.0)
        self.assertLess(np.linalg.norm(sphere.mean(axis=0)), 0.02)
        self.assertRaises(GeometryError, lambda: fibonacci_sphere(0))
        self.assertRaises(GeometryError, lambda: circle_directions(0))
