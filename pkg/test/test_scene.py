import json
import os
import tempfile
import unittest

import numpy as np

from elastocorner.config import Convention, ElasFlag
from elastocorner.geometry import BallSupport, ConvexPolygon
from elastocorner.scene import SceneParsingError, load_prism, load_scene, parse_prism, parse_scene


SQUARE_TEXT = '''{
    "name": "square",
    "dim": 2,
    "convention": "standard",
    "lambda": 1.0, "mu": 0.5,
    "omega": 2.0,
    "support": {"polygon": [[0, 0], [1, 0], [1, 1], [0, 1]]},
    "density": [{"terms": [{"px": 1, "py": 2, "re": 2.0, "im": -1.0}]}, "(2 - 1j)*x*y^2"]
}'''

EXAMPLE_DIR = os.path.join(os.path.dirname(__file__), "example")


def scene_text(**changes):
    data = json.loads(SQUARE_TEXT)
    data.update(changes)
    return json.dumps(data, indent=4)


class TestSceneFiles(unittest.TestCase):
    def test_parse(self):
        parsed = parse_scene(SQUARE_TEXT)
        scene = parsed.scene
        self.assertEqual(parsed.convention, Convention.STANDARD)
        self.assertEqual(scene.name, "square")
        self.assertIsInstance(scene.support, ConvexPolygon)
        self.assertEqual(scene.material.mu, 0.5)
        self.assertEqual(scene.holder_alpha, 1.0)
        # Term lists and expression strings describe the same polynomial.
        first, second = scene.density.components
        self.assertEqual(first, second)
        np.testing.assert_allclose(scene.density.values([[0.5, 1.0]]), [[1.0 - 0.5j, 1.0 - 0.5j]])

    def test_defaults(self):
        data = json.loads(SQUARE_TEXT)
        del data["convention"], data["name"]
        parsed = parse_scene(json.dumps(data), source="nested/dir/plate.json")
        self.assertIsNone(parsed.convention)
        self.assertEqual(parsed.scene.name, "plate")

    def test_ball(self):
        text = json.dumps({"dim": 3, "lambda": 1.0, "mu": 1.0, "omega": 1.0,
                           "support": {"ball": {"radius": 2.0, "center": [0, 0, 1]}},
                           "density": [1, "z", {"terms": [{"pz": 1, "re": 1.0}]}]})
        scene = parse_scene(text).scene
        self.assertEqual(scene.dim, 3)
        self.assertEqual(scene.support, BallSupport(2.0, (0.0, 0.0, 1.0)))
        self.assertEqual(scene.density.components[1], scene.density.components[2])

    def test_missing_key(self):
        error = None
        try:
            parse_scene(SQUARE_TEXT.replace('"lambda": 1.0, ', ""))
        except SceneParsingError as e:
            error = e

        self.assertIsNotNone(error)
        self.assertEqual(error.field, "lambda")
        self.assertIsNone(error.line)

    def test_invalid_values(self):
        error = None
        try:
            parse_scene(SQUARE_TEXT.replace('"omega": 2.0', '"omega": -2.0'))
        except SceneParsingError as e:
            error = e

        self.assertIsNotNone(error)
        self.assertEqual(error.field, "omega")
        self.assertEqual((error.line, error.column), (6, 5))

        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(dim=4)))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(mu=0.0)))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(omega="2")))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(holder_alpha=1.5)))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(convention="weird")))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(density=["x"])))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(density=["x +", "y"])))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(support={"ball": {"radius": 1}})))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(support={"polygon": [[0, 0], [1, 1]]})))
        self.assertRaises(SceneParsingError, lambda: parse_scene(scene_text(support={"disk": 1})))
        self.assertRaises(SceneParsingError,
                          lambda: parse_scene(scene_text(density=[{"terms": [{"px": -1}]}, "0"])))

    def test_integer_dim(self):
        for dim in (2.0, 3.0, True, "2"):
            error = None
            try:
                parse_scene(scene_text(dim=dim))
            except SceneParsingError as e:
                error = e

            self.assertIsNotNone(error)
            self.assertEqual(error.field, "dim")

    def test_json_errors(self):
        error = None
        try:
            parse_scene('{"dim": 2,\n  "mu": }')
        except SceneParsingError as e:
            error = e

        self.assertIsNotNone(error)
        self.assertEqual(error.line, 2)
        self.assertIsNone(error.field)

        error = None
        try:
            parse_scene("[1, 2]")
        except SceneParsingError as e:
            error = e

        self.assertIsNotNone(error)
        self.assertEqual((error.line, error.column), (1, 1))

    def test_unknown_keys(self):
        text = scene_text(colour="red")
        self.assertRaises(SceneParsingError, lambda: parse_scene(text, flags=ElasFlag.STRICT))
        with self.assertLogs("elastocorner.scene", level="WARNING") as logs:
            scene = parse_scene(text, flags=ElasFlag.FD_FALLBACK).scene
        self.assertIn("colour", logs.output[0])
        self.assertEqual(scene.name, "square")

    def test_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            data = json.loads(SQUARE_TEXT)
            del data["name"]
            path = os.path.join(tmp, "unit_square.json")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f)
            self.assertEqual(load_scene(path).scene.name, "unit_square")

        self.assertEqual(load_scene(os.path.join(EXAMPLE_DIR, "square_scene.json")).scene.dim, 2)
        self.assertEqual(load_scene(os.path.join(EXAMPLE_DIR, "ball_scene.json")).scene.dim, 3)


class TestPrismFiles(unittest.TestCase):
    def test_parse(self):
        prism = parse_prism(json.dumps({"sector": [-0.5, 0.5], "core": ["1", "x*z", "y"],
                                        "lambda": 1.0, "mu": 1.0}))
        self.assertAlmostEqual(prism.chart.sector.opening, 1.0, places=15)
        self.assertEqual(prism.xis, (0.0, 1.0, 2.0, 4.0))
        self.assertEqual(prism.L, 1.0)
        self.assertEqual(prism.omega, 0.0)
        self.assertIsNone(prism.width)
        self.assertIsNone(prism.edge_density)
        self.assertIsNone(prism.convention)
        self.assertEqual(prism.core.dim, 3)

    def test_example(self):
        prism = load_prism(os.path.join(EXAMPLE_DIR, "prism.json"))
        self.assertAlmostEqual(prism.chart.sector.opening, 1.6, places=14)
        self.assertEqual(prism.convention, Convention.STANDARD)
        self.assertEqual(prism.edge_density.ncomp, 3)
        self.assertAlmostEqual(prism.material.lam, 1.2, places=15)

    def test_errors(self):
        base = {"sector": [-0.5, 0.5], "core": ["1", "0", "0"], "lambda": 1.0, "mu": 1.0}
        self.assertRaises(SceneParsingError, lambda: parse_prism(json.dumps({**base, "sector": [0.5, -0.5]})))
        self.assertRaises(SceneParsingError, lambda: parse_prism(json.dumps({**base, "sector": [-2.0, 2.0]})))
        self.assertRaises(SceneParsingError, lambda: parse_prism(json.dumps({**base, "L": 0})))
        self.assertRaises(SceneParsingError, lambda: parse_prism(json.dumps({**base, "omega": -1})))
        self.assertRaises(SceneParsingError, lambda: parse_prism(json.dumps({**base, "core": ["1", "0"]})))
        self.assertRaises(SceneParsingError,
                          lambda: parse_prism(json.dumps({**base, "edge": 1}), flags=ElasFlag.STRICT))
        self.assertEqual(parse_prism(json.dumps({**base, "h": 2.0})).chart.h, 2.0)
