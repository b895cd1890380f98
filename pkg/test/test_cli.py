import contextlib
import io
import json
import os
import tempfile
import unittest

import numpy as np

import elastocorner
from elastocorner.cli import EXIT_OK, EXIT_USAGE, main
from elastocorner.config import Convention
from elastocorner.verify import SUITES, UnknownSuiteError, check_names, run_check, run_checks


EXAMPLE_DIR = os.path.join(os.path.dirname(__file__), "example")
ZERO_SCENE = {"dim": 2, "lambda": 1.0, "mu": 1.0, "omega": 1.5,
              "support": {"polygon": [[0, 0], [2, 0], [0, 1]]}, "density": ["0", "0"]}


def run(*argv):
    '''Runs the command line, returning the exit code and whatever went to standard output.'''
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue()


class TestVerify(unittest.TestCase):
    def test_registry(self):
        names = check_names()
        self.assertGreaterEqual(len(names), 25)
        self.assertEqual(len(set(names)), len(names))
        for suite in SUITES:
            self.assertTrue(check_names(suite))
            self.assertTrue(all(name.startswith(suite + ".") for name in check_names(suite)))
        self.assertRaises(UnknownSuiteError, lambda: check_names("bogus"))
        self.assertRaises(UnknownSuiteError, lambda: run_checks("bogus"))
        self.assertRaises(UnknownSuiteError, lambda: run_check("special.bogus"))

    def test_special_suite(self):
        code, out = run("verify", "--suite", "special")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertTrue(report["passed"])
        self.assertEqual(report["count"], len(check_names("special")))
        self.assertEqual(report["failed"], [])

    def test_json_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            code, out = run("verify", "--suite", "probe", "--seed", "3", "--json", path)
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out, "")
            with open(path, encoding="utf-8") as f:
                report = json.load(f)
        self.assertEqual(report["seed"], 3)
        self.assertEqual(report["suite"], "probe")

    def test_bad_suite(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["verify", "--suite", "bogus"])
        self.assertEqual(cm.exception.code, EXIT_USAGE)


class TestNonradiatingCommand(unittest.TestCase):
    def test_tuned(self):
        code, out = run("nonradiating", "--directions", "16")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertTrue(report["tuned"])
        self.assertLessEqual(report["max_farfield"], 1e-8)
        self.assertAlmostEqual(report["lambda"], 0.0160153, places=6)

    def test_detuned(self):
        code, out = run("nonradiating", "--directions", "8", "--lambda", "1", "--mu", "1")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertFalse(report["tuned"])
        self.assertGreater(report["max_farfield"], 1e-2)

    def test_usage_errors(self):
        self.assertEqual(run("nonradiating", "--lambda", "1")[0], EXIT_USAGE)
        self.assertEqual(run("nonradiating", "--zero-p", "2", "--zero-s", "1")[0], EXIT_USAGE)
        self.assertEqual(run("nonradiating", "--lambda", "-1", "--mu", "1")[0], EXIT_USAGE)
        self.assertEqual(run("nonradiating", "--omega", "0")[0], EXIT_USAGE)


class TestSceneCommands(unittest.TestCase):
    def test_zero_scene_farfield(self):
        with tempfile.TemporaryDirectory() as tmp:
            scene_path = os.path.join(tmp, "zero.json")
            csv_path = os.path.join(tmp, "zero.csv")
            with open(scene_path, "w", encoding="utf-8") as f:
                json.dump(ZERO_SCENE, f)
            code, out = run("farfield", "--scene", scene_path, "--directions", "12", "--out", csv_path)
            self.assertEqual(code, EXIT_OK)
            report = json.loads(out)
            self.assertEqual(report["scene"], "zero")
            self.assertEqual(report["max_magnitude"], 0.0)
            with open(csv_path, encoding="utf-8") as f:
                self.assertTrue(f.readline().startswith("dir_x,dir_y,up_x_re"))
            table = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        self.assertEqual(table.shape, (12, 10))
        np.testing.assert_array_equal(table[:, 2:], 0.0)

    def test_square_farfield(self):
        code, out = run("farfield", "--scene", os.path.join(EXAMPLE_DIR, "square_scene.json"), "--directions", "8")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertGreater(report["max_magnitude"], 0.0)
        self.assertLess(report["projection_defect"], 1e-12)

    def test_moment(self):
        code, out = run("moment", "--scene", os.path.join(EXAMPLE_DIR, "square_scene.json"), "--vertex", "0")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertAlmostEqual(complex(*report["moment"]["estimate"]), 1 + 0.5j, delta=0.05)
        self.assertAlmostEqual(report["opening"], np.pi / 2, places=12)

    def test_witness(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = os.path.join(tmp, "witness.csv")
            code, out = run("witness", "--scene", os.path.join(EXAMPLE_DIR, "square_scene.json"),
                            "--s-grid", "8,12,16,24", "--out", csv_path)
            table = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(table.shape, (4, 3))
        report = json.loads(out)
        self.assertEqual(report["witness"]["s_grid"], [8.0, 12.0, 16.0, 24.0])
        self.assertAlmostEqual(complex(*report["moment"]["estimate"]), 1 + 0.5j, delta=0.05)

    def test_errors(self):
        square =os.path.join(EXAMPLE_DIR, "square_scene.json")
        self.assertEqual(run("moment", "--scene", square, "--vertex", "7")[0], EXIT_USAGE)
        self.assertEqual(run("witness", "--scene", os.path.join(EXAMPLE_DIR, "ball_scene.json"))[0], EXIT_USAGE)
        self.assertEqual(run("farfield", "--scene", os.path.join(EXAMPLE_DIR, "missing.json"))[0], EXIT_USAGE)
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["moment", "--scene", square, "--s-grid", "8,x"])
        self.assertEqual(cm.exception.code, EXIT_USAGE)

    def test_convention_restored(self):
        saved = elastocorner.settings().convention
        code, _ = run("moment", "--scene", os.path.join(EXAMPLE_DIR, "square_scene.json"),
                      "--convention", Convention.STANDARD.value if saved is Convention.PAPER else "paper")
        self.assertEqual(code, EXIT_OK)
        self.assertIs(elastocorner.settings().convention, saved)


class TestReduceCommand(unittest.TestCase):
    def test_prism(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "reduce.json")
            code, _ = run("reduce", "--prism", os.path.join(EXAMPLE_DIR, "prism.json"), "--xi", "0,2",
                          "--json", path)
            with open(path, encoding="utf-8") as f:
                report = json.load(f)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(report["check"]["passed"])
        self.assertEqual(report["check"]["convention"], "standard")
        self.assertEqual(len(report["check"]["results"]), 2)
        self.assertEqual([row["xi"] for row in report["edge"]["results"]], [0.0, 2.0])

    def test_empty_xi(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["reduce", "--prism", os.path.join(EXAMPLE_DIR, "prism.json"), "--xi", ""])
        self.assertEqual(cm.exception.code, EXIT_USAGE)
