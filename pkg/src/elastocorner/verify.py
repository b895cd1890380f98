'''Numerical checks of every formula in the package, grouped into suites.

Each check measures one quantity (an error, a ratio, a fitted slope) and compares it with a tolerance. Checks are
registered with the `check` decorator and run by `run_checks`, which returns a JSON-ready report. Randomised checks
draw from a generator seeded per check, so reports are reproducible.
'''
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from elastocorner import ElastoCornerException
from elastocorner.config import Convention
from elastocorner.corner import (DegenerateConeError, boundary_functional_decay, build_manufactured,
                                 corner_identity_check, corner_value_extract, edge_vanishing_demo,
                                 DimensionReductionSpec, moment_extract, moment_sweep, nonradiating_polygon_scene,
                                 reduced_equation_check, witness)
from elastocorner.elastic import (CauchyData, LameParameters, SourceScene, boundary_traction, far_field_asymptotic_check,
                                  far_field_pattern, green_tensor, helmholtz_split, navier_apply, volume_potential)
from elastocorner.fields import FiniteDifferenceField, SampledField
from elastocorner.geometry import (ConvexPolygon, CornerChart, Sector, ball_rule, corner_chart, fibonacci_sphere,
                                   polar_fan_rule, polygon_rule, sector_rule, singular_disk_rule)
from elastocorner.nonradiating import ball_char_ft, tune_lame, verify_nonradiating
from elastocorner.poly import PolynomialField
from elastocorner.probe import (ExponentialProbe, probe_traction_on_circle, sector_abs_moment, sector_alpha_bound,
                                sector_constant, sector_moment_exact, sector_moment_quadrature, sector_monomial_moment,
                                sector_tail_bound, tail_bound_regime)
from elastocorner.special import (SpecialFnAccuracy, _ascending_order_one, _ascending_order_zero, _hankel_asymptotic,
                                  bessel_j0, bessel_j1, bessel_j_half, bessel_y0, bessel_y1, gamma, j32_zero)


logger = logging.getLogger(__name__)

SUITES = ("special", "probe", "geometry", "elastic", "corner", "nonradiating")

Measurement = Tuple[float, float, bool]

_CHECKS: Dict[str, Tuple[str, Callable]] = {}

MOMENT_SECTORS = (Sector(-math.pi / 4, math.pi / 4), Sector(0.0, math.pi / 2), Sector(0.3, 1.9),
                  Sector(-1.9, -0.4), Sector(-1.2, 0.9))
SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
TRIANGLE = ConvexPolygon([[0, 0], [1.2, 0.1], [0.4, 0.9]])
UNIT_MATERIAL = LameParameters(1.0, 1.0)
NULL_MATERIALS = (LameParameters(1.0, 1.0), LameParameters(2.0, 0.5), LameParameters(-0.3, 1.0))


@dataclass(frozen=True)
class CheckResult:
    '''The outcome of one check: the measured `value` against `tolerance`.'''
    name: str
    suite: str
    value: Optional[float]
    tolerance: float
    passed: bool
    error: Optional[str] = None

    def to_dict(self) -> dict:
        result = {"name": self.name, "suite": self.suite, "value": self.value, "tolerance": self.tolerance,
                  "passed": self.passed}
        if self.error is not None:
            result["error"] = self.error
        return result


def check(suite: str, name: str = None):
    '''Registers a check function under `suite`. The function takes a numpy random generator and returns a
    `Measurement` (value, tolerance, passed).'''
    if suite not in SUITES:
        raise UnknownSuiteError(f"Unknown suite '{suite}'")

    def register(func):
        _CHECKS[f"{suite}.{name or func.__name__.lstrip('_')}"] = (suite, func)
        return func
    return register


def _below(value: float, tolerance: float) -> Measurement:
    value = float(value)
    return value, tolerance, bool(value <= tolerance)


def _above(value: float, tolerance: float) -> Measurement:
    value = float(value)
    return value, tolerance, bool(value >= tolerance)


def _relative(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


def check_names(suite: str = "all") -> list:
    '''Names of the registered checks in `suite`, in registration order.'''
    if suite != "all" and suite not in SUITES:
        raise UnknownSuiteError(f"Unknown suite '{suite}'; choose from all, {', '.join(SUITES)}")
    return [name for name, (s, _) in _CHECKS.items() if suite in ("all", s)]


def run_check(name: str, seed: int = 0) -> CheckResult:
    '''Runs one registered check. An exception inside the check is reported as a failure.'''
    if name not in _CHECKS:
        raise UnknownSuiteError(f"Unknown check '{name}'")
    suite, func = _CHECKS[name]
    try:
        value, tolerance, passed = func(np.random.default_rng(seed))
    except Exception as e:
        logger.error("Check %s raised %s: %s", name, type(e).__name__, e)
        return CheckResult(name, suite, None, float("nan"), False, f"{type(e).__name__}: {e}")
    level = logging.DEBUG if passed else logging.WARNING
    logger.log(level, "%s: %.3g (tolerance %.3g) %s", name, value, tolerance, "passed" if passed else "FAILED")
    return CheckResult(name, suite, value, tolerance, passed)


def run_checks(suite: str = "all", seed: int = 0) -> dict:
    '''Runs every check in `suite` ("all" or one of `SUITES`) and returns the report.'''
    results = [run_check(name, seed) for name in check_names(suite)]
    failed = [r.name for r in results if not r.passed]
    return {
        "suite": suite,
        "seed": seed,
        "count": len(results),
        "failed": failed,
        "passed": not failed,
        "checks": [r.to_dict() for r in results],
    }


# special

@check("special")
def _hankel_overlap(rng):
    x = np.linspace(11.0, 13.0, 41)
    accuracy = SpecialFnAccuracy()
    j0, y0 = _ascending_order_zero(x, accuracy)
    j1, y1 = _ascending_order_one(x, accuracy)
    gap = max(np.max(np.abs(j0 + 1j * y0 - _hankel_asymptotic(0, x, accuracy))),
              np.max(np.abs(j1 + 1j * y1 - _hankel_asymptotic(1, x, accuracy))))
    return _below(gap, 1e-9)


@check("special")
def _wronskian(rng):
    x = np.sort(rng.uniform(0.5, 30.0, 200))
    defect = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x) - 2 / (np.pi * x)
    return _below(np.max(np.abs(defect)), 1e-10)


@check("special")
def _j32_zeros(rng):
    zeros = np.array([j32_zero(k) for k in range(1, 6)])
    return _below(max(np.max(np.abs(bessel_j_half(3, zeros))), abs(zeros[0] - 4.493409457909064)), 1e-12)


@check("special")
def _j32_small_argument(rng):
    x = np.array([0.3, 0.45, 0.6])
    closed = np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))
    return _below(_relative(bessel_j_half(3, x), closed), 1e-12)


@check("special")
def _gamma_factorials(rng):
    n = np.arange(0, 16)
    factorials = np.array([math.factorial(k) for k in n], dtype=float)
    error = max(np.max(np.abs(gamma(n + 1.0) / factorials - 1)), abs(gamma(0.5) / math.sqrt(math.pi) - 1))
    return _below(error, 1e-12)


# probe

@check("probe")
def _sector_moment(rng):
    worst = 0.0
    for K in MOMENT_SECTORS:
        for s in (1.0, 2.0, 4.0, 8.0):
            exact = sector_moment_exact(K, s)
            worst = max(worst, abs(sector_moment_quadrature(K, s) - exact) / abs(exact))
    return _below(worst, 1e-6)


@check("probe")
def _navier_null(rng):
    angles = rng.uniform(-2.5, 2.5, 20)
    radii = rng.uniform(0.5, 2.0, 20)
    points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    probe = ExponentialProbe(1.0)
    worst = math.inf
    for material in NULL_MATERIALS:
        residuals = []
        for step in (1e-2, 5e-3, 2.5e-3):
            sampled = FiniteDifferenceField(SampledField(probe.values), step=step)
            residuals.append(np.max(np.abs(navier_apply(sampled, material, points, Convention.PAPER))))
        worst = min(worst, float(np.min(np.log2(np.array(residuals[:-1]) / np.array(residuals[1:])))))
    return _above(worst, 1.8)


@check("probe")
def _navier_null_exact(rng):
    angles = rng.uniform(-3.0, 3.0, 20)
    radii = rng.uniform(0.2, 2.0, 20)
    points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    probe = ExponentialProbe(3.0)
    worst = 0.0
    for material in NULL_MATERIALS:
        for convention in Convention:
            residual = navier_apply(probe, material, points, convention)
            worst = max(worst, float(np.max(np.abs(residual)) / np.max(np.abs(probe.hessian(points)))))
    return _below(worst, 1e-12)


@check("probe")
def _traction_closed_form(rng):
    angles = rng.uniform(-2.5, 2.5, 30)
    points = 0.7 * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    probe = ExponentialProbe(2.5)
    material = LameParameters(0.8, 1.4)
    inward = -points / np.linalg.norm(points, axis=-1)[:, None]
    return _below(_relative(boundary_traction(probe, material, points, inward),
                            probe_traction_on_circle(points, probe, material.mu)), 1e-12)


@check("probe")
def _alpha_bound(rng):
    worst = 0.0
    for K in MOMENT_SECTORS[:3]:
        for alpha in (0.25, 0.5, 1.0):
            for s in (2.0, 8.0):
                worst = max(worst, sector_abs_moment(K, s, alpha) / sector_alpha_bound(K, s, alpha))
    return _below(worst, 1.0)


@check("probe")
def _tail_bound(rng):
    worst = 0.0
    for K in MOMENT_SECTORS[:3]:
        for factor in (16.0, 32.0):
            s = factor / K.delta_K
            if not tail_bound_regime(K, s, 1.0):
                continue
            worst = max(worst, sector_abs_moment(K, s, 0.0, 1.0) / sector_tail_bound(K, s, 1.0))
    return _below(worst, 1.0)


@check("probe")
def _monomial_moment(rng):
    K, s = Sector(0.0, math.pi / 2), 2.0
    rule = sector_rule(K, (60 / (K.delta_K * s)) ** 2)
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    quadrature = complex(rule.integrate(ExponentialProbe(s).scalar(rule.nodes) * x * y * y))
    closed = sector_monomial_moment(K, s, 1, 2)
    return _below(max(abs(quadrature - closed) / abs(closed),
                      abs(sector_monomial_moment(K, s, 0, 0) - sector_moment_exact(K, s)) / abs(closed)), 1e-6)


@check("probe")
def _half_plane_constant(rng):
    return _below(abs(sector_constant(Sector(-math.pi / 2, math.pi / 2))), 1e-14)


# geometry

@check("geometry")
def _polygon_area(rng):
    hexagon = ConvexPolygon([[math.cos(t), math.sin(t)] for t in np.arange(6) * math.pi / 3])
    return _below(max(abs(polygon_rule(p).measure / p.area - 1) for p in (hexagon, TRIANGLE)), 1e-13)


@check("geometry")
def _polygon_moment(rng):
    rule = polygon_rule(SQUARE)
    return _below(abs(rule.integrate(rule.nodes[:, 0] ** 2 * rule.nodes[:, 1]) - 1 / 6), 1e-13)


@check("geometry")
def _singular_disk(rng):
    center, radius = np.array([0.3, -0.2]), 0.4
    rule = singular_disk_rule(center, radius)
    value = rule.integrate(np.log(np.linalg.norm(rule.nodes - center, axis=-1)))
    exact = math.pi * radius ** 2 * (math.log(radius) - 0.5)
    return _below(abs(value / exact - 1), 1e-8)


@check("geometry")
def _fan_rule_area(rng):
    worst = 0.0
    for center in ([0.5, 0.5], [0.02, 0.5], [0.9, 0.999]):
        r = 0.5 * float(SQUARE.distance_to_boundary(center))
        total = polar_fan_rule(SQUARE, center, r).measure + math.pi * r * r
        worst = max(worst, abs(total - 1.0))
    return _below(worst, 1e-10)


@check("geometry")
def _ball_rule(rng):
    rule = ball_rule(1.0, 24)
    return _below(max(abs(rule.measure - 4 * math.pi / 3),
                      abs(rule.integrate(rule.nodes[:, 0] ** 2) - 4 * math.pi / 15)), 1e-12)


@check("geometry")
def _fibonacci_uniformity(rng):
    directions = fibonacci_sphere(64)
    return _below(max(np.max(np.abs(np.linalg.norm(directions, axis=-1) - 1)),
                      float(np.linalg.norm(directions.mean(axis=0)))), 0.05)


# elastic

@check("elastic")
def _green_reciprocity(rng):
    x = rng.uniform(-2, 2, (100, 2))
    y = rng.uniform(-2, 2, (100, 2))
    material = LameParameters(1.7, 0.9)
    forward = green_tensor(x, y, material, 2.0)
    backward = np.swapaxes(green_tensor(y, x, material, 2.0), -1, -2)
    return _below(_relative(forward, backward), 1e-12)


@check("elastic")
def _green_equation(rng):
    material, omega = LameParameters(1.7, 0.9), 2.0
    y = np.zeros(2)
    x = np.array([[0.8, 0.3], [-0.5, 0.9], [0.1, -1.2]])
    worst = 0.0
    for j in range(2):
        column = SampledField(lambda p, j=j: green_tensor(p, y, material, omega)[:, :, j])
        sampled = FiniteDifferenceField(column, step=1e-3)
        residual = navier_apply(sampled, material, x, Convention.STANDARD) + omega ** 2 * column.values(x)
        worst = max(worst, float(np.max(np.abs(residual)) / np.max(np.abs(column.values(x)))))
    return _below(worst, 1e-4)


@check("elastic")
def _nonradiating_potential(rng):
    scene, bump = nonradiating_polygon_scene(TRIANGLE, (1.0, 0.5j), UNIT_MATERIAL, 1.5)
    points = np.array([[0.5, 0.3], [0.6, 0.45], [3.0, 2.0], [1.3, 0.5]])
    scale = float(np.max(np.abs(bump.values(polygon_rule(TRIANGLE).nodes))))
    expected = bump.values(points) * TRIANGLE.contains(points)[:, None]
    return _below(float(np.max(np.abs(volume_potential(scene, points) - expected))) / scale, 1e-5)


@check("elastic")
def _nonradiating_farfield(rng):
    scene, _ = nonradiating_polygon_scene(TRIANGLE, (1.0, 0.5j), UNIT_MATERIAL, 1.5)
    rule = polygon_rule(TRIANGLE)
    scale = float(rule.integrate(np.linalg.norm(scene.density.values(rule.nodes), axis=-1)))
    return _below(far_field_pattern(scene, 32).max_magnitude / scale, 1e-8)


@check("elastic")
def _farfield_projection(rng):
    scene = SourceScene(SQUARE, PolynomialField.parse(["1 + x", "2j*y"]), UNIT_MATERIAL, 2.0)
    return _below(far_field_pattern(scene, 16).projection_defect(), 1e-12)


@check("elastic")
def _farfield_remainder_slope(rng):
    scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.0]), LameParameters(1.0, 1.0), 2.0)
    report = far_field_asymptotic_check(scene, np.array([0.6, 0.8]))
    return _below(abs(report["remainder_slope"] + 1.5), 0.1)


@check("elastic")
def _helmholtz_split(rng):
    scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.5]), UNIT_MATERIAL, 2.0)
    x, h = np.array([2.5, 0.5]), 1e-2
    freq = scene.freq
    shifts = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]])
    parts = [helmholtz_split(scene, x + shift) for shift in shifts]
    up, us = np.array([p for p, _ in parts]), np.array([s for _, s in parts])
    rot_up = ((up[1, 1] - up[2, 1]) - (up[3, 0] - up[4, 0])) / (2 * h)
    div_us = ((us[1, 0] - us[2, 0]) + (us[3, 1] - us[4, 1])) / (2 * h)
    helmholtz_p = (np.sum(up[1:], axis=0) - 4 * up[0]) / h ** 2 + freq.omega_p ** 2 * up[0]
    helmholtz_s = (np.sum(us[1:], axis=0) - 4 * us[0]) / h ** 2 + freq.omega_s ** 2 * us[0]
    return _below(max(_relative(up[0] + us[0], volume_potential(scene, x)) * 100,
                      abs(rot_up) / (freq.omega_p * np.linalg.norm(up[0])),
                      abs(div_us) / (freq.omega_s * np.linalg.norm(us[0])),
                      np.linalg.norm(helmholtz_p) / (freq.omega_p ** 2 * np.linalg.norm(up[0])),
                      np.linalg.norm(helmholtz_s) / (freq.omega_s ** 2 * np.linalg.norm(us[0]))), 1e-2)


@check("elastic")
def _conventions_coincide(rng):
    field = PolynomialField.parse(["x^3 + x*y", "y^2 - 2*x^2*y"])
    points = rng.uniform(-1, 1, (10, 2))
    material = LameParameters(1.5, 1.5)
    return _below(_relative(navier_apply(field, material, points, Convention.PAPER),
                            navier_apply(field, material, points, Convention.STANDARD)), 1e-14)


# corner

def _identity_cases():
    charts = (CornerChart.from_sector(Sector(-0.6, 0.6), 1.0), CornerChart.from_sector(Sector(-1.1, 0.4), 1.0),
              corner_chart(TRIANGLE, 2))
    cores = (["1 + x", "y"], ["x*y", "2 - x"], ["1", "1j + y^2"])
    for chart in charts:
        for core in cores:
            field = build_manufactured(chart, core)
            for s in (2.0, 5.0, 10.0):
                yield field, s


@check("corner")
def _identity(rng):
    worst = 0.0
    for field, s in _identity_cases():
        report = corner_identity_check(field, ExponentialProbe(s), LameParameters(0.9, 1.2))
        if not report["inner_decreasing"]:
            return _below(float("inf"), 1e-6)
        worst = max(worst, report["rel_error"])
    return _below(worst, 1e-6)


@check("corner")
def _moment_constant(rng):
    chart = corner_chart(SQUARE, 0)
    estimate = moment_extract(PolynomialField.constant([1.0, 0.0]), chart)
    return _below(abs(estimate - 1.0), 0.02)


@check("corner")
def _moment_vanishing_slope(rng):
    chart = corner_chart(SQUARE, 0)
    sweep = moment_sweep(PolynomialField.parse(["x + y", "x"]), chart, (16.0, 24.0, 32.0, 48.0, 64.0))
    return _below(abs(sweep.decay_exponent + 2.0), 0.3)


@check("corner")
def _corner_value(rng):
    density = PolynomialField.parse(["1 + 2j + x", "-0.5 + 1j + y"])
    estimate = corner_value_extract(density, corner_chart(TRIANGLE, 1))
    vertex = TRIANGLE.vertices[1]
    expected = density.values(vertex[None, :])[0]
    return _below(float(np.max(np.abs(estimate - expected)) / np.max(np.abs(expected))), 0.02)


@check("corner")
def _boundary_decay(rng):
    sector = Sector(-2.0, 0.2)
    field = build_manufactured(CornerChart.from_sector(sector, 2.0), ["1 + x*y", "x - 2*y"])
    rates = []
    for radius in (0.5, 1.0):
        data = CauchyData.from_field(field, UNIT_MATERIAL, (0.0, 0.0), radius, sector.theta_m, sector.theta_M, 256)
        report = boundary_functional_decay(data, UNIT_MATERIAL, np.linspace(10.0, 40.0, 13))
        rates.append(report["fitted_rate"])
        misfit = max(abs(report["fitted_rate"] / report["theory_rate"] - 1),
                     abs(report["envelope_rate"] / report["theory_rate"] - 1))
        if misfit > 0.15:
            return _below(misfit, 0.15)
    return _below(abs(rates[1] / rates[0] / math.sqrt(2) - 1), 0.15)


@check("corner")
def _witness_moment_channel(rng):
    scene = SourceScene(SQUARE, PolynomialField.constant([1.0, 0.0]), UNIT_MATERIAL, 1.0)
    sweep = witness(scene, 0)
    return _below(abs(sweep.moment_limit / sweep.expected_limit - 1), 0.02)


@check("corner")
def _reduced_equation(rng):
    field = build_manufactured(CornerChart.from_sector(Sector(-0.8, 0.8), 1.0), ["1 + x", "y*z", "z^2 - x*y"], 3)
    specs = [DimensionReductionSpec(xi, 1.0) for xi in (0.0, 1.0, 2.0, 4.0)]
    return _below(reduced_equation_check(field, specs, LameParameters(1.2, 0.8))["max_residual"], 1e-3)


@check("corner")
def _edge_vanishing(rng):
    report = edge_vanishing_demo(PolynomialField.parse(["1 + z", "0.5*z^2 + x", "y + 2"], 3), (0.0, 1.0, 2.0, 4.0),
                                 Sector(-0.7, 0.7))
    return _below(max(row["rel_error"] for row in report["results"]), 0.02)


@check("corner")
def _degenerate_cone(rng):
    try:
        moment_extract(PolynomialField.constant([1.0, 0.0]), Sector(-math.pi / 2, math.pi / 2))
    except DegenerateConeError:
        return _below(0.0, 0.0)
    return _below(1.0, 0.0)


# nonradiating

@check("nonradiating")
def _tuned_ball(rng):
    report = verify_nonradiating(1.0, 1, 2, 64)
    return _below(report["max_farfield"] / (4 * math.pi / 3), 1e-8)


@check("nonradiating")
def _quadrature_oracle(rng):
    return _below(verify_nonradiating(1.0, 1, 2, 8)["oracle_residual"], 1e-5)


@check("nonradiating")
def _convexity_margin(rng):
    return _below(abs(tune_lame(1.0, 1, 2).convexity_margin - 0.08158), 1e-4)


@check("nonradiating")
def _tuned_round_trip(rng):
    freq = tune_lame(1.0, 1, 2).wavenumbers(1.0)
    return _below(max(abs(freq.omega_p - j32_zero(1)), abs(freq.omega_s - j32_zero(2))), 1e-12)


@check("nonradiating")
def _detuned_ball(rng):
    report = verify_nonradiating(1.0, material=LameParameters(1.0, 1.0, 3), m=16)
    return _above(report["max_farfield"] / (4 * math.pi / 3), 1e-2)


@check("nonradiating")
def _ball_transform_oracle(rng):
    rule = ball_rule(1.0, 24)
    directions = rng.normal(size=(5, 3))
    directions /= np.linalg.norm(directions, axis=-1)[:, None]
    values = [rule.integrate(np.exp(-2j * (rule.nodes @ e))) for e in directions]
    return _below(float(np.max(np.abs(np.array(values) - ball_char_ft(2.0)))), 1e-5)


class UnknownSuiteError(ElastoCornerException, ValueError):
    '''Raised for a suite or check name that is not registered.'''
