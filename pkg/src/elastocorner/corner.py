'''Corner indicators: what the exponential probes read off a source at a corner.

For a convex corner K with chart ball B of radius h, and a field u that vanishes together with its traction on both
edges of the cone, Betti's formula gives

    ∫_{K∩B} v·𝓛u dx = ∫_{K∩∂B} [(T_ν u)·v − (T_ν v)·u] dS.

The right-hand side decays like exp(−δ_K·s·√h), while s⁴·∫_{K∩B} v·f dx tends to C_K·(f₁ + if₂)(0) for a Hölder
density f. So a source with f(0) ≠ 0 at a corner cannot have a radiated field whose Cauchy data vanish near that
corner. This module computes every piece of that argument numerically, plus the reduction of 3D edges to 2D corners
by a weighted partial Fourier transform along the edge.

All fields here are evaluated in chart-local coordinates unless stated otherwise.
'''
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

import elastocorner
from elastocorner import ElastoCornerException
from elastocorner.config import Convention
from elastocorner.elastic import (AccuracyError, CauchyData, LameParameters, SourceScene, boundary_traction,
                                  navier_apply, navier_polynomial, volume_potential)
from elastocorner.fields import SampledField, FiniteDifferenceField, _as_points
from elastocorner.geometry import (ConvexPolygon, CornerChart, GeometryError, QuadratureRule, Sector, _gauss,
                                   arc_rule, corner_chart, sector_ball_rule)
from elastocorner.poly import Polynomial, PolynomialField
from elastocorner.probe import ExponentialProbe, probe_traction_on_circle, sector_constant
from elastocorner.special import DomainError


logger = logging.getLogger(__name__)


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


class ManufacturedCornerField:
    '''u(x) = (ℓ₁(x)·ℓ₂(x))²·χ(|x'|)·q(x) on a corner chart, in chart-local coordinates.

    ℓ₁ and ℓ₂ are the linear forms vanishing on the two cone edges (positive inside the cone), χ is a quintic
    cutoff equal to 1 on [0, h/2] and 0 beyond h, and q is a polynomial core. u and ∇u vanish on both edges. With a
    core in three variables the field lives on the prism (K∩B)×ℝ and x' = (x₁, x₂).
    '''
    has_derivatives = True

    def __init__(self, chart: CornerChart, core: PolynomialField):
        self.chart = chart
        self.core = core
        self.dim = core.dim
        self.ncomp = core.ncomp
        if self.dim not in (2, 3):
            raise DomainError(f"Manufactured fields live in 2 or 3 dimensions, not {self.dim}")
        lo, hi = chart.sector.theta_m, chart.sector.theta_M
        self._g1 = np.array([-math.sin(lo), math.cos(lo)])
        self._g2 = np.array([math.sin(hi), -math.cos(hi)])

    def _envelope(self, rho):
        half = self.chart.h / 2
        t = np.clip((rho - half) / half, 0.0, 1.0)
        chi = 1 - (10 * t ** 3 - 15 * t ** 4 + 6 * t ** 5)
        d1 = -(30 * t ** 2 - 60 * t ** 3 + 30 * t ** 4) / half
        d2 = -(60 * t - 180 * t ** 2 + 120 * t ** 3) / half ** 2
        return chi, d1, d2

    def _profile(self, pts):
        '''P = (ℓ₁ℓ₂)²·χ with its gradient (N, dim) and Hessian (N, dim, dim).'''
        xp = pts[:, :2]
        l1, l2 = xp @ self._g1, xp @ self._g2
        prod = l1 * l2
        g_prod = l2[:, None] * self._g1 + l1[:, None] * self._g2
        h_prod = np.outer(self._g1, self._g2) + np.outer(self._g2, self._g1)
        sq = prod ** 2
        g_sq = 2 * prod[:, None] * g_prod
        h_sq = 2 * g_prod[:, :, None] * g_prod[:, None, :] + 2 * prod[:, None, None] * h_prod

        rho = np.linalg.norm(xp, axis=-1)
        chi, d1, d2 = self._envelope(rho)
        unit = np.divide(xp, rho[:, None], out=np.zeros_like(xp), where=rho[:, None] > 0)
        outer = unit[:, :, None] * unit[:, None, :]
        over_rho = np.divide(d1, rho, out=np.zeros_like(d1), where=d1 != 0)
        g_chi = d1[:, None] * unit
        h_chi = d2[:, None, None] * outer + over_rho[:, None, None] * (np.eye(2) - outer)

        n = len(pts)
        value = sq * chi
        grad = np.zeros((n, self.dim))
        hess = np.zeros((n, self.dim, self.dim))
        grad[:, :2] = chi[:, None] * g_sq + sq[:, None] * g_chi
        hess[:, :2, :2] = (chi[:, None, None] * h_sq + g_sq[:, :, None] * g_chi[:, None, :]
                           + g_chi[:, :, None] * g_sq[:, None, :] + sq[:, None, None] * h_chi)
        return value, grad, hess

    def values(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        value, _, _ = self._profile(pts)
        return value[:, None] * self.core.values(pts)

    def jacobian(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        value, grad, _ = self._profile(pts)
        return (self.core.values(pts)[:, :, None] * grad[:, None, :]
                + value[:, None, None] * self.core.jacobian(pts))

    def hessian(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        value, grad, hess = self._profile(pts)
        q, jq, hq = self.core.values(pts), self.core.jacobian(pts), self.core.hessian(pts)
        return (q[:, :, None, None] * hess[:, None, :, :]
                + grad[:, None, :, None] * jq[:, :, None, :]
                + jq[:, :, :, None] * grad[:, None, None, :]
                + value[:, None, None, None] * hq)

    def is_zero(self) -> bool:
        return self.core.is_zero()

    def __repr__(self):
        return f"ManufacturedCornerField({self.chart!r}, {self.core!r})"


def _edge_samples(chart: CornerChart, dim: int, count: int = 50):
    '''Points on both cone edges inside the chart ball, with the outward edge normals.'''
    sector = chart.sector
    radii = np.linspace(0.02, 0.98, count) * chart.h
    points, normals = [], []
    for angle, normal in ((sector.theta_m, (math.sin(sector.theta_m), -math.cos(sector.theta_m))),
                          (sector.theta_M, (-math.sin(sector.theta_M), math.cos(sector.theta_M)))):
        edge = np.stack([radii * math.cos(angle), radii * math.sin(angle)], axis=-1)
        if dim == 3:
            edge = np.column_stack([edge, np.linspace(-1.0, 1.0, count)])
            normal = normal + (0.0,)
        points.append(edge)
        normals.append(np.tile(normal, (count, 1)))
    return np.concatenate(points), np.concatenate(normals)


def build_manufactured(chart: CornerChart, core=None, dim: int = 2) -> ManufacturedCornerField:
    '''Builds the manufactured field with polynomial core `core` (a `PolynomialField`, or one expression per
    component) and checks that it and its traction vanish on both edges.'''
    if core is None:
        core = PolynomialField.zero(dim, dim)
    elif not isinstance(core, PolynomialField):
        core = list(core)
        core = PolynomialField.parse(core, len(core))
    result = ManufacturedCornerField(chart, core)
    points, normals = _edge_samples(chart, result.dim)
    scale = max(1.0, float(np.max(np.abs(core.values(points)))))
    values = np.max(np.abs(result.values(points)))
    traction = np.max(np.abs(boundary_traction(result, LameParameters(1.0, 1.0, result.dim), points, normals)))
    if values > 1e-14 * scale or traction > 1e-10 * scale:
        raise ConstructionError(f"Manufactured field does not vanish on the edges (|u| = {values:.3g}, "
                                f"|Tu| = {traction:.3g})")
    return result


def _bilinear(a, b) -> np.ndarray:
    return np.sum(a * b, axis=-1)


def corner_identity_check(field: ManufacturedCornerField, probe: ExponentialProbe, material: LameParameters,
                          eps_grid: Sequence[float] = None, radius: float = None,
                          convention: Convention = Convention.STANDARD, tol: float = 1e-6) -> dict:
    '''Checks ∫_{K∩B} v·𝓛u dx = ∫_{K∩∂B} [(T_ν u)·v − (T_ν v)·u] dS on the ball of `radius` (default h/2).

    The same identity on the punctured domain K∩(B∖B_ε) picks up the inner-circle term I_ε, which tends to zero with
    ε. Both are reported, together with the residual of the punctured identity for each ε.
    '''
    chart = field.chart
    sector = chart.sector
    radius = radius or chart.h / 2
    eps_grid = [radius * 0.2 * 10.0 ** -i for i in range(4)] if eps_grid is None else list(eps_grid)
    if any(not 0 < e < radius for e in eps_grid) or any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise DomainError("eps_grid must be decreasing within (0, radius)")

    def volume_term(inner):
        rule = sector_ball_rule(chart, radius=radius, inner_radius=inner)
        integrand = _bilinear(probe.values(rule.nodes), navier_apply(field, material, rule.nodes, convention))
        return complex(rule.integrate(integrand)), float(rule.integrate(np.abs(integrand)))

    def arc_term(r, outward):
        rule = arc_rule((0.0, 0.0), r, sector.theta_m, sector.theta_M, order=128)
        normals = rule.normals if outward else -rule.normals
        tu = boundary_traction(field, material, rule.nodes, normals)
        tv = probe_traction_on_circle(rule.nodes, probe, material.mu, outward=outward)
        v, u = probe.values(rule.nodes), field.values(rule.nodes)
        return complex(rule.integrate(_bilinear(tu, v) - _bilinear(tv, u)))

    lhs, scale = volume_term(0.0)
    rhs = arc_term(radius, True)
    error = abs(lhs - rhs)
    relative = error / (abs(lhs) + scale) if scale > 0 else 0.0
    if relative > tol:
        logger.warning("Corner identity residual %.3g exceeds %.3g (s=%g)", relative, tol, probe.s)

    inner_terms, residuals = [], []
    for eps in eps_grid:
        punctured, _ = volume_term(eps)
        inner = arc_term(eps, False)
        inner_terms.append(abs(inner))
        residuals.append(abs(punctured - (rhs + inner)))
    return {
        "s": probe.s,
        "radius": radius,
        "convention": Convention(convention).value,
        "lhs": _pair(lhs),
        "rhs": _pair(rhs),
        "abs_error": error,
        "rel_error": relative,
        "eps_grid": eps_grid,
        "inner_terms": inner_terms,
        "punctured_residuals": residuals,
        "inner_decreasing": all(b <= a for a, b in zip(inner_terms, inner_terms[1:])),
        "passed": relative <= tol,
    }


def richardson_limit(s_grid, values, alpha: float = 1.0, terms: int = 2) -> complex:
    '''Limit as s → ∞ of values(s) ≈ L + Σ_{j<terms} c_j·s^{−2αj}, fitted on the `terms` largest s.'''
    s = np.asarray(s_grid, dtype=float)[-terms:]
    y = np.asarray(values, dtype=complex)[-terms:]
    if len(s) < terms:
        raise DomainError(f"Richardson extrapolation with {terms} terms needs {terms} values")
    basis = np.stack([s ** (-2 * alpha * j) for j in range(terms)], axis=-1)
    coeffs = np.linalg.solve(basis, y)
    return complex(coeffs[0])


def fit_power_law(s_grid, values) -> Optional[float]:
    '''Slope of log|values| against log s, or None if any value vanishes.'''
    y = np.abs(np.asarray(values))
    if np.any(y == 0):
        return None
    return float(np.polyfit(np.log(np.asarray(s_grid, dtype=float)), np.log(y), 1)[0])


def fit_exponential_rate(s_grid, values) -> Optional[float]:
    '''Rate b of the model log|y| = a + b·s + c·log s, or None if any value vanishes.'''
    y = np.abs(np.asarray(values))
    if np.any(y == 0):
        return None
    s = np.asarray(s_grid, dtype=float)
    basis = np.stack([np.ones_like(s), s, np.log(s)], axis=-1)
    coeffs, *_ = np.linalg.lstsq(basis, np.log(y), rcond=None)
    return float(coeffs[1])


def _check_s_grid(s_grid, minimum: int = 2):
    s = tuple(float(v) for v in s_grid)
    if len(s) < minimum or any(v <= 0 for v in s) or any(b <= a for a, b in zip(s, s[1:])):
        raise DomainError(f"s_grid must be a strictly increasing list of at least {minimum} positive values: {s}")
    return s


def _chart_and_constant(chart: Union[CornerChart, Sector], radius: float, conjugate: bool = False):
    sector = chart if isinstance(chart, Sector) else chart.sector
    if sector.opening >= math.pi - 1e-12:
        kind = "Flat" if math.isclose(sector.opening, math.pi, abs_tol=1e-12) else "Reflex"
        raise DegenerateConeError(f"{kind} cone opening {sector.opening:.6g} rad is not below π")
    if isinstance(chart, Sector):
        chart = CornerChart.from_sector(chart, radius)
    constant = sector_constant(chart.sector, conjugate)
    if abs(constant) < 1e-12:
        raise DegenerateConeError(f"Sector constant vanishes at opening {chart.sector.opening:.6g} rad")
    return chart, constant


def _density_values(density, points) -> np.ndarray:
    if callable(getattr(density, "values", None)):
        return np.asarray(density.values(points), dtype=complex)
    return np.asarray(density(points), dtype=complex)


def _local_density(density, chart: CornerChart, rule: QuadratureRule) -> np.ndarray:
    return chart.vectors_to_local(_density_values(density, chart.to_global(rule.nodes)))


@dataclass(frozen=True)
class MomentSweep:
    '''Scaled moments M(s) = s⁴·∫_{K∩B} v·f dx over an s-grid, their s → ∞ limit and the corner estimate.'''
    s_grid: tuple
    values: np.ndarray
    limit: complex
    sector_constant: complex
    estimate: complex
    decay_exponent: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "s_grid": list(self.s_grid),
            "values": [_pair(v) for v in self.values],
            "fitted_limit": _pair(self.limit),
            "sector_constant": _pair(self.sector_constant),
            "estimate": _pair(self.estimate),
            "decay_exponent": self.decay_exponent,
        }

    def to_csv(self, path):
        _write_sweep_csv(path, self.s_grid, self.values)


def _write_sweep_csv(path, s_grid, values):
    values = np.asarray(values, dtype=complex)
    np.savetxt(path, np.column_stack([s_grid, np.abs(values), np.angle(values)]), delimiter=",",
               header="s,abs,arg", comments="", fmt="%.17g")


def _scaled_moments(probe_values, local, rule, s_grid):
    return np.array([s ** 4 * complex(rule.integrate(_bilinear(probe_values(s), local))) for s in s_grid])


def moment_sweep(density, chart: Union[CornerChart, Sector], s_grid: Sequence[float] = None, alpha: float = 1.0,
                 radius: float = 1.0, rule: QuadratureRule = None) -> MomentSweep:
    '''Computes M(s) over `s_grid` and extrapolates its limit.

    `density` maps global points (N, 2) to values (N, 2), either as a field with `values` or as a callable.
    `chart` may also be a bare `Sector` for cones given in local coordinates, with chart ball radius `radius`.
    The estimate of (f₁ + if₂) at the vertex is returned in the global frame.
    '''
    chart, constant = _chart_and_constant(chart, radius)
    s_grid = _check_s_grid(elastocorner.settings().s_grid if s_grid is None else s_grid)
    rule = rule or sector_ball_rule(chart)
    local = _local_density(density, chart, rule)[:, :2]
    values = _scaled_moments(lambda s: ExponentialProbe(s).values(rule.nodes), local, rule, s_grid)
    limit = richardson_limit(s_grid, values, alpha)
    estimate = limit / constant * np.exp(1j * chart.rotation)
    return MomentSweep(s_grid, values, limit, complex(constant), complex(estimate), fit_power_law(s_grid, values))


def moment_extract(density, chart: Union[CornerChart, Sector], s_grid: Sequence[float] = None, alpha: float = 1.0,
                   radius: float = 1.0) -> complex:
    '''Estimate of f₁(x_c) + i·f₂(x_c) at the chart vertex from the limit of s⁴·∫_{K∩B} v·f dx divided by C_K.'''
    return moment_sweep(density, chart, s_grid, alpha, radius).estimate


def corner_value_extract(density, chart: Union[CornerChart, Sector], s_grid: Sequence[float] = None,
                         alpha: float = 1.0, radius: float = 1.0) -> np.ndarray:
    '''The full vector f(x_c) at the chart vertex, in the global frame.

    The probe gives A = f₁ + if₂ and the conjugate probe B = f₁ − if₂ (in the local frame). A third component is
    read with the scalar probe exp(−s√z), whose integral over K is also C_K·s⁻⁴.
    '''
    chart, constant = _chart_and_constant(chart, radius)
    conjugate_constant = sector_constant(chart.sector, True)
    s_grid = _check_s_grid(elastocorner.settings().s_grid if s_grid is None else s_grid)
    rule = sector_ball_rule(chart)
    local = _local_density(density, chart, rule)
    plain = _scaled_moments(lambda s: ExponentialProbe(s).values(rule.nodes), local[:, :2], rule, s_grid)
    mirrored = _scaled_moments(lambda s: ExponentialProbe(s, True).values(rule.nodes), local[:, :2], rule, s_grid)
    a = richardson_limit(s_grid, plain, alpha) / constant
    b = richardson_limit(s_grid, mirrored, alpha) / conjugate_constant
    result = [(a + b) / 2, (a - b) / 2j]
    if local.shape[1] == 3:
        scalar = _scaled_moments(lambda s: ExponentialProbe(s).scalar(rule.nodes)[:, None], local[:, 2:], rule,
                                 s_grid)
        result.append(richardson_limit(s_grid, scalar, alpha) / constant)
    return chart.vectors_to_global(np.array(result, dtype=complex))


@dataclass(frozen=True)
class WitnessSweep:
    '''W(s) = s⁴·∫_{K∩B} v·(f − ω²u) dx with its two channels and fitted limits.

    `moment_values` is s⁴·∫v·f and `field_values` is −ω²s⁴·∫v·u. `expected_limit` is C_K·(f₁ + if₂)(x_c), the limit
    of the moment channel.
    '''
    s_grid: tuple
    values: np.ndarray
    limit: complex
    moment_values: np.ndarray
    field_values: np.ndarray
    moment_limit: complex
    field_limit: complex
    sector_constant: complex
    expected_limit: complex
    decay_exponent: Optional[float] = None
    convention: str = field(default=Convention.STANDARD.value)

    def __post_init__(self):
        _check_s_grid(self.s_grid, 4)

    def to_dict(self) -> dict:
        return {
            "s_grid": list(self.s_grid),
            "values": [_pair(v) for v in self.values],
            "fitted_limit": _pair(self.limit),
            "moment_values": [_pair(v) for v in self.moment_values],
            "field_values": [_pair(v) for v in self.field_values],
            "moment_limit": _pair(self.moment_limit),
            "field_limit": _pair(self.field_limit),
            "moment_estimate": _pair(self.moment_limit / self.sector_constant),
            "sector_constant": _pair(self.sector_constant),
            "expected_limit": _pair(self.expected_limit),
            "decay_exponent": self.decay_exponent,
            "convention": self.convention,
        }

    def to_csv(self, path):
        _write_sweep_csv(path, self.s_grid, self.values)


def witness(scene: SourceScene, vertex_index: int, s_grid: Sequence[float] = None, radial_levels: int = 12,
            angular_order: int = 6, alpha: float = None) -> WitnessSweep:
    '''The corner witness W(s) of a 2D polygon scene at vertex `vertex_index`.

    u is the radiated field from `volume_potential`, evaluated once at the quadrature nodes. If u had vanishing
    Cauchy data near the corner, W(s) would tend to zero; a moment channel limit C_K·f(x_c) ≠ 0 that the field
    channel does not cancel therefore shows that the scene radiates.
    '''
    if scene.dim != 2:
        raise DomainError("The witness needs a 2D polygon scene")
    chart = corner_chart(scene.support, vertex_index)
    s_grid = _check_s_grid(elastocorner.settings().s_grid if s_grid is None else s_grid, 4)
    alpha = alpha or scene.holder_alpha
    constant = sector_constant(chart.sector)
    rule = sector_ball_rule(chart, radial_levels, angular_order)
    points = chart.to_global(rule.nodes)
    f_local = chart.vectors_to_local(scene.density.values(points))
    logger.info("Witness at vertex %d: evaluating the radiated field at %d nodes", vertex_index, len(rule))
    u_local = chart.vectors_to_local(volume_potential(scene, points))

    def probe_values(s):
        return ExponentialProbe(s).values(rule.nodes)

    moments = _scaled_moments(probe_values, f_local, rule, s_grid)
    fields = -scene.omega ** 2 * _scaled_moments(probe_values, u_local, rule, s_grid)
    values = moments + fields
    corner = scene.density.values(np.asarray(chart.vertex)[None, :])[0]
    corner_local = chart.vectors_to_local(corner)
    return WitnessSweep(s_grid, values, richardson_limit(s_grid, values, alpha), moments, fields,
                        richardson_limit(s_grid, moments, alpha), richardson_limit(s_grid, fields, alpha),
                        complex(constant), complex(constant * (corner_local[0] + 1j * corner_local[1])),
                        fit_power_law(s_grid, values))


def nonradiating_polygon_scene(poly: ConvexPolygon, amplitude, material: LameParameters, omega: float):
    '''A polygon scene that radiates nothing: f = χ_T·(𝓛w + ω²w) with w = c·(ℓ₁⋯ℓ_k)².

    The ℓ_i vanish on the edges of T, so w and ∇w vanish on ∂T and w itself is the radiated field. Returns the
    scene and w as a `PolynomialField`.
    '''
    x, y = Polynomial.variable(0), Polynomial.variable(1)
    product = Polynomial.constant(1.0)
    for a, b in poly.edges():
        t = (b - a) / np.linalg.norm(b - a)
        product = product * ((y - a[1]) * float(t[0]) - (x - a[0]) * float(t[1]))
    bump = PolynomialField([product ** 2 * complex(c) for c in amplitude])
    density = navier_polynomial(bump, material, Convention.STANDARD) + bump.scale(omega ** 2)
    return SourceScene(poly, density, material, omega, name="nonradiating"), bump


def boundary_functional_decay(data: CauchyData, material: LameParameters, s_grid: Sequence[float] = None,
                              conjugate: bool = False) -> dict:
    '''B(s) = ∫_{K∩∂B} [(T_ν u)·v − (T_ν v)·u] dS from sampled Cauchy data on an origin-centred arc.

    Both |B(s)| and the envelope E(s) = ∫ (|T_ν u||v| + |T_ν v||u|) dS are fitted with
    log y = a + b·s + c·log s; the theoretical rate of b is −δ_K·√h for the sector spanned by the arc.
    '''
    if np.linalg.norm(data.center) > 1e-12:
        raise GeometryError(f"Cauchy data must lie on an arc centred at the origin, not {data.center}")
    s_grid = _check_s_grid(np.linspace(5.0, 40.0, 15) if s_grid is None else s_grid, 3)
    nodes = data.rule.nodes
    values, envelope = [], []
    for s in s_grid:
        probe = ExponentialProbe(s, conjugate)
        v = probe.values(nodes)
        tv = probe_traction_on_circle(nodes, probe, material.mu, outward=True)
        values.append(complex(data.rule.integrate(_bilinear(data.traction_vals, v) - _bilinear(tv, data.u_vals))))
        envelope.append(float(data.rule.integrate(
            np.linalg.norm(data.traction_vals, axis=-1) * np.linalg.norm(v, axis=-1)
            + np.linalg.norm(tv, axis=-1) * np.linalg.norm(data.u_vals, axis=-1))))
    sector = Sector(data.angle_lo, data.angle_hi)
    return {
        "s_grid": list(s_grid),
        "values": [_pair(v) for v in values],
        "envelope": envelope,
        "fitted_rate": fit_exponential_rate(s_grid, values),
        "envelope_rate": fit_exponential_rate(s_grid, envelope),
        "theory_rate": -sector.delta_K * math.sqrt(data.radius),
    }


@dataclass(frozen=True)
class DimensionReductionSpec:
    '''Frequency ξ, half-length L of the edge interval and a bump cutoff φ(x₃) = e·exp(−1/(1−t²)),
    t = (x₃ − center)/width, supported strictly inside (−L, L) with maximum 1 at `center`.'''
    xi: float
    L: float
    center: float = 0.0
    width: Optional[float] = None

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"Half-length must be positive, not {self.L}")
        if self.width is None:
            object.__setattr__(self, "width", 0.9 * self.L)
        if not self.width > 0 or abs(self.center) + self.width >= self.L:
            raise DomainError("Cutoff support must lie strictly inside (−L, L)")

    def cutoff(self, x3, order: int = 0):
        '''φ (order 0), φ' (order 1) or φ'' (order 2) at x₃.'''
        t = (np.asarray(x3, dtype=float) - self.center) / self.width
        inside = np.abs(t) < 1
        q = np.where(inside, 1 - t * t, 1.0)
        phi = np.where(inside, np.exp(1 - 1 / q), 0.0)
        if order == 0:
            return phi
        g = -2 * t / q ** 2
        if order == 1:
            return phi * g / self.width
        return phi * (g * g - 2 / q ** 2 - 8 * t * t / q ** 3) / self.width ** 2

    def nodes(self, max_nodes: int = 4096):
        '''Gauss–Legendre nodes and weights over the cutoff support, at least 10 per period of e^{−ix₃ξ}.'''
        periods = abs(self.xi) * 2 * self.width / (2 * math.pi)
        count = max(128, math.ceil(10 * periods))
        if count > max_nodes:
            raise AccuracyError(f"ξ = {self.xi} needs {count} nodes, more than the budget of {max_nodes}")
        t, w = _gauss(count)
        return self.center - self.width + 2 * self.width * t, 2 * self.width * w

    def kernel(self, x3, order: int = 0):
        '''e^{−ix₃ξ} times the `order`-th derivative of φ.'''
        return np.exp(-1j * self.xi * np.asarray(x3)) * self.cutoff(x3, order)

    def transform(self, func: Callable = None) -> complex:
        '''The 1D integral ∫ e^{−ix₃ξ}·φ(x₃)·func(x₃) dx₃ (func defaults to 1).'''
        x3, w = self.nodes()
        values = np.ones_like(x3) if func is None else np.asarray(func(x3))
        return complex(np.sum(w * self.kernel(x3) * values))


def _prism_points(points2d, x3):
    n, m = len(points2d), len(x3)
    return np.column_stack([np.repeat(points2d, m, axis=0), np.tile(x3, n)]), n, m


def _reduce_values(values, weights, n, m):
    return np.einsum("nmc,m->nc", values.reshape(n, m, -1), weights)


def dimension_reduce(g, spec: DimensionReductionSpec, ncomp: int = None, max_nodes: int = 4096) -> SampledField:
    '''R_ξ g(x') = ∫ e^{−ix₃ξ}·φ(x₃)·g(x', x₃) dx₃ as a 2D field.

    `g` is a 3D field with `values`, or a callable of points (N, 3) returning (N, ncomp).
    '''
    x3, w = spec.nodes(max_nodes)
    weights = w * spec.kernel(x3)
    ncomp = ncomp or getattr(g, "ncomp", 3)

    def reduced(points):
        pts, _ = _as_points(points, 2)
        prism, n, m = _prism_points(pts, x3)
        return _reduce_values(_density_values(g, prism), weights, n, m)

    return SampledField(reduced, dim=2, ncomp=ncomp)


def _reduced_operator(jac_hess, material: LameParameters, convention: Convention):
    '''The reduced operator 𝓛̃ applied through the Hessian (N, 3, 2, 2) of a reduced 3-component field.'''
    hess = jac_hess
    a = material.lam if Convention(convention) == Convention.PAPER else material.mu
    laplacian = hess[:, :, 0, 0] + hess[:, :, 1, 1]
    grad_div = np.stack([hess[:, 0, 0, 0] + hess[:, 1, 1, 0], hess[:, 0, 0, 1] + hess[:, 1, 1, 1]], axis=-1)
    result = a * laplacian
    result[:, :2] += (material.lam + material.mu) * grad_div
    return result


def _correction_terms(u3d, spec: DimensionReductionSpec, material: LameParameters, convention, points):
    '''I_ξ + II_ξ at points x', the terms produced by the x₃-derivatives of 𝓛 under R_ξ.'''
    a = material.lam if Convention(convention) == Convention.PAPER else material.mu
    b = a + material.lam + material.mu
    x3, w = spec.nodes()
    prism, n, m = _prism_points(points, x3)
    u = u3d.values(prism)
    jac = u3d.jacobian(prism)
    mixed = np.stack([jac[:, 2, 0], jac[:, 2, 1], jac[:, 0, 0] + jac[:, 1, 1]], axis=-1)
    xi = spec.xi
    second = spec.kernel(x3, 2) - 2j * xi * spec.kernel(x3, 1) - xi ** 2 * spec.kernel(x3)
    first = spec.kernel(x3, 1)
    plain = spec.kernel(x3)
    term_one = -_reduce_values(u * np.array([a, a, b]), w * second, n, m)
    term_two = (material.lam + material.mu) * (-1j * xi * _reduce_values(mixed, w * plain, n, m)
                                              + _reduce_values(mixed, w * first, n, m))
    return term_one + term_two


def _edge_points(chart: CornerChart, count: int, exclusion: float = 1e-3):
    sector = chart.sector
    radii = np.linspace(max(exclusion, 0.05 * chart.h), 0.9 * chart.h, count)
    points, normals = [], []
    for angle, normal in ((sector.theta_m, (math.sin(sector.theta_m), -math.cos(sector.theta_m))),
                          (sector.theta_M, (-math.sin(sector.theta_M), math.cos(sector.theta_M)))):
        points.append(np.stack([radii * math.cos(angle), radii * math.sin(angle)], axis=-1))
        normals.append(np.tile(normal, (count, 1)))
    return np.concatenate(points), np.concatenate(normals)


def _reduced_check_one(u3d, spec, material, omega, convention, gamma_points, gamma_normals, interior, fd_step):
    source = SampledField(lambda p: navier_apply(u3d, material, p, convention) + omega ** 2 * u3d.values(p),
                          dim=3, ncomp=3)
    reduced_u = FiniteDifferenceField(dimension_reduce(u3d, spec), step=fd_step)
    reduced_f = dimension_reduce(source, spec)
    points = np.concatenate([gamma_points, interior])
    lhs = _reduced_operator(reduced_u.hessian(points), material, convention) + omega ** 2 * reduced_u.values(points)
    rhs = reduced_f.values(points)
    ng = len(gamma_points)
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    corrected = rhs[ng:] + _correction_terms(u3d, spec, material, convention, interior)

    jac = reduced_u.jacobian(gamma_points)
    planar = jac[:, :2, :2]
    nu = gamma_normals
    div = planar[:, 0, 0] + planar[:, 1, 1]
    curl = planar[:, 0, 1] - planar[:, 1, 0]
    traction = np.column_stack([
        2 * material.mu * np.einsum("nij,nj->ni", planar, nu) + material.lam * nu * div[:, None]
        + material.mu * np.stack([-nu[:, 1], nu[:, 0]], axis=-1) * curl[:, None],
        material.mu * np.einsum("nj,nj->n", jac[:, 2, :], nu)])
    return {
        "xi": spec.xi,
        "gamma_residual": float(np.max(np.abs(lhs[:ng] - rhs[:ng]))) / scale,
        "interior_residual": float(np.max(np.abs(lhs[ng:] - corrected))) / scale if len(interior) else 0.0,
        "trace_max": float(np.max(np.abs(reduced_u.values(gamma_points)))),
        "traction_max": float(np.max(np.abs(traction))),
        "scale": scale,
    }


def reduced_equation_check(u3d: ManufacturedCornerField, spec: Union[DimensionReductionSpec,
                           Sequence[DimensionReductionSpec]], material: LameParameters, omega: float = 0.0,
                           convention: Convention = None, gamma_count: int = 12, fd_step: float = None,
                           tol: float = 1e-3) -> dict:
    '''Checks the reduced equation 𝓛̃(R_ξu) + ω²R_ξu = R_ξf on the edges Γ of the cone, where f = 𝓛u + ω²u.

    u3d is a prism field in chart-local coordinates that vanishes with its gradient on both edge faces. At interior
    points the x₃-derivative terms I_ξ + II_ξ are added to R_ξf and the identity is checked there too. On Γ the
    reduced field and its reduced traction must vanish.
    '''
    if u3d.dim != 3 or u3d.ncomp != 3:
        raise SetupError("The reduction check needs a 3-component field on a 3D prism")
    convention = Convention(convention or elastocorner.settings().convention)
    chart = u3d.chart
    face_points, face_normals = _edge_samples(chart, 3)
    scale = max(1.0, float(np.max(np.abs(u3d.core.values(face_points)))))
    if np.max(np.abs(u3d.values(face_points))) > 1e-12 * scale or \
       np.max(np.abs(u3d.jacobian(face_points))) > 1e-10 * scale:
        raise SetupError("The prism field does not vanish with its gradient on the edge faces")

    specs = [spec] if isinstance(spec, DimensionReductionSpec) else list(spec)
    if not specs:
        raise SetupError("At least one ξ is needed")
    gamma_points, gamma_normals = _edge_points(chart, gamma_count)
    sector = chart.sector
    angles = sector.theta_m + sector.opening * np.array([0.3, 0.5, 0.7])
    interior = np.concatenate([np.stack([r * np.cos(angles), r * np.sin(angles)], axis=-1)
                               for r in (0.3 * chart.h, 0.6 * chart.h)])
    fd_step = fd_step or elastocorner.settings().fd_step * chart.h
    results = Parallel(n_jobs=elastocorner.settings().threads, prefer="threads")(
        delayed(_reduced_check_one)(u3d, s, material, omega, convention, gamma_points, gamma_normals, interior,
                                    fd_step) for s in specs)
    worst = max(max(r["gamma_residual"], r["interior_residual"]) for r in results)
    return {"convention": convention.value, "omega": omega, "results": results, "max_residual": worst,
            "passed": worst <= tol}


def edge_vanishing_demo(f3d, xis: Sequence[float], chart: Union[CornerChart, Sector], L: float = 1.0,
                        s_grid: Sequence[float] = None, radius: float = 1.0, width: float = None) -> dict:
    '''For each ξ, reconstructs R_ξf(0) at the edge point from the reduced 2D source with the corner probes and
    compares it with the direct 1D integral ∫ e^{−ix₃ξ}·φ(x₃)·f(0, 0, x₃) dx₃.'''
    xis = list(xis)
    if not xis:
        raise SetupError("At least one ξ is needed")
    chart, _ = _chart_and_constant(chart, radius)
    origin = np.asarray(chart.vertex, dtype=float)
    rows = []
    for xi in xis:
        spec = DimensionReductionSpec(xi, L, width=width)
        reduced = dimension_reduce(f3d, spec)
        estimate = corner_value_extract(reduced, chart, s_grid)
        x3, w = spec.nodes()
        on_edge = _density_values(f3d, np.column_stack([np.tile(origin, (len(x3), 1)), x3]))
        direct = np.einsum("m,mc->c", w * spec.kernel(x3), on_edge)
        error = float(np.max(np.abs(estimate - direct)))
        rows.append({"xi": xi, "reconstructed": [_pair(v) for v in estimate], "direct": [_pair(v) for v in direct],
                     "abs_error": error,
                     "rel_error": error / float(np.max(np.abs(direct))) if np.any(direct != 0) else None})
    return {"results": rows}


class DegenerateConeError(ElastoCornerException):
    '''Raised when the sector constant C_K vanishes (a straight "corner" of opening π).'''


class ConstructionError(ElastoCornerException):
    '''Raised when a manufactured field fails its own boundary verification.'''


class SetupError(ElastoCornerException):
    '''Raised when the inputs of a reduction check violate its hypotheses.'''
