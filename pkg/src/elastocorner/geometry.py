'''Geometric primitives and the quadrature rules used by every other module.

Rules are plain node/weight arrays (`QuadratureRule`). The graded rules concentrate nodes toward a corner or a
singular point, where integrands behave like powers of √ρ or log ρ.
'''
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

import elastocorner
from elastocorner import ElastoCornerException


logger = logging.getLogger(__name__)


def _gauss(order: int):
    '''Gauss–Legendre nodes and weights on [0, 1].'''
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Sector:
    '''The open planar cone {ρ(cos θ, sin θ) : ρ > 0, θ_m < θ < θ_M} with −π < θ_m < θ_M < π.'''
    theta_m: float
    theta_M: float

    def __post_init__(self):
        if not -math.pi < self.theta_m < self.theta_M < math.pi:
            raise GeometryError(f"Sector angles must satisfy -π < θ_m < θ_M < π, "
                                f"got ({self.theta_m}, {self.theta_M})")

    @property
    def opening(self) -> float:
        return self.theta_M - self.theta_m

    @property
    def delta_K(self) -> float:
        '''min over (θ_m, θ_M) of cos(θ/2), attained at an endpoint.'''
        return min(math.cos(self.theta_m / 2), math.cos(self.theta_M / 2))

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        angle = np.arctan2(pts[..., 1], pts[..., 0])
        return (angle > self.theta_m) & (angle < self.theta_M)

    def edge_directions(self):
        '''Unit vectors along the edges θ = θ_m and θ = θ_M.'''
        return (np.array([math.cos(self.theta_m), math.sin(self.theta_m)]),
                np.array([math.cos(self.theta_M), math.sin(self.theta_M)]))


class ConvexPolygon:
    '''A strictly convex polygon with counterclockwise vertices.'''
    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise GeometryError("A polygon needs at least 3 vertices given as [x, y] pairs")
        if not np.all(np.isfinite(verts)):
            raise GeometryError("Polygon vertices must be finite")
        edges = np.roll(verts, -1, axis=0) - verts
        if np.any(np.linalg.norm(edges, axis=1) == 0):
            raise GeometryError("Polygon has repeated vertices")
        cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        scale = np.linalg.norm(edges, axis=1) * np.linalg.norm(np.roll(edges, -1, axis=0), axis=1)
        if np.any(cross <= 1e-12 * scale):
            raise GeometryError("Polygon vertices must be counterclockwise and strictly convex")
        self.vertices = verts

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"ConvexPolygon({self.vertices.tolist()})"

    def edges(self):
        '''List of (start, end) vertex pairs, counterclockwise.'''
        return [(self.vertices[i], self.vertices[(i + 1) % len(self)]) for i in range(len(self))]

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def centroid(self) -> np.ndarray:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        cross = x * np.roll(y, -1) - np.roll(x, -1) * y
        cx = np.sum((x + np.roll(x, -1)) * cross) / (6 * self.area)
        cy = np.sum((y + np.roll(y, -1)) * cross) / (6 * self.area)
        return np.array([cx, cy])

    @property
    def diameter(self) -> float:
        diffs = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.max(np.linalg.norm(diffs, axis=-1)))

    def signed_distances(self, points) -> np.ndarray:
        '''Signed distance of `points` to each edge line, positive on the interior side. Shape (..., n_edges).'''
        pts = np.asarray(points, dtype=float)
        out = []
        for a, b in self.edges():
            t = (b - a) / np.linalg.norm(b - a)
            out.append(t[0] * (pts[..., 1] - a[1]) - t[1] * (pts[..., 0] - a[0]))
        return np.stack(out, axis=-1)

    def contains(self, points) -> np.ndarray:
        return np.all(self.signed_distances(points) > 0, axis=-1)

    def distance_to_boundary(self, points) -> np.ndarray:
        '''Unsigned distance of `points` to the polygon boundary.'''
        pts = np.asarray(points, dtype=float)
        best = np.full(pts.shape[:-1], np.inf)
        for a, b in self.edges():
            d = b - a
            t = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
            foot = a + t[..., None] * d
            best = np.minimum(best, np.linalg.norm(pts - foot, axis=-1))
        return best

    def interior_angle(self, index: int) -> float:
        v = self.vertices[index]
        d1 = self.vertices[(index + 1) % len(self)] - v
        d2 = self.vertices[index - 1] - v
        return math.atan2(d1[0] * d2[1] - d1[1] * d2[0], d1 @ d2)


@dataclass(frozen=True)
class BallSupport:
    '''A ball in ℝ³, the support of the nonradiating source scenes.'''
    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError(f"Ball radius must be positive, not {self.radius}")

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    @property
    def volume(self) -> float:
        return 4 * math.pi * self.radius ** 3 / 3


@dataclass(frozen=True)
class CornerChart:
    '''Local frame at a corner: x_local = R(−rotation)·(x − vertex).

    In the local frame the corner cone is `sector`, and within the ball of radius `h` about the origin the polygon
    coincides with the cone.
    '''
    vertex: tuple
    sector: Sector
    rotation: float
    h: float
    polygon: Optional[ConvexPolygon] = field(default=None, compare=False, repr=False)
    vertex_index: Optional[int] = None

    def __post_init__(self):
        if not self.h > 0:
            raise GeometryError(f"Chart radius must be positive, not {self.h}")
        if not 0 < self.sector.opening < math.pi:
            raise GeometryError(f"Chart opening {self.sector.opening} is not in (0, π)")

    @classmethod
    def from_sector(cls, sector: Sector, h: float) -> 'CornerChart':
        '''A synthetic chart without polygon, for cones given directly in local coordinates.'''
        return cls((0.0, 0.0), sector, 0.0, h)

    def to_local(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return (pts - np.asarray(self.vertex)) @ _rotation(-self.rotation).T

    def to_global(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ _rotation(self.rotation).T + np.asarray(self.vertex)

    def vectors_to_local(self, vectors) -> np.ndarray:
        '''Rotates the first two components of vectors (..., c) into the local frame.'''
        vecs = np.array(vectors, dtype=complex)
        vecs[..., :2] = vecs[..., :2] @ _rotation(-self.rotation).T
        return vecs

    def vectors_to_global(self, vectors) -> np.ndarray:
        vecs = np.array(vectors, dtype=complex)
        vecs[..., :2] = vecs[..., :2] @ _rotation(self.rotation).T
        return vecs


def corner_chart(poly: ConvexPolygon, vertex_index: int) -> CornerChart:
    '''Chart at vertex `vertex_index` of `poly`, with the cone symmetric about the positive x₁-axis.

    The chart radius h is half the distance from the vertex to the nearest non-adjacent edge.
    '''
    n = len(poly)
    if int(vertex_index) != vertex_index or not 0 <= vertex_index < n:
        raise GeometryError(f"Vertex index {vertex_index} out of range for a polygon with {n} vertices")
    vertex_index = int(vertex_index)
    v = poly.vertices[vertex_index]
    d1 = poly.vertices[(vertex_index + 1) % n] - v
    opening = poly.interior_angle(vertex_index)
    if not 0 < opening < math.pi - 1e-12:
        raise GeometryError(f"Vertex {vertex_index} is degenerate (interior angle {opening})")
    rotation = math.atan2(d1[1], d1[0]) + opening / 2

    adjacent = {(vertex_index - 1) % n, vertex_index}
    distances = []
    for i, (a, b) in enumerate(poly.edges()):
        if i in adjacent:
            continue
        d = b - a
        t = min(max(((v - a) @ d) / (d @ d), 0.0), 1.0)
        distances.append(np.linalg.norm(v - (a + t * d)))
    h = 0.5 * min(distances)
    return CornerChart(tuple(v), Sector(-opening / 2, opening / 2), rotation, h, poly, vertex_index)


@dataclass(frozen=True)
class QuadratureRule:
    '''Nodes (N, d) and weights (N,) of a quadrature rule on `domain`.

    Arc rules also carry the outward unit `normals` of the arc at the nodes.
    '''
    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    normals: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.weights)

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values) -> np.ndarray:
        '''Σ w_i·values_i, where `values` has shape (N, ...).'''
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def __add__(self, other: 'QuadratureRule') -> 'QuadratureRule':
        return QuadratureRule(np.concatenate([self.nodes, other.nodes]),
                              np.concatenate([self.weights, other.weights]),
                              "composite")


def _radial_edges(inner: float, outer: float, levels: int, ratio: float) -> np.ndarray:
    if inner > 0:
        count = max(1, math.ceil(math.log(outer / inner) / math.log(1 / ratio)))
        return np.geomspace(inner, outer, count + 1)
    return np.concatenate([[0.0], outer * ratio ** np.arange(levels, -1, -1)])


def _angular_panels(lo: float, hi: float, max_width: float) -> np.ndarray:
    count = max(1, math.ceil((hi - lo) / max_width - 1e-12))
    return np.linspace(lo, hi, count + 1)


def _polar_tensor_rule(radial_edges, angle_edges, radial_order, angular_order):
    '''Tensor Gauss rule in (ρ, θ) over panels, with the polar Jacobian ρ. Returns (ρ, θ, w).'''
    t, wt = _gauss(radial_order)
    u, wu = _gauss(angular_order)
    r_lo, r_hi = radial_edges[:-1], radial_edges[1:]
    rho = (r_lo[:, None] + (r_hi - r_lo)[:, None] * t[None, :]).ravel()
    w_rho = ((r_hi - r_lo)[:, None] * wt[None, :]).ravel() * rho
    a_lo, a_hi = angle_edges[:-1], angle_edges[1:]
    theta = (a_lo[:, None] + (a_hi - a_lo)[:, None] * u[None, :]).ravel()
    w_theta = ((a_hi - a_lo)[:, None] * wu[None, :]).ravel()
    rho_g, theta_g = np.meshgrid(rho, theta, indexing="ij")
    weights = np.outer(w_rho, w_theta)
    return rho_g.ravel(), theta_g.ravel(), weights.ravel()


def sector_rule(sector: Sector, radius: float, radial_levels: int = None, angular_order: int = None,
                inner_radius: float = 0.0, radial_order: int = None, ratio: float = None) -> QuadratureRule:
    '''Polar rule on the truncated cone {x ∈ K : inner_radius < |x| < radius}.

    The radial direction is split into panels graded geometrically toward the corner: edges at radius·ratio^l for
    l = 0..radial_levels, plus the innermost panel [0, radius·ratio^radial_levels]. With `inner_radius` > 0 the
    rule covers the annular sector instead, using geometric panels between the two radii. The angular direction is
    split into Gauss panels no wider than π/4.
    '''
    config = elastocorner.settings()
    radial_levels = radial_levels or config.radial_levels
    angular_order = angular_order or config.angular_order
    radial_order = radial_order or angular_order
    ratio = ratio or config.radial_ratio
    if radial_levels < 1 or angular_order < 2:
        raise GeometryError("Sector rules need at least 1 radial level and angular order 2")
    if not 0 <= inner_radius < radius:
        raise GeometryError(f"Invalid radii ({inner_radius}, {radius})")
    rho, theta, weights = _polar_tensor_rule(_radial_edges(inner_radius, radius, radial_levels, ratio),
                                             _angular_panels(sector.theta_m, sector.theta_M, math.pi / 4),
                                             radial_order, angular_order)
    nodes = np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=-1)
    return QuadratureRule(nodes, weights, "sector-ball")


def sector_ball_rule(chart: CornerChart, radial_levels: int = None, angular_order: int = None,
                     radius: float = None, inner_radius: float = 0.0, radial_order: int = None,
                     ratio: float = None) -> QuadratureRule:
    '''`sector_rule` on K ∩ B(0, radius) in chart-local coordinates; radius defaults to the chart radius h.'''
    radius = chart.h if radius is None else radius
    return sector_rule(chart.sector, radius, radial_levels, angular_order, inner_radius, radial_order, ratio)


def singular_disk_rule(center, radius: float, order: int = None, levels: int = 12, ratio: float = 0.25,
                       angular_count: int = None) -> QuadratureRule:
    '''Polar rule on the disk B(center, radius) for integrands with a log or 1/ρ singularity at the center.

    The polar Jacobian cancels 1/ρ. Radial Gauss panels are graded toward the center by `ratio` over `levels`
    levels; the angle uses the trapezoidal rule, which is spectrally accurate for periodic integrands.
    '''
    order = order or elastocorner.settings().disk_order
    if not radius > 0:
        raise GeometryError(f"Disk radius must be positive, not {radius}")
    angular_count = angular_count or max(32, 2 * order)
    t, wt = _gauss(order)
    edges = np.concatenate([[0.0], radius * ratio ** np.arange(levels, -1, -1)])
    r_lo, r_hi = edges[:-1], edges[1:]
    rho = (r_lo[:, None] + (r_hi - r_lo)[:, None] * t[None, :]).ravel()
    w_rho = ((r_hi - r_lo)[:, None] * wt[None, :]).ravel() * rho
    theta = 2 * np.pi * np.arange(angular_count) / angular_count
    w_theta = np.full(angular_count, 2 * np.pi / angular_count)
    rho_g, theta_g = np.meshgrid(rho, theta, indexing="ij")
    nodes = np.asarray(center, dtype=float) + np.stack([rho_g * np.cos(theta_g), rho_g * np.sin(theta_g)],
                                                       axis=-1).reshape(-1, 2)
    return QuadratureRule(nodes, np.outer(w_rho, w_theta).ravel(), "disk-polar")


def arc_rule(center, radius: float, angle_lo: float, angle_hi: float, order: int = 64) -> QuadratureRule:
    '''Gauss–Legendre rule in the angle on the arc {center + radius·(cos θ, sin θ) : angle_lo < θ < angle_hi}.'''
    if not angle_lo < angle_hi:
        raise GeometryError(f"Arc angles must be increasing, got ({angle_lo}, {angle_hi})")
    if not radius > 0:
        raise GeometryError(f"Arc radius must be positive, not {radius}")
    u, wu = _gauss(order)
    theta = angle_lo + (angle_hi - angle_lo) * u
    normals = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    nodes = np.asarray(center, dtype=float) + radius * normals
    return QuadratureRule(nodes, radius * (angle_hi - angle_lo) * wu, "arc", normals)


def _triangle_rule(a, b, c, order: int):
    '''Collapsed (Duffy) tensor Gauss rule on the triangle abc.'''
    t, wt = _gauss(order)
    u, v = np.meshgrid(t, t, indexing="ij")
    wu, wv = np.meshgrid(wt, wt, indexing="ij")
    u, v, w = u.ravel(), v.ravel(), (wu * wv).ravel()
    twice_area = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    points = a + u[:, None] * ((b - a) + v[:, None] * (c - b))
    return points, w * u * twice_area


def _split_triangle(a, b, c, levels: int):
    triangles = [(a, b, c)]
    for _ in range(levels):
        refined = []
        for p, q, r in triangles:
            pq, qr, rp = (p + q) / 2, (q + r) / 2, (r + p) / 2
            refined.extend([(p, pq, rp), (pq, q, qr), (rp, qr, r), (qr, rp, pq)])
        triangles = refined
    return triangles


def polygon_rule(poly: ConvexPolygon, order: int = None, subdivisions: int = 0) -> QuadratureRule:
    '''Fan triangulation from the centroid, each triangle split `subdivisions` times into four and integrated by a
    collapsed tensor Gauss rule with `order` points per direction.'''
    order = order or elastocorner.settings().triangle_order
    center = poly.centroid
    nodes, weights = [], []
    for a, b in poly.edges():
        for tri in _split_triangle(center, a, b, subdivisions):
            p, w = _triangle_rule(*tri, order)
            nodes.append(p)
            weights.append(w)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), "polygon")


def polar_fan_rule(poly: ConvexPolygon, center, inner_radius: float, order: int = 8,
                   eta_panel: float = 1.0, tau_panel: float = 1.5) -> QuadratureRule:
    '''Rule for ∫_{Ω ∖ B(center, inner_radius)} in polar coordinates about `center`.

    Each edge is swept by rays from `center`. Along an edge at signed foot distance d the angle is parametrised by
    σ = sinh η, so that dθ = sech η dη and the ray length is |d|·cosh η; along each ray ρ = r·(R/r)^τ. Both maps keep
    the integrand smooth when `center` is close to an edge. For a center outside the polygon the edge contributions
    carry the sign of their orientation and cancel outside Ω, so weights may be negative; `inner_radius` must then be
    smaller than the distance from `center` to the polygon.
    '''
    x = np.asarray(center, dtype=float)
    r = float(inner_radius)
    if not r > 0:
        raise GeometryError(f"Inner radius must be positive, not {inner_radius}")
    t, wt = _gauss(order)
    nodes, weights = [], []
    for a, b in poly.edges():
        length = np.linalg.norm(b - a)
        tangent = (b - a) / length
        d = tangent[0] * (x[1] - a[1]) - tangent[1] * (x[0] - a[0])
        if abs(d) < 1e-14 * length:
            continue                  # edge seen edge-on
        foot = x + d * np.array([-tangent[1], tangent[0]]) * -1.0
        toward = (foot - x) / abs(d)
        eta_a = math.asinh(((a - foot) @ tangent) / abs(d))
        eta_b = math.asinh(((b - foot) @ tangent) / abs(d))
        eta_edges = _angular_panels(eta_a, eta_b, eta_panel)
        eta = (eta_edges[:-1, None] + np.diff(eta_edges)[:, None] * t[None, :]).ravel()
        w_eta = (np.diff(eta_edges)[:, None] * wt[None, :]).ravel() / np.cosh(eta)
        ray_len = abs(d) * np.cosh(eta)
        if np.any(ray_len <= r):
            raise GeometryError("Inner radius reaches the polygon boundary")
        log_ratio = np.log(ray_len / r)
        panels = max(1, math.ceil(float(np.max(log_ratio)) / tau_panel))
        tau_edges = np.linspace(0.0, 1.0, panels + 1)
        tau = (tau_edges[:-1, None] + np.diff(tau_edges)[:, None] * t[None, :]).ravel()
        w_tau = (np.diff(tau_edges)[:, None] * wt[None, :]).ravel()
        rho = r * np.exp(np.outer(log_ratio, tau))                   # (n_eta, n_tau)
        directions = (toward[None, :] + np.sinh(eta)[:, None] * tangent[None, :]) / np.cosh(eta)[:, None]
        pts = x + rho[..., None] * directions[:, None, :]
        w = np.sign(d) * w_eta[:, None] * w_tau[None, :] * rho ** 2 * log_ratio[:, None]
        nodes.append(pts.reshape(-1, 2))
        weights.append(w.ravel())
    if not nodes:
        raise GeometryError("Polar fan has no visible edges")
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), "polar-fan")


def ball_rule(radius: float = 1.0, order: int = 24, center=(0.0, 0.0, 0.0)) -> QuadratureRule:
    '''Spherical-coordinate tensor Gauss rule on a ball in ℝ³: Gauss in r and cos φ, trapezoid in the azimuth.'''
    if not radius > 0:
        raise GeometryError(f"Ball radius must be positive, not {radius}")
    t, wt = _gauss(order)
    r = radius * t
    w_r = radius * wt * r ** 2
    c, wc = np.polynomial.legendre.leggauss(order)
    n_az = 2 * order
    az = 2 * np.pi * np.arange(n_az) / n_az
    rg, cg, ag = np.meshgrid(r, c, az, indexing="ij")
    sg = np.sqrt(1 - cg ** 2)
    nodes = np.stack([rg * sg * np.cos(ag), rg * sg * np.sin(ag), rg * cg], axis=-1).reshape(-1, 3)
    weights = (w_r[:, None, None] * wc[None, :, None] * np.full(n_az, 2 * np.pi / n_az)[None, None, :]).ravel()
    return QuadratureRule(nodes + np.asarray(center, dtype=float), weights, "ball")


def fibonacci_sphere(m: int) -> np.ndarray:
    '''m nearly uniform unit vectors on the sphere (golden-angle spiral).'''
    if m < 1:
        raise GeometryError(f"Need at least one direction, not {m}")
    i = np.arange(m) + 0.5
    z = 1 - 2 * i / m
    phi = math.pi * (3 - math.sqrt(5)) * i
    rho = np.sqrt(1 - z ** 2)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def circle_directions(m: int) -> np.ndarray:
    '''m equally spaced unit vectors on the circle, starting at e₁.'''
    if m < 1:
        raise GeometryError(f"Need at least one direction, not {m}")
    theta = 2 * np.pi * np.arange(m) / m
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def unit_directions(m: int, dim: int) -> np.ndarray:
    return circle_directions(m) if dim == 2 else fibonacci_sphere(m)


class GeometryError(ElastoCornerException, ValueError):
    '''Raised for invalid or degenerate geometry.'''
