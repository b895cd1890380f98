'''The time-harmonic elastic forward model.

The Navier operator is 𝓛u = aΔu + (λ+μ)∇(∇·u), with a = λ under `Convention.PAPER` and a = μ under
`Convention.STANDARD`. Everything that rests on the classical Kupradze theory (the Green's tensor, volume potentials,
the Helmholtz split and the far-field asymptotics) uses the standard operator. With (Δ+k²)G = −δ, the radiated field
of a source f is

    u = −∫_Ω Γ(·, y)·f(y) dy,   so that   μΔu + (λ+μ)∇(∇·u) + ω²u = f.
'''
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from joblib import Parallel, delayed

import elastocorner
from elastocorner import ElastoCornerException
from elastocorner.config import Convention, ElasFlag, to_convention
from elastocorner.fields import CapabilityError, FiniteDifferenceField, SampledField, _as_points, with_derivatives
from elastocorner.geometry import (BallSupport, ConvexPolygon, QuadratureRule, arc_rule, ball_rule, polar_fan_rule,
                                   polygon_rule, singular_disk_rule, unit_directions)
from elastocorner.poly import PolynomialField
from elastocorner.special import DomainError, hankel1_one, hankel1_zero


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LameParameters:
    '''Lamé pair (λ, μ) in `dim` dimensions, subject to strong convexity μ > 0 and dim·λ + 2μ > 0.'''
    lam: float
    mu: float
    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DomainError(f"Dimension must be 2 or 3, not {self.dim}")
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise DomainError("Lamé parameters must be finite")
        if not self.mu > 0:
            raise StrongConvexityError(f"μ must be positive, not {self.mu}", self.mu)
        if not self.convexity_margin > 0:
            raise StrongConvexityError(f"Strong convexity fails: {self.dim}λ + 2μ = {self.convexity_margin}",
                                       self.convexity_margin)

    @property
    def convexity_margin(self) -> float:
        '''dim·λ + 2μ.'''
        return self.dim * self.lam + 2 * self.mu

    def wavenumbers(self, omega: float) -> 'Wavenumbers':
        return Wavenumbers.of(omega, self)


@dataclass(frozen=True)
class Wavenumbers:
    '''Angular frequency ω with the compressional and shear wave numbers ω_p = ω/√(λ+2μ), ω_s = ω/√μ.'''
    omega: float
    omega_p: float
    omega_s: float

    @classmethod
    def of(cls, omega: float, material: LameParameters) -> 'Wavenumbers':
        if not omega > 0:
            raise DomainError(f"Frequency must be positive, not {omega}")
        return cls(omega, omega / math.sqrt(material.lam + 2 * material.mu), omega / math.sqrt(material.mu))


@dataclass(frozen=True)
class SourceScene:
    '''A source f = χ_Ω·φ with polynomial density φ.

    `support` is a `ConvexPolygon` (2D scenes) or a `BallSupport` (3D scenes); `density` is a `PolynomialField`
    with as many components and variables as the scene has dimensions.
    '''
    support: Union[ConvexPolygon, BallSupport]
    density: PolynomialField
    material: LameParameters
    omega: float
    holder_alpha: float = 1.0
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        dim = 2 if isinstance(self.support, ConvexPolygon) else 3
        if self.density.dim != dim or self.density.ncomp != dim:
            raise DomainError(f"A {dim}D scene needs a density with {dim} components in {dim} variables")
        if self.material.dim != dim:
            raise DomainError(f"Material dimension {self.material.dim} does not match the {dim}D support")
        if not 0 < self.holder_alpha <= 1:
            raise DomainError(f"holder_alpha must lie in (0, 1], not {self.holder_alpha}")
        Wavenumbers.of(self.omega, self.material)

    @property
    def dim(self) -> int:
        return self.density.dim

    @property
    def freq(self) -> Wavenumbers:
        return Wavenumbers.of(self.omega, self.material)

    @property
    def diameter(self) -> float:
        return self.support.diameter

    def is_zero(self) -> bool:
        return self.density.is_zero()

    def with_density(self, density: PolynomialField) -> 'SourceScene':
        return SourceScene(self.support, density, self.material, self.omega, self.holder_alpha, self.name)

    def source_values(self, points) -> np.ndarray:
        '''f(x) = χ_Ω(x)·φ(x).'''
        pts, single = _as_points(points, self.dim)
        if self.dim == 2:
            inside = self.support.contains(pts)
        else:
            inside = np.linalg.norm(pts - np.asarray(self.support.center), axis=-1) < self.support.radius
        values = self.density.values(pts) * inside[:, None]
        return values[0] if single else values


@dataclass(frozen=True)
class FarFieldPattern:
    '''Longitudinal (`up_inf`) and transversal (`us_inf`) far-field vectors at unit `directions`.'''
    directions: np.ndarray
    up_inf: np.ndarray
    us_inf: np.ndarray

    def __len__(self):
        return len(self.directions)

    @property
    def max_magnitude(self) -> float:
        return float(max(np.max(np.linalg.norm(self.up_inf, axis=-1), initial=0.0),
                         np.max(np.linalg.norm(self.us_inf, axis=-1), initial=0.0)))

    def projection_defect(self) -> float:
        '''Largest relative violation of up_inf ∥ e and us_inf ⊥ e.'''
        e = self.directions
        along = np.abs(np.sum(self.us_inf * e, axis=-1))
        across = np.linalg.norm(self.up_inf - np.sum(self.up_inf * e, axis=-1)[:, None] * e, axis=-1)
        scale = np.maximum(np.maximum(np.linalg.norm(self.up_inf, axis=-1), np.linalg.norm(self.us_inf, axis=-1)),
                           1e-300)
        return float(np.max(np.maximum(along, across) / scale, initial=0.0))

    def to_csv(self, path):
        '''Writes one row per direction: the direction, then Re/Im of each component of up_inf and us_inf.'''
        dim = self.directions.shape[1]
        axes = "xyz"[:dim]
        header = [f"dir_{a}" for a in axes]
        columns = [self.directions[:, i] for i in range(dim)]
        for name, values in (("up", self.up_inf), ("us", self.us_inf)):
            for i, a in enumerate(axes):
                header += [f"{name}_{a}_re", f"{name}_{a}_im"]
                columns += [values[:, i].real, values[:, i].imag]
        np.savetxt(path, np.column_stack(columns), delimiter=",", header=",".join(header), comments="",
                   fmt="%.17g")


@dataclass(frozen=True)
class CauchyData:
    '''Sampled displacement and outward traction on the arc center + radius·(cos θ, sin θ), angle_lo < θ < angle_hi.'''
    rule: QuadratureRule
    u_vals: np.ndarray
    traction_vals: np.ndarray
    center: tuple
    radius: float
    angle_lo: float
    angle_hi: float

    def __post_init__(self):
        if len(self.u_vals) != len(self.rule) or len(self.traction_vals) != len(self.rule):
            raise DomainError("Cauchy data must have one value and one traction per quadrature node")
        if self.rule.normals is None:
            raise DomainError("Cauchy data need a quadrature rule with normals")

    @classmethod
    def from_field(cls, field, material: LameParameters, center, radius: float, angle_lo: float,
                   angle_hi: float, order: int = 128, flags: ElasFlag = None) -> 'CauchyData':
        '''Samples `field` and its traction on an arc.'''
        rule = arc_rule(center, radius, angle_lo, angle_hi, order)
        return cls(rule, field.values(rule.nodes), boundary_traction(field, material, rule.nodes, rule.normals,
                                                                     flags=flags),
                   tuple(center), radius, angle_lo, angle_hi)


def _derivatives(field, points, flags):
    field = with_derivatives(field, flags)
    if field.ncomp != field.dim:
        raise DomainError(f"Elastic operators need a field with {field.dim} components, not {field.ncomp}")
    pts, single = _as_points(points, field.dim)
    return field, pts, single


def _leading_coefficient(material: LameParameters, convention) -> float:
    return material.lam if to_convention(convention) == Convention.PAPER else material.mu


def navier_apply(field, material: LameParameters, x, convention: Convention = None,
                 flags: ElasFlag = None) -> np.ndarray:
    '''𝓛u(x) = aΔu + (λ+μ)∇(∇·u), with a set by `convention` (default from `elastocorner.settings()`).

    `x` is one point or an (N, dim) array. Fields without analytic derivatives raise `CapabilityError` unless
    `ElasFlag.FD_FALLBACK` is set.
    '''
    field, pts, single = _derivatives(field, x, flags)
    hess = field.hessian(pts)
    laplacian = np.trace(hess, axis1=-2, axis2=-1)
    grad_div = np.einsum("njji->ni", hess)
    result = _leading_coefficient(material, convention) * laplacian + (material.lam + material.mu) * grad_div
    return result[0] if single else result


def navier_polynomial(field: PolynomialField, material: LameParameters,
                      convention: Convention = None) -> PolynomialField:
    '''𝓛 applied symbolically to a polynomial field.'''
    dim = field.dim
    comps = field.components
    a = _leading_coefficient(material, convention)
    result = []
    for i in range(dim):
        laplacian = sum((comps[i].diff(j).diff(j) for j in range(dim)), 0 * comps[i])
        grad_div = sum((comps[j].diff(j).diff(i) for j in range(dim)), 0 * comps[i])
        result.append(laplacian * float(a) + grad_div * float(material.lam + material.mu))
    return PolynomialField(result)


def _check_normals(normals, dim):
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    if normals.shape[-1] != dim:
        raise DomainError(f"Normals must have {dim} components")
    if np.any(np.abs(np.linalg.norm(normals, axis=-1) - 1) > 1e-12):
        raise DomainError("Normals must be unit vectors")
    return normals


def boundary_traction(field, material: LameParameters, x, normal, flags: ElasFlag = None) -> np.ndarray:
    '''Boundary traction T_ν u at x.

    2D: 2μ∂_ν u + λν(∇·u) + μν^⊥(∂₂u₁ − ∂₁u₂) with ν^⊥ = (−ν₂, ν₁).
    3D: 2μ∂_ν u + λν(∇·u) + μν×(∇×u).
    '''
    field, pts, single = _derivatives(field, x, flags)
    nu = _check_normals(normal, field.dim)
    jac = field.jacobian(pts)
    normal_derivative = np.einsum("nij,nj->ni", jac, np.broadcast_to(nu, pts.shape))
    nu = np.broadcast_to(nu, pts.shape)
    div = np.trace(jac, axis1=-2, axis2=-1)
    if field.dim == 2:
        curl = jac[:, 0, 1] - jac[:, 1, 0]
        rotation_term = np.stack([-nu[:, 1], nu[:, 0]], axis=-1) * curl[:, None]
    else:
        curl = np.stack([jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]],
                        axis=-1)
        rotation_term = np.cross(nu, curl)
    result = 2 * material.mu * normal_derivative + material.lam * nu * div[:, None] + material.mu * rotation_term
    return result[0] if single else result


def _separation(x, y):
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0):
        raise SingularityError("Source and target points coincide")
    return diff, r


def _radial_profile(r, k, dim):
    '''G(r), G'(r) and G''(r) of the Helmholtz fundamental solution.'''
    if dim == 2:
        if not k > 0:
            raise DomainError(f"The 2D fundamental solution needs k > 0, not {k}")
        kr = k * r
        h0, h1 = hankel1_zero(kr), hankel1_one(kr)
        return 0.25j * h0, -0.25j * k * h1, -0.25j * k * k * (h0 - h1 / kr)
    e = np.exp(1j * k * r) / (4 * np.pi)
    return e / r, e * (1j * k * r - 1) / r ** 2, e * (2 - 2j * k * r - (k * r) ** 2) / r ** 3


def helmholtz_fundamental(x, y, k: float, dim: int = None):
    '''(i/4)·H₀⁽¹⁾(k|x−y|) in 2D, e^{ik|x−y|}/(4π|x−y|) in 3D.'''
    diff, r = _separation(x, y)
    dim = dim or diff.shape[-1]
    if dim == 3 and k < 0:
        raise DomainError(f"Wave number must be non-negative, not {k}")
    value, _, _ = _radial_profile(r, k, dim)
    return value


def _radial_hessian(diff, r, d1, d2):
    unit = diff / r[..., None]
    outer = unit[..., :, None] * unit[..., None, :]
    eye = np.eye(diff.shape[-1])
    return d2[..., None, None] * outer + (d1 / r)[..., None, None] * (eye - outer)


def green_tensor(x, y, material: LameParameters, omega: float) -> np.ndarray:
    '''Kupradze tensor Γ(x, y) = (1/μ)G(ω_s)·I + (1/ω²)·∇ₓ∇ₓᵀ(G(ω_s) − G(ω_p)), shape (..., dim, dim).

    The Hessian uses closed-form radial derivatives, G''·r̂r̂ᵀ + (G'/r)(I − r̂r̂ᵀ).
    '''
    diff, r = _separation(x, y)
    dim = diff.shape[-1]
    freq = Wavenumbers.of(omega, material)
    gs, gs1, gs2 = _radial_profile(r, freq.omega_s, dim)
    _, gp1, gp2 = _radial_profile(r, freq.omega_p, dim)
    hessian = _radial_hessian(diff, r, gs1 - gp1, gs2 - gp2)
    return (gs / material.mu)[..., None, None] * np.eye(dim) + hessian / omega ** 2


def _far_rule(poly: ConvexPolygon, k: float) -> QuadratureRule:
    levels = 2 + max(0, math.ceil(math.log2(max(k * poly.diameter / 4, 1.0))))
    return polygon_rule(poly, subdivisions=levels)


def _potential_at(scene: SourceScene, x, far_rule: QuadratureRule):
    poly = scene.support
    diam = poly.diameter
    inside = bool(poly.contains(x))
    dist = float(poly.distance_to_boundary(x))
    if not inside and dist >= 0.5 * diam:
        rule = far_rule
    else:
        r = max(min(0.5 * dist, 0.1 * diam), 1e-9 * diam)
        rule = polar_fan_rule(poly, x, r)
        if inside:
            rule = rule + singular_disk_rule(x, r)
    kernel = green_tensor(x, rule.nodes, scene.material, scene.omega)
    return -np.einsum("n,nij,nj->i", rule.weights, kernel, scene.density.values(rule.nodes))


def volume_potential(scene: SourceScene, x) -> np.ndarray:
    '''The radiated field u(x) = −∫_Ω Γ(x, y)·φ(y) dy of a 2D scene, at one point or an (N, 2) array.

    Targets far from Ω use a subdivided polygon rule. Nearer targets use a polar fan centred at the target, and
    targets inside Ω add a singular disk rule on a small disk about the target.
    '''
    if scene.dim != 2:
        raise CapabilityError("Volume potentials are only available for 2D scenes")
    pts, single = _as_points(x, 2)
    if scene.is_zero():
        result = np.zeros((len(pts), 2), dtype=complex)
    else:
        far_rule = _far_rule(scene.support, scene.freq.omega_s)
        values = Parallel(n_jobs=elastocorner.settings().threads, prefer="threads")(
            delayed(_potential_at)(scene, p, far_rule) for p in pts)
        result = np.array(values, dtype=complex).reshape(len(pts), 2)
    return result[0] if single else result


def _check_direction(e, dim):
    e = np.asarray(e, dtype=float)
    if e.shape != (dim,):
        raise DomainError(f"Direction must have {dim} components")
    if abs(np.linalg.norm(e) - 1) > 1e-12:
        raise DomainError("Direction must be a unit vector")
    return e


def _fourier_transform(scene: SourceScene, k: float, e, method: str, order: int):
    '''∫ e^{−ik e·y} φ(y) dy over the support.'''
    support = scene.support
    if scene.dim == 3:
        if method in ("auto", "closed") and scene.density.degree == 0:
            from elastocorner.nonradiating import ball_char_ft
            amplitude = scene.density.values(np.zeros((1, 3)))[0]
            shift = np.exp(-1j * k * (e @ np.asarray(support.center, dtype=float)))
            return amplitude * ball_char_ft(k, support.radius) * shift
        if method == "closed":
            raise CapabilityError("The closed-form ball transform needs a constant density")
        rule = ball_rule(support.radius, order or 24, support.center)
    elif method == "closed":
        raise CapabilityError("No closed-form transform for polygon supports")
    elif order:
        rule = polygon_rule(support, order)
    else:
        rule = _far_rule(support, k)
    phase = np.exp(-1j * k * (rule.nodes @ e))
    return rule.integrate(phase[:, None] * scene.density.values(rule.nodes))


def far_field(scene: SourceScene, e, method: str = "auto", order: int = None):
    '''(up_inf, us_inf) = (Π_e ∫e^{−iω_p e·y}f dy, Π_{e⊥} ∫e^{−iω_s e·y}f dy).

    `method` is "auto", "closed" (ball scenes with constant density) or "quadrature".
    '''
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"Unknown far-field method '{method}'")
    e = _check_direction(e, scene.dim)
    freq = scene.freq
    wp = _fourier_transform(scene, freq.omega_p, e, method, order)
    ws = _fourier_transform(scene, freq.omega_s, e, method, order)
    up = (wp @ e) * e
    us = ws - (ws @ e) * e
    return up, us


def far_field_pattern(scene: SourceScene, m: int, method: str = "auto") -> FarFieldPattern:
    '''Far fields over m directions: equally spaced on the circle (2D) or a Fibonacci sphere (3D).'''
    directions = unit_directions(m, scene.dim)
    pairs = Parallel(n_jobs=elastocorner.settings().threads, prefer="threads")(
        delayed(far_field)(scene, e, method) for e in directions)
    return FarFieldPattern(directions, np.array([p for p, _ in pairs]), np.array([s for _, s in pairs]))


def helmholtz_split(scene: SourceScene, x, fd_h: float = None):
    '''Compressional and shear parts u_p = −(1/ω_p²)∇(∇·u), u_s = (1/ω_s²)·rot rot u of the radiated field at x.

    Derivatives are central differences of `volume_potential` with step `fd_h`. The split sums to u outside Ω.
    '''
    if scene.dim != 2:
        raise CapabilityError("The Helmholtz split is only available for 2D scenes")
    x = np.asarray(x, dtype=float)
    fd_h = fd_h or elastocorner.settings().fd_step * scene.diameter
    dist = float(scene.support.distance_to_boundary(x))
    if scene.support.contains(x) or dist <= 4 * fd_h:
        raise AccuracyError(f"Point {x.tolist()} is within {4 * fd_h} of the support")
    sampled = FiniteDifferenceField(SampledField(lambda p: volume_potential(scene, p)), step=fd_h)
    hess = sampled.hessian(x[None, :])[0]
    grad_div = np.einsum("jji->i", hess)
    rot_rot = np.array([hess[1, 0, 1] - hess[0, 1, 1], hess[0, 0, 1] - hess[1, 0, 0]])
    freq = scene.freq
    return -grad_div / freq.omega_p ** 2, rot_rot / freq.omega_s ** 2


def far_field_constants(material: LameParameters, omega: float):
    '''(c_p, c_s) such that u(Re) ≈ R^{−1/2}·(c_p·e^{iω_pR}·up_inf + c_s·e^{iω_sR}·us_inf) in 2D.'''
    freq = Wavenumbers.of(omega, material)
    def constant(k, modulus):
        return complex(-(0.25j / modulus) * math.sqrt(2 / (math.pi * k)) * np.exp(-0.25j * math.pi))
    return constant(freq.omega_p, material.lam + 2 * material.mu), constant(freq.omega_s, material.mu)


def _fit_two_waves(radii, samples, kp, ks, beta):
    '''Least-squares fit samples ≈ R^β(A·e^{ik_sR} + B·e^{ik_pR}); returns (A, B, relative residual).'''
    basis = np.stack([radii ** beta * np.exp(1j * ks * radii), radii ** beta * np.exp(1j * kp * radii)], axis=-1)
    coeffs, *_ = np.linalg.lstsq(basis, samples, rcond=None)
    residual = np.linalg.norm(basis @ coeffs - samples) / max(np.linalg.norm(samples), 1e-300)
    return coeffs[0], coeffs[1], float(residual)


def far_field_asymptotic_check(scene: SourceScene, e, radii=None) -> dict:
    '''Compares u(R·e) with its far-field expansion along the ray R·e.

    Reports the decay exponent of the remainder after subtracting the leading terms (expected −3/2 in 2D), the
    slope of |u| itself (−1/2), and the fitted far-field constants next to the theoretical and nominal (1/4π) ones.
    '''
    if scene.dim != 2:
        raise CapabilityError("The asymptotic check is only available for 2D scenes")
    e = _check_direction(e, 2)
    diam = scene.diameter
    radii = np.geomspace(20 * diam, 2000 * diam, 24) if radii is None else np.asarray(radii, dtype=float)
    if len(radii) < 4 or np.any(np.diff(radii) <= 0):
        raise DomainError("Radii must be an increasing list of at least 4 values")
    if radii[0] < 10 * diam:
        raise AccuracyError(f"Smallest radius {radii[0]} is below 10 scene diameters ({10 * diam})")
    freq = scene.freq
    kp, ks = freq.omega_p, freq.omega_s
    up, us = far_field(scene, e)
    cp, cs = far_field_constants(scene.material, scene.omega)
    u = volume_potential(scene, radii[:, None] * e)
    leading = radii[:, None] ** -0.5 * (cp * np.exp(1j * kp * radii)[:, None] * up
                                        + cs * np.exp(1j * ks * radii)[:, None] * us)
    remainder = u - leading
    report = {
        "radii": radii.tolist(),
        "max_sample": float(np.max(np.abs(u))),
        "theory_constant_p": [cp.real, cp.imag],
        "theory_constant_s": [cs.real, cs.imag],
        "nominal_constant": 1 / (4 * math.pi),
        "remainder_slope": None,
        "remainder_naive_slope": None,
        "leading_slope": None,
        "fitted_constant_p": None,
        "fitted_constant_s": None,
    }
    if report["max_sample"] == 0:
        return report

    norms = np.linalg.norm(u, axis=-1)
    report["leading_slope"] = float(np.polyfit(np.log(radii), np.log(norms), 1)[0])
    a_s, a_p, _ = _fit_two_waves(radii, u, kp, ks, -0.5)
    if np.linalg.norm(us) > 0:
        fitted = complex(np.vdot(us, a_s) / np.vdot(us, us))
        report["fitted_constant_s"] = [fitted.real, fitted.imag]
    if np.linalg.norm(up) > 0:
        fitted = complex(np.vdot(up, a_p) / np.vdot(up, up))
        report["fitted_constant_p"] = [fitted.real, fitted.imag]

    rem_norms = np.linalg.norm(remainder, axis=-1)
    if np.all(rem_norms > 0):
        report["remainder_naive_slope"] = float(np.polyfit(np.log(radii), np.log(rem_norms), 1)[0])
        betas = np.arange(-3.0, 0.0, 0.005)
        residuals = [_fit_two_waves(radii, remainder, kp, ks, b)[2] for b in betas]
        best = int(np.argmin(residuals))
        report["remainder_slope"] = float(betas[best])
        report["remainder_fit_residual"] = float(residuals[best])
    logger.debug("Far-field check along %s: %s", e.tolist(), report["remainder_slope"])
    return report


class SingularityError(ElastoCornerException, ValueError):
    '''Raised when a kernel is evaluated at coinciding source and target points.'''


class AccuracyError(ElastoCornerException):
    '''Raised when a requested evaluation cannot reach its accuracy target.'''


class StrongConvexityError(ElastoCornerException, ValueError):
    '''Raised when Lamé parameters violate strong convexity. The offending margin is in the `margin` attribute.'''
    def __init__(self, mesg, margin=None, *args, **kwargs):
        super().__init__(mesg, *args, **kwargs)
        self.margin = margin
