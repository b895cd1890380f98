'''Exponential probe solutions of the Navier operator and their sector moments.

With z = x₁ + ix₂ and the principal square root, the probe

    v(x) = (exp(−s√z), i·exp(−s√z))

is divergence free and harmonic, so 𝓛v = 0 under both operator conventions. Over an infinite cone K it has the
closed-form moment

    ∫_K v₁ dx = 6i(e^{−2iθ_M} − e^{−2iθ_m})·s⁻⁴,

and it decays like exp(−δ_K·s·√|x|) inside K. The conjugate probe (exp(−s√z̄), −i·exp(−s√z̄)) has the same
properties with the reflected sector constant; pairing the two separates the components of a complex vector.
'''
import logging
import math
from dataclasses import dataclass

import numpy as np

from elastocorner.fields import _as_points
from elastocorner.geometry import Sector, _gauss, sector_rule
from elastocorner.special import DomainError, gamma


logger = logging.getLogger(__name__)

TAIL_REGIME = 15.0
'''`sector_tail_bound` holds once δ_K·s·√h reaches this value.'''


def principal_sqrt(z):
    '''√|z|·(cos θ/2 + i sin θ/2) with θ = arg z ∈ (−π, π]. Accepts scalars or arrays.'''
    arr = np.asarray(z, dtype=complex)
    angle = np.angle(arr)
    angle = np.where(angle <= -np.pi, np.pi, angle)
    result = np.sqrt(np.abs(arr)) * np.exp(0.5j * angle)
    return result if np.ndim(z) else complex(result)


@dataclass(frozen=True)
class ExponentialProbe:
    '''The probe v with sharpness `s`, or its conjugate counterpart when `conjugate` is set.

    Implements the field protocol of `elastocorner.fields` with exact derivatives.
    '''
    s: float
    conjugate: bool = False

    dim = 2
    ncomp = 2
    has_derivatives = True

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError(f"Probe parameter s must be positive, not {self.s}")

    @property
    def _sign(self) -> int:
        return -1 if self.conjugate else 1

    @property
    def second_factor(self) -> complex:
        '''v₂ = second_factor·v₁.'''
        return 1j * self._sign

    def _zeta(self, pts):
        z = pts[:, 0] + 1j * pts[:, 1]
        return np.conj(z) if self.conjugate else z

    def scalar(self, points) -> np.ndarray:
        '''The scalar exp(−s√ζ) with ζ = z (or z̄ for the conjugate probe). Shape (N,).'''
        pts, _ = _as_points(points, 2)
        return np.exp(-self.s * principal_sqrt(self._zeta(pts)))

    def _scalar_derivatives(self, pts):
        zeta = self._zeta(pts)
        root = principal_sqrt(zeta)
        w = np.exp(-self.s * root)
        with np.errstate(divide="ignore", invalid="ignore"):
            w1 = -self.s / (2 * root) * w
            w2 = (self.s / (4 * zeta * root) + self.s ** 2 / (4 * zeta)) * w
        return w, w1, w2

    def scalar_jacobian(self, points) -> np.ndarray:
        '''Gradient of `scalar`, shape (N, 2).'''
        pts, _ = _as_points(points, 2)
        _, w1, _ = self._scalar_derivatives(pts)
        return np.stack([w1, self.second_factor * w1], axis=-1)

    def scalar_hessian(self, points) -> np.ndarray:
        '''Hessian of `scalar`, shape (N, 2, 2).'''
        pts, _ = _as_points(points, 2)
        _, _, w2 = self._scalar_derivatives(pts)
        c = self.second_factor
        return np.stack([np.stack([w2, c * w2], axis=-1), np.stack([c * w2, -w2], axis=-1)], axis=-2)

    def values(self, points) -> np.ndarray:
        w = self.scalar(points)
        return np.stack([w, self.second_factor * w], axis=-1)

    def jacobian(self, points) -> np.ndarray:
        grad = self.scalar_jacobian(points)
        return np.stack([grad, self.second_factor * grad], axis=-2)

    def hessian(self, points) -> np.ndarray:
        hess = self.scalar_hessian(points)
        return np.stack([hess, self.second_factor * hess], axis=-3)


def probe_eval(x, probe: ExponentialProbe) -> np.ndarray:
    '''v(x) for a point (2,) or points (N, 2).'''
    pts, single = _as_points(x, 2)
    values = probe.values(pts)
    return values[0] if single else values


def probe_traction_on_circle(x, probe: ExponentialProbe, mu: float, outward: bool = False) -> np.ndarray:
    '''Closed-form traction of the probe on the circle through x about the origin.

    For the inward normal ν = −x/|x| this is s·μ·(√ζ/|ζ|)·v(x); `outward` flips the sign.
    '''
    pts, single = _as_points(x, 2)
    radius = np.linalg.norm(pts, axis=-1)
    if np.any(radius == 0):
        raise DomainError("The probe traction on a circle needs |x| > 0")
    factor = probe.s * mu * principal_sqrt(probe._zeta(pts)) / radius
    if outward:
        factor = -factor
    traction = factor[:, None] * probe.values(pts)
    return traction[0] if single else traction


def _check_s(s):
    if not s > 0:
        raise DomainError(f"Probe parameter s must be positive, not {s}")


def sector_constant(K: Sector, conjugate: bool = False) -> complex:
    '''C_K, the s-independent factor of the sector moment. Zero exactly for half planes.'''
    if conjugate:
        return 6j * (np.exp(2j * K.theta_m) - np.exp(2j * K.theta_M))
    return 6j * (np.exp(-2j * K.theta_M) - np.exp(-2j * K.theta_m))


def sector_moment_exact(K: Sector, s: float, conjugate: bool = False) -> complex:
    '''∫_K v₁ dx = C_K·s⁻⁴.'''
    _check_s(s)
    return complex(sector_constant(K, conjugate) * s ** -4.0)


def sector_monomial_moment(K: Sector, s: float, a: int, b: int, conjugate: bool = False) -> complex:
    '''∫_K v₁·x₁ᵃx₂ᵇ dx in closed form.

    Rotating the radial contour turns the ρ-integral into a Gamma integral, leaving

        2·(2n+3)!·s^{−(2n+4)}·∫ cosᵃθ·sinᵇθ·e^{∓i(n+2)θ} dθ,   n = a + b,

    whose angular part is a trigonometric polynomial integrated exactly by Gauss–Legendre.
    '''
    _check_s(s)
    if a < 0 or b < 0:
        raise DomainError(f"Monomial exponents must be non-negative, not ({a}, {b})")
    n = a + b
    nodes, weights = _gauss(n + 24)
    theta = K.theta_m + K.opening * nodes
    sign = 1 if conjugate else -1
    angular = K.opening * np.sum(weights * np.cos(theta) ** a * np.sin(theta) ** b
                                 * np.exp(sign * 1j * (n + 2) * theta))
    return complex(2 * math.factorial(2 * n + 3) * s ** -(2.0 * n + 4) * angular)


def sector_alpha_bound(K: Sector, s: float, alpha: float) -> float:
    '''Upper bound 2(θ_M−θ_m)·Γ(2α+4)·δ_K^{−(2α+4)}·s^{−2α−4} of ∫_K |v₁|·|x|^α dx.'''
    _check_s(s)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, not {alpha}")
    p = 2 * alpha + 4
    return float(2 * K.opening * gamma(p) * K.delta_K ** -p * s ** -p)


def sector_tail_bound(K: Sector, s: float, h: float) -> float:
    '''Upper bound 6(θ_M−θ_m)·δ_K⁻⁴·s⁻⁴·e^{−δ_K·s·√h/2} of ∫_{K∖B(0,h)} |v₁| dx.

    The bound is valid once `tail_bound_regime(K, s, h)` holds.
    '''
    _check_s(s)
    if h < 0:
        raise DomainError(f"h must be non-negative, not {h}")
    delta = K.delta_K
    return float(6 * K.opening * delta ** -4 * s ** -4.0 * math.exp(-delta * s * math.sqrt(h) / 2))


def tail_bound_regime(K: Sector, s: float, h: float) -> bool:
    '''Whether δ_K·s·√h is large enough for `sector_tail_bound` to bound the tail.'''
    return K.delta_K * s * math.sqrt(h) >= TAIL_REGIME


def _truncation_radius(K: Sector, s: float, rel_tol: float) -> float:
    delta = K.delta_K
    scale = 6 * K.opening * delta ** -4 * s ** -4.0
    reference = max(abs(sector_moment_exact(K, s)), 2 * scale)
    return (2 / (delta * s) * math.log(scale / (rel_tol * reference))) ** 2


def sector_moment_quadrature(K: Sector, s: float, R: float = None, conjugate: bool = False,
                             rel_tol: float = 1e-8) -> complex:
    '''∫_{K∩B(0,R)} v₁ dx by the graded polar rule.

    When `R` is omitted it is chosen so that `sector_tail_bound` is below `rel_tol` times the size of the exact
    moment. A given `R` that leaves a larger tail is used anyway, with a warning.
    '''
    _check_s(s)
    if R is None:
        R = _truncation_radius(K, s, rel_tol)
    else:
        reference = max(abs(sector_moment_exact(K, s)), 12 * K.opening * K.delta_K ** -4 * s ** -4.0)
        if not tail_bound_regime(K, s, R) or sector_tail_bound(K, s, R) > rel_tol * reference:
            logger.warning("Truncation radius %g leaves a tail above %g of the sector moment (s=%g)", R, rel_tol, s)
    rule = sector_rule(K, R)
    values = ExponentialProbe(s, conjugate).scalar(rule.nodes)
    return complex(rule.integrate(values))


def sector_abs_moment(K: Sector, s: float, alpha: float = 0.0, inner_radius: float = 0.0) -> float:
    '''∫_{K∖B(0, inner_radius)} |v₁|·|x|^α dx by quadrature; the quadrature oracle for the two bounds.'''
    _check_s(s)
    root_r = math.sqrt(inner_radius) + (60 + 4 * alpha) / (K.delta_K * s)
    rule = sector_rule(K, root_r ** 2, inner_radius=inner_radius)
    rho = np.linalg.norm(rule.nodes, axis=-1)
    values = np.abs(ExponentialProbe(s).scalar(rule.nodes)) * rho ** alpha
    return float(rule.integrate(values))
