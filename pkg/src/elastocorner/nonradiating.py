'''A nonradiating elastic source in ℝ³.

The far fields of f = a·χ_{B(0,1)} are projections of the ball transform evaluated at the two wave numbers,

    ∫ e^{−ik e·y} χ_{B(0,1)}(y) dy = (2π/k)^{3/2}·J_{3/2}(k),

which vanishes at the zeros of J_{3/2}. Choosing λ and μ so that ω_p and ω_s are two such zeros silences both far
fields in every direction, while strong convexity 3λ + 2μ > 0 still holds.
'''
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from elastocorner import ElastoCornerException
from elastocorner.elastic import LameParameters, SourceScene, StrongConvexityError, far_field, far_field_pattern
from elastocorner.geometry import BallSupport
from elastocorner.poly import PolynomialField
from elastocorner.special import DomainError, bessel_j_half, j32_zero


logger = logging.getLogger(__name__)


def ball_char_ft(k, radius: float = 1.0):
    '''∫ e^{−ik e·y} χ_{B(0,radius)}(y) dy = radius³·(2π/(k·radius))^{3/2}·J_{3/2}(k·radius), for k > 0.'''
    arr = np.asarray(k, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("The ball transform needs k > 0; its limit at 0 is the ball volume")
    if not radius > 0:
        raise DomainError(f"Ball radius must be positive, not {radius}")
    ka = arr * radius
    result = radius ** 3 * (2 * np.pi / ka) ** 1.5 * bessel_j_half(3, ka)
    return result if np.ndim(k) else float(result)


@dataclass(frozen=True)
class BallScene:
    '''The source amplitude·χ_{B(0,radius)} at frequency omega in a 3D material.'''
    omega: float
    material: LameParameters
    amplitude: tuple = (1.0, 0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"Ball radius must be positive, not {self.radius}")
        if len(self.amplitude) != 3:
            raise DomainError("Ball amplitudes have 3 components")

    def to_scene(self) -> SourceScene:
        return ball_scene_from(self.material, self.omega, self.amplitude, self.radius)


def ball_scene_from(material: LameParameters, omega: float, amplitude: Sequence[complex] = (1.0, 0.0, 0.0),
                    radius: float = 1.0) -> SourceScene:
    '''The 3D `SourceScene` of a constant amplitude on a ball about the origin.'''
    return SourceScene(BallSupport(radius), PolynomialField.constant(list(amplitude), 3), material, omega,
                       name="ball")


def tune_lame(omega: float, zero_index_p: int = 1, zero_index_s: int = 2) -> LameParameters:
    '''Lamé parameters for which ω_p = A and ω_s = B are the given zeros of J_{3/2}:

        μ = (ω/B)²,   λ = (ω/A)² − 2μ.
    '''
    if not omega > 0:
        raise DomainError(f"Frequency must be positive, not {omega}")
    if not zero_index_p < zero_index_s:
        raise PreconditionError(f"The compressional zero index ({zero_index_p}) must be below the shear zero "
                                f"index ({zero_index_s})")
    a, b = j32_zero(zero_index_p), j32_zero(zero_index_s)
    mu = (omega / b) ** 2
    lam = (omega / a) ** 2 - 2 * mu
    margin = 3 * lam + 2 * mu
    if not margin > 0:
        raise StrongConvexityError(f"Zeros ({zero_index_p}, {zero_index_s}) give 3λ + 2μ = {margin}", margin)
    return LameParameters(lam, mu, 3)


def verify_nonradiating(omega: float = 1.0, zero_index_p: int = 1, zero_index_s: int = 2, m: int = 64,
                        material: LameParameters = None, amplitude: Sequence[complex] = (1.0, 0.0, 0.0),
                        oracle_order: int = 24) -> dict:
    '''Far fields of the ball source over m Fibonacci directions.

    With no `material` the Lamé parameters come from `tune_lame` and every far field should vanish; a given
    material is used as is. One direction is also computed by direct quadrature over the ball, and its difference
    from the closed form is reported as `oracle_residual`.
    '''
    if m < 1:
        raise DomainError(f"Need at least one direction, not {m}")
    tuned = material is None
    material = material or tune_lame(omega, zero_index_p, zero_index_s)
    scene = ball_scene_from(material, omega, amplitude)
    freq = scene.freq
    pattern = far_field_pattern(scene, m)
    direction = pattern.directions[0]
    closed = far_field(scene, direction, "closed")
    brute = far_field(scene, direction, "quadrature", oracle_order)
    residual = max(float(np.max(np.abs(c - b))) for c, b in zip(closed, brute))
    logger.info("Ball source at ω=%g: max far field %.3g over %d directions", omega, pattern.max_magnitude, m)
    return {
        "omega": omega,
        "A": freq.omega_p,
        "B": freq.omega_s,
        "lambda": material.lam,
        "mu": material.mu,
        "convexity_margin": material.convexity_margin,
        "max_farfield": pattern.max_magnitude,
        "oracle_residual": residual,
        "ball_volume": 4 * math.pi / 3,
        "directions": m,
        "tuned": tuned,
    }


class PreconditionError(ElastoCornerException, ValueError):
    '''Raised when the zero indices given to `tune_lame` are not increasing.'''
