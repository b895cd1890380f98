'''Vector fields as seen by the elastic operators.

A field is any object with

 - `dim`: number of space variables (2 or 3),
 - `ncomp`: number of components,
 - `values(points)`: array (N, ncomp) for points (N, dim),
 - `has_derivatives`: whether `jacobian(points)` (N, ncomp, dim) and `hessian(points)` (N, ncomp, dim, dim) exist.

`elastocorner.poly.PolynomialField`, `elastocorner.probe.ExponentialProbe` and
`elastocorner.corner.ManufacturedCornerField` provide exact derivatives. Anything else is wrapped in a
`SampledField` and, when derivatives are needed, a `FiniteDifferenceField`.
'''
from typing import Callable

import numpy as np

import elastocorner
from elastocorner import ElastoCornerException
from elastocorner.config import ElasFlag


def _as_points(points, dim: int):
    '''Returns (points as an (N, dim) float array, whether a single point was given).'''
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != dim:
        raise ValueError(f"Expected points with {dim} coordinates, got shape {np.shape(points)}")
    return pts, single


class SampledField:
    '''A field known only through a callable `func(points) -> (N, ncomp)`.'''
    has_derivatives = False

    def __init__(self, func: Callable, dim: int = 2, ncomp: int = 2):
        self.func = func
        self.dim = dim
        self.ncomp = ncomp

    def values(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        return np.asarray(self.func(pts), dtype=complex).reshape(len(pts), self.ncomp)

    def __repr__(self):
        return f"SampledField({self.func!r}, dim={self.dim}, ncomp={self.ncomp})"


class FiniteDifferenceField:
    '''Adds second-order central-difference derivatives to a field that only provides values.

    The step is `step`, or `settings().fd_step · scale` when `step` is not given.
    '''
    has_derivatives = True

    def __init__(self, field, step: float = None, scale: float = 1.0):
        if not hasattr(field, "values"):
            raise CapabilityError("FiniteDifferenceField needs a field with a values() method")
        self.field = field
        self.dim = field.dim
        self.ncomp = field.ncomp
        self.step = step if step is not None else elastocorner.settings().fd_step * scale
        if not self.step > 0:
            raise ValueError(f"Finite-difference step must be positive, not {self.step}")

    def values(self, points) -> np.ndarray:
        return self.field.values(points)

    def _shift(self, pts, axis, amount):
        shifted = pts.copy()
        shifted[:, axis] += amount
        return self.field.values(shifted)

    def jacobian(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        h = self.step
        cols = [(self._shift(pts, i, h) - self._shift(pts, i, -h)) / (2 * h) for i in range(self.dim)]
        return np.stack(cols, axis=-1)

    def hessian(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        h = self.step
        center = self.field.values(pts)
        out = np.empty((len(pts), self.ncomp, self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            out[:, :, i, i] = (self._shift(pts, i, h) - 2 * center + self._shift(pts, i, -h)) / h ** 2
            for j in range(i + 1, self.dim):
                corners = []
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    shifted = pts.copy()
                    shifted[:, i] += si * h
                    shifted[:, j] += sj * h
                    corners.append(self.field.values(shifted))
                mixed = (corners[0] - corners[1] - corners[2] + corners[3]) / (4 * h * h)
                out[:, :, i, j] = mixed
                out[:, :, j, i] = mixed
        return out

    def __repr__(self):
        return f"FiniteDifferenceField({self.field!r}, step={self.step})"


def with_derivatives(field, flags: ElasFlag = None):
    '''Returns `field` if it has derivatives. Otherwise wraps it in a `FiniteDifferenceField` when
    `ElasFlag.FD_FALLBACK` is set, and raises `CapabilityError` when it is not.'''
    flags = flags or elastocorner.flags or ElasFlag.NONE
    if getattr(field, "has_derivatives", False):
        return field
    if ElasFlag.FD_FALLBACK in flags:
        return FiniteDifferenceField(field)
    raise CapabilityError(f"{type(field).__name__} has no analytic derivatives; wrap it in a "
                          f"FiniteDifferenceField or set ElasFlag.FD_FALLBACK")


class CapabilityError(ElastoCornerException):
    '''Raised when an operation needs derivatives that a field does not provide.'''
