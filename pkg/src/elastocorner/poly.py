'''Complex polynomials in two or three variables, and vector fields built from them.

Polynomials are the densities of every source scene. They have exact derivatives, so the Navier operator and the
boundary traction of a `PolynomialField` need no finite differences.
'''
from numbers import Number
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np

from elastocorner import ElastoCornerException


Exponent = Tuple[int, ...]


class Polynomial:
    '''A polynomial Σ c_e·x^e with complex coefficients in `nvars` variables.

    Supports `+`, `-`, `*`, non-negative integer powers, differentiation and vectorised evaluation.
    '''
    def __init__(self, terms: Dict[Exponent, complex] = None, nvars: int = 2):
        if nvars not in (1, 2, 3):
            raise PolynomialError(f"Polynomials in {nvars} variables are not supported")
        self.nvars = nvars
        self.terms: Dict[Exponent, complex] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != nvars or any(e < 0 for e in exponent):
                raise PolynomialError(f"Invalid exponent {exponent} for {nvars} variables")
            coeff = complex(coeff)
            if not np.isfinite(coeff):
                raise PolynomialError(f"Coefficient of {exponent} is not finite")
            if coeff != 0:
                self.terms[exponent] = self.terms.get(exponent, 0) + coeff

    @classmethod
    def constant(cls, value: complex, nvars: int = 2) -> 'Polynomial':
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int = 2) -> 'Polynomial':
        '''The coordinate polynomial x_{index+1}.'''
        if not 0 <= index < nvars:
            raise PolynomialError(f"No variable {index} among {nvars}")
        exponent = tuple(1 if i == index else 0 for i in range(nvars))
        return cls({exponent: 1.0}, nvars)

    @classmethod
    def parse(cls, text: str, nvars: int = 2) -> 'Polynomial':
        '''Parses an expression such as `"1 + 2*x*y - 0.5j*y^2"`. See `elastocorner.parser`.'''
        from elastocorner import parser
        return parser._parse(text, nvars)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other) -> 'Polynomial':
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise PolynomialError("Cannot combine polynomials in different numbers of variables")
            return other
        if isinstance(other, Number):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for exponent, coeff in other.terms.items():
            terms[exponent] = terms.get(exponent, 0) + coeff
        return Polynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                terms[exponent] = terms.get(exponent, 0) + c1 * c2
        return Polynomial(terms, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if int(power) != power or power < 0:
            raise PolynomialError(f"Only non-negative integer powers are supported, not {power}")
        result = Polynomial.constant(1.0, self.nvars)
        for _ in range(int(power)):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self):
        return f"Polynomial({self.terms!r}, nvars={self.nvars})"

    def diff(self, index: int) -> 'Polynomial':
        '''Partial derivative with respect to variable `index`.'''
        terms = {}
        for exponent, coeff in self.terms.items():
            if exponent[index] > 0:
                lowered = list(exponent)
                lowered[index] -= 1
                terms[tuple(lowered)] = coeff * exponent[index]
        return Polynomial(terms, self.nvars)

    def __call__(self, points) -> np.ndarray:
        '''Evaluates at `points` of shape (..., nvars). Returns a complex array of shape (...).'''
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.nvars:
            raise PolynomialError(f"Expected points with {self.nvars} coordinates, got shape {pts.shape}")
        result = np.zeros(pts.shape[:-1], dtype=complex)
        for exponent, coeff in self.terms.items():
            monomial = np.ones(pts.shape[:-1])
            for axis, power in enumerate(exponent):
                if power:
                    monomial = monomial * pts[..., axis] ** power
            result += coeff * monomial
        return result


class PolynomialField:
    '''A vector field whose components are `Polynomial`s in the same number of variables.

    Implements the field protocol of `elastocorner.fields`: `values`, `jacobian` and `hessian`, all exact.
    '''
    has_derivatives = True

    def __init__(self, components: Sequence[Polynomial]):
        components = list(components)
        if not components:
            raise PolynomialError("A polynomial field needs at least one component")
        nvars = components[0].nvars
        if any(c.nvars != nvars for c in components):
            raise PolynomialError("All components must have the same number of variables")
        self.components = components
        self.dim = nvars
        self.ncomp = len(components)
        self._jac = [[c.diff(i) for i in range(nvars)] for c in components]
        self._hess = [[[d.diff(j) for j in range(nvars)] for d in row] for row in self._jac]

    @classmethod
    def parse(cls, expressions: Iterable[Union[str, Number]], nvars: int = 2) -> 'PolynomialField':
        '''Builds a field from one expression string (or number) per component.'''
        return cls([_to_polynomial(expr, nvars) for expr in expressions])

    @classmethod
    def zero(cls, ncomp: int = 2, nvars: int = 2) -> 'PolynomialField':
        return cls([Polynomial(nvars=nvars) for _ in range(ncomp)])

    @classmethod
    def constant(cls, vector: Sequence[complex], nvars: int = 2) -> 'PolynomialField':
        return cls([Polynomial.constant(v, nvars) for v in vector])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def __add__(self, other: 'PolynomialField') -> 'PolynomialField':
        return PolynomialField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: 'PolynomialField') -> 'PolynomialField':
        return PolynomialField([a - b for a, b in zip(self.components, other.components)])

    def scale(self, factor) -> 'PolynomialField':
        '''Multiplies every component by a number or a scalar `Polynomial`.'''
        return PolynomialField([c * factor for c in self.components])

    def values(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([c(pts) for c in self.components], axis=-1)

    def jacobian(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([np.stack([d(pts) for d in row], axis=-1) for row in self._jac], axis=-2)

    def hessian(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([
            np.stack([np.stack([d(pts) for d in col], axis=-1) for col in row], axis=-2)
            for row in self._hess], axis=-3)

    def __repr__(self):
        return f"PolynomialField({self.components!r})"


def _to_polynomial(expr, nvars: int) -> Polynomial:
    if isinstance(expr, Polynomial):
        return expr
    if isinstance(expr, Number):
        return Polynomial.constant(expr, nvars)
    return Polynomial.parse(str(expr), nvars)


class PolynomialError(ElastoCornerException, ValueError):
    '''Raised for invalid polynomial construction or arithmetic.'''
