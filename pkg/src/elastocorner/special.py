'''Self-contained special functions: spherical Bessel forms J_{±1/2}, J_{3/2}, the Bessel functions J₀, Y₀, J₁, Y₁,
the Hankel functions H₀⁽¹⁾, H₁⁽¹⁾, the positive zeros of J_{3/2} and the Gamma function.

All functions accept scalars or NumPy arrays and return the same shape.
'''
import functools
import math
from dataclasses import dataclass

import numpy as np

import elastocorner
from elastocorner import ElastoCornerException


EULER_GAMMA = 0.57721566490153286061

HANKEL_SWITCHOVER = 12.0
'''Arguments below this value use the ascending series, the rest the Hankel asymptotic expansion.'''

_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class SpecialFnAccuracy:
    '''Accuracy targets of the series evaluations.'''
    abs_tol: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, not {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be at least 1, not {self.max_terms}")


def _accuracy(accuracy):
    return accuracy or elastocorner.settings().accuracy


def _positive_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be positive")
    return arr


def _shaped(result, x):
    return result if np.ndim(x) else result[()]


def bessel_j_half(order_num: int, x, accuracy: SpecialFnAccuracy = None):
    '''Bessel function J_{order_num/2}(x) for the half-integer orders -1/2, 1/2 and 3/2.

    Uses the closed spherical forms

        J_{-1/2}(x) = √(2/(πx))·cos x
        J_{1/2}(x)  = √(2/(πx))·sin x
        J_{3/2}(x)  = √(2/(πx))·(sin x / x − cos x)

    For J_{3/2} and small x the bracket is summed as a power series, avoiding the cancellation in sin x/x − cos x.
    '''
    if order_num not in (-1, 1, 3):
        raise UnsupportedOrderError(f"Order {order_num}/2 is not supported")
    arr = _positive_array(x)
    scale = np.sqrt(2.0 / (np.pi * arr))
    if order_num == -1:
        return _shaped(scale * np.cos(arr), x)
    if order_num == 1:
        return _shaped(scale * np.sin(arr), x)

    accuracy = _accuracy(accuracy)
    bracket = np.sin(arr) / arr - np.cos(arr)
    small = arr < 0.5
    if np.any(small):
        xs = arr[small]
        x2 = xs * xs
        # sin x/x − cos x = Σ_{k≥1} (−1)^{k+1}·2k·x^{2k}/(2k+1)!
        term = x2 / 3.0
        total = term.copy()
        for k in range(2, accuracy.max_terms):
            term = -term * x2 * k / ((k - 1) * (2 * k) * (2 * k + 1))
            total += term
            if np.max(np.abs(term)) < 1e-17 * np.max(np.abs(total)):
                break
        bracket[small] = total
    return _shaped(scale * bracket, x)


def _ascending_order_zero(x, accuracy):
    '''J₀ and Y₀ by their ascending series.'''
    q = 0.25 * x * x
    term = np.ones_like(x)
    j0 = term.copy()
    ysum = np.zeros_like(x)
    harmonic = 0.0
    for k in range(1, accuracy.max_terms):
        term = -term * q / (k * k)
        harmonic += 1.0 / k
        j0 += term
        ysum -= harmonic * term
        if np.max(np.abs(term)) * max(harmonic, 1.0) < 1e-6 * accuracy.abs_tol:
            break
    y0 = (2.0 / np.pi) * ((np.log(0.5 * x) + EULER_GAMMA) * j0 + ysum)
    return j0, y0


def _ascending_order_one(x, accuracy):
    '''J₁ and Y₁ by their ascending series.'''
    half = 0.5 * x
    q = half * half
    term = half.copy()          # (x/2)^{2k+1} / (k!(k+1)!) at k = 0
    j1 = term.copy()
    harmonic_k = 0.0
    harmonic_k1 = 1.0
    ysum = term.copy()          # Σ (−1)^k (H_k + H_{k+1}) t_k
    for k in range(1, accuracy.max_terms):
        term = -term * q / (k * (k + 1))
        harmonic_k += 1.0 / k
        harmonic_k1 += 1.0 / (k + 1)
        j1 += term
        ysum += (harmonic_k + harmonic_k1) * term
        if np.max(np.abs(term)) * harmonic_k1 < 1e-6 * accuracy.abs_tol:
            break
    y1 = -2.0 / (np.pi * x) + (2.0 / np.pi) * (np.log(half) + EULER_GAMMA) * j1 - ysum / np.pi
    return j1, y1


def _hankel_asymptotic(nu: int, x, accuracy):
    '''H_ν⁽¹⁾(x) by the Hankel asymptotic expansion, summed up to its smallest term.'''
    mu = 4.0 * nu * nu
    term = np.ones_like(x, dtype=complex)
    total = term.copy()
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, accuracy.max_terms):
        new_term = term * 1j * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        active &= np.abs(new_term) < np.abs(term)
        if not np.any(active):
            break
        total = np.where(active, total + new_term, total)
        term = np.where(active, new_term, term)
        if np.max(np.abs(np.where(active, new_term, 0))) < 1e-3 * accuracy.abs_tol:
            break
    phase = x - nu * np.pi / 2 - np.pi / 4
    return np.sqrt(2.0 / (np.pi * x)) * np.exp(1j * phase) * total


def _hankel(nu: int, x, accuracy):
    arr = _positive_array(x)
    accuracy = _accuracy(accuracy)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty(flat.shape, dtype=complex)
    small = flat < HANKEL_SWITCHOVER
    if np.any(small):
        series = _ascending_order_zero if nu == 0 else _ascending_order_one
        j, y = series(flat[small], accuracy)
        out[small] = j + 1j * y
    if np.any(~small):
        out[~small] = _hankel_asymptotic(nu, flat[~small], accuracy)
    out = out.reshape(np.shape(arr))
    return _shaped(out, x)


def hankel1_zero(x, accuracy: SpecialFnAccuracy = None):
    '''Hankel function of the first kind of order zero, H₀⁽¹⁾(x) = J₀(x) + iY₀(x), for x > 0.'''
    return _hankel(0, x, accuracy)


def hankel1_one(x, accuracy: SpecialFnAccuracy = None):
    '''Hankel function of the first kind of order one, H₁⁽¹⁾(x) = J₁(x) + iY₁(x), for x > 0.'''
    return _hankel(1, x, accuracy)


def bessel_j0(x, accuracy: SpecialFnAccuracy = None):
    '''Bessel function of the first kind of order zero, J₀(x) = Re H₀⁽¹⁾(x), for x > 0.'''
    return np.real(hankel1_zero(x, accuracy))


def bessel_y0(x, accuracy: SpecialFnAccuracy = None):
    '''Bessel function of the second kind of order zero, Y₀(x) = Im H₀⁽¹⁾(x), for x > 0.'''
    return np.imag(hankel1_zero(x, accuracy))


def bessel_j1(x, accuracy: SpecialFnAccuracy = None):
    '''Bessel function of the first kind of order one, J₁(x) = Re H₁⁽¹⁾(x), for x > 0.'''
    return np.real(hankel1_one(x, accuracy))


def bessel_y1(x, accuracy: SpecialFnAccuracy = None):
    '''Bessel function of the second kind of order one, Y₁(x) = Im H₁⁽¹⁾(x), for x > 0.'''
    return np.imag(hankel1_one(x, accuracy))


def _j32_bracket(x: float) -> float:
    # Pole-free form of tan x − x.
    return math.sin(x) / x - math.cos(x)


@functools.lru_cache(maxsize=None)
def j32_zero(k: int) -> float:
    '''The k-th positive zero of J_{3/2}, i.e. the k-th positive root of tan x = x.

    The root is bracketed in ((k−1/2)π, (k+1/2)π), bisected to 1e-13 and polished by one Newton step.
    '''
    if int(k) != k or k < 1:
        raise DomainError(f"Zero index must be a positive integer, not {k}")
    lo = (k - 0.5) * math.pi
    hi = (k + 0.5) * math.pi
    f_lo = _j32_bracket(lo)
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        f_mid = _j32_bracket(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    slope = math.sin(root) * (1.0 - 1.0 / root ** 2) + math.cos(root) / root
    if slope != 0.0:
        polished = root - _j32_bracket(root) / slope
        if abs(polished - root) < 1e-12:
            root = polished
    return root


def gamma(x):
    '''Gamma function for real x by the Lanczos approximation (g = 7, 9 coefficients), with reflection for x < 1/2.'''
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0) & (arr == np.floor(arr))):
        raise DomainError("Gamma is undefined at non-positive integers")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    reflect = flat < 0.5
    if np.any(reflect):
        xr = flat[reflect]
        out[reflect] = np.pi / (np.sin(np.pi * xr) * _lanczos(1.0 - xr))
    if np.any(~reflect):
        out[~reflect] = _lanczos(flat[~reflect])
    return _shaped(out.reshape(np.shape(arr)), x)


def _lanczos(x):
    x = x - 1.0
    total = np.full_like(x, _LANCZOS_COEFFS[0])
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        total += coeff / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * np.exp(-t) * total


class DomainError(ElastoCornerException, ValueError):
    '''Raised when an argument lies outside the domain of an operation.'''


class UnsupportedOrderError(ElastoCornerException, ValueError):
    '''Raised when a Bessel order is requested that is not implemented.'''
