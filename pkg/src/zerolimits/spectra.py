"""Pointwise characteristic quantities of the recurrence.

Scalar functions take a Python ``complex``; the ``*_grid`` helpers accept
numpy arrays and are what the grid oracle uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exactpoly import RatPoly
from .recurrence import RecurrenceSpec


class DeltaVanishes(ArithmeticError):
    pass


class AVanishes(ArithmeticError):
    pass


DELTA_ZERO_RTOL = 1e-12
A_ZERO_RTOL = 1e-12


def discriminant(spec: RecurrenceSpec) -> RatPoly:
    a, b, c, d, e = spec.a, spec.b, spec.c, spec.d, spec.e
    return RatPoly([b * b + 4 * e, 2 * a * b + 4 * d, a * a + 4 * c])


def float_coeffs(p: RatPoly) -> list[float]:
    return [float(c) for c in p.coeffs]


def horner(coeffs, z):
    """Double-precision Horner on ascending float coefficients; works on arrays."""
    acc = np.zeros_like(z, dtype=complex) if isinstance(z, np.ndarray) else 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def principal_sqrt(w: complex) -> complex:
    """Square root with argument in (-pi/2, pi/2]; -x maps to +i*sqrt(x)."""
    x, y = float(w.real), float(w.imag)
    r = math.hypot(x, y)
    if r == 0.0:
        return 0j
    if x >= 0.0:
        t = math.sqrt(0.5 * (r + x))
        return complex(t, y / (2.0 * t))
    t = math.sqrt(0.5 * (r - x))
    return complex(abs(y) / (2.0 * t), t if y >= 0.0 else -t)


def principal_sqrt_grid(w: np.ndarray) -> np.ndarray:
    x = w.real
    y = w.imag
    r = np.hypot(x, y)
    pos = x >= 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.sqrt(0.5 * (r + np.abs(x)))
        other = np.where(t > 0, y / (2.0 * t), 0.0)
        re = np.where(pos, t, np.abs(other))
        im = np.where(pos, other, np.where(y >= 0.0, t, -t))
    return re + 1j * im


@dataclass(frozen=True)
class SpectralPoint:
    z: complex
    A_val: complex
    B_val: complex
    Delta_val: complex
    sqrt_Delta: complex
    lambda_plus: complex
    lambda_minus: complex
    residual: float


class _Coeffs:
    """Float images of a spec's coefficient polynomials."""

    def __init__(self, spec: RecurrenceSpec):
        self.A = float_coeffs(spec.A)
        self.B = float_coeffs(spec.B)
        self.Delta = float_coeffs(discriminant(spec))
        self.W0 = float_coeffs(spec.W0)
        self.W1 = float_coeffs(spec.W1)
        self.delta_scale = max((abs(c) for c in self.Delta), default=0.0)
        self.A_scale = max(abs(c) for c in self.A)


@lru_cache(maxsize=256)
def _coeffs(spec: RecurrenceSpec) -> _Coeffs:
    return _Coeffs(spec)


def spectral_point(spec: RecurrenceSpec, z: complex) -> SpectralPoint:
    co = _coeffs(spec)
    z = complex(z)
    A = horner(co.A, z)
    B = horner(co.B, z)
    D = horner(co.Delta, z)
    s = principal_sqrt(D)
    lp = (A + s) / 2
    lm = (A - s) / 2
    return SpectralPoint(z, A, B, D, s, lp, lm, abs(abs(lp) - abs(lm)))


def alpha_pm(spec: RecurrenceSpec, z: complex) -> tuple[complex, complex]:
    co = _coeffs(spec)
    z = complex(z)
    D = horner(co.Delta, z)
    if abs(D) < DELTA_ZERO_RTOL * (1 + abs(z) ** 2) * co.delta_scale:
        raise DeltaVanishes(f"Delta({z}) = {D} is numerically zero")
    s = principal_sqrt(D)
    W0 = horner(co.W0, z)
    h = 2 * horner(co.W1, z) - W0 * horner(co.A, z)
    return (W0 * s + h) / (2 * s), (W0 * s - h) / (2 * s)


def f_value(spec: RecurrenceSpec, z: complex) -> complex:
    """The ratio 4 B(z) / A(z)^2."""
    co = _coeffs(spec)
    z = complex(z)
    A = horner(co.A, z)
    if abs(A) < A_ZERO_RTOL * (1 + abs(z)) * co.A_scale:
        raise AVanishes(f"A({z}) is numerically zero")
    return 4 * horner(co.B, z) / (A * A)


def membership_residual(spec: RecurrenceSpec, z: complex) -> float:
    return spectral_point(spec, z).residual


def spectral_grid(spec: RecurrenceSpec, z: np.ndarray):
    """Vectorized (A, B, Delta, lambda_plus, lambda_minus) at the points ``z``."""
    co = _coeffs(spec)
    A = horner(co.A, z)
    B = horner(co.B, z)
    D = horner(co.Delta, z)
    s = principal_sqrt_grid(D)
    return A, B, D, (A + s) / 2, (A - s) / 2


def residual_grid(spec: RecurrenceSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Membership residual and its scale ``max(|lambda+|, |lambda-|, 1)``."""
    _, _, _, lp, lm = spectral_grid(spec, z)
    alp, alm = np.abs(lp), np.abs(lm)
    return np.abs(alp - alm), np.maximum(np.maximum(alp, alm), 1.0)
