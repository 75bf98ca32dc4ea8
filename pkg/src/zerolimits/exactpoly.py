"""Exact rational polynomials and extended-precision complex evaluation.

Coefficients are :class:`fractions.Fraction` stored in ascending order with
no trailing zeros; the zero polynomial is the empty tuple.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class NotDivisible(ArithmeticError):
    """Raised by :func:`exact_divide` when the remainder is nonzero."""


class ZeroPolynomial(ValueError):
    """An operation received the identically zero polynomial."""


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(value)


class RatPoly:
    """Immutable univariate polynomial over the rationals."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [to_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    @classmethod
    def constant(cls, value: RationalLike) -> "RatPoly":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, value: RationalLike = 1) -> "RatPoly":
        return cls([0] * degree + [value])

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def lead(self) -> Fraction:
        if not self._coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self._coeffs[-1]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self._coeffs):
            return self._coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == RatPoly([other])._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"RatPoly([{', '.join(str(c) for c in self._coeffs)}])"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{k}")
        return " + ".join(terms)

    def __neg__(self) -> "RatPoly":
        return RatPoly(-c for c in self._coeffs)

    def __add__(self, other) -> "RatPoly":
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "RatPoly":
        return add(self, -_coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return add(_coerce(other), -self)

    def __mul__(self, other) -> "RatPoly":
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RatPoly":
        if k < 0:
            raise ValueError("negative power")
        result = RatPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return eval_rational(self, Fraction(x))
        return eval_complex(self, x)

    def scale(self, factor: RationalLike) -> "RatPoly":
        f = to_rational(factor)
        return RatPoly(c * f for c in self._coeffs)

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self._coeffs), default=Fraction(0))


def _coerce(value) -> RatPoly:
    if isinstance(value, RatPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return RatPoly([value])
    return NotImplemented


def add(p: RatPoly, q: RatPoly) -> RatPoly:
    n = max(len(p), len(q))
    return RatPoly(p[k] + q[k] for k in range(n))


def mul(p: RatPoly, q: RatPoly) -> RatPoly:
    if p.is_zero or q.is_zero:
        return RatPoly()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pc in enumerate(p.coeffs):
        if pc == 0:
            continue
        for j, qc in enumerate(q.coeffs):
            out[i + j] += pc * qc
    return RatPoly(out)


def derivative(p: RatPoly) -> RatPoly:
    return RatPoly(k * c for k, c in enumerate(p.coeffs) if k > 0)


def eval_rational(p: RatPoly, x: RationalLike) -> Fraction:
    x = to_rational(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def default_precision(degree: int) -> int:
    return max(53, 2 * max(degree, 0) + 64)


def eval_complex_mp(p: RatPoly, z, precision_bits: int | None = None):
    """Horner evaluation returning an :class:`mpmath.mpc` at the working precision."""
    if precision_bits is None:
        precision_bits = default_precision(p.degree)
    if precision_bits < 53:
        raise ValueError("precision_bits must be at least 53")
    with mpmath.workprec(precision_bits):
        zz = mpmath.mpc(z)
        acc = mpmath.mpc(0)
        for c in reversed(p.coeffs):
            acc = acc * zz + mpmath.mpf(c.numerator) / c.denominator
        return +acc


def eval_complex(p: RatPoly, z: complex, precision_bits: int | None = None) -> complex:
    """Evaluate ``p`` at ``z`` in extended precision and round to a complex double."""
    return complex(eval_complex_mp(p, z, precision_bits))


def divmod_poly(p: RatPoly, q: RatPoly) -> tuple[RatPoly, RatPoly]:
    if q.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p.coeffs)
    dq = q.degree
    lead = q.lead
    if len(rem) - 1 < dq:
        return RatPoly(), p
    quot = [Fraction(0)] * (len(rem) - dq)
    for k in range(len(rem) - 1, dq - 1, -1):
        coef = rem[k] / lead
        quot[k - dq] = coef
        if coef:
            for j, qc in enumerate(q.coeffs):
                rem[k - dq + j] -= coef * qc
    return RatPoly(quot), RatPoly(rem[:dq])


def exact_divide(p: RatPoly, q: RatPoly) -> RatPoly:
    quot, rem = divmod_poly(p, q)
    if not rem.is_zero:
        raise NotDivisible(f"remainder {rem} is nonzero")
    return quot


def pseudo_remainder(p: RatPoly, q: RatPoly) -> RatPoly:
    """``lc(q)**(deg p - deg q + 1) * p mod q``."""
    delta = p.degree - q.degree
    _, rem = divmod_poly(p, q)
    return rem.scale(q.lead ** (delta + 1))


def resultant(p: RatPoly, q: RatPoly) -> Fraction:
    """Resultant by the subresultant pseudo-remainder sequence.

    Normalized as ``lc(p)**deg(q) * prod(q(root) for root of p)``.
    """
    if p.is_zero or q.is_zero:
        raise ZeroPolynomial("resultant of the zero polynomial")
    A, B = p, q
    sign = 1
    if A.degree < B.degree:
        A, B = B, A
        if A.degree % 2 and B.degree % 2:
            sign = -sign
    if B.degree == 0:
        return sign * B.lead ** A.degree
    g = h = Fraction(1)
    while True:
        delta = A.degree - B.degree
        if A.degree % 2 and B.degree % 2:
            sign = -sign
        R = pseudo_remainder(A, B)
        A = B
        if R.is_zero:
            return Fraction(0)
        B = R.scale(1 / (g * h**delta))
        g = A.lead
        h = h ** (1 - delta) * g**delta
        if B.degree == 0:
            break
    return sign * h ** (1 - A.degree) * B.lead ** A.degree


def from_roots(roots: Sequence[RationalLike], lead: RationalLike = 1) -> RatPoly:
    out = RatPoly([lead])
    for r in roots:
        out = out * RatPoly([-to_rational(r), 1])
    return out
