"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def naive_eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    return sum((c * x**k for k, c in enumerate(coeffs)), Fraction(0))


def naive_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out: dict[int, Fraction] = {}
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out.get(i + j, Fraction(0)) + a * b
    return [out.get(k, Fraction(0)) for k in range(max(out, default=-1) + 1)]


def _strip(p: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def euclid_gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    """Monic gcd by the classical Euclidean algorithm over Q."""
    a, b = _strip(p), _strip(q)
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for k, c in enumerate(b):
                r[k + shift] -= f * c
            r = _strip(r)
        a, b = b, r
    return [c / a[-1] for c in a] if a else []


def sylvester_resultant(p: list[Fraction], q: list[Fraction]) -> Fraction:
    """Determinant of the Sylvester matrix, by exact Gaussian elimination."""
    p, q = _strip(p), _strip(q)
    m, n = len(p) - 1, len(q) - 1
    if m == 0 and n == 0:
        return Fraction(1)
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for k, c in enumerate(reversed(p)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for k, c in enumerate(reversed(q)):
            row[i + k] = c
        rows.append(row)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, size):
            f = rows[r][col] / rows[col][col]
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return det


def companion_roots(coeffs) -> np.ndarray:
    """Eigenvalues of the companion matrix (numpy), sorted by (re, im)."""
    r = np.roots([float(c) for c in reversed(coeffs)])
    return np.array(sorted(r, key=lambda z: (z.real, z.imag)))


def match_distance(a, b) -> float:
    """Largest distance in a greedy nearest matching between two point multisets."""
    left = list(b)
    worst = 0.0
    for z in a:
        k = min(range(len(left)), key=lambda i: abs(left[i] - z))
        worst = max(worst, abs(left[k] - z))
        left.pop(k)
    return worst
