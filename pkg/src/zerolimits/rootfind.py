"""All complex roots of a rational polynomial by Aberth-Ehrlich iteration.

A first sweep runs in double precision on max-normalized coefficients,
through the compiled kernel when it is importable and the pure-Python one
otherwise (``ZEROLIMITS_PURE_PYTHON=1`` forces the latter). The iteration
then continues in extended precision (gmpy2) at the working precision until every correction is
below tolerance; inputs whose normalized coefficients do not fit a double
skip the first sweep. Every root is polished by Newton steps in extended
precision and certified by a scaled residual.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np

from . import _aberth_py
from .exactpoly import RatPoly, ZeroPolynomial, default_precision, eval_rational

try:
    if os.environ.get("ZEROLIMITS_PURE_PYTHON"):
        raise ImportError("pure-Python kernel requested")
    from ._aberth_ext import aberth as _compiled_aberth
except ImportError:
    _compiled_aberth = None

BACKEND = "cython" if _compiled_aberth is not None else "python"

ANGLE_OFFSET = 0.4
CLUSTER_RADIUS = 1e-6
PAIRING_TOL = 1e-6
_DOUBLE_EPS = 2.0**-52
_TINY = 1e-290
FORWARD_TOL = 1e-10
MAX_PRECISION_FACTOR = 8


@dataclass(frozen=True)
class RootFindOptions:
    tol: float = 1e-12
    max_iter: int = 500
    polish_steps: int = 2
    precision_bits: int | None = None
    backend: str | None = None  # "cython", "python" or None for the import-time choice


@dataclass(frozen=True)
class RootSet:
    roots: list[complex]
    residuals: list[float]
    iterations: int
    converged: bool
    multiplicities: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.roots)


def initial_circle(p: RatPoly) -> tuple[complex, float]:
    n = p.degree
    if n < 1:
        raise ValueError("initial_circle needs degree >= 1")
    lead = p.lead
    center = -p[n - 1] / (n * lead)
    bound = 1 + max(abs(p[k] / lead) for k in range(n))
    return complex(float(center), 0.0), float(bound)


def _log_abs(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


def fujiwara_bound(p: RatPoly) -> float:
    n = p.degree
    log_lead = _log_abs(p.lead)
    best = -math.inf
    for k in range(1, n + 1):
        c = p[n - k]
        if c == 0:
            continue
        v = _log_abs(c) - log_lead
        if k == n:
            v -= math.log(2)
        best = max(best, v / k)
    return 2 * math.exp(best) if best > -math.inf else 0.0


def starting_radius(p: RatPoly) -> float:
    """Geometric mean of the root distances to the initial center.

    Equals ``|p(center) / lead| ** (1/n)``; falls back to the smaller of the
    Cauchy and Fujiwara bounds when ``p(center)`` vanishes.
    """
    n = p.degree
    lead = p.lead
    center = -p[n - 1] / (n * lead)
    val = eval_rational(p, center)
    cauchy = initial_circle(p)[1]
    if val == 0:
        return min(cauchy, fujiwara_bound(p))
    return min(cauchy, math.exp((_log_abs(val) - _log_abs(lead)) / n))


def _starting_points(p: RatPoly) -> list[complex]:
    center, _ = initial_circle(p)
    radius = starting_radius(p)
    n = p.degree
    return [
        center + radius * cmath.exp(1j * (2 * math.pi * k / n + ANGLE_OFFSET))
        for k in range(n)
    ]


def _normalized_doubles(p: RatPoly) -> list[float] | None:
    scale = p.max_abs_coeff()
    out = []
    for c in p.coeffs:
        v = float(c / scale)
        if c != 0 and abs(v) < _TINY:
            return None
        out.append(v)
    return out


def _mp_coeffs(p: RatPoly) -> list:
    return [mpmath.mpf(c.numerator) / c.denominator for c in p.coeffs]


def _mp_aberth(p: RatPoly, start, opts: RootFindOptions, prec: int) -> tuple[list, int, bool]:
    # gmpy2 numbers run the generic kernel about 7x faster than mpmath's
    with gmpy2.context(precision=prec):
        scale = p.max_abs_coeff()
        coeffs = [gmpy2.mpc(gmpy2.mpq(c / scale)) for c in p.coeffs]
        z = [gmpy2.mpc(s) for s in start]
        it, done = _aberth_py.aberth(coeffs, z, opts.tol, opts.max_iter, gmpy2.mpfr(2) ** (-prec))
    return z, it, all(done)


def _to_mpc(z):
    if isinstance(z, gmpy2.mpc):
        re = Fraction(*z.real.as_integer_ratio())
        im = Fraction(*z.imag.as_integer_ratio())
        return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator, mpmath.mpf(im.numerator) / im.denominator)
    return mpmath.mpc(z)


def _excess_bits(p: RatPoly, roots, prec: int) -> int:
    """Bits missing for every root to have forward error below ``FORWARD_TOL``.

    The error of a backward-stable root is about ``(n+1) u S(z) / |p'(z)|``
    with ``u = 2**-prec`` and ``S(z) = sum |c_k| |z|**k``.
    """
    worst = 0.0
    with mpmath.workprec(prec):
        coeffs = _mp_coeffs(p)
        abs_coeffs = [abs(c) for c in coeffs]
        for z in map(_to_mpc, roots):
            az = abs(z)
            s = abs_coeffs[-1]
            for c in reversed(abs_coeffs[:-1]):
                s = s * az + c
            _, dp = _eval_with_derivative(coeffs, z)
            if dp == 0:
                continue
            err = (p.degree + 1) * s / abs(dp) * mpmath.mpf(2) ** (-prec)
            need = float(mpmath.log(err / (FORWARD_TOL * (1 + az)), 2))
            worst = max(worst, need)
    return math.ceil(worst)


def _iterate(p: RatPoly, opts: RootFindOptions, prec: int) -> tuple[list, int, bool]:
    """Double-precision sweep for placement, then Aberth again in extended precision.

    The double stage stops once a root is backward stable in doubles, which
    for ill-conditioned inputs (high-degree W_n near a real interval) can
    leave it a unit or more from the true root. The extended stage resolves
    those; well-conditioned roots stop after a single sweep.
    """
    start = _starting_points(p)
    doubles = _normalized_doubles(p)
    if doubles is None:
        return _mp_aberth(p, start, opts, prec)
    backend = opts.backend or BACKEND
    if backend == "cython" and _compiled_aberth is not None:
        z = np.array(start, dtype=np.complex128)
        it, _ = _compiled_aberth(
            np.array(doubles, dtype=np.complex128), z, opts.tol, opts.max_iter, _DOUBLE_EPS
        )
        placed = [complex(v) for v in z]
    else:
        placed = list(start)
        it, _ = _aberth_py.aberth([complex(c) for c in doubles], placed, opts.tol, opts.max_iter, _DOUBLE_EPS)
    z, more, converged = _mp_aberth(p, placed, opts, prec)
    return z, it + more, converged


def _iterate_adaptive(p: RatPoly, opts: RootFindOptions, prec: int) -> tuple[list, int, bool, int]:
    """Run :func:`_iterate`, raising the precision while roots are too ill-conditioned.

    Returns the roots, the total iteration count, the convergence flag and
    the precision finally used.
    """
    z, it, converged = _iterate(p, opts, prec)
    cap = MAX_PRECISION_FACTOR * prec
    while prec < cap:
        missing = _excess_bits(p, z, prec)
        if missing <= 0:
            break
        prec = min(cap, prec + missing + 32)
        z, more, converged = _mp_aberth(p, z, opts, prec)
        it += more
    with mpmath.workprec(prec):
        return [_to_mpc(v) for v in z], it, converged, prec


def _eval_with_derivative(coeffs, z):
    p = coeffs[-1]
    dp = mpmath.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _polish(coeffs, z, steps: int):
    z = mpmath.mpc(z)
    val, dval = _eval_with_derivative(coeffs, z)
    for _ in range(steps):
        if val == 0 or dval == 0:
            break
        cand = z - val / dval
        cval, cdval = _eval_with_derivative(coeffs, cand)
        if abs(cval) > abs(val):
            break
        z, val, dval = cand, cval, cdval
    return z


def scaled_residual(p: RatPoly, z, prec: int | None = None) -> float:
    """``|p(z)| / (max|c_k| * (1 + |z|)**deg)`` evaluated in extended precision."""
    if prec is None:
        prec = default_precision(p.degree)
    with mpmath.workprec(prec):
        coeffs = _mp_coeffs(p)
        zz = mpmath.mpc(z)
        val, _ = _eval_with_derivative(coeffs, zz)
        norm = mpmath.mpf(p.max_abs_coeff().numerator) / p.max_abs_coeff().denominator
        return float(abs(val) / (norm * (1 + abs(zz)) ** p.degree))


def _pair_conjugates(roots: list[complex]) -> list[complex]:
    out = list(roots)
    used = [False] * len(out)
    order = sorted(range(len(out)), key=lambda k: (out[k].real, out[k].imag))
    for i in order:
        if used[i] or out[i].imag <= 0:
            continue
        target = out[i].conjugate()
        best, best_d = None, math.inf
        for j in order:
            if used[j] or j == i or out[j].imag > 0:
                continue
            d = abs(out[j] - target)
            if d < best_d:
                best, best_d = j, d
        if best is not None and best_d <= PAIRING_TOL * (1 + abs(out[i])):
            mid = (out[i] + out[best].conjugate()) / 2
            if mid.imag <= 0:
                mid = complex(mid.real, 0.0)
            out[i], out[best] = mid, mid.conjugate()
            used[i] = used[best] = True
    for k in range(len(out)):
        if not used[k] and out[k].imag != 0 and abs(out[k].imag) <= PAIRING_TOL * (1 + abs(out[k])):
            out[k] = complex(out[k].real, 0.0)
    return out


def _multiplicities(roots: list[complex]) -> list[int]:
    return [sum(1 for w in roots if abs(w - z) <= CLUSTER_RADIUS) for z in roots]


def find_roots(p: RatPoly, opts: RootFindOptions | None = None) -> RootSet:
    if opts is None:
        opts = RootFindOptions()
    if p.is_zero:
        raise ZeroPolynomial("cannot find roots of the zero polynomial")
    zero_mult = 0
    while p[zero_mult] == 0:
        zero_mult += 1
    core = RatPoly(p.coeffs[zero_mult:])
    roots: list[complex] = [0j] * zero_mult
    residuals: list[float] = [0.0] * zero_mult
    iterations, converged = 0, True
    if core.degree >= 1:
        prec = opts.precision_bits or default_precision(p.degree)
        if core.degree == 1:
            found = [-core[0] / core[1]]
            exact_linear = True
            work = prec
        else:
            found, iterations, converged, work = _iterate_adaptive(core, opts, prec)
            exact_linear = False
        with mpmath.workprec(work):
            coeffs = _mp_coeffs(core)
            polished = []
            for z in found:
                if exact_linear:
                    polished.append(complex(float(z), 0.0))
                else:
                    polished.append(complex(_polish(coeffs, z, opts.polish_steps)))
        polished = _pair_conjugates(polished)
        roots.extend(polished)
        residuals.extend(scaled_residual(p, z, prec) for z in polished)
    order = sorted(range(len(roots)), key=lambda k: (roots[k].real, roots[k].imag))
    roots = [roots[k] for k in order]
    residuals = [residuals[k] for k in order]
    return RootSet(roots, residuals, iterations, converged, _multiplicities(roots))
