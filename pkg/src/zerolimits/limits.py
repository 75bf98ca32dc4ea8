"""Non-isolated and isolated limits of zeros.

Every branch of :func:`classify` is decided by an exact sign test on
rationals; floats only appear in the emitted geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar

import mpmath
import numpy as np

from .exactpoly import RatPoly, derivative, eval_complex_mp, eval_rational
from .recurrence import RecurrenceSpec, compute_g, require_general
from .rootfind import CLUSTER_RADIUS, RootFindOptions, find_roots
from .spectra import discriminant, spectral_point

_SQRT_PREC = 128


def _sqrt_fraction(x: Fraction) -> float:
    with mpmath.workprec(_SQRT_PREC):
        return float(mpmath.sqrt(mpmath.mpf(x.numerator) / x.denominator))


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class ClassificationScalars:
    x_A: Fraction
    B_at_xA: Fraction
    Bprime_at_xA: Fraction
    Delta_B: Fraction
    Delta_Delta: Fraction
    lead: Fraction
    mid: Fraction
    const: Fraction
    r: Fraction | None
    x_C: Fraction | None

    @property
    def x_Delta(self) -> Fraction | None:
        """Real part of the zeros of the discriminant (exact)."""
        if self.lead != 0:
            return -self.mid / (2 * self.lead)
        if self.mid != 0:
            return -self.const / self.mid
        return None

    def delta_roots(self) -> tuple[complex, complex] | None:
        """The zeros ``(x_minus, x_plus)`` of the discriminant, ``Im(x_plus) >= 0``.

        For real zeros ``x_minus <= x_plus``. A linear discriminant returns its
        zero twice; a constant one returns ``None``.
        """
        lead, mid, const, dd = self.lead, self.mid, self.const, self.Delta_Delta
        if lead == 0:
            if mid == 0:
                return None
            x = float(-const / mid)
            return complex(x), complex(x)
        x = float(-mid / (2 * lead))
        if dd < 0:
            y = _sqrt_fraction(-dd) / (2 * abs(float(lead)))
            return complex(x, -y), complex(x, y)
        if dd == 0:
            return complex(x), complex(x)
        with mpmath.workprec(_SQRT_PREC):
            s = mpmath.sqrt(mpmath.mpf(dd.numerator) / dd.denominator)
            m = mpmath.mpf(mid.numerator) / mid.denominator
            L = mpmath.mpf(lead.numerator) / lead.denominator
            C = mpmath.mpf(const.numerator) / const.denominator
            q = -(m + (s if mid >= 0 else -s)) / 2
            r1 = float(q / L)
            r2 = float(C / q)
        lo, hi = sorted((r1, r2))
        return complex(lo), complex(hi)

    def as_dict(self) -> dict:
        return {
            "x_A": self.x_A,
            "B_at_xA": self.B_at_xA,
            "Bprime_at_xA": self.Bprime_at_xA,
            "Delta_B": self.Delta_B,
            "Delta_Delta": self.Delta_Delta,
            "lead": self.lead,
            "mid": self.mid,
            "const": self.const,
            "r": self.r,
            "x_C": self.x_C,
        }


def classification_scalars(spec: RecurrenceSpec) -> ClassificationScalars:
    a, b, c, d, e = spec.a, spec.b, spec.c, spec.d, spec.e
    B = spec.B
    x_A = -b / a
    B_xA = eval_rational(B, x_A)
    Bp_xA = eval_rational(derivative(B), x_A)
    Delta_B = d * d - 4 * c * e
    r = B_xA / Bp_xA if Bp_xA != 0 else None
    return ClassificationScalars(
        x_A=x_A,
        B_at_xA=B_xA,
        Bprime_at_xA=Bp_xA,
        Delta_B=Delta_B,
        Delta_Delta=16 * (Delta_B - a * a * B_xA),
        lead=a * a + 4 * c,
        mid=2 * a * b + 4 * d,
        const=b * b + 4 * e,
        r=r,
        x_C=x_A - 2 * r if r is not None else None,
    )


# ---------------------------------------------------------------------------
# Geometry


def _as_array(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _result(d: np.ndarray, z):
    return float(d) if np.ndim(z) == 0 else d


def _segment_1d(t: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Distance from reals ``t`` to the closed interval ``[lo, hi]`` (inf ends allowed)."""
    return np.maximum(np.maximum(lo - t, t - hi), 0.0)


def _window_interval(lo: float, hi: float, wlo: float, whi: float):
    lo, hi = max(lo, wlo), min(hi, whi)
    return (lo, hi) if lo <= hi else None


def _trim(lo: float, hi: float, ends: tuple[float, ...], margin: float, count: int) -> np.ndarray:
    t = np.linspace(lo, hi, count)
    keep = np.ones_like(t, dtype=bool)
    for end in ends:
        keep &= np.abs(t - end) > margin
    return t[keep]


class LimitSet:
    """Base for the shapes the set of non-isolated limits can take."""

    shape: ClassVar[str] = ""

    def distance(self, z):
        raise NotImplementedError

    def key_points(self) -> list[complex]:
        """Finite points that pin down the geometry (used for viewports)."""
        raise NotImplementedError

    def sample(self, window: tuple[float, float, float, float], count: int = 200,
               end_margin: float = 1e-3) -> list[np.ndarray]:
        """Points on each component inside ``window = (x_lo, x_hi, y_lo, y_hi)``."""
        raise NotImplementedError

    def as_dict(self) -> dict:
        raise NotImplementedError

    @property
    def bounded(self) -> bool:
        return True


@dataclass(frozen=True)
class RealSubset(LimitSet):
    """A closed subset of the real line: full line, interval, ray or two rays.

    ``lo``/``hi`` bound the set for ``interval`` and ``ray`` (one of them is
    ``None`` for a ray); for ``two_rays`` the set is ``(-inf, lo] u [hi, inf)``.
    """

    shape: ClassVar[str] = "real_subset"
    kind: str
    lo: float | None = None
    hi: float | None = None

    @property
    def endpoint(self) -> float | None:
        if self.kind != "ray":
            return None
        return self.hi if self.lo is None else self.lo

    @property
    def direction(self) -> int:
        if self.kind != "ray":
            return 0
        return -1 if self.lo is None else 1

    @property
    def bounded(self) -> bool:
        return self.kind == "interval"

    def pieces(self) -> list[tuple[float, float]]:
        inf = math.inf
        if self.kind == "full_line":
            return [(-inf, inf)]
        if self.kind == "interval":
            return [(self.lo, self.hi)]
        if self.kind == "ray":
            return [(-inf, self.hi)] if self.lo is None else [(self.lo, inf)]
        if self.kind == "two_rays":
            return [(-inf, self.lo), (self.hi, inf)]
        raise ValueError(self.kind)

    def distance(self, z):
        zz = _as_array(z)
        x, y = zz.real, zz.imag
        dx = np.min([_segment_1d(x, lo, hi) for lo, hi in self.pieces()], axis=0)
        return _result(np.hypot(dx, y), z)

    def key_points(self) -> list[complex]:
        return [complex(v) for v in (self.lo, self.hi) if v is not None]

    def sample(self, window, count=200, end_margin=1e-3):
        out = []
        for lo, hi in self.pieces():
            span = _window_interval(lo, hi, window[0], window[1])
            if span is None:
                continue
            ends = tuple(v for v in (lo, hi) if math.isfinite(v))
            out.append(_trim(span[0], span[1], ends, end_margin, count).astype(complex))
        return out

    def as_dict(self) -> dict:
        d: dict = {"shape": self.shape, "kind": self.kind}
        if self.kind == "interval":
            d.update(lo=self.lo, hi=self.hi)
        elif self.kind == "ray":
            d.update(endpoint=self.endpoint, direction=self.direction)
        elif self.kind == "two_rays":
            d.update(lo_end=self.lo, hi_end=self.hi)
        return d


@dataclass(frozen=True)
class Arc(LimitSet):
    """Arc of the circle ``|z - center| = radius`` between conjugate ends, passing through ``through``."""

    shape: ClassVar[str] = "arc"
    center: float
    radius: float
    end_plus: complex
    end_minus: complex
    through: float

    @property
    def half_angle(self) -> float:
        """Angle of ``end_plus`` seen from the center, in (0, pi)."""
        return math.atan2(self.end_plus.imag, self.end_plus.real - self.center)

    @property
    def through_right(self) -> bool:
        return self.through > self.center

    def angular_interval(self) -> tuple[float, float]:
        """Closed interval of angles covered; the left-through case wraps past pi."""
        phi = self.half_angle
        if self.through_right:
            return -phi, phi
        return phi, 2 * math.pi - phi

    def _in_arc(self, theta: np.ndarray) -> np.ndarray:
        phi = self.half_angle
        if self.through_right:
            return np.abs(theta) <= phi
        return np.abs(theta) >= phi

    def distance(self, z):
        zz = _as_array(z)
        w = zz - self.center
        theta = np.angle(w)
        radial = np.abs(np.abs(w) - self.radius)
        ends = np.minimum(np.abs(zz - self.end_plus), np.abs(zz - self.end_minus))
        return _result(np.where(self._in_arc(theta), radial, ends), z)

    def key_points(self) -> list[complex]:
        pts = [self.end_plus, self.end_minus, complex(self.through)]
        lo, hi = self.angular_interval()
        for ang in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2, -math.pi / 2):
            a = ang if ang >= lo else ang + 2 * math.pi
            if lo <= a <= hi:
                pts.append(self.center + self.radius * complex(math.cos(a), math.sin(a)))
        return pts

    def points(self, count: int, end_margin: float = 0.0) -> np.ndarray:
        lo, hi = self.angular_interval()
        dth = end_margin / self.radius if self.radius > 0 else 0.0
        t = np.linspace(lo + dth, hi - dth, count)
        return self.center + self.radius * np.exp(1j * t)

    def sample(self, window, count=200, end_margin=1e-3):
        pts = self.points(count, end_margin)
        return [pts[_in_window(pts, window)]]

    def as_dict(self) -> dict:
        return {
            "shape": self.shape,
            "center": self.center,
            "radius": self.radius,
            "end_plus": self.end_plus,
            "end_minus": self.end_minus,
            "through": self.through,
        }


@dataclass(frozen=True)
class Circle(LimitSet):
    shape: ClassVar[str] = "circle"
    center: float
    radius: float

    def distance(self, z):
        zz = _as_array(z)
        return _result(np.abs(np.abs(zz - self.center) - self.radius), z)

    def key_points(self) -> list[complex]:
        c, r = self.center, self.radius
        return [complex(c - r), complex(c + r), complex(c, r), complex(c, -r)]

    def sample(self, window, count=200, end_margin=1e-3):
        t = np.linspace(0, 2 * math.pi, count, endpoint=False)
        pts = self.center + self.radius * np.exp(1j * t)
        return [pts[_in_window(pts, window)]]

    def as_dict(self) -> dict:
        return {"shape": self.shape, "center": self.center, "radius": self.radius}


@dataclass(frozen=True)
class VerticalLine(LimitSet):
    shape: ClassVar[str] = "vertical_line"
    x: float

    @property
    def bounded(self) -> bool:
        return False

    def distance(self, z):
        zz = _as_array(z)
        return _result(np.abs(zz.real - self.x), z)

    def key_points(self) -> list[complex]:
        return [complex(self.x)]

    def sample(self, window, count=200, end_margin=1e-3):
        if not window[0] <= self.x <= window[1]:
            return []
        return [self.x + 1j * np.linspace(window[2], window[3], count)]

    def as_dict(self) -> dict:
        return {"shape": self.shape, "x": self.x}


@dataclass(frozen=True)
class VerticalSegment(LimitSet):
    shape: ClassVar[str] = "vertical_segment"
    x: float
    y_half: float

    def distance(self, z):
        zz = _as_array(z)
        dy = np.maximum(np.abs(zz.imag) - self.y_half, 0.0)
        return _result(np.hypot(zz.real - self.x, dy), z)

    def key_points(self) -> list[complex]:
        return [complex(self.x, self.y_half), complex(self.x, -self.y_half)]

    def sample(self, window, count=200, end_margin=1e-3):
        if not window[0] <= self.x <= window[1]:
            return []
        t = _trim(-self.y_half, self.y_half, (-self.y_half, self.y_half), end_margin, count)
        pts = self.x + 1j * t
        return [pts[_in_window(pts, window)]]

    def as_dict(self) -> dict:
        return {"shape": self.shape, "x": self.x, "y_half": self.y_half}


@dataclass(frozen=True)
class TwoVerticalRaysUnionReal(LimitSet):
    """``{x + iy : |y| >= y_half}`` together with the real line."""

    shape: ClassVar[str] = "two_vertical_rays_union_real"
    x: float
    y_half: float

    @property
    def bounded(self) -> bool:
        return False

    def distance(self, z):
        zz = _as_array(z)
        dy = np.maximum(self.y_half - np.abs(zz.imag), 0.0)
        rays = np.hypot(zz.real - self.x, dy)
        return _result(np.minimum(rays, np.abs(zz.imag)), z)

    def key_points(self) -> list[complex]:
        return [complex(self.x, self.y_half), complex(self.x, -self.y_half)]

    def sample(self, window, count=200, end_margin=1e-3):
        out = RealSubset("full_line").sample(window, count, end_margin)
        if window[0] <= self.x <= window[1]:
            for lo, hi in ((self.y_half, window[3]), (window[2], -self.y_half)):
                if lo < hi:
                    t = _trim(lo, hi, (self.y_half, -self.y_half), end_margin, count)
                    out.append(self.x + 1j * t)
        return out

    def as_dict(self) -> dict:
        return {"shape": self.shape, "x": self.x, "y_half": self.y_half}


@dataclass(frozen=True)
class ArcUnionReal(LimitSet):
    shape: ClassVar[str] = "arc_union_real"
    arc: Arc

    @property
    def bounded(self) -> bool:
        return False

    def distance(self, z):
        zz = _as_array(z)
        return _result(np.minimum(self.arc.distance(zz), np.abs(zz.imag)), z)

    def key_points(self) -> list[complex]:
        return self.arc.key_points()

    def sample(self, window, count=200, end_margin=1e-3):
        return self.arc.sample(window, count, end_margin) + RealSubset("full_line").sample(
            window, count, end_margin
        )

    def as_dict(self) -> dict:
        return {"shape": self.shape, "arc": self.arc.as_dict()}


@dataclass(frozen=True)
class RealSubsetUnionCircle(LimitSet):
    shape: ClassVar[str] = "real_subset_union_circle"
    real_part: RealSubset
    circle_center: float
    circle_radius: float

    @property
    def circle(self) -> Circle:
        return Circle(self.circle_center, self.circle_radius)

    @property
    def bounded(self) -> bool:
        return self.real_part.bounded

    def distance(self, z):
        zz = _as_array(z)
        return _result(np.minimum(self.real_part.distance(zz), self.circle.distance(zz)), z)

    def key_points(self) -> list[complex]:
        return self.real_part.key_points() + self.circle.key_points()

    def sample(self, window, count=200, end_margin=1e-3):
        return self.real_part.sample(window, count, end_margin) + self.circle.sample(
            window, count, end_margin
        )

    def as_dict(self) -> dict:
        return {
            "shape": self.shape,
            "real_part": self.real_part.as_dict(),
            "circle_center": self.circle_center,
            "circle_radius": self.circle_radius,
        }


@dataclass(frozen=True)
class RealSubsetUnionVerticalLine(LimitSet):
    shape: ClassVar[str] = "real_subset_union_vertical_line"
    real_part: RealSubset
    x: float

    @property
    def bounded(self) -> bool:
        return False

    def distance(self, z):
        zz = _as_array(z)
        return _result(
            np.minimum(self.real_part.distance(zz), VerticalLine(self.x).distance(zz)), z
        )

    def key_points(self) -> list[complex]:
        return self.real_part.key_points() + [complex(self.x)]

    def sample(self, window, count=200, end_margin=1e-3):
        return self.real_part.sample(window, count, end_margin) + VerticalLine(self.x).sample(
            window, count, end_margin
        )

    def as_dict(self) -> dict:
        return {"shape": self.shape, "real_part": self.real_part.as_dict(), "x": self.x}


def _in_window(pts: np.ndarray, window) -> np.ndarray:
    x_lo, x_hi, y_lo, y_hi = window
    return (pts.real >= x_lo) & (pts.real <= x_hi) & (pts.imag >= y_lo) & (pts.imag <= y_hi)


def distance_to(limit_set: LimitSet, z):
    return limit_set.distance(z)


# ---------------------------------------------------------------------------
# Classification


def _real_part_of_delta(s: ClassificationScalars) -> RealSubset | None:
    """``{x real : Delta(x) <= 0}``; ``None`` when empty or a single point."""
    lead, mid, const, dd = s.lead, s.mid, s.const, s.Delta_Delta
    if lead == 0:
        if mid == 0:
            return RealSubset("full_line") if const < 0 else None
        x0 = float(-const / mid)
        return RealSubset("ray", lo=None, hi=x0) if mid > 0 else RealSubset("ray", lo=x0, hi=None)
    if lead > 0:
        if dd <= 0:
            return None
        lo, hi = s.delta_roots()
        return RealSubset("interval", lo=lo.real, hi=hi.real)
    if dd <= 0:
        return RealSubset("full_line")
    lo, hi = s.delta_roots()
    return RealSubset("two_rays", lo=lo.real, hi=hi.real)


def classify(spec: RecurrenceSpec) -> tuple[ClassificationScalars, LimitSet]:
    require_general(spec)
    s = classification_scalars(spec)
    x_A = float(s.x_A)
    if s.Delta_Delta < 0:
        x_minus, x_plus = s.delta_roots()
        if s.r is None:
            if s.lead > 0:
                return s, VerticalSegment(x_A, x_plus.imag)
            return s, TwoVerticalRaysUnionReal(x_A, x_plus.imag)
        center = float(s.x_A - s.r)
        radius = float(abs(s.r))
        through = x_A if s.lead > 0 else float(s.x_C)
        arc = Arc(center, radius, x_plus, x_minus, through)
        return s, (arc if s.lead > 0 else ArcUnionReal(arc))

    real_part = _real_part_of_delta(s)
    if s.B_at_xA < 0:
        if real_part is None:
            raise AssertionError("empty real part with B(x_A) < 0 contradicts generality")
        return s, real_part
    if s.r is None:
        if real_part is None:
            return s, VerticalLine(x_A)
        return s, RealSubsetUnionVerticalLine(real_part, x_A)
    center = float(s.x_A - s.r)
    radius = float(abs(s.r))
    if real_part is None:
        return s, Circle(center, radius)
    return s, RealSubsetUnionCircle(real_part, center, radius)


def membership_residual(spec: RecurrenceSpec, z: complex) -> float:
    return spectral_point(spec, z).residual


# ---------------------------------------------------------------------------
# Isolated limits


ACCEPT_RTOL = 1e-8
W0_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class IsolatedLimit:
    z: complex
    filter_lhs: float
    filter_rhs: float
    margin: float
    ambiguous: bool

    @property
    def accepted(self) -> bool:
        return not self.ambiguous and self.margin > 0

    def as_dict(self) -> dict:
        return {
            "z": self.z,
            "filter_lhs": self.filter_lhs,
            "filter_rhs": self.filter_rhs,
            "margin": self.margin,
            "ambiguous": self.ambiguous,
        }


def _filter(spec: RecurrenceSpec, z: complex) -> IsolatedLimit:
    prec = 2 * max(spec.W0.degree, spec.W1.degree, 1) + 96
    with mpmath.workprec(prec):
        W0 = eval_complex_mp(spec.W0, z, prec)
        W1 = eval_complex_mp(spec.W1, z, prec)
        A = eval_complex_mp(spec.A, z, prec)
        rhs = abs(A) ** 2 / 2
        tol = ACCEPT_RTOL * (1 + abs(A) ** 2)
        w0_scale = float(spec.W0.max_abs_coeff()) * (1 + abs(z)) ** max(spec.W0.degree, 0)
        if abs(W0) <= W0_ZERO_RTOL * w0_scale:
            return IsolatedLimit(z, math.nan, float(rhs), math.nan, True)
        lhs = (W1 * mpmath.conj(A) / W0).real
        margin = rhs - lhs
        return IsolatedLimit(z, float(lhs), float(rhs), float(margin), bool(abs(margin) <= tol))


def isolated_candidates(spec: RecurrenceSpec, opts: RootFindOptions | None = None) -> list[IsolatedLimit]:
    """Every zero of g with its filter evaluation (accepted or not)."""
    require_general(spec)
    roots = find_roots(compute_g(spec), opts).roots
    return [_filter(spec, z) for z in roots]


def isolated_limits(spec: RecurrenceSpec, opts: RootFindOptions | None = None) -> list[IsolatedLimit]:
    accepted: list[IsolatedLimit] = []
    for cand in isolated_candidates(spec, opts):
        if cand.accepted and all(abs(cand.z - o.z) > CLUSTER_RADIUS for o in accepted):
            accepted.append(cand)
    return accepted


# ---------------------------------------------------------------------------
# Necessary conditions for eventual real-rootedness / stability


@dataclass(frozen=True)
class StabilityReport:
    real_rooted_necessary: bool
    hurwitz_necessary: bool
    schur_necessary: bool
    details: str = ""

    def as_dict(self) -> dict:
        return {
            "real_rooted_necessary": self.real_rooted_necessary,
            "hurwitz_necessary": self.hurwitz_necessary,
            "schur_necessary": self.schur_necessary,
            "details": self.details,
        }


def stability_necessary(
    spec: RecurrenceSpec,
    scalars: ClassificationScalars | None = None,
    limit_set: LimitSet | None = None,
) -> StabilityReport:
    """Check the necessary conditions; a ``False`` rules the property out."""
    s = scalars if scalars is not None else classification_scalars(spec)
    delta = discriminant(spec)
    lead, mid, const = s.lead, s.mid, s.const
    delta_at_xA = eval_rational(delta, s.x_A)
    delta_constant = lead == 0 and mid == 0

    real_rooted = delta_at_xA < 0 and (
        (delta_constant and const < 0) or (not delta_constant and s.Delta_Delta >= 0)
    )

    # With lead > 0: zeros of Delta in the closed left half-plane iff mid >= 0 and const >= 0.
    hurwitz = lead > 0 and s.x_A <= 0 and mid >= 0 and const >= 0

    if lead > 0:
        if s.Delta_Delta < 0:
            # Conjugate zeros: |x|^2 is the product of the zeros.
            delta_in_disk = const / lead <= 1
        else:
            vertex = -mid / (2 * lead)
            delta_in_disk = (
                eval_rational(delta, 1) >= 0 and eval_rational(delta, -1) >= 0 and -1 <= vertex <= 1
            )
        schur = abs(s.x_A) <= 1 and delta_in_disk
    else:
        schur = False

    details = (
        f"Delta(x_A)={delta_at_xA}; Delta_Delta={s.Delta_Delta}; lead={lead}; "
        f"mid={mid}; const={const}; x_A={s.x_A}"
    )
    return StabilityReport(real_rooted, hurwitz, schur, details)
