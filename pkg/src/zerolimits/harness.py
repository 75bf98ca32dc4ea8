"""End-to-end verification of a classification against brute force."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exactpoly import RatPoly, eval_rational
from .limits import (
    LimitSet,
    classification_scalars,
    classify,
    isolated_limits,
)
from .recurrence import (
    RecurrenceSpec,
    compute_g,
    compute_h,
    iter_polys,
    require_general,
    validate,
)
from .rootfind import RootFindOptions, find_roots
from .spectra import (
    DeltaVanishes,
    alpha_pm,
    discriminant,
    horner,
    float_coeffs,
    principal_sqrt,
    residual_grid,
    spectral_grid,
    spectral_point,
)

ORACLE_RTOL = 1e-4
ON_SET_RTOL = 1e-6
CLIP_RADIUS = 1e-2
SAMPLES_PER_COMPONENT = 200
END_MARGIN = 1e-3


@dataclass(frozen=True)
class GridSpec:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int = 256
    ny: int = 256

    def __post_init__(self):
        if self.nx < 64 or self.ny < 64:
            raise ValueError("grid resolution must be at least 64 x 64")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError("grid box is empty")

    @property
    def window(self) -> tuple[float, float, float, float]:
        return self.x_lo, self.x_hi, self.y_lo, self.y_hi

    @property
    def cell_diagonal(self) -> float:
        dx = (self.x_hi - self.x_lo) / (self.nx - 1)
        dy = (self.y_hi - self.y_lo) / (self.ny - 1)
        return math.hypot(dx, dy)

    def points(self) -> np.ndarray:
        x = np.linspace(self.x_lo, self.x_hi, self.nx)
        y = np.linspace(self.y_lo, self.y_hi, self.ny)
        return x[None, :] + 1j * y[:, None]

    def as_dict(self) -> dict:
        return {
            "x_lo": self.x_lo,
            "x_hi": self.x_hi,
            "y_lo": self.y_lo,
            "y_hi": self.y_hi,
            "nx": self.nx,
            "ny": self.ny,
        }


@dataclass
class OracleScan:
    grid: GridSpec
    false_negatives: list[complex]
    false_positives: list[complex]
    oracle_positive: int = 0
    on_set_samples: int = 0
    # Band points far from the set with no zero crossing nearby. Informational.
    band_outliers: int = 0

    @property
    def passed(self) -> bool:
        return not self.false_negatives and not self.false_positives

    def as_dict(self, limit: int = 20) -> dict:
        return {
            "grid": self.grid.as_dict(),
            "passed": self.passed,
            "oracle_positive": self.oracle_positive,
            "on_set_samples": self.on_set_samples,
            "band_outliers": self.band_outliers,
            "false_negatives": self.false_negatives[:limit],
            "false_positives": self.false_positives[:limit],
            "num_false_negatives": len(self.false_negatives),
            "num_false_positives": len(self.false_positives),
        }


def special_points(spec: RecurrenceSpec, isolated: Iterable[complex] = ()) -> list[complex]:
    """Points where the residual vanishes for more than one reason."""
    s = classification_scalars(spec)
    pts = [complex(float(s.x_A))]
    roots = s.delta_roots()
    if roots is not None:
        pts.extend(roots)
    pts.extend(isolated)
    return pts


def default_grid(
    limit_set: LimitSet, extra: Sequence[complex] = (), n: int = 256, inflate: float = 0.5
) -> GridSpec:
    """Bounding box of the set's key points (and ``extra``) inflated by ``inflate``."""
    pts = list(limit_set.key_points()) + list(extra)
    xs = [p.real for p in pts]
    ys = [abs(p.imag) for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_hi = max(ys)
    span = max(x_hi - x_lo, 2 * y_hi)
    if span == 0:
        span = max(1.0, abs(x_lo))
    half_x = 0.5 * max(x_hi - x_lo, span) * (1 + inflate)
    half_y = 0.5 * max(2 * y_hi, span) * (1 + inflate)
    cx = 0.5 * (x_lo + x_hi)
    # Even counts keep grid rows off the real axis; nothing relies on hitting it.
    return GridSpec(cx - half_x, cx + half_x, -half_y, half_y, n, n)


def second_oracle(spec: RecurrenceSpec, z: np.ndarray, rtol: float = ORACLE_RTOL) -> np.ndarray:
    """Membership via ``4B/A^2`` real and below -1 (or ``A * Delta`` vanishing).

    The tolerance is the image of the first oracle's band ``rtol * scale``
    (with a factor 2 of slack), so the two tests agree up to rounding.
    """
    A, B, D, _, _ = spectral_grid(spec, z)
    absA = np.abs(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 4 * B / (A * A) + 1.0
        aw = np.abs(w)
        cos_half = np.sqrt(np.maximum(0.0, 0.5 * (1.0 + w.real / aw)))
        root = np.sqrt(aw)
        scale = np.maximum(1.0, 0.5 * absA * (1.0 + root))
        bound = 2.0 * rtol * scale * (1.0 + root) / (absA * root)
        ok = cos_half <= bound
    degenerate = (absA == 0) | (np.abs(D) == 0) | ~np.isfinite(w)
    return ok | degenerate


def crossing_mask(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Grid points whose modulus gap changes sign towards a row or column neighbour.

    ``Re(conj(A) * S)`` has the sign of ``|lambda+| - |lambda-|``. The square
    root ``S`` is re-chosen along each grid edge so that it varies
    continuously, which removes the sign flip of the principal branch cut.
    """
    out = np.zeros(A.shape, dtype=bool)
    for axis in (0, 1):
        a1 = np.moveaxis(A, axis, 0)
        s1 = np.moveaxis(S, axis, 0)
        here_a, next_a = a1[:-1], a1[1:]
        here_s, next_s = s1[:-1], s1[1:]
        flip = np.where((here_s * np.conj(next_s)).real < 0, -1.0, 1.0)
        sig_here = (np.conj(here_a) * here_s).real
        sig_next = (np.conj(next_a) * next_s * flip).real
        change = sig_here * sig_next <= 0
        view = np.moveaxis(out, axis, 0)
        view[:-1] |= change
        view[1:] |= change
    return out


def scan_oracle(
    spec: RecurrenceSpec,
    limit_set: LimitSet,
    grid: GridSpec,
    isolated: Sequence[complex] = (),
) -> OracleScan:
    require_general(spec)
    Z = grid.points()
    A, _, _, lp, lm = spectral_grid(spec, Z)
    alp, alm = np.abs(lp), np.abs(lm)
    scale = np.maximum(np.maximum(alp, alm), 1.0)
    band = np.abs(alp - alm) < ORACLE_RTOL * scale
    # A sign change on a grid edge pins a point of the set to that edge. The
    # band alone misses curves thinner than a cell and smears into wide blobs
    # where the residual is flat (e.g. where an arc crosses the real axis).
    positive = crossing_mask(A, lp - lm)

    clipped = np.zeros_like(positive)
    for p in special_points(spec, isolated):
        clipped |= np.abs(Z - p) < CLIP_RADIUS
    dist = limit_set.distance(Z)
    far = ~clipped & (dist > 2 * grid.cell_diagonal)
    false_negatives = [complex(v) for v in Z[positive & far]]
    band_outliers = int((band & ~positive & far).sum())

    check = band & positive & ~clipped
    agree = second_oracle(spec, Z[check])
    false_positives = [complex(v) for v in Z[check][~agree]]

    n_samples = 0
    for pts in limit_set.sample(grid.window, SAMPLES_PER_COMPONENT, END_MARGIN):
        if len(pts) == 0:
            continue
        far = np.ones(len(pts), dtype=bool)
        for p in special_points(spec):
            far &= np.abs(pts - p) > END_MARGIN
        pts = pts[far]
        n_samples += len(pts)
        r, sc = residual_grid(spec, pts)
        bad = r >= ON_SET_RTOL * (1 + np.abs(pts)) * sc
        false_positives.extend(complex(v) for v in pts[bad])

    return OracleScan(
        grid, false_negatives, false_positives, int(positive.sum()), n_samples, band_outliers
    )


# ---------------------------------------------------------------------------
# Convergence of zeros


@dataclass(frozen=True)
class ConvergenceEntry:
    n: int
    max_dist: float
    mean_dist: float
    num_roots: int
    num_near_isolated: int
    converged: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "max_dist": self.max_dist,
            "mean_dist": self.mean_dist,
            "num_roots": self.num_roots,
            "num_near_isolated": self.num_near_isolated,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    per_n: list[ConvergenceEntry]
    isolated: list[complex] = field(default_factory=list)

    @property
    def monotone_tail(self) -> bool:
        tail = [e.max_dist for e in self.per_n[-3:]]
        return all(b <= a for a, b in zip(tail, tail[1:]))

    def as_dict(self) -> dict:
        return {
            "per_n": [e.as_dict() for e in self.per_n],
            "monotone_tail": self.monotone_tail,
            "isolated": self.isolated,
        }


NEAR_ISOLATED = 1e-2


def root_distances(limit_set: LimitSet, isolated: Sequence[complex], roots: Sequence[complex]) -> np.ndarray:
    z = np.asarray(roots, dtype=complex)
    d = limit_set.distance(z)
    for p in isolated:
        d = np.minimum(d, np.abs(z - p))
    return d


def convergence_report(
    spec: RecurrenceSpec,
    n_values: Sequence[int],
    limit_set: LimitSet | None = None,
    isolated: Sequence[complex] | None = None,
    opts: RootFindOptions | None = None,
) -> ConvergenceReport:
    require_general(spec)
    ns = list(n_values)
    if not ns or any(n < 2 for n in ns) or ns != sorted(set(ns)):
        raise ValueError("n_values must be strictly ascending and each >= 2")
    if limit_set is None:
        _, limit_set = classify(spec)
    if isolated is None:
        isolated = [p.z for p in isolated_limits(spec, opts)]
    wanted = set(ns)
    entries = []
    for n, W in enumerate(iter_polys(spec)):
        if n in wanted:
            rs = find_roots(W, opts)
            d = root_distances(limit_set, isolated, rs.roots)
            near = sum(1 for z in rs.roots if any(abs(z - p) < NEAR_ISOLATED for p in isolated))
            entries.append(
                ConvergenceEntry(n, float(d.max()), float(d.mean()), len(rs.roots), near, rs.converged)
            )
        if n >= ns[-1]:
            break
    return ConvergenceReport(entries, list(isolated))


# ---------------------------------------------------------------------------
# Random corpus and identity checks


def _rand_rational(rng: random.Random, bound: int = 20, nonzero: bool = False) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        if not nonzero or num != 0:
            return Fraction(num, den)


def _rand_poly(rng: random.Random, max_degree: int) -> RatPoly:
    deg = rng.randint(0, max_degree)
    coeffs = [_rand_rational(rng) for _ in range(deg)] + [_rand_rational(rng, nonzero=True)]
    return RatPoly(coeffs)


def random_spec(rng: random.Random, variant: str = "generic") -> RecurrenceSpec:
    """One candidate spec (not necessarily general).

    ``variant`` forces a degenerate branch: ``"linear_delta"`` sets
    a^2 + 4c = 0 and ``"flat_B"`` makes B'(x_A) = 0.
    """
    a = _rand_rational(rng, nonzero=True)
    b = _rand_rational(rng)
    c = _rand_rational(rng, nonzero=True)
    d = _rand_rational(rng)
    e = _rand_rational(rng)
    if variant == "linear_delta":
        c = -a * a / 4
    elif variant == "flat_B":
        d = 2 * c * b / a
    W0 = _rand_poly(rng, 2)
    W1 = _rand_poly(rng, 3)
    return RecurrenceSpec(a, b, c, d, e, W0, W1)


_VARIANTS = ["generic"] * 6 + ["linear_delta", "flat_B", "generic", "flat_B"]


def random_corpus(seed: int, count: int) -> list[RecurrenceSpec]:
    """``count`` general specs; every tenth block mixes in degenerate branches."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        variant = _VARIANTS[len(out) % len(_VARIANTS)]
        spec = random_spec(rng, variant)
        if validate(spec).is_general:
            out.append(spec)
    return out


@dataclass
class SuiteResult:
    checked: int = 0
    failures: list[tuple[RecurrenceSpec, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, spec: RecurrenceSpec, check: str, detail: str) -> None:
        self.failures.append((spec, check, detail))


def _sample_points(rng: random.Random, spec: RecurrenceSpec, count: int) -> list[complex]:
    centre = [complex(p) for p in special_points(spec)]
    span = 1.0 + max(abs(p) for p in centre)
    pts = []
    while len(pts) < count:
        z = complex(rng.uniform(-span, span), rng.uniform(-span, span))
        if all(abs(z - p) > 1e-3 * span for p in centre):
            pts.append(z)
    return pts


def check_exact_identities(spec: RecurrenceSpec) -> list[tuple[str, str]]:
    """Rational identities among the classification scalars."""
    s = classification_scalars(spec)
    a = spec.a
    bad = []
    if s.Delta_Delta != 16 * (s.Delta_B - a * a * s.B_at_xA):
        bad.append(("Delta_Delta", f"{s.Delta_Delta}"))
    if s.Delta_Delta != s.mid**2 - 4 * s.lead * s.const:
        bad.append(("Delta_Delta_discriminant", f"{s.Delta_Delta}"))
    if s.lead != 0 and s.r is not None:
        x_delta = -(a * spec.b + 2 * spec.d) / s.lead
        if (s.x_A - s.x_C) * (s.x_A - x_delta) != 4 * s.B_at_xA / s.lead:
            bad.append(("xA_xC_xDelta", f"x_C={s.x_C}, x_Delta={x_delta}"))
        if s.x_A - x_delta != 2 * s.Bprime_at_xA / s.lead:
            bad.append(("xA_minus_xDelta", f"x_Delta={x_delta}"))
    # Where Delta has a rational zero, g equals h^2/4 there exactly.
    delta = discriminant(spec)
    x_d = s.x_Delta
    if x_d is not None and (s.lead == 0 or s.Delta_Delta == 0):
        if eval_rational(delta, x_d) != 0:
            bad.append(("rational_delta_zero", f"{x_d}"))
        g, h = compute_g(spec), compute_h(spec)
        if eval_rational(g, x_d) != eval_rational(h, x_d) ** 2 / 4:
            bad.append(("g_equals_h2_over_4", f"x={x_d}"))
    return bad


def check_float_identities(spec: RecurrenceSpec, rng: random.Random, points: int = 50) -> list[tuple[str, str]]:
    bad = []
    g_c = float_coeffs(compute_g(spec))
    W0_c, h_c = float_coeffs(spec.W0), float_coeffs(compute_h(spec))
    s = classification_scalars(spec)
    delta = discriminant(spec)
    d_c = float_coeffs(delta)
    dabs = [abs(c) for c in d_c]

    roots = s.delta_roots()
    if roots is not None and s.lead != 0:
        for x in roots:
            scale = sum(c * abs(x) ** k for k, c in enumerate(dabs))
            if abs(horner(d_c, x)) > 1e-10 * scale:
                bad.append(("delta_endpoint", f"Delta({x}) = {horner(d_c, x)}"))

    for z in _sample_points(rng, spec, points):
        sp = spectral_point(spec, z)
        if abs(sp.lambda_plus + sp.lambda_minus - sp.A_val) > 1e-10 * (1 + abs(sp.A_val)):
            bad.append(("vieta_sum", f"z={z}"))
        if abs(sp.lambda_plus * sp.lambda_minus + sp.B_val) > 1e-10 * (1 + abs(sp.B_val)):
            bad.append(("vieta_product", f"z={z}"))
        swapped = abs(abs((sp.A_val - sp.sqrt_Delta) / 2) - abs((sp.A_val + sp.sqrt_Delta) / 2))
        if swapped != sp.residual:
            bad.append(("branch_swap", f"z={z}"))
        if abs(spectral_point(spec, z.conjugate()).residual - sp.residual) > 1e-12 * (1 + abs(sp.lambda_plus)):
            bad.append(("conjugate_symmetry", f"z={z}"))
        try:
            ap, am = alpha_pm(spec, z)
        except DeltaVanishes:
            continue
        g = horner(g_c, z)
        prod = -ap * am * sp.Delta_val
        W0 = horner(W0_c, z)
        h = horner(h_c, z)
        mag = abs(g) + abs(h) ** 2 / 4 + abs(W0) ** 2 * abs(sp.Delta_val) / 4
        if abs(g - prod) > 1e-9 * mag:
            bad.append(("g_alpha_identity", f"z={z}: g={g}, -a+a-D={prod}"))
        if abs(ap + am - W0) > 1e-9 * (abs(W0) + abs(ap) + abs(am)):
            bad.append(("alpha_sum", f"z={z}"))
    return bad


def check_binet(spec: RecurrenceSpec, rng: random.Random, points: int = 10, n_max: int = 12) -> list[tuple[str, str]]:
    bad = []
    polys = []
    for n, W in enumerate(iter_polys(spec)):
        polys.append(float_coeffs(W))
        if n >= n_max:
            break
    delta = float_coeffs(discriminant(spec))
    for z in _sample_points(rng, spec, points):
        D = horner(delta, z)
        if abs(D) < 1e-6 * (1 + abs(z) ** 2) * max(abs(c) for c in delta):
            continue
        sp = spectral_point(spec, z)
        ap, am = alpha_pm(spec, z)
        for n in range(n_max + 1):
            closed = ap * sp.lambda_plus**n + am * sp.lambda_minus**n
            scale = abs(ap) * abs(sp.lambda_plus) ** n + abs(am) * abs(sp.lambda_minus) ** n
            if abs(horner(polys[n], z) - closed) > 1e-6 * scale:
                bad.append(("binet", f"z={z}, n={n}"))
    return bad


def identity_suite(corpus_seed: int, count: int, points: int = 50) -> SuiteResult:
    rng = random.Random(corpus_seed + 1)
    result = SuiteResult()
    for spec in random_corpus(corpus_seed, count):
        result.checked += 1
        for name, detail in check_exact_identities(spec):
            result.fail(spec, name, detail)
        for name, detail in check_float_identities(spec, rng, points):
            result.fail(spec, name, detail)
        for name, detail in check_binet(spec, rng):
            result.fail(spec, name, detail)
    return result
