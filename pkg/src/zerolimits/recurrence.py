"""Recurrence specification, generality checks and the sequence itself."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .exactpoly import RatPoly, RationalLike, resultant, to_rational


class InvalidSpec(ValueError):
    pass


class NotGeneral(ValueError):
    """The sequence violates one of the generality assumptions."""

    def __init__(self, report: "GeneralityReport"):
        super().__init__(f"recurrence is not general: {report.failures()}")
        self.report = report


@dataclass(frozen=True)
class RecurrenceSpec:
    """W_n = (a z + b) W_{n-1} + (c z^2 + d z + e) W_{n-2}."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    W0: RatPoly
    W1: RatPoly
    label: str | None = None

    def __post_init__(self):
        for name in "abcde":
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        for name in ("W0", "W1"):
            w = getattr(self, name)
            if not isinstance(w, RatPoly):
                object.__setattr__(self, name, RatPoly(w))
        if self.a == 0:
            raise InvalidSpec("coefficient a must be nonzero")
        if self.c == 0:
            raise InvalidSpec("coefficient c must be nonzero")
        if self.W0.is_zero and self.W1.is_zero:
            raise InvalidSpec("W0 and W1 are both identically zero")

    @classmethod
    def from_values(
        cls,
        a: RationalLike,
        b: RationalLike,
        c: RationalLike,
        d: RationalLike,
        e: RationalLike,
        W0,
        W1,
        label: str | None = None,
    ) -> "RecurrenceSpec":
        return cls(
            to_rational(a),
            to_rational(b),
            to_rational(c),
            to_rational(d),
            to_rational(e),
            W0 if isinstance(W0, RatPoly) else RatPoly(W0),
            W1 if isinstance(W1, RatPoly) else RatPoly(W1),
            label,
        )

    @property
    def A(self) -> RatPoly:
        return RatPoly([self.b, self.a])

    @property
    def B(self) -> RatPoly:
        return RatPoly([self.e, self.d, self.c])

    def with_initials(self, W0: RatPoly, W1: RatPoly, label: str | None = None) -> "RecurrenceSpec":
        return RecurrenceSpec(self.a, self.b, self.c, self.d, self.e, W0, W1, label)


@dataclass(frozen=True)
class GeneralityReport:
    g_not_identically_zero: bool
    A_B_coprime: bool
    W0_W1_coprime: bool
    delta_not_identically_zero: bool

    @property
    def is_general(self) -> bool:
        return (
            self.g_not_identically_zero
            and self.A_B_coprime
            and self.W0_W1_coprime
            and self.delta_not_identically_zero
        )

    def failures(self) -> list[str]:
        return [
            name
            for name in (
                "g_not_identically_zero",
                "A_B_coprime",
                "W0_W1_coprime",
                "delta_not_identically_zero",
            )
            if not getattr(self, name)
        ]

    def as_dict(self) -> dict:
        return {
            "g_not_identically_zero": self.g_not_identically_zero,
            "A_B_coprime": self.A_B_coprime,
            "W0_W1_coprime": self.W0_W1_coprime,
            "delta_not_identically_zero": self.delta_not_identically_zero,
            "is_general": self.is_general,
        }


def _coprime(p: RatPoly, q: RatPoly) -> bool:
    # A nonzero constant has no zeros; the zero polynomial vanishes everywhere.
    if p.is_zero:
        return q.degree == 0
    if q.is_zero:
        return p.degree == 0
    if p.degree == 0 or q.degree == 0:
        return True
    return resultant(p, q) != 0


def validate(spec: RecurrenceSpec) -> GeneralityReport:
    lead = spec.a**2 + 4 * spec.c
    mid = 2 * spec.a * spec.b + 4 * spec.d
    const = spec.b**2 + 4 * spec.e
    return GeneralityReport(
        g_not_identically_zero=not compute_g(spec).is_zero,
        A_B_coprime=_coprime(spec.A, spec.B),
        W0_W1_coprime=_coprime(spec.W0, spec.W1),
        delta_not_identically_zero=not (lead == 0 and mid == 0 and const == 0),
    )


def require_general(spec: RecurrenceSpec) -> GeneralityReport:
    report = validate(spec)
    if not report.is_general:
        raise NotGeneral(report)
    return report


def iter_polys(spec: RecurrenceSpec) -> Iterator[RatPoly]:
    """Yield W_0, W_1, W_2, ... indefinitely."""
    A, B = spec.A, spec.B
    prev, cur = spec.W0, spec.W1
    yield prev
    yield cur
    while True:
        prev, cur = cur, A * cur + B * prev
        yield cur


def nth_poly(spec: RecurrenceSpec, n: int) -> RatPoly:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return spec.W0
    A, B = spec.A, spec.B
    prev, cur = spec.W0, spec.W1
    for _ in range(n - 1):
        prev, cur = cur, A * cur + B * prev
    return cur


def compute_g(spec: RecurrenceSpec) -> RatPoly:
    W0, W1 = spec.W0, spec.W1
    return W1 * W1 - spec.A * W0 * W1 - spec.B * W0 * W0


def compute_h(spec: RecurrenceSpec) -> RatPoly:
    return 2 * spec.W1 - spec.W0 * spec.A
