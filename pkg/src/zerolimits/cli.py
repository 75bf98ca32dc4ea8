"""Command line interface: ``classify``, ``roots``, ``verify`` and ``plot``.

Recurrences are read from a JSON document whose coefficients are rational
strings such as ``"-3/4"`` (JSON integers are accepted too, floats are not)::

    {"a": "4", "b": "2", "c": "16", "d": "0", "e": "0",
     "W0": ["1", "1"], "W1": ["2", "6", "8"], "label": "ladder"}

Exit codes: 0 success, 1 bad input or arguments, 2 the recurrence is not
general, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .exactpoly import RatPoly, ZeroPolynomial
from .harness import (
    GridSpec,
    check_binet,
    check_exact_identities,
    check_float_identities,
    convergence_report,
    default_grid,
    scan_oracle,
    special_points,
)
from .limits import (
    LimitSet,
    classify,
    isolated_candidates,
    stability_necessary,
)
from .recurrence import (
    InvalidSpec,
    NotGeneral,
    RecurrenceSpec,
    nth_poly,
    require_general,
)
from .rootfind import CLUSTER_RADIUS, find_roots
from .spectra import discriminant

MAX_N = 10000
MIN_GRID = 64
MIN_N_MAX = 4

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_GENERAL = 2
EXIT_VERIFY = 3

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")
_SCALARS = ("a", "b", "c", "d", "e")


class SpecFileError(ValueError):
    """A spec document that cannot be turned into a recurrence."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Spec files


def _parse_rational(field: str, value: Any) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise SpecFileError(field, f"expected a rational string, got {type(value).__name__} {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise SpecFileError(field, f"expected a rational string, got {type(value).__name__}")
    text = value.strip()
    if not _RATIONAL.fullmatch(text):
        raise SpecFileError(field, f"{value!r} is not of the form p or p/q")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise SpecFileError(field, f"{value!r} has a zero denominator") from None


def _parse_poly(field: str, value: Any) -> RatPoly:
    if not isinstance(value, list):
        raise SpecFileError(field, "expected a list of rational strings (ascending coefficients)")
    return RatPoly([_parse_rational(f"{field}[{k}]", v) for k, v in enumerate(value)])


def parse_spec(doc: Any) -> RecurrenceSpec:
    if not isinstance(doc, dict):
        raise SpecFileError("<document>", "expected a JSON object")
    unknown = sorted(set(doc) - {*_SCALARS, "W0", "W1", "label"})
    if unknown:
        raise SpecFileError(unknown[0], "unknown field")
    for name in (*_SCALARS, "W0", "W1"):
        if name not in doc:
            raise SpecFileError(name, "missing")
    scalars = [_parse_rational(name, doc[name]) for name in _SCALARS]
    W0 = _parse_poly("W0", doc["W0"])
    W1 = _parse_poly("W1", doc["W1"])
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise SpecFileError("label", "expected text")
    try:
        return RecurrenceSpec(*scalars, W0, W1, label)
    except InvalidSpec as exc:
        raise SpecFileError(_invalid_field(str(exc)), str(exc)) from None


def _invalid_field(message: str) -> str:
    for name in (*_SCALARS, "W0", "W1"):
        if re.search(rf"\b{name}\b", message):
            return name
    return "<document>"


def serialize_spec(spec: RecurrenceSpec) -> dict:
    doc: dict = {name: str(getattr(spec, name)) for name in _SCALARS}
    doc["W0"] = [str(c) for c in spec.W0.coeffs]
    doc["W1"] = [str(c) for c in spec.W1.coeffs]
    if spec.label is not None:
        doc["label"] = spec.label
    return doc


def load_spec(path: str | Path) -> RecurrenceSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError("<document>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_spec(doc)


# ---------------------------------------------------------------------------
# Deterministic emitters


def _num(x: float) -> float | None:
    x = float(x)
    if not math.isfinite(x):
        return None
    return x + 0.0  # folds -0.0 into 0.0


def to_jsonable(obj: Any) -> Any:
    """Rationals become ``"p/q"``, complex numbers ``{"re", "im"}`` and NaN ``null``."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    if isinstance(obj, RatPoly):
        return [str(c) for c in obj.coeffs]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    # numpy scalars
    if hasattr(obj, "item"):
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _dedupe(points: list[complex]) -> list[complex]:
    out: list[complex] = []
    for z in points:
        if all(abs(z - w) > CLUSTER_RADIUS for w in out):
            out.append(z)
    return out


def classify_report(spec: RecurrenceSpec) -> dict:
    scalars, limit_set = classify(spec)
    candidates = isolated_candidates(spec)
    accepted = _dedupe([c.z for c in candidates if c.accepted])
    ambiguous = _dedupe([c.z for c in candidates if c.ambiguous])
    stability = stability_necessary(spec, scalars, limit_set)
    return {
        "label": spec.label,
        "spec": serialize_spec(spec),
        "discriminant": discriminant(spec),
        "scalars": scalars.as_dict(),
        "limit_set": limit_set.as_dict(),
        "isolated": accepted,
        "isolated_ambiguous": ambiguous,
        "isolated_candidates": [c.as_dict() for c in candidates],
        "stability": stability.as_dict(),
    }


def roots_csv(spec: RecurrenceSpec, n: int) -> str:
    W = nth_poly(spec, n)
    if W.is_zero:
        raise UsageError(f"W_{n} is the zero polynomial")
    if W.degree < 1:
        rs_roots, rs_res, converged = [], [], True
    else:
        rs = find_roots(W)
        rs_roots, rs_res, converged = rs.roots, rs.residuals, rs.converged
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["re", "im", "residual"]
    if not converged:
        header.append("converged")
    writer.writerow(header)
    for z, r in zip(rs_roots, rs_res):
        row = [repr(_num(z.real)), repr(_num(z.imag)), repr(_num(r))]
        if not converged:
            row.append("false")
        writer.writerow(row)
    return buf.getvalue()


def _convergence_ns(n_max: int) -> list[int]:
    return sorted({max(2, n_max * k // 4) for k in (1, 2, 3, 4)})


def verify_report(
    spec: RecurrenceSpec,
    n_max: int,
    grid_size: int,
    limit_set_override: LimitSet | None = None,
) -> dict:
    require_general(spec)
    _, limit_set = classify(spec)
    if limit_set_override is not None:
        limit_set = limit_set_override
    candidates = isolated_candidates(spec)
    accepted = _dedupe([c.z for c in candidates if c.accepted])

    grid = default_grid(limit_set, special_points(spec, accepted), n=grid_size)
    scan = scan_oracle(spec, limit_set, grid, accepted)
    conv = convergence_report(spec, _convergence_ns(n_max), limit_set, accepted)
    rng = random.Random(0)
    exact = check_exact_identities(spec)
    floats = check_float_identities(spec, rng)
    binet = check_binet(spec, rng)

    first, last = conv.per_n[0], conv.per_n[-1]
    checks = {
        "oracle_scan": scan.passed,
        "convergence": len(conv.per_n) < 2 or last.max_dist < first.max_dist,
        "exact_identities": not exact,
        "float_identities": not floats,
        "recurrence_closed_form": not binet,
    }
    return {
        "label": spec.label,
        "passed": all(checks.values()),
        "checks": checks,
        "failed": [name for name, ok in checks.items() if not ok],
        "oracle_scan": scan.as_dict(),
        "convergence": conv.as_dict(),
        "identity_failures": [{"check": c, "detail": d} for c, d in exact + floats + binet],
    }


# ---------------------------------------------------------------------------
# SVG


SVG_WIDTH = 640.0
SET_SAMPLES = 721


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _tick_label(v: float, step: float) -> str:
    digits = max(0, -math.floor(math.log10(step)))
    s = f"{v:.{digits}f}"
    return "0" if float(s) == 0 else s


def plot_viewport(points: Sequence[complex]) -> tuple[float, float, float, float]:
    """Bounding box of ``points`` padded 20% per side; kept from being too thin."""
    xs = [p.real for p in points] or [0.0]
    ys = [p.imag for p in points] or [0.0]
    x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
    w, h = x_hi - x_lo, y_hi - y_lo
    base = max(w, h) or max(1.0, abs(x_lo), abs(y_lo))
    w, h = max(w, 0.5 * base), max(h, 0.5 * base)
    cx, cy = 0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)
    w, h = 1.4 * w, 1.4 * h
    return cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2


def render_svg(
    roots: Sequence[complex],
    limit_set: LimitSet,
    isolated: Sequence[complex],
    title: str = "",
) -> str:
    view = plot_viewport(list(roots) + list(limit_set.key_points()) + list(isolated))
    x_lo, x_hi, y_lo, y_hi = view
    scale = SVG_WIDTH / (x_hi - x_lo)
    height = (y_hi - y_lo) * scale

    def px(z: complex) -> tuple[str, str]:
        return _fmt((z.real - x_lo) * scale), _fmt((y_hi - z.imag) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(SVG_WIDTH)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(SVG_WIDTH)} {_fmt(height)}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out += [
        '<defs><clipPath id="view">'
        f'<rect x="0" y="0" width="{_fmt(SVG_WIDTH)}" height="{_fmt(height)}"/>'
        "</clipPath></defs>",
        f'<rect x="0" y="0" width="{_fmt(SVG_WIDTH)}" height="{_fmt(height)}" fill="white"/>',
    ]

    # axes and ticks
    out.append('<g stroke="#888" stroke-width="1" font-family="sans-serif" font-size="10" fill="#444">')
    if x_lo <= 0 <= x_hi:
        x0, _ = px(0j)
        out.append(f'<line x1="{x0}" y1="0.00" x2="{x0}" y2="{_fmt(height)}"/>')
    if y_lo <= 0 <= y_hi:
        _, y0 = px(0j)
        out.append(f'<line x1="0.00" y1="{y0}" x2="{_fmt(SVG_WIDTH)}" y2="{y0}"/>')
    axis_y = min(max(0.0, y_lo), y_hi)
    axis_x = min(max(0.0, x_lo), x_hi)
    step = _nice_step(max(x_hi - x_lo, y_hi - y_lo))
    k = math.ceil(x_lo / step)
    while k * step <= x_hi:
        v = k * step
        tx, ty = px(complex(v, axis_y))
        out.append(f'<line x1="{tx}" y1="{ty}" x2="{tx}" y2="{_fmt(float(ty) + 4)}"/>')
        out.append(f'<text x="{tx}" y="{_fmt(float(ty) + 14)}" text-anchor="middle" stroke="none">'
                   f"{_tick_label(v, step)}</text>")
        k += 1
    k = math.ceil(y_lo / step)
    while k * step <= y_hi:
        v = k * step
        if k != 0:
            tx, ty = px(complex(axis_x, v))
            out.append(f'<line x1="{tx}" y1="{ty}" x2="{_fmt(float(tx) - 4)}" y2="{ty}"/>')
            out.append(f'<text x="{_fmt(float(tx) - 6)}" y="{_fmt(float(ty) + 3)}" text-anchor="end" '
                       f'stroke="none">{_tick_label(v, step)}i</text>')
        k += 1
    out.append("</g>")

    # the limit set as thick polylines
    out.append('<g clip-path="url(#view)" fill="none" stroke="#1f4e9c" stroke-width="5" '
               'stroke-linecap="round" stroke-linejoin="round">')
    for pts in limit_set.sample(view, SET_SAMPLES, 0.0):
        if len(pts) == 0:
            continue
        coords = " ".join(",".join(px(complex(z))) for z in pts)
        if len(pts) == 1:
            x, y = px(complex(pts[0]))
            out.append(f'<circle class="limit-set" cx="{x}" cy="{y}" r="2.50" fill="#1f4e9c" stroke="none"/>')
        else:
            out.append(f'<polyline class="limit-set" points="{coords}"/>')
    out.append("</g>")

    out.append('<g clip-path="url(#view)" fill="#c0392b" stroke="black" stroke-width="0.5">')
    for z in roots:
        x, y = px(z)
        out.append(f'<circle class="root" cx="{x}" cy="{y}" r="3.50"/>')
    out.append("</g>")

    out.append('<g clip-path="url(#view)" fill="none" stroke="#0a7d32" stroke-width="2">')
    for z in isolated:
        x, y = (float(v) for v in px(z))
        r = 7.0
        out.append(
            f'<path class="isolated" d="M{_fmt(x)},{_fmt(y - r)} L{_fmt(x + r)},{_fmt(y)} '
            f'L{_fmt(x)},{_fmt(y + r)} L{_fmt(x - r)},{_fmt(y)} Z"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def plot_svg(spec: RecurrenceSpec, n: int) -> str:
    _, limit_set = classify(spec)
    isolated = _dedupe([c.z for c in isolated_candidates(spec) if c.accepted])
    W = nth_poly(spec, n)
    if W.is_zero:
        raise UsageError(f"W_{n} is the zero polynomial")
    roots = find_roots(W).roots if W.degree >= 1 else []
    title = f"{spec.label or 'recurrence'}: zeros of W_{n}"
    return render_svg(roots, limit_set, isolated, title)


# ---------------------------------------------------------------------------
# Commands


def _check_n(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise UsageError(f"--n must be between 0 and {MAX_N}, got {n}")


def cmd_classify(path: str) -> str:
    spec = load_spec(path)
    require_general(spec)
    return dumps(classify_report(spec))


def cmd_roots(path: str, n: int) -> str:
    _check_n(n)
    return roots_csv(load_spec(path), n)


def cmd_verify(
    path: str, n_max: int, grid: int, limit_set_override: LimitSet | None = None
) -> tuple[str, bool]:
    """Returns the JSON report and whether every check passed.

    ``limit_set_override`` replaces the classified set, so tests can check
    that a wrong answer is caught.
    """
    if n_max < MIN_N_MAX or n_max > MAX_N:
        raise UsageError(f"--n-max must be between {MIN_N_MAX} and {MAX_N}, got {n_max}")
    if grid < MIN_GRID:
        raise UsageError(f"--grid must be at least {MIN_GRID}, got {grid}")
    report = verify_report(load_spec(path), n_max, grid, limit_set_override)
    return dumps(report), report["passed"]


def cmd_plot(path: str, n: int, output: str) -> None:
    _check_n(n)
    svg = plot_svg(load_spec(path), n)
    try:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zerolimits",
        description="Limits of zeros of polynomials defined by a two-term recurrence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify the limit set; JSON on stdout")
    p.add_argument("spec")

    p = sub.add_parser("roots", help="roots of W_n; CSV on stdout")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("verify", help="check the classification against brute force")
    p.add_argument("spec")
    p.add_argument("--n-max", type=int, default=24)
    p.add_argument("--grid", type=int, default=256)

    p = sub.add_parser("plot", help="SVG of the zeros of W_n and the limit set")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.command == "classify":
            sys.stdout.write(cmd_classify(args.spec))
        elif args.command == "roots":
            sys.stdout.write(cmd_roots(args.spec, args.n))
        elif args.command == "verify":
            text, ok = cmd_verify(args.spec, args.n_max, args.grid)
            sys.stdout.write(text)
            if not ok:
                failed = json.loads(text)["failed"]
                print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
                return EXIT_VERIFY
        elif args.command == "plot":
            cmd_plot(args.spec, args.n, args.output)
    except (SpecFileError, UsageError, ZeroPolynomial) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotGeneral as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(dumps(exc.report), end="", file=sys.stderr)
        return EXIT_NOT_GENERAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
