"""One test per acceptance criterion; a PASS/FAIL line per criterion is
printed in the terminal summary and as each test runs."""

import json
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from zerolimits.cli import cmd_roots
from zerolimits.exactpoly import RatPoly, eval_rational, exact_divide
from zerolimits.fixtures import fixture_path, load_fixture
from zerolimits.harness import (
    convergence_report,
    default_grid,
    identity_suite,
    random_corpus,
    scan_oracle,
    special_points,
)
from zerolimits.limits import Arc, classification_scalars, classify, isolated_limits, stability_necessary
from zerolimits.recurrence import compute_g
from zerolimits.rootfind import scaled_residual
from zerolimits.spectra import discriminant

from .conftest import ACCEPTANCE_KEY, make_spec

LADDER = str(fixture_path("ladder"))

# Marker centres of the reference plot, in its drawing units.
REFERENCE_REAL = -6.042
REFERENCE_PAIRS = [(-4.5756, 2.1021), (-2.7579, 2.6028), (-1.7627, 2.4209), (-1.2815, 2.1922), (-1.0632, 2.0477)]


@contextmanager
def criterion(request, key: str, title: str, budget: float | None = None):
    notes: list[str] = []
    start = time.perf_counter()
    ok = False
    try:
        yield notes
        elapsed = time.perf_counter() - start
        if budget is not None:
            notes.append(f"budget {budget:g}s")
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        note = "; ".join(notes)
        request.config.stash[ACCEPTANCE_KEY][key] = (ok, title, note, elapsed)
        print(f"\ncriterion {key}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {note}")


def parse_roots(csv_text: str) -> list[complex]:
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("re,im,residual")
    return [complex(float(r.split(",")[0]), float(r.split(",")[1])) for r in lines[1:]]


def matches_reference(roots: list[complex], scale: float, tol: float) -> tuple[bool, str]:
    if len(roots) != 11:
        return False, f"{len(roots)} roots, expected 11"
    want = [complex(REFERENCE_REAL, 0)] + [complex(x, s * y) for x, y in REFERENCE_PAIRS for s in (1, -1)]
    worst = 0.0
    left = list(roots)
    for w in want:
        w = w / scale
        k = min(range(len(left)), key=lambda i: abs(left[i] - w))
        worst = max(worst, abs(left.pop(k) - w))
    return worst < tol, f"worst coordinate mismatch {worst:.2e}"


def test_criterion_1_ladder(request):
    with criterion(request, "1", "ladder arc, discriminant, no isolated limits", budget=1.0) as notes:
        spec = load_fixture("ladder")
        scalars, ls = classify(spec)
        assert isinstance(ls, Arc)
        ends = sorted([ls.end_plus, ls.end_minus], key=lambda z: z.imag)
        assert abs(ends[0] - complex(-0.1, -0.2)) < 1e-9 and abs(ends[1] - complex(-0.1, 0.2)) < 1e-9
        assert scalars.x_A == Fraction(-1, 2) and ls.through == -0.5
        assert discriminant(spec) == RatPoly([4, 16, 80])
        assert isolated_limits(spec) == []
        notes.append(f"ends {ends[1]:.12g} and conjugate")


def test_criterion_2_p4(request):
    with criterion(request, "2", "P4 quotient has one real isolated limit near -0.8102", budget=1.0) as notes:
        raw, spec = load_fixture("p4_raw"), load_fixture("p4")
        square = RatPoly([1, 2, 1])
        assert exact_divide(raw.W0, square) == spec.W0 and exact_divide(raw.W1, square) == spec.W1
        quartic = RatPoly([4, 28, 169, 312, 171])
        assert compute_g(spec) == quartic * RatPoly([2048]) * RatPoly([-1, 1]) * RatPoly([1, 2])
        (point,) = isolated_limits(spec)
        z = point.z
        assert z.imag == 0 and abs(z.real + 0.8102) < 5e-4
        res = scaled_residual(quartic, z)
        assert res < 1e-8
        notes.append(f"z = {z.real:.10f}, quartic residual {res:.1e}")


def test_criterion_3_reference_plot_literal(request):
    # Checked literally: the roots of W_6 against the plotted coordinates.
    # The reference plot actually shows W_10 at 10x scale, so this is expected to fail.
    with criterion(request, "3", "cmd_roots --n 6 reproduces the reference plot's 11 markers", budget=1.0) as notes:
        roots = parse_roots(cmd_roots(LADDER, 6))
        ok, why = matches_reference(roots, scale=1.0, tol=5e-4)
        notes.append(why)
        assert ok, why


def test_criterion_3b_reference_plot_companion(request):
    with criterion(request, "3b", "companion: --n 10 matches the reference plot at 1/10 scale", budget=1.0) as notes:
        roots = parse_roots(cmd_roots(LADDER, 10))
        ok, why = matches_reference(roots, scale=10.0, tol=5e-4)
        notes.append(why)
        assert ok, why


def test_criterion_4_oracle_equivalence(request):
    with criterion(request, "4", "oracle scan passes on 100 random specs, 256x256", budget=120.0) as notes:
        failed, positives = [], 0
        for k, spec in enumerate(random_corpus(1, 100)):
            _, ls = classify(spec)
            iso = [p.z for p in isolated_limits(spec)]
            scan = scan_oracle(spec, ls, default_grid(ls, special_points(spec, iso), n=256), iso)
            positives += scan.oracle_positive
            if not scan.passed:
                failed.append(k)
        notes.append(f"{positives} oracle-positive points, failures {failed}")
        assert not failed


def test_criterion_5_identities(request):
    with criterion(request, "5", "exact and pointwise identities on the corpus", budget=30.0) as notes:
        corpus = random_corpus(1, 100)
        exercised = 0
        for spec in corpus:
            # by hand from the coefficients, independent of the classifier's bookkeeping
            a, b, c, d, e = spec.a, spec.b, spec.c, spec.d, spec.e
            x_A = -b / a
            B_xA = c * x_A**2 + d * x_A + e
            lead, mid, const = a * a + 4 * c, 2 * a * b + 4 * d, b * b + 4 * e
            DD = mid * mid - 4 * lead * const
            assert DD == 16 * ((d * d - 4 * c * e) - a * a * B_xA)
            s = classification_scalars(spec)
            assert s.Delta_Delta == DD
            Bp = 2 * c * x_A + d
            if lead != 0 and Bp != 0:
                x_C = x_A - 2 * B_xA / Bp
                x_D = -(a * b + 2 * d) / lead
                assert (x_A - x_C) * (x_A - x_D) == 4 * B_xA / lead
                exercised += 1
        result = identity_suite(1, 100, points=50)
        notes.append(f"{result.checked} specs, C-identity exercised on {exercised}, {len(result.failures)} failures")
        assert result.passed


def test_criterion_6_convergence(request):
    with criterion(request, "6", "ladder zeros approach the limit set", budget=30.0) as notes:
        rep = convergence_report(load_fixture("ladder"), [6, 24])
        first, last = rep.per_n
        notes.append(f"max_dist {first.max_dist:.4f} -> {last.max_dist:.4f}, mean at 24 {last.mean_dist:.4f}")
        assert last.max_dist < first.max_dist
        assert last.mean_dist < 0.05


def test_criterion_7_stability(request):
    with criterion(request, "7", "necessary stability conditions", budget=1.0) as notes:
        line = make_spec(2, 0, -1, 0, -1)
        # Delta = (2z)^2 + 4(-z^2 - 1) = -4: a negative constant, and Delta(x_A) = -4 < 0
        assert discriminant(line) == RatPoly([-4])
        assert stability_necessary(line).real_rooted_necessary

        ladder = load_fixture("ladder")
        # Delta = 80z^2 + 16z + 4; its discriminant 16^2 - 4*80*4 = -1024 < 0 and
        # Delta(-1/2) = 4 - 8 + 20 = 16 > 0, so real-rootedness is ruled out
        assert eval_rational(discriminant(ladder), Fraction(-1, 2)) == 16
        assert 16**2 - 4 * 80 * 4 == -1024
        # Schur: lead 80 > 0, |x_A| = 1/2 <= 1, |x_Delta|^2 = 4/80 = 1/20 <= 1
        rep = stability_necessary(ladder)
        assert not rep.real_rooted_necessary
        assert rep.schur_necessary
        notes.append(rep.details)


@pytest.mark.parametrize("argv", [["classify", LADDER], ["roots", LADDER, "--n", "12"], ["plot", LADDER, "--n", "6"]])
def test_criterion_8_determinism(request, tmp_path, argv):
    key = "8"
    outputs = []
    for run in range(2):
        cmd = [sys.executable, "-m", "zerolimits", *argv]
        if argv[0] == "plot":
            cmd += ["-o", str(tmp_path / f"{run}.svg")]
        res = subprocess.run(cmd, capture_output=True)
        assert res.returncode == 0, res.stderr
        outputs.append(res.stdout if argv[0] != "plot" else (tmp_path / f"{run}.svg").read_bytes())
    same = outputs[0] == outputs[1]
    stash = request.config.stash[ACCEPTANCE_KEY]
    prev = stash.get(key, (True, "", "", 0.0))
    ok = prev[0] and same
    note = (prev[2] + "; " if prev[2] else "") + f"{argv[0]} {'identical' if same else 'DIFFERS'}"
    stash[key] = (ok, "classify/roots/plot byte-identical across runs", note, prev[3])
    print(f"\ncriterion 8 ({argv[0]}): {'PASS' if same else 'FAIL'}")
    assert same
    if argv[0] == "classify":
        json.loads(outputs[0])
