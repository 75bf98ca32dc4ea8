from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerolimits import rootfind
from zerolimits.exactpoly import RatPoly, ZeroPolynomial, from_roots
from zerolimits.harness import random_corpus
from zerolimits.recurrence import compute_g, nth_poly
from zerolimits.rootfind import (
    RootFindOptions,
    find_roots,
    initial_circle,
    scaled_residual,
    starting_radius,
)
from zerolimits.spectra import discriminant

from .oracles import companion_roots, match_distance

small = st.fractions(min_value=-9, max_value=9, max_denominator=6)
polys = st.lists(small, min_size=2, max_size=12).map(RatPoly).filter(lambda p: p.degree >= 1)

BACKENDS = ["python"] + (["cython"] if rootfind.BACKEND == "cython" else [])


def P(*cs) -> RatPoly:
    return RatPoly([Fraction(c) for c in cs])


def conj_closed(roots, tol=1e-6) -> bool:
    left = list(roots)
    for z in roots:
        k = min(range(len(left)), key=lambda i: abs(left[i] - z.conjugate()))
        if abs(left[k] - z.conjugate()) > tol * (1 + abs(z)):
            return False
        left.pop(k)
    return True


class TestInitialCircle:
    def test_difference_of_squares(self):
        assert initial_circle(P(-1, 0, 1)) == (0j, 2.0)

    def test_sum_of_squares(self):
        assert initial_circle(P(1, 0, 1)) == (0j, 2.0)

    def test_ladder_discriminant(self):
        center, radius = initial_circle(P(1, 4, 20))
        assert center == pytest.approx(-0.1)
        assert radius == pytest.approx(1.2)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            initial_circle(P(3))

    def test_starting_radius_is_geometric_mean(self):
        p = from_roots([Fraction(1), Fraction(-3), Fraction(5)])  # center 1, distances 0, 4, 4
        assert starting_radius(p) <= initial_circle(p)[1]
        q = from_roots([Fraction(2), Fraction(-2)])  # center 0, distances 2, 2
        assert starting_radius(q) == pytest.approx(2.0)


class TestFindRoots:
    def test_unit_quadratic(self):
        rs = find_roots(P(1, 0, 1))
        assert rs.roots == [-1j, 1j]
        assert max(rs.residuals) < 1e-14
        assert rs.converged

    def test_ladder_discriminant(self, ladder):
        rs = find_roots(discriminant(ladder))
        want = [complex(-0.1, -0.2), complex(-0.1, 0.2)]
        assert all(abs(a - b) < 1e-12 for a, b in zip(rs.roots, want))

    def test_ladder_g(self, ladder):
        rs = find_roots(compute_g(ladder))
        assert rs.roots == [-0.5, 0, 0, 1]
        assert rs.multiplicities == [1, 2, 2, 1]
        assert rs.residuals[1:3] == [0.0, 0.0]

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            find_roots(P())

    def test_constant_has_no_roots(self):
        rs = find_roots(P(5))
        assert len(rs) == 0 and rs.converged

    def test_linear_is_exact(self):
        rs = find_roots(P(1, 3))
        assert rs.roots == [complex(-1 / 3)]

    def test_sorted(self, ladder):
        roots = find_roots(nth_poly(ladder, 15)).roots
        assert roots == sorted(roots, key=lambda z: (z.real, z.imag))

    def test_high_degree_ladder(self, ladder):
        W = nth_poly(ladder, 120)
        rs = find_roots(W)
        assert rs.converged and len(rs) == W.degree
        assert max(rs.residuals) < 1e-8

    def test_huge_coefficient_range_uses_extended_iteration(self):
        p = P(Fraction(1, 10**400), 0, 1) * P(-1, 1)  # z^2 + 1e-400 has roots +-1e-200 i
        rs = find_roots(p)
        assert rs.converged
        assert sorted(abs(z) for z in rs.roots)[:2] == pytest.approx([1e-200, 1e-200], rel=1e-9)

    def test_non_convergence_is_reported_not_raised(self, ladder):
        rs = find_roots(nth_poly(ladder, 40), RootFindOptions(max_iter=1))
        assert not rs.converged
        assert len(rs) == nth_poly(ladder, 40).degree

    @given(polys)
    def test_residual_certificate(self, p):
        rs = find_roots(p)
        if rs.converged:
            assert all(r < 1e-8 for r in rs.residuals)
        for z, r in zip(rs.roots, rs.residuals):
            assert r == scaled_residual(p, z)

    @given(polys)
    def test_matches_companion_matrix(self, p):
        ours = find_roots(p).roots
        theirs = companion_roots(p.coeffs)
        # clusters of multiple roots are ill-conditioned for both methods
        tol = 1e-6 if len({round(z.real, 3) + 1j * round(z.imag, 3) for z in ours}) == len(ours) else 1e-2
        assert match_distance(ours, theirs) < tol * (1 + max(abs(z) for z in ours))

    @given(polys)
    def test_conjugate_closed(self, p):
        assert conj_closed(find_roots(p).roots)

    @given(polys)
    def test_deterministic(self, p):
        assert find_roots(p) == find_roots(p)

    def test_reconstruction(self):
        for spec in random_corpus(2, 10):
            W = nth_poly(spec, 8)
            if W.degree < 1 or W.degree > 30:
                continue
            rs = find_roots(W)
            rebuilt = np.poly(rs.roots)[::-1] * float(W.lead)
            want = np.array([float(c) for c in W.coeffs])
            scale = np.max(np.abs(want))
            assert np.max(np.abs(rebuilt - want)) <= 1e-6 * scale


@pytest.mark.parametrize("backend", BACKENDS)
def test_backend_ladder(backend, ladder):
    rs = find_roots(nth_poly(ladder, 30), RootFindOptions(backend=backend))
    assert rs.converged and max(rs.residuals) < 1e-8


@pytest.mark.skipif(rootfind.BACKEND != "cython", reason="compiled kernel not built")
@given(polys)
def test_backends_agree(p):
    a = find_roots(p, RootFindOptions(backend="python"))
    b = find_roots(p, RootFindOptions(backend="cython"))
    assert a.iterations == b.iterations
    assert match_distance(a.roots, b.roots) <= 1e-9 * (1 + max(abs(z) for z in a.roots))


def test_ill_conditioned_matches_high_precision_reference():
    # condition numbers here reach ~2**205, past the default working precision;
    # a double-precision stop would leave roots more than a unit off
    import mpmath

    W = nth_poly(random_corpus(1, 25)[1], 64)
    ours = find_roots(W).roots
    with mpmath.workprec(600):
        ref = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(W.coeffs)],
                               maxsteps=400, extraprec=600)
        ref = [complex(r) for r in ref]
    assert match_distance(ours, ref) < 1e-9
