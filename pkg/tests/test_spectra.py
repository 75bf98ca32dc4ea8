import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from zerolimits.exactpoly import RatPoly
from zerolimits.harness import check_binet, random_corpus
from zerolimits.recurrence import nth_poly
from zerolimits.spectra import (
    AVanishes,
    DeltaVanishes,
    alpha_pm,
    discriminant,
    f_value,
    membership_residual,
    principal_sqrt,
    principal_sqrt_grid,
    residual_grid,
    spectral_grid,
    spectral_point,
)

from .conftest import make_spec

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
points = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def P(*cs) -> RatPoly:
    return RatPoly([Fraction(c) for c in cs])


class TestDiscriminant:
    def test_ladder(self, ladder):
        assert discriminant(ladder) == P(4, 16, 80)

    def test_identically_zero(self):
        assert discriminant(make_spec(2, 0, -1, 0, 0)).is_zero

    def test_hand_formula(self):
        assert discriminant(make_spec(1, 0, -1, 0, 1)) == P(4, 0, -3)

    def test_equals_A_squared_plus_4B(self):
        for spec in random_corpus(3, 20):
            assert discriminant(spec) == spec.A * spec.A + 4 * spec.B


class TestPrincipalSqrt:
    def test_positive_real(self):
        assert principal_sqrt(4) == 2

    def test_branch_cut_maps_up(self):
        assert principal_sqrt(-1) == 1j
        assert principal_sqrt(complex(-4, 0.0)) == 2j
        assert principal_sqrt(complex(-4, -0.0)) == 2j
        assert principal_sqrt(complex(-4, 0.0).conjugate()) == 2j

    def test_zero(self):
        assert principal_sqrt(0j) == 0

    @given(finite, finite)
    def test_squares_back_and_right_half_plane(self, x, y):
        w = complex(x, y)
        s = principal_sqrt(w)
        assert s.real >= 0
        if s.real == 0:
            assert s.imag >= 0
        assert abs(s * s - w) <= 4e-16 * abs(w) + 1e-300

    @given(finite, finite)
    def test_matches_cmath_off_the_cut(self, x, y):
        assume(not (y == 0 and x < 0))
        assert cmath.isclose(principal_sqrt(complex(x, y)), cmath.sqrt(complex(x, y)), rel_tol=1e-14, abs_tol=1e-300)

    def test_grid_matches_scalar_bitwise(self):
        rng = np.random.default_rng(5)
        w = rng.normal(size=500) + 1j * rng.normal(size=500)
        w[:20] = -rng.random(20)  # on the cut
        w[20:30] = 0
        got = principal_sqrt_grid(w)
        want = np.array([principal_sqrt(complex(v)) for v in w])
        assert np.array_equal(got, want)


class TestSpectralPoint:
    def test_at_zero_of_A(self, ladder):
        sp = spectral_point(ladder, -0.5)
        assert sp.A_val == 0
        assert sp.lambda_plus == -sp.lambda_minus
        assert sp.residual == 0

    def test_at_zero_of_discriminant(self, ladder):
        sp = spectral_point(ladder, complex(-0.1, 0.2))
        assert abs(sp.Delta_val) < 1e-14
        assert sp.residual < 1e-7  # sqrt of rounding in Delta

    def test_at_one(self, ladder):
        sp = spectral_point(ladder, 1)
        assert (sp.A_val, sp.B_val, sp.Delta_val) == (6, 16, 100)
        assert (sp.lambda_plus, sp.lambda_minus) == (8, -2)
        assert sp.residual == 6
        assert membership_residual(ladder, 1) == 6

    @given(points)
    def test_vieta(self, z):
        for spec in random_corpus(4, 5):
            sp = spectral_point(spec, z)
            assert abs(sp.lambda_plus + sp.lambda_minus - sp.A_val) <= 1e-10 * (1 + abs(sp.A_val))
            assert abs(sp.lambda_plus * sp.lambda_minus + sp.B_val) <= 1e-10 * (1 + abs(sp.B_val))

    @given(points)
    def test_branch_swap_and_conjugation(self, z):
        for spec in random_corpus(4, 5):
            sp = spectral_point(spec, z)
            swapped = abs(abs((sp.A_val - sp.sqrt_Delta) / 2) - abs((sp.A_val + sp.sqrt_Delta) / 2))
            assert swapped == sp.residual
            other = spectral_point(spec, z.conjugate()).residual
            assert abs(other - sp.residual) <= 1e-12 * (1 + abs(sp.lambda_plus))

    def test_grid_matches_scalar(self, ladder):
        z = np.array([1, -0.5, 0.3 + 0.4j, -0.2 - 0.7j])
        A, B, D, lp, lm = spectral_grid(ladder, z)
        for k, v in enumerate(z):
            sp = spectral_point(ladder, complex(v))
            assert cmath.isclose(lp[k], sp.lambda_plus, abs_tol=1e-15)
            assert cmath.isclose(lm[k], sp.lambda_minus, abs_tol=1e-15)
        res, scale = residual_grid(ladder, z)
        assert res[0] == 6 and scale[0] == 8


class TestAlpha:
    def test_at_one(self, ladder):
        ap, am = alpha_pm(ladder, 1)
        assert ap == 2 and am == 0

    def test_zero_of_W0(self, ladder):
        ap, am = alpha_pm(ladder, -1)
        h = 2 * complex(2 - 6 + 8) - 0
        s = principal_sqrt(4 - 16 + 80)
        assert cmath.isclose(ap, h / (2 * s)) and cmath.isclose(am, -h / (2 * s))

    def test_vanishing_discriminant(self, ladder):
        with pytest.raises(DeltaVanishes):
            alpha_pm(ladder, complex(-0.1, 0.2))

    @given(points)
    def test_sum_is_W0(self, z):
        for spec in random_corpus(6, 5):
            try:
                ap, am = alpha_pm(spec, z)
            except DeltaVanishes:
                continue
            W0 = sum(float(c) * z**k for k, c in enumerate(spec.W0.coeffs))
            assert abs(ap + am - W0) <= 1e-9 * (abs(W0) + abs(ap) + abs(am))

    def test_closed_form_reconstruction(self):
        rng = random.Random(11)
        for spec in random_corpus(8, 20):
            assert check_binet(spec, rng) == []

    def test_closed_form_by_hand(self, ladder):
        z = 0.3 + 0.1j
        ap, am = alpha_pm(ladder, z)
        sp = spectral_point(ladder, z)
        for n in range(12):
            W = nth_poly(ladder, n)
            want = sum(float(c) * z**k for k, c in enumerate(W.coeffs))
            got = ap * sp.lambda_plus**n + am * sp.lambda_minus**n
            scale = abs(ap) * abs(sp.lambda_plus) ** n + abs(am) * abs(sp.lambda_minus) ** n
            assert abs(got - want) <= 1e-6 * scale


class TestF:
    def test_at_one(self, ladder):
        assert cmath.isclose(f_value(ladder, 1), 16 / 9)

    def test_real_negative_discriminant(self):
        spec = make_spec(1, 0, -1, 0, -1)  # Delta = -3z^2 - 4 < 0 on the real line
        for x in (-2.0, -0.3, 0.7, 5.0):
            f = f_value(spec, x)
            assert f.imag == 0 and f.real < -1

    def test_zero_of_A(self, ladder):
        with pytest.raises(AVanishes):
            f_value(ladder, -0.5)

    def test_equal_moduli_iff_f_below_minus_one(self):
        spec = make_spec(2, 0, -1, 0, -1)  # set of equal moduli is the real line
        for x in np.linspace(-3, 3, 13):
            if x == 0:
                continue
            f = f_value(spec, x)
            assert f.real < -1 and math.isclose(membership_residual(spec, x), 0, abs_tol=1e-12)
