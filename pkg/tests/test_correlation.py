import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from efetlab.correlation import (SemiDisk, corr_contour, corr_series, corr_sharp, interp_g, k_phi, pi_h_product,
                                 quadratic_ratio_check, ratio_diagnostics)
from efetlab.errors import DomainError, EvaluationError
from efetlab.mpcore import PrecisionContext, bessel_i
from efetlab.sequences import catalogue, constant, quadratic_phase, random_unimodular
from efetlab.taylor import TaylorFunction

CTX = PrecisionContext(128)
ONE = TaylorFunction(constant(1, 1), CTX)


def sinc_series(h, lam, r, bits=400):
    """g_h(lam) for omega == 1 as sum_n Gamma(lam+1)Gamma(lam+h+1)/(n!(n+h)!) r^{2(n-lam)} sinc(pi(n-lam))."""
    with mpmath.workprec(bits):
        lam = mpmath.mpc(lam)
        r = mpmath.mpf(r)
        pre = mpmath.gamma(lam + 1) * mpmath.gamma(lam + h + 1)
        total = mpmath.mpc(0)
        for n in range(int(4 * r) + 60):
            d = n - lam
            total += r ** (2 * d) * mpmath.sinpi(d) / (mpmath.pi * d) / (mpmath.factorial(n) * mpmath.factorial(n + h))
        return complex(pre * total)


class TestSeries:
    def test_bessel_h0(self):
        assert abs(corr_series(ONE, 0, 1) - bessel_i(0, 2, CTX)) < 1e-35

    def test_origin_only_first_term(self):
        F = TaylorFunction(random_unimodular(3), CTX)
        mp = CTX.mp
        expected = F.seq.value(0, mp) * mp.conj(F.seq.value(5, mp)) / 120
        assert abs(corr_series(F, 5, 0) - expected) < 1e-38

    def test_bessel_h1(self):
        # sum 2^{2n}/(n!(n+1)!) = I_1(4)/2
        assert abs(corr_series(ONE, 1, 2) - bessel_i(1, 4, CTX) / 2) < 1e-33

    def test_sharp_bessel(self):
        assert abs(corr_sharp(ONE, 0, 1) - bessel_i(0, 2, CTX)) < 1e-35
        assert abs(corr_sharp(ONE, 2, 4) - bessel_i(2, 4, CTX) / 4) < 1e-35

    @given(st.floats(0.01, 6), st.integers(0, 10))
    def test_sharp_is_series_of_square(self, x, h):
        F = TaylorFunction(quadratic_phase("1/5"), CTX)
        a, ea = corr_sharp(F, h, CTX.mp.mpf(x) ** 2, full_output=True)
        b, eb = corr_series(F, h, x, full_output=True)
        assert abs(a - b) <= 10 * (ea + eb) + 1e-35 * max(1, abs(a))

    @given(st.integers(0, 6), st.floats(1, 30), st.floats(-math.pi, math.pi))
    def test_envelope_for_exponential(self, h, r, theta):
        R = 30
        value = corr_series(ONE, h, r * cmath.exp(1j * theta))
        assert abs(value) <= r ** (-h) * math.exp(2 * r * abs(math.cos(theta)) + 0.01 * R)

    def test_negative_h(self):
        with pytest.raises(DomainError):
            corr_series(ONE, -1, 1)


class TestContour:
    def test_matches_series_exponential(self):
        a = corr_contour(ONE, 1, 2)
        assert abs(a - corr_series(ONE, 1, 2)) < 10 * CTX.tol()

    def test_random_sequence(self):
        F = TaylorFunction(random_unimodular(1), CTX)
        assert abs(corr_contour(F, 3, 1 + 1j) - corr_series(F, 3, 1 + 1j)) < 10 * CTX.tol()

    def test_origin_guard(self):
        with pytest.raises(DomainError):
            corr_contour(ONE, 3, 0)

    @given(st.sampled_from(sorted(catalogue())), st.integers(0, 10),
           st.complex_numbers(max_magnitude=5).filter(lambda z: abs(z) > 1e-3))
    def test_cross_representation(self, name, h, z):
        F = TaylorFunction(catalogue()[name], CTX)
        a, ea = corr_series(F, h, z, full_output=True)
        b, eb = corr_contour(F, h, z, full_output=True)
        assert abs(a - b) <= 10 * (ea + eb)


class TestInterpolation:
    def test_exponential_integer(self):
        F = TaylorFunction(constant(1, 1), PrecisionContext(256))
        assert abs(interp_g(F, 0, 5, 40) - 1) < 1e-10

    def test_quadratic_phase_value(self):
        F = TaylorFunction(quadratic_phase("1/5"), CTX)
        g = complex(interp_g(F, 1, 3, 40))
        assert abs(g - complex(-0.80902, -0.58779)) < 1e-5
        assert abs(interp_g(F, 1, 3, 40) - CTX.mp.expjpi(CTX.mp.mpf(2 * (9 - 16)) / 5)) < 1e-20

    @pytest.mark.parametrize("h,lam", [(0, 2.5), (1, 0.5 + 0.75j), (2, -1.5), (3, 4.25)])
    def test_sinc_series_oracle(self, h, lam):
        R = 12
        r = R - (h // 2 + 0.5)
        assert abs(complex(interp_g(ONE, h, lam, R)) - sinc_series(h, lam, r)) < 1e-20

    @given(st.integers(0, 4), st.integers(0, 12))
    def test_integer_identity(self, h, n):
        F = TaylorFunction(random_unimodular(11), CTX)
        mp = CTX.mp
        target = F.seq.value(n, mp) * mp.conj(F.seq.value(n + h, mp))
        assert abs(interp_g(F, h, n, 20) - target) < 1e-15

    @pytest.mark.parametrize("h,lam,R", [(1, -2, 40), (0, -1, 40), (2, -3.5, 40), (-1, 0, 40), (5, 0, 4),
                                         (0, 0, 1.2)])
    def test_guards(self, h, lam, R):
        with pytest.raises(DomainError):
            interp_g(ONE, h, lam, R)

    def test_ratio_diagnostics_on_interpolant(self):
        F = TaylorFunction(quadratic_phase("1/5"), CTX)
        d1, d2, d3 = ratio_diagnostics(lambda s: interp_g(F, 1, s, 40), (5, 15))
        assert d3 < 1e-3 and d1 < 1e-10


class TestAuxiliary:
    def test_semidisk(self):
        for h in range(0, 11):
            for R in (5, 12.5, 40):
                disk = SemiDisk(h, R)
                assert disk.kappa == h // 2 + 0.5
                for n in range(0, 60):
                    if n + disk.kappa < R - disk.kappa:
                        assert n in disk

    @pytest.mark.parametrize("h", [0, 1])
    def test_pi_h_empty(self, h):
        assert pi_h_product(2 + 3j, h) == 1

    @given(st.floats(-50, 50))
    def test_pi_h_unimodular_on_axis(self, t):
        assert abs(abs(pi_h_product(1j * t, 8)) - 1) < 1e-30

    def test_pi_h_pole(self):
        with pytest.raises(DomainError):
            pi_h_product(0.5, 2)

    @given(st.integers(0, 20), st.floats(-math.pi / 2, math.pi / 2))
    def test_pi_h_arc_bound(self, h, phi):
        R = 40
        if h > R / 2:
            return
        rk = R - (h // 2 + 0.5)
        assert abs(pi_h_product(rk * cmath.exp(1j * phi), h)) <= math.exp(2 * h * h / rk)

    def test_k_phi_values(self):
        assert k_phi(0) == 1
        assert abs(k_phi(math.pi / 2) - math.pi / 2) < 1e-15
        with pytest.raises(DomainError):
            k_phi(2)

    def test_k_phi_maximum(self):
        t = np.arange(-math.pi, math.pi, 1e-4)
        assert abs(np.max(2 * np.cos(t / 2) + t * math.sin(0.7)) - 2 * k_phi(0.7)) < 1e-6

    def test_ratio_diagnostics_examples(self):
        assert ratio_diagnostics(lambda s: 1, (0, 5)) == (0, 0, 0)
        d1, d2, d3 = ratio_diagnostics(lambda s: cmath.exp(1j * s / 10), (0, 10))
        assert d1 < 1e-15 and abs(d2 - abs(cmath.exp(0.1j) - 1)) < 1e-12 and d3 < 1e-14
        assert abs(d2 - 0.09996) < 1e-5

    def test_ratio_diagnostics_zero(self):
        with pytest.raises(EvaluationError):
            ratio_diagnostics(lambda s: s - 3, (0, 5))

    def test_quadratic_ratio(self):
        assert quadratic_ratio_check(0, 0, 0, 1, range(50)) == 0
        assert quadratic_ratio_check("1/4", 0, 0, 1, range(50)) < 10 * CTX.tol()
        assert quadratic_ratio_check("1/2", 0, 0, 3, range(50)) < 10 * CTX.tol()

    @given(st.fractions(0, 1).filter(lambda f: f < 1), st.fractions(0, 1).filter(lambda f: f < 1),
           st.integers(1, 12))
    def test_quadratic_ratio_property(self, beta, gamma, d):
        assert quadratic_ratio_check(beta, gamma, "1/3", d, range(0, 40, 3)) < 10 * CTX.tol()
