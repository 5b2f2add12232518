import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from efetlab.errors import ConvergenceError, DomainError, EvaluationError
from efetlab.mpcore import (PrecisionContext, bessel_i, circle_quadrature, circle_quadrature_adaptive,
                            gauss_legendre, log_gamma, segment_quadrature)

CTX = PrecisionContext(128)


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


class TestPrecisionContext:
    def test_rejects_low_precision(self):
        with pytest.raises(DomainError):
            PrecisionContext(32)

    @given(st.integers(64, 2000))
    def test_tol_decreases(self, bits):
        assert PrecisionContext(bits + 1).tol() < PrecisionContext(bits).tol()

    def test_tol_value(self):
        assert PrecisionContext(128).tol() == mpmath.mpf(2) ** -64


class TestLogGamma:
    def test_one(self):
        assert abs(log_gamma(1, CTX)) < CTX.eps() * 256

    def test_half(self):
        # Gamma(1/2) = sqrt(pi)
        with mpmath.workprec(200):
            oracle = mpmath.log(mpmath.pi) / 2
        assert close(log_gamma(0.5, CTX), oracle, 1e-36)
        assert abs(float(log_gamma(0.5, CTX).real) - 0.57236494) < 1e-8

    def test_stirling_form(self):
        # |Gamma(20.5)|^2 against 20^40 e^-40 2 pi
        lg = log_gamma(20.5, CTX).real
        ratio = mpmath.exp(2 * lg - (40 * mpmath.log(20) - 40 + mpmath.log(2 * mpmath.pi)))
        assert abs(ratio - 1) < 0.005

    @given(st.floats(-30, 30), st.floats(-30, 30))
    def test_matches_mpmath(self, x, y):
        s = complex(x, y)
        if y == 0 and x <= 0 and x == math.floor(x):
            return
        if abs(s) < 1e-3:
            return
        with mpmath.workprec(200):
            oracle = mpmath.loggamma(mpmath.mpc(x, y))
        value = log_gamma(s, CTX)
        assert abs(value - oracle) <= abs(oracle) * mpmath.mpf(2) ** -120 + mpmath.mpf(2) ** -118

    @given(st.floats(1, 30), st.floats(-30, 30))
    def test_recurrence(self, x, y):
        s = CTX.mp.mpc(x, y)
        gap = log_gamma(s + 1, CTX) - log_gamma(s, CTX) - CTX.mp.log(s)
        # branches may differ by 2 pi i
        k = round(float(gap.imag) / (2 * math.pi))
        assert abs(gap - 2j * math.pi * k) < CTX.tol()

    @pytest.mark.parametrize("s", [0, -1, -7])
    def test_poles(self, s):
        with pytest.raises(DomainError):
            log_gamma(s, CTX)


class TestCircleQuadrature:
    def test_residue(self):
        assert close(circle_quadrature(lambda z: 1 / z, 0, 1, 64, CTX), 1, 1e-30)

    def test_analytic(self):
        assert close(circle_quadrature(lambda z: z * z, 0, 1, 64, CTX), 0, 1e-30)

    def test_shifted_pole(self):
        assert close(circle_quadrature(lambda z: 1 / (z - 0.3), 0, 1, 64, CTX), 1, CTX.tol())

    @pytest.mark.parametrize("k", range(9))
    def test_monomials(self, k):
        assert close(circle_quadrature(lambda z: z**k, 0, 1, 64, CTX), 0, CTX.tol())

    def test_guards(self):
        with pytest.raises(DomainError):
            circle_quadrature(lambda z: z, 0, 1, 4, CTX)
        with pytest.raises(DomainError):
            circle_quadrature(lambda z: z, 0, 0, 64, CTX)

    def test_nonfinite_sample_reports_node(self):
        mp = CTX.mp
        with pytest.raises(EvaluationError):
            circle_quadrature(lambda z: mp.inf if abs(z - 1) < 1e-20 else z, 0, 1, 64, CTX)

    @given(st.complex_numbers(max_magnitude=0.9))
    def test_cauchy_formula(self, a):
        # (1/2 pi i) oint e^z / (z - a) dz = e^a
        mp = CTX.mp
        res = circle_quadrature_adaptive(lambda z: mp.exp(z) / (z - a), 0, 1, CTX)
        with mpmath.workprec(160):
            oracle = mpmath.exp(mpmath.mpc(a))
        assert abs(res.value - oracle) < 1e-25

    def test_adaptive_failure(self):
        # an essential singularity on the contour never converges
        mp = CTX.mp
        with pytest.raises(ConvergenceError):
            circle_quadrature_adaptive(lambda z: mp.exp(1 / (z - 1 + mp.mpf(2) ** -60)), 0, 1, CTX,
                                       max_nodes=256)


class TestSegmentQuadrature:
    def test_linear(self):
        assert close(segment_quadrature(lambda x: x, 0, 1, CTX), 0.5, 1e-35)

    def test_truncated_exponential(self):
        value = segment_quadrature(lambda u: CTX.mp.exp(-u), 0, 40, CTX)
        assert close(value, 1 - math.exp(-40), 2.0**-50)

    def test_complex_path(self):
        value = segment_quadrature(lambda w: CTX.mp.exp(w), 0, 1j * CTX.mp.pi, CTX)
        assert close(value, -2, 1e-30)

    def test_gauss_legendre_exactness(self):
        nodes, weights = gauss_legendre(10, 160)
        # 10 points integrate x^18 exactly: 2/19
        with mpmath.workprec(160):
            total = mpmath.fsum(w * x**18 for x, w in zip(nodes, weights))
            assert abs(total - mpmath.mpf(2) / 19) < 1e-40

    @given(st.floats(0.1, 5), st.floats(0.1, 5))
    def test_against_mpmath_quad(self, a, b):
        mp = CTX.mp
        f = lambda t: mp.cos(a * t) * mp.exp(-b * t)
        with mpmath.workprec(160):
            oracle = mpmath.quad(lambda t: mpmath.cos(a * t) * mpmath.exp(-b * t), [0, 1, 3])
        assert abs(segment_quadrature(f, 0, 3, CTX) - oracle) < 1e-30

    def test_nonconvergence(self):
        mp = CTX.mp
        with pytest.raises(ConvergenceError):
            segment_quadrature(lambda x: mp.sin(1 / x) / x, mp.mpf(2) ** -40, 1, CTX, max_depth=3)


class TestBessel:
    def test_zero(self):
        assert bessel_i(0, 0, CTX) == 1

    def test_values(self):
        assert abs(float(bessel_i(0, 2, CTX)) - 2.2795853) < 1e-7
        assert abs(float(bessel_i(1, 2, CTX)) - 1.5906369) < 1e-7

    @given(st.integers(0, 10), st.floats(0, 30))
    def test_matches_mpmath(self, h, x):
        with mpmath.workprec(200):
            oracle = mpmath.besseli(h, x)
        assert abs(bessel_i(h, x, CTX) - oracle) <= CTX.tol() * max(1, abs(oracle))

    @given(st.integers(0, 8), st.floats(0, 20))
    def test_precision_doubling(self, h, x):
        lo = bessel_i(h, x, CTX)
        hi = bessel_i(h, x, CTX.with_precision(256))
        assert abs(lo - hi) <= CTX.tol() * max(1, abs(hi))

    def test_negative_order(self):
        with pytest.raises(DomainError):
            bessel_i(-1, 1, CTX)
