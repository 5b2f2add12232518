import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from efetlab.errors import PrecisionError, ProximityError
from efetlab.mpcore import PrecisionContext
from efetlab.sequences import (catalogue, constant, cos_sqrt_plus2, cosine_oracle, explicit, expm1_oracle,
                               quadratic_phase, random_unimodular)
from efetlab.taylor import TaylorFunction, taylor, truncation_order

CTX = PrecisionContext(128)


def F_of(seq, bits=128):
    return TaylorFunction(seq, PrecisionContext(bits))


def scan_order(R, bits, C=1.0):
    """Independent scan of the tail bound with exact rational-free mpmath arithmetic."""
    with mpmath.workprec(200):
        target = mpmath.mpf(2) ** -(bits + 8)
        N = 0
        while True:
            if N + 2 > 2 * R:
                tail = C * mpmath.mpf(R) ** (N + 1) / mpmath.factorial(N + 1) / (1 - mpmath.mpf(R) / (N + 2))
                if tail <= target:
                    return N
            N += 1


class TestTruncationOrder:
    def test_zero_radius(self):
        assert truncation_order(0, 128) == 0

    @pytest.mark.parametrize("R,bits", [(1, 53), (1, 128), (10, 64), (37.5, 256), (0.01, 64)])
    def test_matches_scan(self, R, bits):
        assert truncation_order(R, bits) == scan_order(R, bits)

    @given(st.floats(0, 60), st.floats(0, 60), st.integers(64, 512))
    def test_monotone_in_radius(self, a, b, bits):
        lo, hi = sorted((a, b))
        assert truncation_order(lo, bits) <= truncation_order(hi, bits)

    @given(st.floats(0, 60), st.integers(64, 512), st.integers(0, 256))
    def test_monotone_in_precision(self, R, bits, extra):
        assert truncation_order(R, bits) <= truncation_order(R, bits + extra)


class TestEval:
    def test_origin_exact(self):
        for seq in catalogue().values():
            assert F_of(seq)(0) == seq.value(0, CTX.mp)

    def test_exponential(self):
        value, err = F_of(constant(1, 1)).eval(1)
        assert abs(value - CTX.mp.e) < 1e-35 and err < 1e-35

    def test_cosine_zero(self):
        F = F_of(cosine_oracle())
        value, err = F.eval(CTX.mp.pi / 2)
        assert abs(value) <= err + CTX.eps() * 4

    def test_relative_guard(self):
        # e^z - 1 vanishes exactly at the origin
        with pytest.raises(PrecisionError):
            F_of(expm1_oracle()).eval(0, relative=True)

    def test_cos_sqrt_bruteforce(self):
        with mpmath.workprec(256):
            oracle = mpmath.fsum((mpmath.cos(mpmath.sqrt(n)) + 2) / mpmath.factorial(n) for n in range(120))
        assert abs(F_of(cos_sqrt_plus2())(1) - oracle) < 1e-36

    def test_explicit_polynomial(self):
        F = F_of(explicit([1, 2, -1, 0.5j, 3]))
        z = 0.7 - 0.2j
        oracle = 1 + 2 * z - z**2 / 2 + 0.5j * z**3 / 6 + 3 * z**4 / 24
        value, err = F.eval(z)
        assert err == 0 or err < 1e-30
        assert abs(complex(value) - oracle) < 1e-14

    @given(st.complex_numbers(max_magnitude=30), st.sampled_from(["constant", "quadratic_phase", "random_unimodular",
                                                                  "cos_sqrt_plus2", "masked", "cosine_oracle"]))
    def test_precision_doubling(self, z, name):
        seq = catalogue()[name]
        lo, err = F_of(seq, 128).eval(z)
        hi, _ = F_of(seq, 256).eval(z)
        assert abs(lo - hi) <= err

    @given(st.complex_numbers(max_magnitude=30), st.complex_numbers(max_magnitude=2).filter(lambda t: abs(t) > 0),
           st.floats(-1, 1))
    def test_constant_sequence(self, z, theta, alpha):
        F = F_of(constant(theta, alpha))
        value, err = F.eval(z)
        with mpmath.workprec(200):
            oracle = mpmath.mpc(theta) * mpmath.exp(mpmath.mpf(alpha) * mpmath.mpc(z))
        assert abs(value - oracle) <= err + abs(oracle) * 2.0**-120

    def test_star_conjugates(self):
        F = F_of(random_unimodular(5))
        z = 1.3 + 0.4j
        assert abs(F.star()(z) - CTX.mp.conj(F(z.conjugate()))) < 1e-35


class TestLogDerivative:
    @given(st.complex_numbers(max_magnitude=20))
    def test_exponential(self, z):
        assert abs(F_of(constant(1, 1)).log_derivative(z) - 1) < 1e-30

    def test_cosine(self):
        assert abs(complex(F_of(cosine_oracle()).log_derivative(1)) + math.tan(1)) < 1e-14

    def test_cosine_zero(self):
        with pytest.raises(ProximityError):
            F_of(cosine_oracle()).log_derivative(CTX.mp.pi / 2)

    @given(st.complex_numbers(max_magnitude=8), st.sampled_from(["quadratic_phase", "random_unimodular",
                                                                 "cos_sqrt_plus2"]))
    def test_finite_difference(self, z, name):
        F = F_of(catalogue()[name])
        mp = CTX.mp
        f0 = F(z)
        if abs(f0) < 1e-6:
            return
        eps = mp.mpf(2) ** (-128 // 3)
        fd = (mp.log(F(z + eps)) - mp.log(F(z - eps))) / (2 * eps)
        fd -= 2j * mp.pi * round(float(fd.imag * eps / mp.pi)) / (2 * eps)
        assert abs(F.log_derivative(z) - fd) < 10 * CTX.tol() * max(1, abs(fd)) / abs(f0) * 1e3


class TestGrowthBounds:
    def test_max_modulus_exponential(self):
        assert abs(F_of(constant(1, 1)).max_modulus(10) / mpmath.exp(10) - 1) < 1e-6

    def test_max_modulus_half_phase(self):
        # exp(pi i n^2) = (-1)^n, so F = exp(-z)
        assert abs(F_of(quadratic_phase("1/2")).max_modulus(10) / mpmath.exp(10) - 1) < 1e-6

    def test_max_modulus_cos_sqrt(self):
        R = 20
        M = F_of(cos_sqrt_plus2()).max_modulus(R)
        assert math.exp(R - 0.5 * math.log(R) - 3) <= M <= 3 * math.exp(R)

    def test_parseval_origin(self):
        assert F_of(constant(1, 1)).parseval_lower(0) == 0

    def test_parseval_bessel(self):
        from efetlab.mpcore import bessel_i

        value = F_of(constant(1, 1)).parseval_lower(10)
        assert abs(value - CTX.mp.log(bessel_i(0, 20, CTX)) / 2) < 1e-30
        assert abs(float(value) - 8.79) < 0.01

    @pytest.mark.parametrize("seq", [quadratic_phase("1/5"), random_unimodular(1), constant(1, 1)])
    def test_parseval_below_max(self, seq):
        F = F_of(seq)
        assert F.parseval_lower(25) <= mpmath.log(F.max_modulus(25)) + 1e-6

    @pytest.mark.parametrize("seq", [quadratic_phase("1/5"), quadratic_phase("1/3"), random_unimodular(1),
                                     random_unimodular(7), constant(1, 1)])
    @pytest.mark.parametrize("R", [10, 20, 40])
    def test_parseval_lower_bound(self, seq, R):
        assert F_of(seq).parseval_lower(R) >= R - 0.5 * math.log(R) - 3


def test_taylor_helper():
    F = taylor(constant(1, 1), 192)
    assert F.ctx.precision_bits == 192
