"""Certified evaluation of F(z) = sum omega_n z^n / n!.

Truncation uses the sup bound over the closed disk |z| <= R, so one order
N serves a whole contour.  Evaluation runs with extra guard bits sized to
the worst-case cancellation (terms of size C e^{Q|z|} summing to values as
small as e^{-Q|z|}), which keeps the relative accuracy of F near the
requested precision even deep in the left half-plane.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace

from .errors import PrecisionError, ProximityError
from .kernels import from_gmpy, horner, horner_with_derivative, to_gmpy
from .mpcore import DEFAULT_CONTEXT, PrecisionContext, as_context, mp_context
from .sequences import CoefficientSequence

LOG2_E = math.log2(math.e)
MAX_MODULUS_GRID = 512


def _log2_tail(R: float, N: int, C: float) -> float:
    """log2 of C R^{N+1}/(N+1)! / (1 - R/(N+2)); requires N + 2 > R."""
    if R == 0:
        return -math.inf
    return (math.log2(C) + (N + 1) * math.log2(R) - math.lgamma(N + 2) * LOG2_E
            - math.log2(1 - R / (N + 2)))


def truncation_order(R: float, ctx=None, C_high: float = 1.0) -> int:
    """Smallest N with N + 2 > 2R whose geometric tail bound is below 2^-(p+8).

    ``ctx`` may be a :class:`PrecisionContext` or a bare bit count.  The
    bound C R^{N+1}/(N+1)! (1 - R/(N+2))^{-1} majorises the tail of
    sum C R^n/n!, hence |F(z) - partial sum| for every |z| <= R.
    """
    bits = ctx if isinstance(ctx, int) else as_context(ctx).precision_bits
    if R < 0:
        raise ValueError("truncation_order needs R >= 0")
    if R == 0 or C_high == 0:
        return 0
    target = -(bits + 8)
    N = max(0, math.floor(2 * R) - 1)
    while not (N + 2 > 2 * R and _log2_tail(R, N, C_high) <= target):
        N += 1
    return N


_coef_lock = threading.Lock()
_coef_cache: dict = {}


def _scaled_coefficients(seq: CoefficientSequence, conjugate: bool, N: int, mp):
    """[omega_n / n!] for n <= N in context ``mp`` (conjugated on request)."""
    key = (seq, conjugate, mp.prec)
    with _coef_lock:
        cached = _coef_cache.get(key)
    if cached is not None and len(cached) > N:
        return cached
    out = list(cached or [])
    fact = mp.factorial(len(out) - 1) if out else None
    for n in range(len(out), N + 1):
        fact = mp.mpf(1) if n == 0 else fact * n
        w = seq.value(n, mp)
        if conjugate:
            w = mp.conj(w)
        out.append(w / fact)
    with _coef_lock:
        current = _coef_cache.get(key)
        if current is None or len(current) < len(out):
            _coef_cache[key] = out
    return out


_gmpy_cache: dict = {}


def _gmpy_coefficients(seq: CoefficientSequence, conjugate: bool, N: int, mp):
    """The same coefficients as :func:`_scaled_coefficients`, as gmpy2 values."""
    key = (seq, conjugate, mp.prec)
    with _coef_lock:
        cached = _gmpy_cache.get(key)
    if cached is not None and len(cached) > N:
        return cached
    source = _scaled_coefficients(seq, conjugate, N, mp)
    out = list(cached or [])
    out.extend(to_gmpy(c, mp.prec) for c in source[len(out): N + 1])
    with _coef_lock:
        current = _gmpy_cache.get(key)
        if current is None or len(current) < len(out):
            _gmpy_cache[key] = out
    return out


@dataclass(frozen=True)
class TaylorFunction:
    """F(z) = sum omega_n z^n / n! for a coefficient sequence.

    ``conjugate=True`` represents F*(z) = conj(F(conj z)), i.e. the series
    with conjugated coefficients.
    """

    seq: CoefficientSequence
    ctx: PrecisionContext = DEFAULT_CONTEXT
    conjugate: bool = False

    def star(self) -> "TaylorFunction":
        return replace(self, conjugate=not self.conjugate)

    def with_precision(self, bits: int) -> "TaylorFunction":
        return replace(self, ctx=self.ctx.with_precision(bits))

    @property
    def C_high(self) -> float:
        return self.seq.C_high

    @property
    def growth(self) -> float:
        return self.seq.growth

    def cancellation_bits(self, r: float) -> float:
        return 2 * self.growth * float(r) * LOG2_E + max(0.0, math.log2(max(self.C_high, 1e-300))) + 8

    def working_context(self, r: float):
        return self.ctx.working(self.cancellation_bits(r))

    def order(self, r: float, bits: int) -> int:
        N = truncation_order(float(r) * self.growth, bits, self.C_high)
        if self.seq.length is not None:
            N = min(N, self.seq.length - 1)
        return N

    def _tail_bounds(self, r, N, mp):
        """Tail bounds for F and F' on |z| <= r when the series stops at N."""
        if self.seq.length is not None and N >= self.seq.length - 1:
            return mp.mpf(0), mp.mpf(0)
        C, Q = mp.mpf(self.C_high), mp.mpf(self.growth)
        x = Q * r
        if x == 0:
            return mp.mpf(0), mp.mpf(0)
        tail = C * x ** (N + 1) / mp.factorial(N + 1) / (1 - x / (N + 2))
        dtail = Q * C * x**N / mp.factorial(N) / (1 - x / (N + 1))
        return tail, dtail

    def eval_with_derivative(self, z):
        """Return ``(F(z), F'(z), err_F, err_F')`` with absolute error bounds."""
        r = abs(complex(z))
        mp = self.working_context(r)
        z = mp.mpc(z)
        r = abs(z)
        N = self.order(r, mp.prec)
        # one extra coefficient so the derivative is also complete through degree N
        top = N + 1 if self.seq.length is None else min(N + 1, self.seq.length - 1)
        coefs = _gmpy_coefficients(self.seq, self.conjugate, top, mp)
        q, dp = horner_with_derivative(coefs[: top + 1], to_gmpy(z, mp.prec), mp.prec)
        q, dp = from_gmpy(q, mp), from_gmpy(dp, mp)
        tail, dtail = self._tail_bounds(r, N, mp)
        scale = mp.mpf(self.C_high) * mp.exp(self.growth * r)
        rounding = (N + 2) * scale * mp.ldexp(1, -mp.prec)
        out = self.ctx.mp
        # the final rounding to the caller's precision is part of the bound
        last = mp.ldexp(1, 1 - out.prec)
        return (out.mpc(q), out.mpc(dp), out.mpf(tail + rounding + abs(q) * last),
                out.mpf(dtail + self.growth * rounding + abs(dp) * last))

    def eval(self, z, relative: bool = False):
        """Return ``(F(z), error_bound)``.

        With ``relative=True`` a value not distinguishable from its error
        bound raises :class:`PrecisionError`.
        """
        r = abs(complex(z))
        mp = self.working_context(r)
        z = mp.mpc(z)
        r = abs(z)
        N = self.order(r, mp.prec)
        coefs = _gmpy_coefficients(self.seq, self.conjugate, N, mp)
        q = from_gmpy(horner(coefs[: N + 1], to_gmpy(z, mp.prec), mp.prec), mp)
        tail, _ = self._tail_bounds(r, N, mp)
        rounding = (N + 2) * mp.mpf(self.C_high) * mp.exp(self.growth * r) * mp.ldexp(1, -mp.prec)
        out = self.ctx.mp
        err = tail + rounding + abs(q) * mp.ldexp(1, 1 - out.prec)
        if relative and abs(q) <= err:
            raise PrecisionError(f"|F(z)| below its error bound at z={complex(z)}; raise precision")
        return out.mpc(q), out.mpf(err)

    def __call__(self, z):
        return self.eval(z)[0]

    def derivative(self, z):
        return self.eval_with_derivative(z)[1]

    def log_derivative(self, z):
        """F'(z)/F(z); raises :class:`ProximityError` next to a zero of F."""
        f, df, err, _ = self.eval_with_derivative(z)
        mp = self.ctx.mp
        if abs(f) <= 16 * err or abs(f) <= self.ctx.tol() * abs(df) * (1 + abs(mp.mpc(z))):
            raise ProximityError(f"F is numerically zero near z={complex(z)}")
        return df / f

    def max_modulus(self, R):
        """Estimate of max |F| on |z| = R (grid of 512 plus golden-section refinement).

        A lower estimate; use :meth:`parseval_lower` where rigour matters.
        """
        mp = self.ctx.mp
        R = mp.mpf(R)
        if R == 0:
            return abs(self(0))

        def modulus(theta):
            return abs(self(R * mp.expj(theta)))

        step = 2 * mp.pi / MAX_MODULUS_GRID
        values = [modulus(k * step) for k in range(MAX_MODULUS_GRID)]
        best = max(range(MAX_MODULUS_GRID), key=lambda k: values[k])
        lo, hi = (best - 1) * step, (best + 1) * step
        invphi = (mp.sqrt(5) - 1) / 2
        c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
        fc, fd = modulus(c), modulus(d)
        for _ in range(80):
            if hi - lo < mp.mpf(1e-14):
                break
            if fc > fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = modulus(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = modulus(d)
        return max(values[best], fc, fd)

    def parseval_lower(self, R):
        """1/2 log sum |omega_n|^2 R^{2n}/(n!)^2 -- a rigorous lower bound for log M_F(R).

        Every term is non-negative, so the truncated sum already bounds the
        circle mean of |F|^2 (hence M_F(R)^2) from below.
        """
        mp = self.ctx.mp
        R = mp.mpf(R)
        N = self.order(R, mp.prec)
        coefs = _scaled_coefficients(self.seq, False, N, mp)
        total = mp.mpf(0)
        power = mp.mpf(1)
        for a in coefs[: N + 1]:
            total += (abs(a) * power) ** 2
            power *= R
        return mp.log(total) / 2


def taylor(seq: CoefficientSequence, precision_bits: int | None = None) -> TaylorFunction:
    ctx = DEFAULT_CONTEXT if precision_bits is None else PrecisionContext(precision_bits)
    return TaylorFunction(seq, ctx)


__all__ = ["TaylorFunction", "taylor", "truncation_order", "mp_context"]
