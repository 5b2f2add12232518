"""Self-correlation transform, its square-root form, and analytic interpolation.

For F(z) = sum omega_n z^n/n! and a shift h,

    F_h(z)        = sum omega_n conj(omega_{n+h}) z^{2n} / (n! (n+h)!)
    F_h^sharp(z)  = F_h(sqrt z)

and the interpolating function

    g_h(lam) = Gamma(lam+1) Gamma(lam+h+1)
               * int_{2 log r - i pi}^{2 log r + i pi} F_h^sharp(e^w) e^{-lam w} dw / (2 pi i)

with r = R - kappa, kappa = floor(h/2) + 1/2, reproduces omega_n conj(omega_{n+h})
at every non-negative integer n.
"""
from __future__ import annotations

import functools
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

from .errors import DomainError, EvaluationError, PrecisionError
from .kernels import from_gmpy, horner, to_gmpy
from .mpcore import circle_quadrature_adaptive, log_gamma, segment_quadrature
from .sequences import CoefficientSequence, quadratic_phase
from .taylor import LOG2_E, TaylorFunction


@dataclass(frozen=True)
class SemiDisk:
    """Omega_h = {Re lam > -kappa, |lam + kappa| < R - kappa}."""

    h: int
    R: float

    @property
    def kappa(self) -> float:
        return self.h // 2 + 0.5

    @property
    def radius(self) -> float:
        return self.R - self.kappa

    def __contains__(self, lam) -> bool:
        lam = complex(lam)
        return lam.real > -self.kappa and abs(lam + self.kappa) < self.radius


# ---------------------------------------------------------------------------
# correlation series


@functools.lru_cache(maxsize=4096)
def _corr_terms_order(C2: float, x: float, h: int, bits: int) -> int:
    """Smallest N whose tail of sum C2 x^n/(n!(n+h)!) is below 2^-(bits+8)."""
    if x == 0:
        return 0
    target = -(bits + 8) * math.log(2)
    N = 0
    while True:
        # first omitted term n = N+1 and ratio bound for the rest
        n = N + 1
        ratio = x / ((n + 1) * (n + 1 + h))
        if ratio < 0.5:
            log_term = (math.log(C2) + n * math.log(x) - math.lgamma(n + 1) - math.lgamma(n + h + 1)
                        - math.log1p(-ratio))
            if log_term <= target:
                return N
        N += 1


def _sharp_series(F: TaylorFunction, h: int, x, mp, with_error=False):
    """sum omega_n conj(omega_{n+h}) x^n / (n!(n+h)!) evaluated in ``mp``."""
    seq = F.seq
    # |omega_n conj(omega_{n+h})| <= C^2 Q^h (Q^2)^n
    C2 = max(F.C_high, 1e-300) ** 2 * F.growth**h
    r = float(abs(x)) * F.growth**2
    N = _corr_terms_order(C2, r, h, mp.prec)
    if seq.length is not None:
        N = min(N, seq.length - 1 - h)
        if N < 0:
            return (mp.mpc(0), mp.mpf(0)) if with_error else mp.mpc(0)
    coefs = _sharp_coefficients(seq, F.conjugate, h, N, mp)
    total = from_gmpy(horner(coefs[: N + 1], to_gmpy(mp.mpc(x), mp.prec), mp.prec), mp)
    if not with_error:
        return total
    if seq.length is not None and N >= seq.length - 1 - h:
        tail = mp.mpf(0)
    elif r == 0:
        tail = mp.mpf(0)
    else:
        n = N + 1
        ratio = mp.mpf(r) / ((n + 1) * (n + 1 + h))
        tail = mp.mpf(C2) * mp.mpf(r) ** n / (mp.factorial(n) * mp.factorial(n + h)) / (1 - ratio)
    scale = mp.mpf(C2) * mp.exp(2 * mp.sqrt(mp.mpf(r)))  # majorises sum of |terms|
    return total, tail + (N + 2) * scale * mp.ldexp(1, -mp.prec)


_sharp_lock = threading.Lock()
_sharp_cache: dict = {}


def _sharp_coefficients(seq: CoefficientSequence, conjugate: bool, h: int, N: int, mp):
    key = (seq, conjugate, h, mp.prec)
    with _sharp_lock:
        cached = _sharp_cache.get(key)
    if cached is not None and len(cached) > N:
        return cached
    out = list(cached or [])
    for n in range(len(out), N + 1):
        a = seq.value(n, mp)
        b = seq.value(n + h, mp)
        if conjugate:
            a, b = mp.conj(a), mp.conj(b)
        out.append(to_gmpy(a * mp.conj(b) / (mp.factorial(n) * mp.factorial(n + h)), mp.prec))
    with _sharp_lock:
        current = _sharp_cache.get(key)
        if current is None or len(current) < len(out):
            _sharp_cache[key] = out
    return out


def _corr_guard_bits(F, r) -> float:
    return 2 * F.growth * float(r) * LOG2_E + 2 * max(0.0, math.log2(max(F.C_high, 1e-300))) + 8


def corr_series(F: TaylorFunction, h: int, z, full_output: bool = False):
    """F_h(z) by direct summation; with ``full_output`` also the error bound."""
    if h < 0:
        raise DomainError("h must be a non-negative integer")
    z_abs = abs(complex(z))
    mp = F.ctx.working(_corr_guard_bits(F, z_abs))
    z = mp.mpc(z)
    value, err = _sharp_series(F, h, z * z, mp, with_error=True)
    out = F.ctx.mp
    if full_output:
        return out.mpc(value), out.mpf(err)
    return out.mpc(value)


def corr_sharp(F: TaylorFunction, h: int, z, full_output: bool = False):
    """F_h^sharp(z) = sum omega_n conj(omega_{n+h}) z^n/(n!(n+h)!); entire, no square root."""
    if h < 0:
        raise DomainError("h must be a non-negative integer")
    z_abs = abs(complex(z))
    mp = F.ctx.working(_corr_guard_bits(F, math.sqrt(z_abs)))
    value, err = _sharp_series(F, h, mp.mpc(z), mp, with_error=True)
    out = F.ctx.mp
    if full_output:
        return out.mpc(value), out.mpf(err)
    return out.mpc(value)


_contour_lock = threading.Lock()
_contour_cache: OrderedDict = OrderedDict()
CONTOUR_CACHE_SIZE = 32


def _contour_samples(F: TaylorFunction, z) -> dict:
    """Node -> (F(sz) F*(z/s), error) for one z; shared by every shift h."""
    key = (F.seq, F.ctx, z.real, z.imag)
    with _contour_lock:
        samples = _contour_cache.get(key)
        if samples is None:
            samples = _contour_cache[key] = {}
            if len(_contour_cache) > CONTOUR_CACHE_SIZE:
                _contour_cache.popitem(last=False)
        else:
            _contour_cache.move_to_end(key)
    return samples


def corr_contour(F: TaylorFunction, h: int, z, full_output: bool = False):
    """F_h(z) as (1/2 pi i) int_{|s|=1} F(sz) F*(conj(s) z) (s/z)^h ds/s.

    F* has conjugated Taylor coefficients, so F*(conj(s) z) = F*(z/s) on the
    unit circle.  Trapezoid nodes double until successive results agree.  The
    factor z^{-h} is taken outside the integral, and the samples F(sz) F*(z/s)
    are cached per z so that a sweep over h evaluates F only once per node.
    """
    if h < 0:
        raise DomainError("h must be a non-negative integer")
    if h > 0 and complex(z) == 0:
        raise DomainError("corr_contour is undefined at z = 0 for h > 0")
    mp = F.ctx.mp
    z = mp.mpc(z)
    Fs = F.star()
    if z == 0:
        value, err = F.eval(0)
        star, err_s = Fs.eval(0)
        result = value * star
        return (result, err * abs(star) + err_s * abs(value)) if full_output else result
    samples = _contour_samples(F, z)
    errs = []

    def integrand(s):
        key = (s.real, s.imag)
        hit = samples.get(key)
        if hit is None:
            a, ea = F.eval(s * z)
            b, eb = Fs.eval(z / s)
            hit = samples[key] = (a * b, ea * abs(b) + eb * abs(a))
        errs.append(hit[1])
        # s^{h-1}; on the unit circle 1/s = conj(s)
        return hit[0] * (s ** (h - 1) if h else mp.conj(s))

    res = circle_quadrature_adaptive(integrand, 0, 1, F.ctx, tol=F.ctx.tol() * mp.ldexp(1, -32))
    scale = abs(z) ** (-h)
    value = res.value * z ** (-h)
    if full_output:
        return value, (res.error + max(errs)) * scale
    return value


# ---------------------------------------------------------------------------
# analytic interpolation


class _Interpolator:
    """Caches F_h^sharp samples on the circle |x| = r^2 for one (F, h, R)."""

    def __init__(self, F: TaylorFunction, h: int, R: float, headroom: int = 0):
        self.F = F
        self.h = h
        self.R = float(R)
        self.kappa = h // 2 + 0.5
        self.r = self.R - self.kappa
        self.mp = F.ctx.working(_corr_guard_bits(F, self.r) + 24 + headroom)
        mp = self.mp
        self.r_mp = mp.mpf(R) - mp.mpf(h // 2) - mp.mpf(0.5)
        self.radius2 = self.r_mp**2
        self.log_r = mp.log(self.r_mp)
        self._samples: dict = {}
        self._lock = threading.Lock()
        # majorant of sum |terms| on the circle; sample noise scales with it
        C2 = max(F.C_high, 1e-300) ** 2 * F.growth**h
        self.peak = mp.mpf(C2) * mp.exp(2 * F.growth * self.r_mp)

    def sharp_at(self, t):
        key = t
        with self._lock:
            v = self._samples.get(key)
        if v is None:
            mp = self.mp
            v = _sharp_series(self.F, self.h, self.radius2 * mp.expj(t), mp)
            with self._lock:
                self._samples[key] = v
        return v

    def transform(self, lam):
        """(1/2 pi) int_{-pi}^{pi} F_h^sharp(r^2 e^{it}) e^{-i lam t} dt, with its error."""
        mp = self.mp
        lam = mp.mpc(lam)
        ilam = mp.mpc(0, 1) * lam

        def integrand(t):
            return self.sharp_at(t) * mp.exp(-ilam * t)

        tol = mp.ldexp(1, -(mp.prec - 40))
        # noise in each sample scales with the largest |F_h^sharp| on the circle
        atol = tol * self.peak * 2 * mp.pi
        value, err, l1 = segment_quadrature(integrand, -mp.pi, mp.pi, tol=tol, full_output=True,
                                            mp=mp, atol=atol)
        rounding = l1 * mp.ldexp(1, -(mp.prec - 16))
        return value / (2 * mp.pi), (err + rounding) / (2 * mp.pi)


_interp_lock = threading.Lock()
_interpolators: dict = {}


def _interpolator(F: TaylorFunction, h: int, R: float, headroom: int) -> _Interpolator:
    key = (F, h, float(R), headroom)
    with _interp_lock:
        it = _interpolators.get(key)
        if it is None:
            it = _interpolators[key] = _Interpolator(F, h, R, headroom)
    return it


def _headroom_bits(h: int, lam: complex, r: float) -> int:
    """Bits lost to cancellation in the integral: log2 |Gamma(lam+1) Gamma(lam+h+1) r^(-2 lam)|."""
    x = lam.real
    bits = (_lgamma_re(lam + 1) + _lgamma_re(lam + h + 1) - 2 * x * math.log(r)) / math.log(2)
    return 64 * max(0, math.ceil(bits / 64))


def _lgamma_re(s: complex) -> float:
    # log|Gamma(s)| <= log Gamma(Re s) for Re s > 0; reflection-free bound is enough here
    x = s.real
    if x >= 0.5:
        return math.lgamma(x)
    return math.lgamma(x + 2) - math.log(abs(s) * abs(s + 1))


def interp_g(F: TaylorFunction, h: int, lam, R, full_output: bool = False):
    """g_h(lam), analytic for Re(lam) > -(h+1), with g_h(n) = omega_n conj(omega_{n+h}).

    The contour radius is fixed at r = R - kappa.  The two Gamma factors,
    r^{-2 lam} and the segment integral are combined in log space.
    Raises :class:`PrecisionError` when the integral's cancellation leaves
    less than half the working bits.
    """
    h = int(h)
    if h < 0:
        raise DomainError("h must be a non-negative integer")
    if h > R:
        raise DomainError("interp_g requires h <= R")
    kappa = h // 2 + 0.5
    if R - kappa <= 1:
        raise DomainError("interp_g requires R - kappa > 1")
    lam_c = complex(lam)
    if lam_c.real <= -(h + 1):
        raise DomainError(f"interp_g is defined for Re(lam) > -(h+1); got {lam_c}")
    if lam_c.imag == 0 and lam_c.real == math.floor(lam_c.real) and lam_c.real <= -1:
        raise DomainError(f"Gamma(lam+1) has a pole at lam={lam_c.real}")
    it = _interpolator(F, h, R, _headroom_bits(h, lam_c, R - kappa))
    mp = it.mp
    lam = mp.mpc(lam)
    K, K_err = it.transform(lam)
    out = F.ctx.mp
    if K == 0:
        return (out.mpc(0), out.mpf(K_err)) if full_output else out.mpc(0)
    ctx = F.ctx
    log_scale = log_gamma(lam + 1, ctx) + log_gamma(lam + h + 1, ctx) - 2 * lam * it.log_r
    log_g = mp.mpc(log_scale) + mp.log(K)
    g = mp.exp(log_g)
    rel_err = K_err / abs(K)
    if rel_err > ctx.tol():
        raise PrecisionError(f"interp_g: integral cancellation leaves relative error {float(rel_err):.3g} "
                             f"at lam={lam_c}; increase precision_bits")
    if full_output:
        return out.mpc(g), out.mpf(abs(g) * rel_err)
    return out.mpc(g)


# ---------------------------------------------------------------------------
# auxiliary functions


def pi_h_product(s, h: int, ctx=None):
    """prod_{1 <= l <= floor(h/2)} (s + (l - 1/2)) / (s - (l - 1/2))."""
    from .mpcore import as_context

    mp = as_context(ctx).mp
    s = mp.mpc(s)
    out = mp.mpc(1)
    for l in range(1, h // 2 + 1):
        c = mp.mpf(l) - mp.mpf(0.5)
        if s == c:
            raise DomainError(f"pi_h_product has a pole at s={float(c)}")
        out *= (s + c) / (s - c)
    return out


def k_phi(phi: float) -> float:
    """k(phi) = cos phi + phi sin phi on |phi| <= pi/2."""
    if abs(phi) > math.pi / 2 + 1e-15:
        raise DomainError("k_phi needs |phi| <= pi/2")
    return math.cos(phi) + phi * math.sin(phi)


def ratio_diagnostics(g, interval, step: float = 1):
    """Unit-step diagnostics of a candidate interpolant on I = [a, b].

    Returns (d1, d2, d3) = max over samples s = a, a+1, ..., b of
    ||g(s)| - 1|, |g(s+1)/g(s) - 1| and |g(s)^2 / (g(s-1) g(s+1)) - 1|.
    """
    a, b = interval
    if step != 1:
        raise DomainError("ratio_diagnostics samples at unit steps only")
    count = int(math.floor(b - a + 1e-12)) + 1
    points = [a + k for k in range(-1, count + 1)]
    values = []
    for s in points:
        v = complex(g(s))
        if v == 0:
            raise EvaluationError(f"g vanishes at s={s}", node=s)
        values.append(v)
    d1 = d2 = d3 = 0.0
    for i in range(1, count + 1):
        prev, cur, nxt = values[i - 1], values[i], values[i + 1]
        d1 = max(d1, abs(abs(cur) - 1))
        d2 = max(d2, abs(nxt / cur - 1))
        d3 = max(d3, abs(cur * cur / (prev * nxt) - 1))
    return d1, d2, d3


def quadratic_ratio_check(beta, gamma, delta, d: int, n_range, ctx=None) -> float:
    """Max deviation of g_d(n+1)/g_d(n) from exp(-2 pi i 2 beta d) on a quadratic-phase sequence.

    The ratio is computed directly from the coefficients as
    omega_{n+1} conj(omega_{n+d+1}) / (omega_n conj(omega_{n+d})).
    """
    from .mpcore import as_context
    from .sequences import _unimodular

    if d < 1:
        raise DomainError("quadratic_ratio_check needs d >= 1")
    mp = as_context(ctx).mp
    seq = quadratic_phase(beta, gamma, delta)
    expected = _unimodular((-2 * seq.param("beta") * d) % 1, mp)
    worst = mp.mpf(0)
    for n in n_range:
        w = [seq.value(k, mp) for k in (n, n + 1, n + d, n + d + 1)]
        ratio = w[1] * mp.conj(w[3]) / (w[0] * mp.conj(w[2]))
        worst = max(worst, abs(ratio - expected))
    return worst


__all__ = ["SemiDisk", "corr_contour", "corr_series", "corr_sharp", "interp_g", "k_phi",
           "pi_h_product", "quadratic_ratio_check", "ratio_diagnostics"]
