"""Extended-precision arithmetic contract, log-gamma, quadrature and Bessel I.

Every routine takes a :class:`PrecisionContext`.  Contexts map onto private
``mpmath.MPContext`` instances whose precision is never mutated after
creation, so calls with different contexts can run side by side.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import mpmath

from .errors import ConvergenceError, DomainError, EvaluationError, PrecisionError

DEFAULT_PRECISION = 128
STIRLING_TERMS = 20
STIRLING_MIN_SWITCH = 32
MAX_RECURRENCE_SHIFT = 200_000
CIRCLE_START_NODES = 64
CIRCLE_MAX_NODES = 2**18


@lru_cache(maxsize=None)
def mp_context(bits: int) -> mpmath.MPContext:
    """Shared mpmath context with a fixed mantissa width of ``bits``."""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for one call; downstream tolerances derive from it."""

    precision_bits: int = DEFAULT_PRECISION
    guard_bits: int = 16

    def __post_init__(self):
        if int(self.precision_bits) != self.precision_bits or self.precision_bits < 64:
            raise DomainError(f"precision_bits must be an integer >= 64, got {self.precision_bits}")
        if self.guard_bits < 0:
            raise DomainError("guard_bits must be non-negative")

    @property
    def mp(self) -> mpmath.MPContext:
        return mp_context(self.precision_bits + self.guard_bits)

    def working(self, extra_bits: float = 0) -> mpmath.MPContext:
        """Context with ``extra_bits`` on top of precision and guard bits.

        Rounded up to a multiple of 32 bits so nearby requests share a context
        (and the caches keyed on it).
        """
        bits = self.precision_bits + self.guard_bits + max(0, math.ceil(extra_bits))
        return mp_context(32 * -(-bits // 32))

    def tol(self):
        return self.mp.mpf(2) ** (-self.precision_bits / 2)

    def eps(self):
        return self.mp.ldexp(1, -self.precision_bits)

    def with_precision(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits, self.guard_bits)


DEFAULT_CONTEXT = PrecisionContext()


def as_context(ctx) -> PrecisionContext:
    if ctx is None:
        return DEFAULT_CONTEXT
    if isinstance(ctx, PrecisionContext):
        return ctx
    return PrecisionContext(int(ctx))


def to_complex(x) -> complex:
    return complex(x)


# ---------------------------------------------------------------------------
# log-gamma


@lru_cache(maxsize=None)
def _stirling_coefficients(bits: int):
    mp = mp_context(bits)
    return tuple(mp.bernoulli(2 * k) / (2 * k * (2 * k - 1)) for k in range(1, STIRLING_TERMS + 1))


@lru_cache(maxsize=None)
def stirling_threshold(precision_bits: int) -> int:
    """Smallest Re(s) at which the truncated Stirling series meets 2^-(p+8).

    The first omitted term is B_{2K+2} / ((2K+2)(2K+1) s^{2K+1}) with K terms kept.
    """
    k = STIRLING_TERMS + 1
    mp = mp_context(64)
    log2_coef = float(mp.log(abs(mp.bernoulli(2 * k)) / (2 * k * (2 * k - 1)), 2))
    x = 2.0 ** ((log2_coef + precision_bits + 8) / (2 * k - 1))
    return max(STIRLING_MIN_SWITCH, math.ceil(x))


def log_gamma(s, ctx: PrecisionContext | None = None):
    """Principal branch of log Gamma(s).

    Shifts s upward with Gamma(s+1) = s Gamma(s) until Re(s) passes the
    Stirling switch-over, then sums the 20-term asymptotic series.
    """
    ctx = as_context(ctx)
    x0 = stirling_threshold(ctx.precision_bits)
    s_c = complex(s)
    shift = max(0, math.ceil(x0 - s_c.real))
    if shift > MAX_RECURRENCE_SHIFT:
        raise PrecisionError(f"log_gamma: Re(s)={s_c.real} needs a recurrence shift of {shift}")
    mp = ctx.working(math.log2(shift + 2) + 8)
    s = mp.mpc(s)
    if s.imag == 0 and s.real <= 0 and s.real == mp.floor(s.real):
        raise DomainError(f"log_gamma: pole at s={s_c.real}")
    w = s + shift
    coefs = _stirling_coefficients(mp.prec)
    w2 = w * w
    power = w
    series = mp.mpc(0)
    for c in coefs:
        series += c / power
        power *= w2
    value = (w - mp.mpf(0.5)) * mp.log(w) - w + mp.log(2 * mp.pi) / 2 + series
    if shift:
        prod = mp.mpc(1)
        phase_sum = 0.0
        for k in range(shift):
            t = s + k
            prod *= t
            phase_sum += cmath.phase(complex(t))
        log_prod = mp.log(prod)
        turns = round((phase_sum - float(log_prod.imag)) / (2 * math.pi))
        value -= log_prod + mp.mpc(0, 2 * mp.pi * turns)
    return ctx.mp.mpc(value)


# ---------------------------------------------------------------------------
# periodic trapezoid rule on circles


def _sample(integrand, z, mp, node):
    v = mp.mpc(integrand(z))
    if not (mp.isfinite(v.real) and mp.isfinite(v.imag)):
        raise EvaluationError(f"non-finite integrand value at node {node} (z={complex(z)})", node=node)
    return v


def _circle_partial(integrand, center, radius, nodes, start, step, mp):
    total = mp.mpc(0)
    biggest = mp.mpf(0)
    for k in range(start, nodes, step):
        dz = radius * mp.expjpi(mp.mpf(2 * k) / nodes)
        v = _sample(integrand, center + dz, mp, k) * dz
        total += v
        biggest = max(biggest, abs(v))
    return total, biggest


def circle_quadrature(integrand: Callable, center, radius, nodes: int = CIRCLE_START_NODES,
                      ctx: PrecisionContext | None = None):
    """(1/2 pi i) * contour integral of ``integrand`` over a circle, counterclockwise.

    Uses the ``nodes``-point periodic trapezoid rule, which converges
    geometrically for integrands analytic in an annulus around the circle.
    """
    ctx = as_context(ctx)
    if nodes < 8:
        raise DomainError("circle_quadrature needs at least 8 nodes")
    if radius <= 0:
        raise DomainError("circle_quadrature needs a positive radius")
    mp = ctx.mp
    total, _ = _circle_partial(integrand, mp.mpc(center), mp.mpf(radius), nodes, 0, 1, mp)
    return total / nodes


def circle_refinements(integrand: Callable, center, radius, ctx: PrecisionContext | None = None,
                       start_nodes: int = CIRCLE_START_NODES,
                       max_nodes: int = CIRCLE_MAX_NODES, mp=None) -> Iterator[tuple]:
    """Yield ``(nodes, estimate, max_abs_sample)`` for nested node doubling.

    Each refinement only evaluates the new (odd-index) nodes.
    """
    ctx = as_context(ctx)
    mp = mp or ctx.mp
    center = mp.mpc(center)
    radius = mp.mpf(radius)
    nodes = start_nodes
    total, biggest = _circle_partial(integrand, center, radius, nodes, 0, 1, mp)
    yield nodes, total / nodes, biggest
    while nodes < max_nodes:
        nodes *= 2
        extra, big = _circle_partial(integrand, center, radius, nodes, 1, 2, mp)
        total += extra
        biggest = max(biggest, big)
        yield nodes, total / nodes, biggest


@dataclass(frozen=True)
class QuadratureResult:
    value: object
    error: object
    nodes: int


def circle_quadrature_adaptive(integrand: Callable, center, radius, ctx: PrecisionContext | None = None,
                               tol=None, start_nodes: int = CIRCLE_START_NODES,
                               max_nodes: int = CIRCLE_MAX_NODES, mp=None) -> QuadratureResult:
    """Double the trapezoid node count until two successive results agree.

    Agreement is measured against ``tol * max(1, largest sample)``; the
    reported error is the last gap plus a rounding floor.
    """
    ctx = as_context(ctx)
    mp = mp or ctx.mp
    tol = ctx.tol() if tol is None else tol
    previous = None
    gap = None
    for nodes, estimate, biggest in circle_refinements(integrand, center, radius, ctx,
                                                       start_nodes, max_nodes, mp=mp):
        if previous is not None:
            gap = abs(estimate - previous)
            if gap < tol * max(1, biggest):
                floor = nodes * biggest * mp.ldexp(1, -mp.prec)
                return QuadratureResult(estimate, gap + floor, nodes)
        previous = estimate
    raise ConvergenceError("trapezoid rule did not converge", estimate=previous, gap=gap)


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre on segments


@lru_cache(maxsize=None)
def gauss_legendre(n: int, bits: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    mp = mp_context(bits + 16)
    nodes = [None] * n
    weights = [None] * n
    for i in range(1, (n + 1) // 2 + 1):
        x = mp.mpf(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
        for _ in range(100):
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mp.ldexp(1, -bits - 8):
                break
        p0, p1 = mp.mpf(1), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        w = 2 / ((1 - x * x) * dp * dp)
        nodes[i - 1], nodes[n - i] = -x, x
        weights[i - 1] = weights[n - i] = w
    out = mp_context(bits)
    return tuple(out.mpf(x) for x in nodes), tuple(out.mpf(w) for w in weights)


def default_degree(bits: int) -> int:
    return 8 + bits // 8


def _gl_apply(integrand, a, b, rule, mp):
    xs, ws = rule
    mid = (a + b) / 2
    half = (b - a) / 2
    total = mp.mpc(0)
    l1 = mp.mpf(0)
    for x, w in zip(xs, ws):
        z = mid + half * x
        v = mp.mpc(integrand(z))
        if not (mp.isfinite(v.real) and mp.isfinite(v.imag)):
            raise EvaluationError(f"non-finite integrand value at {complex(z)}")
        total += w * v
        l1 += w * abs(v)
    return total * half, l1 * abs(half)


def segment_quadrature(integrand: Callable, a, b, ctx: PrecisionContext | None = None, tol=None,
                       degree: int | None = None, max_depth: int = 40, full_output: bool = False,
                       mp=None, atol=None):
    """Integral of ``integrand`` along the straight segment from a to b.

    Adaptive Gauss-Legendre: a panel is accepted when the rule on the
    whole panel and on its two halves agree to ``tol`` times the panel's
    L1 mass, or when the gap is below the panel's share of ``atol``.
    With ``full_output`` returns ``(value, error_estimate, l1)``.
    """
    ctx = as_context(ctx)
    mp = mp or ctx.mp
    a = mp.mpc(a)
    b = mp.mpc(b)
    if a == b:
        raise DomainError("segment_quadrature needs a != b")
    tol = ctx.tol() if tol is None else mp.mpf(tol)
    rule = gauss_legendre(degree or default_degree(mp.prec), mp.prec)
    whole = _gl_apply(integrand, a, b, rule, mp)
    length = abs(b - a)
    atol = None if atol is None else mp.mpf(atol)
    stack = [(a, b, whole, 0)]
    value = mp.mpc(0)
    error = mp.mpf(0)
    l1_total = mp.mpf(0)
    while stack:
        lo, hi, (q, l1), depth = stack.pop()
        mid = (lo + hi) / 2
        left = _gl_apply(integrand, lo, mid, rule, mp)
        right = _gl_apply(integrand, mid, hi, rule, mp)
        refined = left[0] + right[0]
        mass = left[1] + right[1]
        gap = abs(refined - q)
        if gap <= tol * mass or mass == 0 or (atol is not None and gap <= atol * abs(hi - lo) / length):
            value += refined
            error += gap
            l1_total += mass
            continue
        if depth >= max_depth:
            pending = sum((item[2][0] for item in stack), mp.mpc(0))
            raise ConvergenceError("adaptive Gauss-Legendre exceeded max depth",
                                   estimate=value + refined + pending, gap=gap)
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    if full_output:
        return value, error, l1_total
    return value


# ---------------------------------------------------------------------------
# modified Bessel function (test oracle for the omega == 1 correlation)


def bessel_i(h: int, x, ctx: PrecisionContext | None = None):
    """I_h(x) = sum (x/2)^(2m+h) / (m! (m+h)!) by direct summation."""
    ctx = as_context(ctx)
    if h < 0 or int(h) != h:
        raise DomainError("bessel_i needs a non-negative integer order")
    mp = ctx.mp
    half = mp.mpf(x) / 2
    if half < 0:
        raise DomainError("bessel_i needs x >= 0")
    q = half * half
    term = half**h / mp.factorial(h)
    total = term
    target = mp.ldexp(1, -ctx.precision_bits - 8)
    m = 0
    while True:
        ratio = q / ((m + 1) * (m + 1 + h))
        if ratio < 0.5 and term * ratio / (1 - ratio) <= target * total:
            return total
        m += 1
        term *= ratio
        total += term
