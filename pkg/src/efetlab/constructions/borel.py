"""The cos(sqrt n) + 2 example: F(z) = e^z G(z) with G of order 1/2.

phi is the Borel-Laplace transform of psi(w) = cos(sqrt w) + 2,

    phi(s) = 2/s + C(s),   C(s) = int_0^inf cos(sqrt u) e^{-su} du
                                = 2 int_0^inf t cos t e^{-s t^2} dt,

and G(z) = (1/2 pi i) oint_{|s|=rho} e^{z(e^s - 1)} phi(s) ds.
"""
from __future__ import annotations

import math

import gmpy2

from ..kernels import from_gmpy, to_gmpy
from ..errors import DomainError
from ..mpcore import as_context, circle_quadrature_adaptive, segment_quadrature


def ray_angle(s) -> float:
    """psi = -arg(s)/2, so s e^{2 i psi} = |s| and the Gaussian decays at full rate."""
    s = complex(s)
    return -math.atan2(s.imag, s.real) / 2


def cos_sqrt_transform(s, ctx=None):
    """C(s) = 2 int_0^inf t cos t e^{-s t^2} dt along the ray t = tau e^{i psi}.

    C is an entire function of 1/s, so the rotated integral continues it
    to every s != 0, including Re s <= 0.  The ray is cut at the T where
    tau |sin psi| - |s| tau^2 has dropped by the working precision plus the
    peak exponent, which bounds the discarded tail.
    """
    ctx = as_context(ctx)
    if complex(s) == 0:
        raise DomainError("the Borel-Laplace transform is singular at s = 0")
    psi = ray_angle(s)
    sin_psi = abs(math.sin(psi))
    abs_s = abs(complex(s))
    peak = sin_psi**2 / (4 * abs_s)
    guard = int(peak * math.log2(math.e)) + 16
    mp = ctx.working(guard)
    L = (ctx.precision_bits + guard + 16) * math.log(2) + peak
    T = (sin_psi + math.sqrt(sin_psi**2 + 4 * abs_s * L)) / (2 * abs_s)
    s_mp = mp.mpc(s)
    # psi is only a float; the exact s in the exponent keeps any nearby ray valid
    direction = mp.expj(psi)
    decay = -s_mp * direction * direction
    prec = mp.prec
    g_dir, g_decay = to_gmpy(direction, prec), to_gmpy(decay, prec)

    def integrand(tau):
        with gmpy2.context(gmpy2.get_context(), precision=prec):
            t = to_gmpy(tau, prec)
            value = t * gmpy2.cos(t * g_dir) * gmpy2.exp(g_decay * t * t)
        return from_gmpy(value, mp)

    tol = mp.ldexp(1, -(ctx.precision_bits + 8))
    value = segment_quadrature(integrand, 0, T, ctx, tol=tol, mp=mp)
    return ctx.mp.mpc(2 * direction * direction * value)


def phi_borel(s, ctx=None):
    """phi(s) = 2/s + C(s), the Borel-Laplace transform of cos(sqrt w) + 2."""
    ctx = as_context(ctx)
    if complex(s) == 0:
        raise DomainError("phi_borel is singular at s = 0")
    mp = ctx.mp
    return 2 / mp.mpc(s) + cos_sqrt_transform(s, ctx)


def g_factor_contour(z, ctx=None, rho=None, full_output: bool = False):
    """G(z) = (1/2 pi i) oint_{|s|=rho} e^{z(e^s-1)} phi(s) ds with rho = min(1/sqrt|z|, 1)."""
    ctx = as_context(ctx)
    mp = ctx.mp
    z = mp.mpc(z)
    if z == 0 and rho is None:
        value = mp.mpc(3)
        return (value, mp.mpf(0)) if full_output else value
    if rho is None:
        rho = min(1 / math.sqrt(abs(complex(z))), 1.0)
    if rho <= 0:
        raise DomainError("rho must be positive")

    # phi has real Taylor data in 1/s, so phi(conj s) = conj phi(s): mirror nodes are reused
    memo = {}

    def phi_node(s):
        key = (float(s.real), abs(float(s.imag)))
        hit = memo.get(key)
        if hit is None:
            value = phi_borel(s, ctx)
            memo[key] = (value, s.imag >= 0)
            return value
        value, upper = hit
        return value if (s.imag >= 0) == upper else mp.conj(value)

    def integrand(s):
        return mp.exp(z * mp.expm1(s)) * phi_node(s)

    res = circle_quadrature_adaptive(integrand, 0, rho, ctx)
    return (res.value, res.error) if full_output else res.value


def borel_inverse(w, rho: float = 1.0, ctx=None):
    """(1/2 pi i) oint_{|s|=rho} phi(s) e^{s w} ds, which returns cos(sqrt w) + 2."""
    ctx = as_context(ctx)
    mp = ctx.mp
    w = mp.mpc(w)
    res = circle_quadrature_adaptive(lambda s: phi_borel(s, ctx) * mp.exp(s * w), 0, rho, ctx)
    return res.value


__all__ = ["borel_inverse", "cos_sqrt_transform", "g_factor_contour", "phi_borel", "ray_angle"]
