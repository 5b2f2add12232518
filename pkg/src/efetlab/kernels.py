"""Inner polynomial loops on gmpy2's MPC complex type.

mpmath's Python-level complex multiply dominates every series evaluation;
MPC does the same correctly rounded arithmetic in C.  Values cross the
boundary exactly (mantissa/exponent pairs), so results are bit-for-bit
those of an IEEE-style evaluation at the given precision.
"""
from __future__ import annotations

import gmpy2


def _context(prec: int):
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def _mpf_to_g(x):
    sign, man, exp, _ = x._mpf_
    if not man:
        return gmpy2.mpfr(0)
    v = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -v if sign else v


def to_gmpy(z, prec: int):
    """Exact conversion of an mpmath number to ``gmpy2.mpc`` at ``prec`` bits."""
    with _context(prec):
        if hasattr(z, "_mpc_"):
            return gmpy2.mpc(_mpf_to_g(z.real), _mpf_to_g(z.imag))
        return gmpy2.mpc(_mpf_to_g(z), 0)


def from_gmpy(w, mp):
    """Convert a ``gmpy2.mpc`` back into the mpmath context ``mp``."""
    def part(x):
        if x == 0:
            return mp.mpf(0)
        man, exp = x.as_mantissa_exp()
        return mp.mpf((int(man), int(exp)))

    return mp.mpc(part(w.real), part(w.imag))


def horner(coefs, x, prec: int):
    """sum coefs[n] x^n for a list of ``gmpy2.mpc`` coefficients."""
    with _context(prec):
        acc = gmpy2.mpc(0)
        for c in reversed(coefs):
            acc = acc * x + c
        return acc


def horner_with_derivative(coefs, x, prec: int):
    """(p(x), p'(x)) for p = sum coefs[n] x^n."""
    with _context(prec):
        p = gmpy2.mpc(0)
        dp = gmpy2.mpc(0)
        for c in reversed(coefs):
            dp = dp * x + p
            p = p * x + c
        return p, dp
