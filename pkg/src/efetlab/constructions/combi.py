"""Deterministic version of the combinatorial lemma on sets of positive lower density.

Given Lambda of lower density d and a large R, find integers x and h with

    2 c1 R < x < (1 - 2 c1) R,   c1 R <= h <= (1 - c1) R,
    J = Lambda & [1, c1 R],      K = Lambda & [x, x + c1 R],
    |K| >= (d/2) c1 R,           |(J + h) & K| >= c2 R,

where c1 = min(d/8, 1/4) and c2 = d^2 c1 / 10.  The random shift of the
existence proof is replaced by an exhaustive scan over h in (x - c1 R, x + c1 R).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..errors import DomainError, WitnessNotFoundError

LISTING_LIMIT = 10**4


def _density(d) -> Fraction:
    """Exact density; floats such as 0.3 become 3/10."""
    return d if isinstance(d, Fraction) else Fraction(str(d)) if isinstance(d, float) else Fraction(d)


def lemma_constants(d) -> tuple[Fraction, Fraction]:
    """(c1, c2) = (min(d/8, 1/4), d^2 c1 / 10) as exact fractions."""
    d = _density(d)
    if not 0 < d <= 1:
        raise DomainError("density d must lie in (0, 1]")
    c1 = min(d / 8, Fraction(1, 4))
    return c1, d * d * c1 / 10


def minimum_radius(d) -> int:
    """Smallest R accepted by :func:`combi_find`: ceil(10 / (d c1)), so that (d/2) c1 R >= 5."""
    d = _density(d)
    c1, _ = lemma_constants(d)
    return math.ceil(10 / (d * c1))


@dataclass(frozen=True)
class DensityWitness:
    d: Fraction
    R: int
    c1: Fraction
    c2: Fraction
    x: int
    h: int
    J: tuple
    K: tuple
    overlap: int

    def to_dict(self) -> dict:
        out = {"d": str(self.d), "R": self.R, "c1": str(self.c1), "c2": str(self.c2),
               "x": self.x, "h": self.h, "size_J": len(self.J), "size_K": len(self.K),
               "overlap": self.overlap}
        if len(self.J) <= LISTING_LIMIT:
            out["J"] = list(self.J)
            out["K"] = list(self.K)
        return out


def _members(membership: Callable[[int], bool], lo: Fraction, hi: Fraction) -> tuple:
    """Integers n in the closed interval [lo, hi] with membership(n)."""
    return tuple(n for n in range(math.ceil(lo), math.floor(hi) + 1) if membership(n))


def combi_find(membership: Callable[[int], bool], d, R: int) -> DensityWitness:
    """A witness (x, h, J, K) for the lemma on [1, R]."""
    d = _density(d)
    c1, c2 = lemma_constants(d)
    R = int(R)
    R_min = minimum_radius(d)
    if R < R_min:
        raise DomainError(f"combi_find needs R >= {R_min} for d={d}")
    L = c1 * R
    J = _members(membership, Fraction(1), L)
    J_set = set(J)
    need_K = d / 2 * L
    need_overlap = c2 * R
    x_lo = math.floor(2 * L) + 1
    x_hi = math.ceil((1 - 2 * c1) * R) - 1
    for x in range(x_lo, x_hi + 1):
        K = _members(membership, Fraction(x), x + L)
        if len(K) < need_K:
            continue
        best_h, best = None, -1
        for h in range(math.floor(x - L) + 1, math.ceil(x + L)):
            if not c1 * R <= h <= (1 - c1) * R:
                continue
            count = sum(1 for k in K if k - h in J_set)
            if count > best:
                best_h, best = h, count
        if best_h is not None and best >= need_overlap:
            return DensityWitness(d, R, c1, c2, x, best_h, J, K, best)
    raise WitnessNotFoundError(f"no dense segment with a good shift for d={d}, R={R}; "
                               "the density assumption fails on [1, R]")


def recheck(witness: DensityWitness, membership: Callable[[int], bool]) -> dict:
    """Independent brute-force verification of every witness inequality.

    J and K are rebuilt by scanning all of [1, R] and the overlap is counted
    by testing each integer n in K for n - h in J.
    """
    R, c1, c2, d = witness.R, witness.c1, witness.c2, witness.d
    x, h = witness.x, witness.h
    J = [n for n in range(1, R + 1) if n <= c1 * R and membership(n)]
    K = [n for n in range(1, R + 1) if x <= n <= x + c1 * R and membership(n)]
    overlap = 0
    for n in K:
        if any(j + h == n for j in J):
            overlap += 1
    checks = {
        "x_range": 2 * c1 * R < x < (1 - 2 * c1) * R,
        "h_range": c1 * R <= h <= (1 - c1) * R,
        "K_size": len(K) >= d / 2 * c1 * R,
        "overlap": overlap >= c2 * R,
        "J_matches": tuple(J) == witness.J,
        "K_matches": tuple(K) == witness.K,
        "overlap_matches": overlap == witness.overlap,
    }
    checks["ok"] = all(checks.values())
    return checks


def periodic_mask(period: int, residues) -> Callable[[int], bool]:
    """Membership n mod period in ``residues`` (density len(residues)/period)."""
    residues = frozenset(int(r) % period for r in residues)
    return lambda n: n % period in residues


__all__ = ["DensityWitness", "combi_find", "lemma_constants", "minimum_radius", "periodic_mask", "recheck"]
