"""A subharmonic function with u(r) = r, max_theta u <= r + 5 and sparse Riesz mass.

On the upper half of R D,

    u(z) = Re z + sqrt(R) Im F_gauss(sqrt(z/R)),  F_gauss(w) = int_0^w e^{-alpha t^2} dt,

reflected to the lower half by u(conj z) = u(z), with 5 e^{2 alpha} = sqrt(R).
The Riesz mass is supported on [0, R] with density 2 d/dy u(x + i0); on
[a, b] it integrates to 2 sqrt(R) [F_gauss(sqrt(b/R)) - F_gauss(sqrt(a/R))].
Masses here follow that normalisation (the normal-derivative jump, without
the 1/(2 pi) of the distributional Laplacian).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from ..errors import DomainError
from ..kernels import from_gmpy, horner, to_gmpy
from ..mpcore import DEFAULT_CONTEXT, PrecisionContext, segment_quadrature


@dataclass(frozen=True)
class SubharmonicExample:
    R: float
    ctx: PrecisionContext = DEFAULT_CONTEXT

    def __post_init__(self):
        if self.R < 100:
            raise DomainError("SubharmonicExample needs R >= 100")

    @classmethod
    def from_alpha(cls, alpha: float, ctx: PrecisionContext = DEFAULT_CONTEXT) -> "SubharmonicExample":
        """The example whose R satisfies 5 e^{2 alpha} = sqrt(R)."""
        return cls(R=25 * math.exp(4 * alpha), ctx=ctx)

    @property
    def alpha(self) -> float:
        """alpha with 5 e^{2 alpha} = sqrt(R)."""
        return 0.5 * math.log(math.sqrt(self.R) / 5)

    @cached_property
    def _series(self):
        """Coefficients (-alpha)^m / (m! (2m+1)) in w^2, certified for |w| <= 1.

        Terms after m = M are bounded by alpha^m/m! (a ratio <= 1/2 tail).
        """
        mp = self.ctx.mp
        alpha = mp.mpf(self.alpha)
        target = mp.ldexp(1, -(self.ctx.precision_bits + 8))
        coefs = []
        term = mp.mpf(1)
        m = 0
        while True:
            coefs.append(term / (2 * m + 1))
            m += 1
            term = -term * alpha / m
            if alpha / (m + 1) <= 0.5 and 2 * abs(term) <= target:
                break
        return [to_gmpy(c, mp.prec) for c in coefs], 2 * abs(term)

    def F_gauss(self, w):
        """int_0^w e^{-alpha t^2} dt by its power series; |w| <= 1 (certified), larger w allowed."""
        mp = self.ctx.mp
        w = mp.mpc(w)
        if abs(w) > 1:
            return self._F_gauss_far(w)
        coefs, _ = self._series
        return w * from_gmpy(horner(coefs, to_gmpy(w * w, mp.prec), mp.prec), mp)

    def _F_gauss_far(self, w):
        mp = self.ctx.mp
        alpha = mp.mpf(self.alpha)
        return segment_quadrature(lambda t: mp.exp(-alpha * t * t), 0, w, self.ctx)

    def f(self, z):
        mp = self.ctx.mp
        z = mp.mpc(z)
        return mp.exp(-mp.mpf(self.alpha) * z * z)


def u_eval(z, ex: SubharmonicExample) -> float:
    """u(z) on |z| <= R; the lower half is the mirror image of the upper half."""
    z = complex(z)
    if abs(z) > ex.R * (1 + 1e-12):
        raise DomainError(f"u is defined on |z| <= R = {ex.R}")
    if z.imag < 0:
        z = z.conjugate()
    mp = ex.ctx.mp
    w = mp.sqrt(mp.mpc(z) / ex.R)
    return float(mp.mpf(z.real) + mp.sqrt(ex.R) * ex.F_gauss(w).imag)


def riesz_mass(a: float, b: float, ex: SubharmonicExample) -> float:
    """mu_u([a, b]) = 2 sqrt(R) [F_gauss(sqrt(b/R)) - F_gauss(sqrt(a/R))]."""
    if not 0 <= a <= b <= ex.R:
        raise DomainError("riesz_mass needs 0 <= a <= b <= R")
    if a == b:
        return 0.0
    mp = ex.ctx.mp
    R = mp.mpf(ex.R)
    upper = ex.F_gauss(mp.sqrt(b / R)).real
    lower = ex.F_gauss(mp.sqrt(a / R)).real
    return float(2 * mp.sqrt(R) * (upper - lower))


def riesz_density_fd(x: float, ex: SubharmonicExample, eps: float = 1e-6) -> float:
    """Finite-difference jump u_y(x + i0) - u_y(x - i0) = 2 u_y(x + i0) by one-sided differences."""
    u0 = u_eval(x, ex)
    u1 = u_eval(complex(x, eps), ex)
    u2 = u_eval(complex(x, 2 * eps), ex)
    slope = (-3 * u0 + 4 * u1 - u2) / (2 * eps)
    return 2 * slope


def riesz_mass_fd(a: float, b: float, ex: SubharmonicExample, panels: int = 64) -> float:
    """Integral of the FD normal-derivative jump over [a, b] (Gauss-Legendre, 8 points per panel)."""
    import numpy as np

    nodes, weights = np.polynomial.legendre.leggauss(8)
    total = 0.0
    # sqrt-graded panels resolve the x^{-1/2} density at 0
    edges = [a + (b - a) * (k / panels) ** 2 for k in range(panels + 1)]
    for lo, hi in zip(edges, edges[1:]):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        for t, w in zip(nodes, weights):
            x = mid + half * t
            total += w * half * riesz_density_fd(x, ex, eps=min(1e-5, x * 1e-3) if x > 0 else 1e-9)
    return total


def fd_laplacian(z, ex: SubharmonicExample, h: float = 1e-3) -> float:
    """5-point finite-difference Laplacian of u at z."""
    z = complex(z)
    centre = u_eval(z, ex)
    around = sum(u_eval(z + d, ex) for d in (h, -h, 1j * h, -1j * h))
    return (around - 4 * centre) / (h * h)


def max_theta_margin(ex: SubharmonicExample, radii, points: int = 720) -> float:
    """min over r of (r + 5 - max_theta u(r e^{i theta})); >= 0 when the bound holds."""
    worst = math.inf
    for r in radii:
        peak = max(u_eval(r * complex(math.cos(t), math.sin(t)), ex)
                   for t in (2 * math.pi * k / points for k in range(points)))
        worst = min(worst, r + 5 - peak)
    return worst


# ---------------------------------------------------------------------------
# Claims A and B on the upper unit semi-disk


@dataclass(frozen=True)
class ClaimsReport:
    alpha: float
    grid_density: int
    points: int
    margin_A: float
    margin_B: float
    worst_A: tuple
    worst_B: tuple

    @property
    def holds(self) -> bool:
        return self.margin_A >= 0 and self.margin_B >= 0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "grid_density": self.grid_density, "points": self.points,
                "margin_A": self.margin_A, "margin_B": self.margin_B,
                "worst_A": list(self.worst_A), "worst_B": list(self.worst_B)}


def _semi_disk_grid(n: int):
    for i in range(n + 1):
        x = -1 + 2 * i / n
        for k in range(n + 1):
            y = k / n
            if x * x + y * y <= 1:
                yield x, y


def claims_check(ex_or_alpha, grid_density: int = 100, ctx: PrecisionContext | None = None) -> ClaimsReport:
    """Worst margins of Claim A and Claim B on a grid of the closed upper unit semi-disk.

    Claim A: |Im f(z)| < 5 e^{2a} y^2 + 2 a |x| e^{-a x^2/2} y, f(z) = e^{-a z^2}.
    Claim B: Im F(x+iy) < 10 e^{2a} y^2 + e^{-2a}, F(w) = int_0^w f.
    A margin is RHS - LHS.
    """
    if grid_density < 10:
        raise DomainError("grid_density must be at least 10")
    if isinstance(ex_or_alpha, SubharmonicExample):
        alpha = ex_or_alpha.alpha
        ex = ex_or_alpha
    else:
        ex = SubharmonicExample.from_alpha(float(ex_or_alpha), ctx or DEFAULT_CONTEXT)
        alpha = ex.alpha
    e2a = math.exp(2 * alpha)
    margin_A = margin_B = math.inf
    worst_A = worst_B = (math.nan, math.nan)
    count = 0
    for x, y in _semi_disk_grid(grid_density):
        count += 1
        z = complex(x, y)
        lhs_A = abs(complex(ex.f(z)).imag)
        rhs_A = 5 * e2a * y * y + 2 * alpha * abs(x) * math.exp(-alpha * x * x / 2) * y
        if rhs_A - lhs_A < margin_A:
            margin_A, worst_A = rhs_A - lhs_A, (x, y)
        lhs_B = complex(ex.F_gauss(z)).imag
        rhs_B = 10 * e2a * y * y + math.exp(-2 * alpha)
        if rhs_B - lhs_B < margin_B:
            margin_B, worst_B = rhs_B - lhs_B, (x, y)
    return ClaimsReport(alpha, grid_density, count, margin_A, margin_B, worst_A, worst_B)


def proposition_report(ex: SubharmonicExample, theta_points: int = 720, grid_density: int = 100,
                       laplacian_grid: int = 12) -> dict:
    """JSON-ready summary of the Proposition checks."""
    R = ex.R
    radii = [1.0, math.sqrt(R), R / 4, R / 2, R]
    lap = 0.0
    h = R * 1e-3
    for i in range(1, laplacian_grid):
        for k in range(1, laplacian_grid):
            z = complex(-R / 2 + R * i / laplacian_grid, R / 2 * (2 * k / laplacian_grid - 1)) * 0.9
            if abs(z.imag) < 4 * h and z.real > -h:
                continue
            if abs(z) + 2 * h > R:
                continue
            lap = max(lap, abs(fd_laplacian(z, ex, h)))
    claims = claims_check(ex, grid_density)
    return {
        "R": R,
        "alpha": ex.alpha,
        "max_theta_margin": max_theta_margin(ex, radii, theta_points),
        "mass_unit_disk": riesz_mass(0, 1, ex),
        "mass_full_over_sqrtR": riesz_mass(0, R, ex) / math.sqrt(R),
        "laplacian_max_abs": lap,
        "claims_margin_A": claims.margin_A,
        "claims_margin_B": claims.margin_B,
    }


__all__ = ["ClaimsReport", "SubharmonicExample", "claims_check", "fd_laplacian", "max_theta_margin",
           "proposition_report", "riesz_density_fd", "riesz_mass", "riesz_mass_fd", "u_eval"]
