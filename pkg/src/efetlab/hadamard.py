"""Hadamard factorisation quantities on a disk of radius R.

F(z) = exp(a_R z + h_R(z)) pi_R(z), where pi_R runs over the zeros with
|lam| <= R and h_R(z) = -sum_{j>=2} s_j(R) z^j / j collects the tail power
sums s_j(R) = sum_{|lam|>R} lam^{-j}.  The angular lab (S, theta*, g_R)
and the comparison function v_R run in double precision; they are
diagnostics, not certified quantities.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConvergenceError, DomainError

DIRECT_TERMS = 512


# ---------------------------------------------------------------------------
# zero models


@dataclass(frozen=True)
class ZeroFamily:
    """Closed-form zeros lam = u * scale * (k + shift)^power for k >= k0 and u in ``units``."""

    units: tuple
    scale: float
    shift: float = 0.0
    k0: int = 0
    power: float = 1.0

    def modulus(self, k: int) -> float:
        return self.scale * (k + self.shift) ** self.power

    def zeros_within(self, R: float) -> list[complex]:
        out = []
        k = self.k0
        while self.modulus(k) <= R:
            out.extend(complex(u) * self.modulus(k) for u in self.units)
            k += 1
        return out

    def first_outside(self, R: float) -> int:
        k = self.k0
        while self.modulus(k) <= R:
            k += 1
        return k

    def count_bound(self, t: float) -> float:
        """Upper bound for the number of family zeros with |lam| <= t."""
        m = len(self.units)
        return m * max(0.0, (t / self.scale) ** (1 / self.power) - self.shift - self.k0 + 1)

    def sigma(self, R: float) -> float:
        """sigma with n(t) <= sigma t for every t >= R (count_bound(t)/t is non-increasing)."""
        m = len(self.units)
        return m * ((R / self.scale) ** (1 / self.power) / R + max(0.0, 1 - self.shift - self.k0) / R)

    def radial_sums(self, R: float, j: int) -> tuple[float, float]:
        """sum over k with modulus > R of modulus(k)^{-j}, with a rigorous error bound.

        Direct summation of DIRECT_TERMS terms, then the midpoint-rule integral
        int_{K-1/2}^inf f; its error is at most (f''(K-1/2) + |f'(K-1/2)|)/24
        for the convex, decreasing f(x) = (scale (x+shift)^power)^{-j}.
        """
        q = self.power * j
        if q <= 1:
            raise DomainError(f"tail power sum diverges for j={j} with power={self.power}")
        start = self.first_outside(R)
        K = start + DIRECT_TERMS
        direct = math.fsum(self.modulus(k) ** (-j) for k in range(start, K))
        x = K - 0.5 + self.shift
        c = self.scale ** (-j)
        integral = c * x ** (1 - q) / (q - 1)
        d1 = c * q * x ** (-q - 1)
        d2 = c * q * (q + 1) * x ** (-q - 2)
        return direct + integral, (d1 + d2) / 24 + 4 * math.ulp(direct + integral) * K

    def power_sum(self, R: float, j: int) -> tuple[complex, float]:
        radial, err = self.radial_sums(R, j)
        total = sum(complex(u) ** (-j) for u in self.units)
        return total * radial, len(self.units) * err


COSINE_FAMILY = ZeroFamily(units=(1, -1), scale=math.pi, shift=0.5, k0=0)
EXPM1_FAMILY = ZeroFamily(units=(1j, -1j), scale=2 * math.pi, shift=0.0, k0=1)


@dataclass(frozen=True)
class ZeroModel:
    """Zeros inside |lam| <= R plus a description of the tail.

    ``tail`` is a :class:`ZeroFamily` or None.  Without a family the tail is
    "tail-unmodeled": s_j are reported as 0 with the Claim-1 envelope
    2 sigma j/(j-1) R^{1-j} as error, ``sigma`` being a declared bound
    n_F(t) <= sigma t for t >= R.
    """

    R: float
    inside: tuple
    tail: ZeroFamily | None = None
    sigma: float | None = None

    def __post_init__(self):
        for lam in self.inside:
            if abs(lam) > self.R * (1 + 1e-12):
                raise DomainError(f"inside zero {lam} lies outside |z| <= {self.R}")
        if self.tail is None and self.sigma is None:
            raise DomainError("an unmodeled tail needs a declared sigma")

    @classmethod
    def from_family(cls, family: ZeroFamily, R: float) -> "ZeroModel":
        return cls(R=float(R), inside=tuple(family.zeros_within(R)), tail=family)

    @classmethod
    def from_zero_set(cls, zero_set, sigma: float, tail: ZeroFamily | None = None) -> "ZeroModel":
        """Model built from a computed :class:`~efetlab.zeros.ZeroSet` (zeros repeated by multiplicity)."""
        inside = tuple(complex(z) for z in zero_set.with_multiplicity())
        return cls(R=float(zero_set.region_radius), inside=inside, tail=tail, sigma=sigma)

    @property
    def tail_modeled(self) -> bool:
        return self.tail is not None

    def declared_sigma(self) -> float:
        if self.sigma is not None:
            return float(self.sigma)
        own = self.tail.sigma(self.R)
        extra = max(0.0, len(self.inside) - self.tail.count_bound(self.R))
        return own + extra / self.R


def claim1_envelope(sigma: float, j: int, R: float) -> float:
    """2 sigma j/(j-1) R^{1-j}."""
    return 2 * sigma * j / (j - 1) * R ** (1 - j)


def power_sums(model: ZeroModel, R: float | None = None, J_max: int = 40) -> list[tuple[complex, float]]:
    """[(s_j, error)] for j = 2..J_max."""
    if J_max < 2:
        raise DomainError("J_max must be at least 2")
    R = model.R if R is None else float(R)
    sigma = model.declared_sigma()
    out = []
    for j in range(2, J_max + 1):
        if model.tail is None:
            out.append((0j, claim1_envelope(sigma, j, R)))
        else:
            out.append(model.tail.power_sum(R, j))
    return out


# ---------------------------------------------------------------------------
# factorisation data


@dataclass(frozen=True)
class HadamardData:
    R: float
    a_R: complex
    s: tuple  # (s_j, err_j) for j = 2..J_max
    zero_model: ZeroModel
    flags: tuple = field(default=())

    @property
    def J_max(self) -> int:
        return len(self.s) + 1

    @property
    def sigma(self) -> float:
        return self.zero_model.declared_sigma()

    def s_j(self, j: int) -> complex:
        return self.s[j - 2][0]

    def rotation(self) -> float:
        """phi = arg a_R; the angular lab works in coordinates w = z e^{i phi}."""
        return cmath.phase(self.a_R) if self.a_R != 0 else 0.0

    def rotated(self) -> tuple[float, list[tuple[float, float, float]]]:
        """(|a_R|, [(|s_j|, theta_j, err_j)]) after rotating so that a_R >= 0."""
        phi = self.rotation()
        terms = []
        for j, (s, err) in enumerate(self.s, start=2):
            sj = s * cmath.exp(-1j * j * phi)
            terms.append((abs(sj), cmath.phase(sj) if sj != 0 else 0.0, err))
        return abs(self.a_R), terms


def a_R_estimate(F, model: ZeroModel, R: float | None = None) -> complex:
    """a_R = F'(0)/F(0) + sum_{|lam| <= R} 1/lam."""
    R = model.R if R is None else float(R)
    f0, df0, err, _ = F.eval_with_derivative(0)
    if abs(f0) <= err:
        raise DomainError("a_R_estimate requires F(0) != 0; normalise F first")
    total = complex(df0 / f0)
    inside = [lam for lam in model.inside if abs(lam) <= R]
    re = math.fsum((1 / lam).real for lam in inside)
    im = math.fsum((1 / lam).imag for lam in inside)
    return total + complex(re, im)


def build_hadamard(model: ZeroModel, a_R: complex | None = None, F=None, J_max: int = 40) -> HadamardData:
    """Assemble :class:`HadamardData`; a_R is taken from ``F`` when not given."""
    if a_R is None:
        if F is None:
            raise DomainError("build_hadamard needs either a_R or F")
        a_R = a_R_estimate(F, model)
    flags = () if model.tail_modeled else ("tail-unmodeled",)
    return HadamardData(R=model.R, a_R=complex(a_R), s=tuple(power_sums(model, J_max=J_max)),
                        zero_model=model, flags=flags)


def _series_tail(sigma: float, R: float, r: float, J: int) -> float:
    """Bound on sum_{j>J} env_j r^j / j with env_j the Claim-1 envelope, r < R."""
    q = r / R
    return 2 * sigma * R * q ** (J + 1) / (J * (1 - q))


def h_R_eval(z, data: HadamardData, full_output: bool = False):
    """h_R(z) = -sum_{j>=2} s_j z^j / j on |z| <= R/2."""
    z = complex(z)
    r = abs(z)
    if r > data.R / 2 * (1 + 1e-12):
        raise DomainError(f"h_R_eval needs |z| <= R/2 = {data.R / 2}")
    total = 0j
    err = 0.0
    power = z
    for j, (s, e) in enumerate(data.s, start=2):
        power *= z
        total -= s * power / j
        err += e * r**j / j
    err += _series_tail(data.sigma, data.R, r, data.J_max)
    return (total, err) if full_output else total


def pi_R_eval(z, model: ZeroModel) -> complex:
    """prod_{|lam| <= R} (1 - z/lam)."""
    z = complex(z)
    out = 1 + 0j
    for lam in model.inside:
        out *= 1 - z / lam
    return out


def log_abs_pi_R(z, model: ZeroModel) -> float:
    z = complex(z)
    total = 0.0
    for lam in model.inside:
        factor = abs(1 - z / lam)
        if factor == 0:
            return -math.inf
        total += math.log(factor)
    return total


def factorization_residual(F, data: HadamardData, points, min_distance: float = 0.5) -> float:
    """max |F(z) e^{-a_R z - h_R(z)} / pi_R(z) - 1| over points away from the inside zeros."""
    mp = F.ctx.mp
    worst = 0.0
    for z in points:
        z = complex(z)
        if any(abs(z - lam) < min_distance for lam in data.zero_model.inside):
            continue
        log_rest = -data.a_R * z - h_R_eval(z, data)
        value = F(z) * mp.exp(mp.mpc(log_rest)) / mp.mpc(pi_R_eval(z, data.zero_model))
        worst = max(worst, float(abs(value - 1)))
    return worst


# ---------------------------------------------------------------------------
# angular lab


def _check_r(r: float, data: HadamardData):
    if r <= 0 or r > data.R / 2 * (1 + 1e-12):
        raise DomainError(f"r must lie in (0, R/2]; got r={r}, R={data.R}")


def S_theta(r: float, theta: float, data: HadamardData, full_output: bool = False):
    """a_R r cos(theta) - sum_j (|s_j|/j) r^j cos(j theta + theta_j), a_R rotated to be >= 0."""
    _check_r(r, data)
    if abs(theta) > math.pi + 1e-12:
        raise DomainError("theta must lie in [-pi, pi]")
    a, terms = data.rotated()
    total = a * r * math.cos(theta)
    err = 0.0
    for j, (mod, th, e) in enumerate(terms, start=2):
        total -= mod / j * r**j * math.cos(j * theta + th)
        err += e * r**j / j
    err += _series_tail(data.sigma, data.R, r, data.J_max)
    return (total, err) if full_output else total


def _S_derivatives(r: float, theta: float, data: HadamardData) -> tuple[float, float]:
    """(S'(theta), S''(theta)) in theta."""
    a, terms = data.rotated()
    d1 = -a * r * math.sin(theta)
    d2 = -a * r * math.cos(theta)
    for j, (mod, th, _) in enumerate(terms, start=2):
        d1 += mod * r**j * math.sin(j * theta + th)
        d2 += j * mod * r**j * math.cos(j * theta + th)
    return d1, d2


def theta_star(r: float, data: HadamardData, tol: float = 1e-14, max_iter: int = 60) -> float:
    """Root near 0 of a_R sin(theta) - sum_j |s_j| r^{j-1} sin(j theta + theta_j) = 0.

    This is S'(theta) = 0 divided by -r.  Newton from theta = 0; the root
    must stay in |theta| <= pi/4 and be a strict maximum (S'' < 0).
    """
    _check_r(r, data)
    theta = 0.0
    for _ in range(max_iter):
        d1, d2 = _S_derivatives(r, theta, data)
        if d2 >= 0:
            raise ConvergenceError(f"S'' >= 0 at theta={theta:.6g}; no maximum near 0 at r={r}",
                                   estimate=theta)
        step = d1 / d2
        theta -= step
        if abs(theta) > math.pi / 4:
            raise ConvergenceError(f"Newton for theta* left |theta| <= pi/4 at r={r}", estimate=theta)
        if abs(step) <= tol * max(1.0, abs(theta)):
            break
    else:
        raise ConvergenceError("Newton for theta* did not converge", estimate=theta)
    if _S_derivatives(r, theta, data)[1] >= 0:
        raise ConvergenceError(f"S''(theta*) >= 0 at r={r}", estimate=theta)
    return theta


def _global_max(r: float, data: HadamardData, grid: int = 720) -> tuple[float, float]:
    """Global maximiser of S on [-pi, pi]: grid search polished by Newton on S'."""
    step = 2 * math.pi / grid
    values = [S_theta(r, -math.pi + k * step, data) for k in range(grid)]
    best = max(range(grid), key=values.__getitem__)
    theta = -math.pi + best * step
    lo, hi = theta - step, theta + step
    for _ in range(60):
        d1, d2 = _S_derivatives(r, theta, data)
        if d2 >= 0:
            break
        new = theta - d1 / d2
        if not lo <= new <= hi:
            break
        if abs(new - theta) < 1e-15:
            theta = new
            break
        theta = new
    theta = math.remainder(theta, 2 * math.pi)
    value = S_theta(r, theta, data)
    if value < values[best]:
        theta, value = -math.pi + best * step, values[best]
    return theta, value


def g_R_eval(r: float, data: HadamardData, method: str = "auto", full_output: bool = False):
    """g_R(r) = S(theta*) - r = max_{|z|=r} Re[a_R z + h_R(z)] - r.

    ``method="theta_star"`` insists on the local root near 0; ``"global"``
    maximises over the whole circle; ``"auto"`` tries the former and falls
    back to the latter when no maximum exists near 0 (e.g. a_R = 0).
    """
    _check_r(r, data)
    if method not in ("auto", "theta_star", "global"):
        raise DomainError(f"unknown method {method!r}")
    theta = None
    if method != "global":
        try:
            theta = theta_star(r, data)
        except ConvergenceError:
            if method == "theta_star":
                raise
    if theta is None:
        theta, _ = _global_max(r, data)
    value, err = S_theta(r, theta, data, full_output=True)
    g = value - r
    return (g, err, theta) if full_output else g


def g_R_profile(data: HadamardData, radii: Sequence[float], method: str = "auto") -> list[dict]:
    rows = []
    for r in radii:
        g, err, theta = g_R_eval(r, data, method=method, full_output=True)
        rows.append({"r": r, "theta_star": theta, "g_R": g, "error": err})
    return rows


# ---------------------------------------------------------------------------
# slit-disk harmonic measure and comparison function


def harmonic_measure_slit(zeta) -> float:
    """(2/pi) arg((1 + w)/(1 - w)), w = sqrt(zeta) on the branch 0 <= arg w <= pi."""
    zeta = complex(zeta)
    if zeta == 1:
        raise DomainError("harmonic_measure_slit is undefined at zeta = 1")
    if abs(zeta) > 1 + 1e-12:
        raise DomainError("harmonic_measure_slit needs |zeta| <= 1")
    w = cmath.sqrt(zeta)
    if w.imag < 0:
        w = -w
    return 2 / math.pi * cmath.phase((1 + w) / (1 - w))


def killing_term(z, eta: float, mu: float) -> float:
    """eta r^mu cos(mu (pi - |theta|)), harmonic off the positive real ray."""
    z = complex(z)
    r = abs(z)
    if r == 0:
        return 0.0
    return eta * r**mu * math.cos(mu * (math.pi - abs(cmath.phase(z))))


def v_R_eval(z, eta: float, mu: float, model: ZeroModel) -> float:
    """log|pi_R(z)| - eta r^mu cos(mu (pi - |theta|)); -inf exactly at an inside zero."""
    if eta <= 0:
        raise DomainError("eta must be positive")
    if not 0 < mu < 0.5:
        raise DomainError("mu must lie in (0, 1/2)")
    return log_abs_pi_R(z, model) - killing_term(z, eta, mu)


def v_R_boundary_scan(model: ZeroModel, radius: float, eta: float, mu: float, points: int = 360) -> list[dict]:
    rows = []
    for k in range(points):
        theta = -math.pi + 2 * math.pi * (k + 0.5) / points
        z = radius * cmath.exp(1j * theta)
        rows.append({"theta": theta, "v_R": v_R_eval(z, eta, mu, model)})
    return rows


def write_rows_csv(path, rows: list[dict]):
    if not rows:
        raise DomainError("nothing to write")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


__all__ = ["COSINE_FAMILY", "EXPM1_FAMILY", "HadamardData", "ZeroFamily", "ZeroModel", "S_theta",
           "a_R_estimate", "build_hadamard", "claim1_envelope", "factorization_residual",
           "g_R_eval", "g_R_profile", "h_R_eval", "harmonic_measure_slit", "killing_term",
           "log_abs_pi_R", "pi_R_eval", "power_sums", "theta_star", "v_R_boundary_scan", "v_R_eval",
           "write_rows_csv"]
