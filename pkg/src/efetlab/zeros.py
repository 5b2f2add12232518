"""Zero counting and localisation for Taylor-defined entire functions.

* :func:`winding_count` -- n_F(R) from the argument principle on |z| = R,
  integrated with the nested trapezoid rule.
* :func:`locate_zeros` -- quadtree over the bounding square; each cell's
  zero count is the winding of F along its rectangle boundary (argument
  tracking), cells holding one zero are finished by Newton.
* :func:`counting_profile` / :func:`fit_growth` -- sampled n_F and a log-log
  fit of its growth.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial

import numpy as np

from .errors import (ConsistencyError, ConvergenceError, DegenerateProfileError, DomainError,
                     EvaluationError, ProximityError)
from .mpcore import CIRCLE_MAX_NODES, CIRCLE_START_NODES, circle_refinements
from .parallel import parallel_map
from .taylor import TaylorFunction

WINDING_STABLE = 0.25
NUDGE_RETRIES = 8
NUDGE_FLOOR_LOG2 = -10
NEWTON_MAX_ITER = 50
SPLIT_RATIOS = (Fraction(1, 2), Fraction(17, 32), Fraction(15, 32), Fraction(9, 16), Fraction(7, 16))


@dataclass(frozen=True)
class WindingResult:
    count: int
    value: complex
    residual: float
    radius: float
    nodes: int
    truncation_N: int
    precision_bits: int
    nudges: int = 0


def _winding_once(F: TaylorFunction, R, start_nodes, max_nodes) -> WindingResult:
    mp = F.ctx.mp
    previous = None
    stable = 0
    for nodes, estimate, _ in circle_refinements(F.log_derivative, 0, R, F.ctx, start_nodes,
                                                 max_nodes, mp=mp):
        value = complex(estimate)
        if previous is not None:
            stable = stable + 1 if abs(value - previous) < WINDING_STABLE else 0
            count = round(value.real)
            residual = abs(value - count)
            if stable >= 2 and residual < WINDING_STABLE:
                wprec = F.working_context(float(R)).prec
                return WindingResult(count, value, residual, float(R), nodes,
                                     F.order(float(R), wprec), wprec)
        previous = value
    raise ConvergenceError(f"winding integral at R={float(R)} did not stabilise", estimate=previous,
                           gap=None, radius=float(R))


def winding(F: TaylorFunction, R, start_nodes: int = CIRCLE_START_NODES,
            max_nodes: int = CIRCLE_MAX_NODES) -> WindingResult:
    """Argument-principle zero count on |z| = R with diagnostics.

    If a zero obstructs the circle, the radius is nudged by multiples of
    eps = R max(2^{-p/4}, 2^{-10}) with alternating sign (at most 8
    retries); the radius actually used is reported.  The 2^{-10} floor keeps
    a zero sitting on the original circle far enough from the nudged one
    for the trapezoid rule to converge below the node cap.
    """
    if R <= 0:
        raise DomainError("winding count needs R > 0")
    mp = F.ctx.mp
    R = mp.mpf(R)
    eps = R * mp.mpf(2) ** max(-F.ctx.precision_bits / 4, NUDGE_FLOOR_LOG2)
    offsets = [0] + [s * k for k in range(1, NUDGE_RETRIES // 2 + 1) for s in (1, -1)]
    last = None
    for attempt, off in enumerate(offsets):
        radius = R + off * eps
        try:
            result = _winding_once(F, radius, start_nodes, max_nodes)
        except (ProximityError, ConvergenceError) as exc:
            last = exc
            continue
        return WindingResult(**{**asdict(result), "nudges": attempt})
    residual = getattr(last, "estimate", None)
    raise ConvergenceError(f"winding count at R={float(R)} failed after {NUDGE_RETRIES} nudges: {last}",
                           estimate=residual, gap=None, radius=float(R))


def winding_count(F: TaylorFunction, R) -> int:
    """n_F(R): zeros of F in |z| <= R with multiplicity."""
    return winding(F, R).count


# ---------------------------------------------------------------------------
# zero localisation


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class ZeroSet:
    zeros: tuple
    region_radius: float
    winding_total: int

    @property
    def locations(self) -> list:
        return [z.location for z in self.zeros]

    def with_multiplicity(self) -> list:
        """Locations repeated according to multiplicity."""
        return [z.location for z in self.zeros for _ in range(z.multiplicity)]

    def to_dict(self) -> dict:
        return {
            "region_radius": self.region_radius,
            "winding_total": self.winding_total,
            "zeros": [{"re": z.location.real, "im": z.location.imag, "multiplicity": z.multiplicity,
                       "residual": z.residual} for z in self.zeros],
        }


@dataclass
class _Tracker:
    """Argument tracking of F along axis-parallel segments with exact dyadic vertices."""

    F: TaylorFunction
    values: dict = field(default_factory=dict)

    def value(self, x: Fraction, y: Fraction):
        """(F, |F'/F|) at an exact vertex."""
        key = (x, y)
        v = self.values.get(key)
        if v is None:
            mp = self.F.ctx.mp
            z = mp.mpc(mp.mpf(x.numerator) / x.denominator, mp.mpf(y.numerator) / y.denominator)
            f, df, err, _ = self.F.eval_with_derivative(z)
            if abs(f) <= 16 * err:
                raise ProximityError(f"F vanishes on a cell boundary near {complex(z)}")
            v = (f, float(abs(df / f)))
            self.values[key] = v
        return v

    def edge(self, p, q, max_len: Fraction, depth: int = 0) -> float:
        """Change of arg F from p to q.

        A piece is accepted once it is short against the local rate |F'/F|
        at both ends and the two values differ by less than half their size,
        so the argument moves by well under a quarter turn along it.
        """
        fp, rate_p = self.value(*p)
        fq, rate_q = self.value(*q)
        length = abs(q[0] - p[0]) + abs(q[1] - p[1])
        if (length <= max_len and float(length) * max(rate_p, rate_q) <= 0.5
                and abs(fq - fp) < 0.5 * min(abs(fp), abs(fq))):
            return float(self.F.ctx.mp.arg(fq / fp))
        if depth > 60:
            raise ProximityError("argument tracking did not resolve an edge")
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        return self.edge(p, mid, max_len, depth + 1) + self.edge(mid, q, max_len, depth + 1)

    def winding(self, x0, x1, y0, y1) -> int:
        corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        max_len = max(x1 - x0, y1 - y0) / 4
        total = sum(self.edge(corners[i], corners[(i + 1) % 4], max_len) for i in range(4))
        turns = total / (2 * math.pi)
        count = round(turns)
        if abs(turns - count) > 1e-6:
            raise ConsistencyError(f"non-integral cell winding {turns}")
        return count


def _newton(F: TaylorFunction, z0, multiplicity: int, step_tol):
    mp = F.ctx.mp
    z = mp.mpc(z0)
    for _ in range(NEWTON_MAX_ITER):
        f, df, err, _ = F.eval_with_derivative(z)
        if abs(f) <= err:
            return z, True
        if df == 0:
            return z, False
        step = multiplicity * f / df
        z -= step
        if abs(step) < step_tol:
            return z, True
    return z, False


def locate_zeros(F: TaylorFunction, R, delta_loc=None, check: bool = True) -> ZeroSet:
    """All zeros of F in |z| <= R, each with multiplicity and residual |F|.

    ``delta_loc`` (default R 1e-6) is the cell-size floor below which a
    cell with winding >= 2 is reported as one zero of that multiplicity.
    With ``check`` the total is compared against :func:`winding_count`.
    """
    if R <= 0:
        raise DomainError("locate_zeros needs R > 0")
    mp = F.ctx.mp
    R_frac = Fraction(R)
    delta = Fraction(delta_loc) if delta_loc is not None else R_frac / 10**6
    step_tol = mp.mpf(delta.numerator) / delta.denominator * F.ctx.tol()
    half = R_frac * 17 / 16
    tracker = _Tracker(F)
    found = []

    def inside(z, x0, x1, y0, y1, margin):
        return (x0 - margin <= z.real <= x1 + margin) and (y0 - margin <= z.imag <= y1 + margin)

    def split(x0, x1, y0, y1, w):
        last_error = None
        for ratio in SPLIT_RATIOS:
            xm = x0 + (x1 - x0) * ratio
            ym = y0 + (y1 - y0) * ratio
            cells = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
            try:
                counts = [tracker.winding(*c) for c in cells]
            except (ProximityError, ConsistencyError) as exc:
                last_error = exc
                continue
            if sum(counts) == w:
                return list(zip(cells, counts))
            last_error = ConsistencyError(f"children windings {counts} do not sum to {w}")
        raise ConsistencyError(f"could not split cell {[float(v) for v in (x0, x1, y0, y1)]}: {last_error}")

    def process(cell, w):
        x0, x1, y0, y1 = cell
        if w == 0:
            return
        size = max(x1 - x0, y1 - y0)
        centre = complex(float((x0 + x1) / 2), float((y0 + y1) / 2))
        if w == 1:
            z, ok = _newton(F, centre, 1, step_tol)
            margin = float(size) * 1e-9
            if ok and inside(complex(z), float(x0), float(x1), float(y0), float(y1), margin):
                found.append((z, 1))
                return
        if size * 2 <= delta:
            z, ok = _newton(F, centre, w, step_tol)
            if not (ok and inside(complex(z), float(x0), float(x1), float(y0), float(y1), float(size))):
                z = mp.mpc(centre)
            found.append((z, w))
            return
        for child, cw in split(x0, x1, y0, y1, w):
            process(child, cw)

    total = tracker.winding(-half, half, -half, half)
    process((-half, half, -half, half), total)

    merged: list = []
    merge_radius = 4 * float(delta)
    for z, m in found:
        for i, (zz, mm) in enumerate(merged):
            if abs(complex(z) - complex(zz)) < merge_radius:
                merged[i] = (zz, mm + m)
                break
        else:
            merged.append((z, m))
    zeros = []
    for z, m in merged:
        if abs(complex(z)) <= float(R):
            zeros.append(Zero(complex(z), m, float(abs(F(z)))))
    result = ZeroSet(tuple(zeros), float(R), sum(z.multiplicity for z in zeros))
    if check:
        expected = winding_count(F, R)
        if expected != result.winding_total:
            raise ConsistencyError(f"located {result.winding_total} zeros but winding count is {expected}")
    return result


# ---------------------------------------------------------------------------
# counting profiles


@dataclass(frozen=True)
class CountingFunction:
    """Sampled R -> n_F(R), with per-radius winding diagnostics."""

    samples: tuple
    details: tuple = ()

    @property
    def radii(self) -> list:
        return [r for r, _ in self.samples]

    @property
    def counts(self) -> list:
        return [n for _, n in self.samples]

    CSV_COLUMNS = ("R", "n_F", "ratio_n_over_R", "winding_residual", "truncation_N", "precision_bits")

    def rows(self) -> list:
        out = []
        for i, (R, n) in enumerate(self.samples):
            d = self.details[i] if i < len(self.details) else None
            out.append({
                "R": R,
                "n_F": n,
                "ratio_n_over_R": n / R,
                "winding_residual": d.residual if d else "",
                "truncation_N": d.truncation_N if d else "",
                "precision_bits": d.precision_bits if d else "",
            })
        return out

    def to_dict(self) -> dict:
        return {"samples": [{"R": R, "n_F": n} for R, n in self.samples]}


def _winding_task(F, R):
    return winding(F, R)


def counting_profile(F: TaylorFunction, radii, workers: int | None = None) -> CountingFunction:
    """n_F at each radius (independent radii may run in parallel)."""
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be positive and strictly increasing")
    details = parallel_map(partial(_winding_task, F), radii, workers)
    counts = [d.count for d in details]
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise ConsistencyError(f"counting function not monotone: {counts}")
    return CountingFunction(tuple(zip(radii, counts)), tuple(details))


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    prefactor: float
    r_squared: float
    ratio_table: tuple

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "prefactor": self.prefactor, "r_squared": self.r_squared,
                "ratio_table": [{"R": R, "ratio": q} for R, q in self.ratio_table]}


def fit_growth(profile) -> GrowthFit:
    """Least-squares fit log n_F(R) = exponent log R + log prefactor.

    Samples with zero count are excluded from the fit but kept in the
    n_F(R)/R ratio table.  A profile with no zeros at all raises
    :class:`DegenerateProfileError` (exponential-function candidate).
    """
    samples = profile.samples if isinstance(profile, CountingFunction) else tuple(profile)
    ratio_table = tuple((float(R), n / R) for R, n in samples)
    positive = [(R, n) for R, n in samples if n > 0]
    if not positive:
        raise DegenerateProfileError("all counts are zero: exponential-function candidate")
    if len(positive) < 3:
        raise DomainError("fit_growth needs at least 3 samples with positive count")
    x = np.log([R for R, _ in positive])
    y = np.log([n for _, n in positive])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return GrowthFit(float(slope), float(math.exp(intercept)), r2, ratio_table)


__all__ = ["CountingFunction", "GrowthFit", "WindingResult", "Zero", "ZeroSet", "counting_profile",
           "fit_growth", "locate_zeros", "winding", "winding_count", "EvaluationError"]
