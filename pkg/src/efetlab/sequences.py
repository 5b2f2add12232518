"""Catalogue of coefficient sequences n -> omega_n.

A :class:`CoefficientSequence` is an immutable, hashable tag plus
parameters.  Values are produced lazily at any requested precision;
rational phase parameters are kept as :class:`fractions.Fraction` so the
quadratic-phase sequences are exact at every precision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ConfigError, OutOfRangeError
from .mpcore import DEFAULT_CONTEXT, PrecisionContext, as_context

KINDS = (
    "constant",
    "quadratic_phase",
    "cos_sqrt_plus2",
    "random_unimodular",
    "masked",
    "explicit",
    "cosine_oracle",
    "expm1_oracle",
)

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed: int, index: int) -> int:
    """Output ``index`` of the SplitMix64 stream started at ``seed``.

    SplitMix64 (Steele, Lea, Flood 2014): state advances by the golden
    gamma 0x9E3779B97F4A7C15 and each output is the state passed through
    the mix
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        z =  z ^ (z >> 31)
    all modulo 2^64.  The stream is counter based, so any index is O(1).
    """
    z = (seed + (index + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def unit_phase(seed: int, index: int) -> Fraction:
    """Uniform phase in [0, 1) with 53 random bits, exact as a dyadic rational."""
    return Fraction(splitmix64(seed, index) >> 11, 1 << 53)


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    # floats go through their shortest repr so 0.2 means 1/5
    return Fraction(repr(float(x)))


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(float(re), float(im))
    if isinstance(x, dict):
        return complex(float(x.get("re", 0)), float(x.get("im", 0)))
    return complex(x)


@dataclass(frozen=True)
class CoefficientSequence:
    """Tagged coefficient generator with declared bounds.

    ``c_low <= |omega_n| <= C_high * growth**n`` wherever the bound is
    declared (``c_low == 0`` means no lower bound).  ``sigma_hint`` and
    ``density_hint`` are the declared exponential type and lower density
    of the unimodular set.
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown sequence kind {self.kind!r}")

    def param(self, name, default=None):
        for key, value in self.params:
            if key == name:
                return value
        return default

    # -- values ------------------------------------------------------------

    def value(self, n: int, mp):
        """omega_n as an mpc in the mpmath context ``mp``."""
        if n < 0:
            raise OutOfRangeError("coefficient index must be non-negative")
        kind = self.kind
        if kind == "constant":
            return mp.mpc(self.param("theta")) * mp.mpc(self.param("alpha")) ** n
        if kind == "quadratic_phase":
            phase = (self.param("beta") * n * n + self.param("gamma") * n + self.param("delta")) % 1
            return _unimodular(phase, mp)
        if kind == "cos_sqrt_plus2":
            return mp.mpc(mp.cos(mp.sqrt(n)) + 2)
        if kind == "random_unimodular":
            return _unimodular(unit_phase(self.param("seed"), n), mp)
        if kind == "masked":
            base = self.param("base").value(n, mp)
            pattern = self.param("pattern")
            if pattern[n % len(pattern)]:
                return base
            return base * mp.mpf(self.param("damping").numerator) / self.param("damping").denominator
        if kind == "explicit":
            values = self.param("values")
            if n >= len(values):
                raise OutOfRangeError(f"explicit sequence has {len(values)} entries, index {n} requested")
            return mp.mpc(values[n])
        if kind == "cosine_oracle":
            if n % 2:
                return mp.mpc(0)
            return mp.mpc(-1 if (n // 2) % 2 else 1)
        if kind == "expm1_oracle":
            return mp.mpc(0 if n == 0 else 1)
        raise AssertionError(kind)

    @property
    def length(self) -> int | None:
        """Number of coefficients for finite sequences, else None."""
        if self.kind == "explicit":
            return len(self.param("values"))
        return None

    # -- declared bounds -----------------------------------------------------

    @property
    def C_high(self) -> float:
        kind = self.kind
        if kind == "constant":
            return abs(self.param("theta"))
        if kind == "cos_sqrt_plus2":
            return 3.0
        if kind == "masked":
            return self.param("base").C_high
        if kind == "explicit":
            return max((abs(v) for v in self.param("values")), default=0.0)
        return 1.0

    @property
    def c_low(self) -> float:
        kind = self.kind
        if kind == "constant":
            return abs(self.param("theta")) if abs(self.param("alpha")) == 1 else 0.0
        if kind in ("quadratic_phase", "random_unimodular", "cos_sqrt_plus2"):
            return 1.0
        if kind == "masked":
            return float(self.param("damping")) * self.param("base").c_low
        if kind == "explicit":
            values = self.param("values")
            return min((abs(v) for v in values), default=0.0)
        return 0.0

    @property
    def growth(self) -> float:
        """Geometric growth factor Q in |omega_n| <= C_high * Q**n."""
        if self.kind == "constant":
            return max(abs(self.param("alpha")), 1e-300)
        if self.kind == "masked":
            return self.param("base").growth
        return 1.0

    def is_unimodular(self, n: int) -> bool:
        kind = self.kind
        if kind == "constant":
            return abs(abs(self.param("theta")) * abs(self.param("alpha")) ** n - 1) < 1e-15
        if kind in ("quadratic_phase", "random_unimodular"):
            return True
        if kind == "cos_sqrt_plus2":
            return False
        if kind == "masked":
            pattern = self.param("pattern")
            return bool(pattern[n % len(pattern)]) and self.param("base").is_unimodular(n)
        if kind == "explicit":
            values = self.param("values")
            return n < len(values) and abs(abs(values[n]) - 1) < 1e-15
        if kind == "cosine_oracle":
            return n % 2 == 0
        if kind == "expm1_oracle":
            return n >= 1
        raise AssertionError(kind)

    @property
    def sigma_hint(self) -> float:
        explicit = self.param("sigma")
        if explicit is not None:
            return explicit
        if self.kind == "constant":
            return abs(self.param("alpha"))
        if self.kind == "masked":
            return self.param("base").sigma_hint
        if self.kind == "explicit":
            return 0.0
        return 1.0

    @property
    def density_hint(self) -> float:
        kind = self.kind
        if kind == "constant":
            return 1.0 if self.is_unimodular(0) and abs(self.param("alpha")) == 1 else 0.0
        if kind in ("quadratic_phase", "random_unimodular", "expm1_oracle"):
            return 1.0
        if kind == "cosine_oracle":
            return 0.5
        if kind == "masked":
            pattern = self.param("pattern")
            return sum(1 for p in pattern if p) / len(pattern) * self.param("base").density_hint
        return 0.0

    @property
    def unimodular_everywhere(self) -> bool:
        return self.kind in ("quadratic_phase", "random_unimodular") or (
            self.kind == "constant" and self.density_hint == 1.0)

    # -- serialisation ---------------------------------------------------------

    def descriptor(self) -> dict[str, Any]:
        """JSON-ready description, inverse of :func:`from_descriptor`."""
        out: dict[str, Any] = {"kind": self.kind}
        for key, value in self.params:
            if isinstance(value, Fraction):
                out[key] = str(value) if value.denominator != 1 else value.numerator
            elif isinstance(value, complex):
                out[key] = [value.real, value.imag] if value.imag else value.real
            elif isinstance(value, CoefficientSequence):
                out[key] = value.descriptor()
            elif key == "pattern":
                out[key] = [int(bool(p)) for p in value]
            elif key == "values":
                out[key] = [[v.real, v.imag] for v in value]
            else:
                out[key] = value
        return out

    def __str__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self.params if k != "values")
        return f"{self.kind}({inner})"


def _unimodular(phase: Fraction, mp):
    """exp(2 pi i * phase) evaluated exactly at rational phase."""
    x = mp.mpf(phase.numerator) / phase.denominator * 2
    return mp.mpc(mp.cospi(x), mp.sinpi(x))


# ---------------------------------------------------------------------------
# constructors


def constant(theta=1, alpha=1) -> CoefficientSequence:
    """omega_n = theta * alpha**n, so F(z) = theta * exp(alpha z)."""
    return CoefficientSequence("constant", (("theta", _complex(theta)), ("alpha", _complex(alpha))))


def quadratic_phase(beta=0, gamma=0, delta=0) -> CoefficientSequence:
    """omega_n = exp(2 pi i (beta n^2 + gamma n + delta)); parameters reduced mod 1."""
    b, g, d = (_fraction(v) % 1 for v in (beta, gamma, delta))
    return CoefficientSequence("quadratic_phase", (("beta", b), ("gamma", g), ("delta", d)))


def cos_sqrt_plus2() -> CoefficientSequence:
    return CoefficientSequence("cos_sqrt_plus2")


def random_unimodular(seed: int = 0) -> CoefficientSequence:
    return CoefficientSequence("random_unimodular", (("seed", int(seed) & _MASK64),))


def masked(base: CoefficientSequence, pattern, damping=Fraction(1, 2)) -> CoefficientSequence:
    """Keep ``base`` where the periodic ``pattern`` is true, damp it elsewhere."""
    pattern = tuple(bool(p) for p in pattern)
    if not pattern or not any(pattern):
        raise ConfigError("mask pattern must contain at least one kept position")
    damping = _fraction(damping)
    if not 0 < damping < 1:
        raise ConfigError("mask damping must lie in (0, 1)")
    return CoefficientSequence("masked", (("base", base), ("pattern", pattern), ("damping", damping)))


def density_mask(period: int, kept: int) -> tuple:
    """Evenly spread pattern with ``kept`` true entries out of ``period``."""
    if not 0 < kept <= period:
        raise ConfigError("need 0 < kept <= period")
    return tuple((i * kept) // period != ((i + 1) * kept) // period for i in range(period))


def explicit(values) -> CoefficientSequence:
    return CoefficientSequence("explicit", (("values", tuple(_complex(v) for v in values)),))


def cosine_oracle() -> CoefficientSequence:
    """omega_{2k} = (-1)^k, odd entries zero: F = cos."""
    return CoefficientSequence("cosine_oracle")


def expm1_oracle() -> CoefficientSequence:
    """omega_0 = 0, omega_n = 1 otherwise: F = exp(z) - 1."""
    return CoefficientSequence("expm1_oracle")


_DESCRIPTOR_FIELDS = {
    "constant": {"theta", "alpha"},
    "quadratic_phase": {"beta", "gamma", "delta"},
    "cos_sqrt_plus2": set(),
    "random_unimodular": {"seed"},
    "masked": {"base", "pattern", "damping", "period", "kept"},
    "explicit": {"values"},
    "cosine_oracle": set(),
    "expm1_oracle": set(),
}


def from_descriptor(desc: dict, seed: int | None = None) -> CoefficientSequence:
    """Build a sequence from its JSON descriptor.

    ``seed`` overrides the seed of random sequences (also inside masks).
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("sequence descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    if kind not in _DESCRIPTOR_FIELDS:
        raise ConfigError(f"unknown sequence kind {kind!r}")
    unknown = set(desc) - _DESCRIPTOR_FIELDS[kind] - {"kind"}
    if unknown:
        raise ConfigError(f"unknown fields for {kind}: {sorted(unknown)}")
    try:
        if kind == "constant":
            return constant(desc.get("theta", 1), desc.get("alpha", 1))
        if kind == "quadratic_phase":
            return quadratic_phase(desc.get("beta", 0), desc.get("gamma", 0), desc.get("delta", 0))
        if kind == "cos_sqrt_plus2":
            return cos_sqrt_plus2()
        if kind == "random_unimodular":
            return random_unimodular(desc.get("seed", 0) if seed is None else seed)
        if kind == "masked":
            base = from_descriptor(desc.get("base", {"kind": "random_unimodular"}), seed)
            if "pattern" in desc:
                pattern = desc["pattern"]
            else:
                pattern = density_mask(int(desc.get("period", 10)), int(desc.get("kept", 5)))
            return masked(base, pattern, desc.get("damping", "1/2"))
        if kind == "explicit":
            return explicit(desc["values"])
        if kind == "cosine_oracle":
            return cosine_oracle()
        return expm1_oracle()
    except (TypeError, ValueError, ZeroDivisionError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad parameters for {kind}: {exc}") from exc


def sequence_value(seq: CoefficientSequence, n: int, ctx: PrecisionContext | None = None):
    """omega_n at the precision of ``ctx``; deterministic for fixed parameters."""
    return seq.value(n, as_context(ctx).mp)


def catalogue() -> dict[str, CoefficientSequence]:
    """One representative of every catalogued kind (used by sweeps and tests)."""
    return {
        "constant": constant(1, 1),
        "quadratic_phase": quadratic_phase("1/5"),
        "cos_sqrt_plus2": cos_sqrt_plus2(),
        "random_unimodular": random_unimodular(1),
        "masked": masked(random_unimodular(3), density_mask(10, 3)),
        "explicit": explicit([1, 2, -1, 0.5j, 3]),
        "cosine_oracle": cosine_oracle(),
        "expm1_oracle": expm1_oracle(),
    }


__all__ = [
    "CoefficientSequence", "KINDS", "catalogue", "constant", "cos_sqrt_plus2", "cosine_oracle",
    "density_mask", "explicit", "expm1_oracle", "from_descriptor", "masked", "quadratic_phase",
    "random_unimodular", "sequence_value", "splitmix64", "unit_phase", "DEFAULT_CONTEXT",
]
