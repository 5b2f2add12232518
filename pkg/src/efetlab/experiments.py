"""Declarative experiments: JSON config in, CSV tables and a JSON summary out."""
from __future__ import annotations

import cmath
import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial

from .errors import (ConfigError, ConvergenceError, DegenerateProfileError, DomainError, EfetlabError,
                     PrecisionError, ProximityError)
from .mpcore import PrecisionContext
from .parallel import parallel_map
from .sequences import CoefficientSequence, cos_sqrt_plus2, from_descriptor
from .taylor import TaylorFunction

EXPERIMENTS = ("dichotomy-scan", "sqrt-example", "interp-verify", "hadamard-profile", "subharmonic",
               "combi", "count", "locate")
TOP_LEVEL_FIELDS = {"experiment", "sequence", "radii", "precision_bits", "h_list", "output", "seed", "extra"}
EXTRA_FIELDS = {"beta", "d", "R", "grid_density", "alpha_prime", "delta", "eta", "mu", "n_max", "mask",
                "sigma", "theta_points", "sample_points"}

COUNT_COLUMNS = ("R", "n_F", "ratio_n_over_R", "winding_residual", "truncation_N", "precision_bits")

DEFAULTS = {
    "count": {"sequence": {"kind": "constant", "theta": 1, "alpha": 1}, "radii": [1, 10, 50]},
    "locate": {"sequence": {"kind": "cosine_oracle"}, "radii": [10]},
    "dichotomy-scan": {"sequence": {"kind": "quadratic_phase", "beta": "1/3"}, "radii": [25, 50, 75, 100]},
    "sqrt-example": {"sequence": {"kind": "cos_sqrt_plus2"}, "radii": [16, 32, 64, 128]},
    "interp-verify": {"sequence": {"kind": "quadratic_phase", "beta": "1/5"}, "h_list": [0, 1, 5],
                      "extra": {"R": 40, "n_max": 25}},
    "hadamard-profile": {"sequence": {"kind": "cos_sqrt_plus2"}, "extra": {"R": 50}},
    "subharmonic": {"extra": {"R": 10000}},
    "combi": {"extra": {"d": 1, "R": 1000, "mask": "all"}},
}


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    sequence: dict | None = None
    radii: tuple = ()
    precision_bits: int = 128
    h_list: tuple = ()
    output: str | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out = asdict(self)
        out["radii"] = list(self.radii)
        out["h_list"] = list(self.h_list)
        return out

    def get(self, key, default=None):
        return self.extra.get(key, default)

    def coefficient_sequence(self) -> CoefficientSequence:
        if self.sequence is None:
            raise ConfigError(f"experiment {self.experiment!r} needs a sequence")
        try:
            return from_descriptor(self.sequence, seed=self.seed)
        except ConfigError:
            raise
        except (DomainError, ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"bad sequence descriptor: {exc}") from exc

    def taylor(self, bits: int | None = None) -> TaylorFunction:
        return TaylorFunction(self.coefficient_sequence(), PrecisionContext(bits or self.precision_bits))


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{name} must be a number")
    try:
        out = float(Fraction(value)) if isinstance(value, str) else float(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name} must be a number, got {value!r}") from exc
    if not math.isfinite(out):
        raise ConfigError(f"{name} must be finite")
    return out


def config_from_dict(data: dict, experiment: str | None = None) -> ExperimentConfig:
    """Validate a decoded config, filling per-experiment defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - TOP_LEVEL_FIELDS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    tag = data.get("experiment", experiment)
    if experiment is not None and tag != experiment:
        raise ConfigError(f"config is for {tag!r} but {experiment!r} was requested")
    if tag not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {tag!r}; expected one of {', '.join(EXPERIMENTS)}")
    defaults = DEFAULTS[tag]
    merged = {**defaults, **data}
    extra = {**defaults.get("extra", {}), **(data.get("extra") or {})}
    if not isinstance(extra, dict):
        raise ConfigError("extra must be an object")
    unknown = set(extra) - EXTRA_FIELDS
    if unknown:
        raise ConfigError(f"unknown extra fields: {sorted(unknown)}")
    extra.setdefault("grid_density", 100)
    radii = tuple(_number(r, "radii entry") for r in merged.get("radii", ()))
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be positive and strictly increasing")
    bits = merged.get("precision_bits", 128)
    if isinstance(bits, bool) or not isinstance(bits, int) or bits < 64:
        raise ConfigError("precision_bits must be an integer >= 64")
    h_list = merged.get("h_list", ())
    if not isinstance(h_list, (list, tuple)) or any(isinstance(h, bool) or not isinstance(h, int) or h < 0
                                                   for h in h_list):
        raise ConfigError("h_list must be a list of non-negative integers")
    seed = merged.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError("seed must be an integer")
    sequence = merged.get("sequence")
    if sequence is not None and not isinstance(sequence, dict):
        raise ConfigError("sequence must be an object")
    output = merged.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string")
    if not isinstance(extra.get("grid_density"), int) or extra["grid_density"] < 10:
        raise ConfigError("grid_density must be an integer >= 10")
    config = ExperimentConfig(tag, sequence, radii, bits, tuple(h_list), output, seed, extra)
    if sequence is not None:
        config.coefficient_sequence()
    return config


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    return config_from_dict(data, experiment)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Table:
    columns: tuple
    rows: list
    axes: tuple = ()


@dataclass
class Report:
    config: dict
    tables: dict
    summary: dict
    runtime_seconds: float = 0.0
    failed: bool = False

    def summary_json(self) -> dict:
        return {"config": self.config, "summary": self.summary, "runtime_seconds": self.runtime_seconds,
                "failed": self.failed}


def _winding_row(F, R):
    """A count row, or a failure row carrying the radius and last residual."""
    from .zeros import winding

    try:
        w = winding(F, R)
    except (ConvergenceError, PrecisionError, ProximityError) as exc:
        return {"R": R, "n_F": "", "ratio_n_over_R": "", "winding_residual": getattr(exc, "estimate", ""),
                "truncation_N": "", "precision_bits": "", "failed": 1, "error": str(exc)}
    return {"R": R, "n_F": w.count, "ratio_n_over_R": w.count / R, "winding_residual": w.residual,
            "truncation_N": w.truncation_N, "precision_bits": w.precision_bits, "failed": 0}


def _count_table(F, radii) -> tuple[Table, list, bool]:
    rows = parallel_map(partial(_winding_row, F), list(radii))
    failed = any(r["failed"] for r in rows)
    for r in rows:
        if isinstance(r["winding_residual"], complex):
            r["winding_residual"] = abs(r["winding_residual"])
    columns = COUNT_COLUMNS + (("failed",) if failed else ())
    clean = [{k: r[k] for k in columns} for r in rows]
    return Table(columns, clean, ("log R", "log n_F")), rows, failed


def _fit_summary(rows) -> dict:
    from .zeros import fit_growth

    samples = [(r["R"], r["n_F"]) for r in rows if not r["failed"]]
    out = {"counts": {repr(R): n for R, n in samples}}
    try:
        fit = fit_growth(samples)
        out.update(exponent=fit.exponent, prefactor=fit.prefactor, r_squared=fit.r_squared)
    except DegenerateProfileError:
        out["classification"] = "exponential-function candidate"
    except DomainError as exc:
        out["fit_error"] = str(exc)
    return out


def _run_count(cfg: ExperimentConfig) -> Report:
    table, rows, failed = _count_table(cfg.taylor(), cfg.radii)
    return Report(cfg.echo(), {"count": table}, _fit_summary(rows), failed=failed)


def _run_locate(cfg: ExperimentConfig) -> Report:
    from .zeros import locate_zeros

    F = cfg.taylor()
    rows = []
    summary = {}
    failed = False
    for R in cfg.radii:
        try:
            zs = locate_zeros(F, R)
        except (ConvergenceError, PrecisionError, ProximityError, EfetlabError) as exc:
            failed = True
            summary[repr(R)] = {"failed": str(exc)}
            continue
        summary[repr(R)] = {"n_F": zs.winding_total}
        for z in sorted(zs.zeros, key=lambda z: (z.location.real, z.location.imag)):
            rows.append({"R": R, "re": z.location.real, "im": z.location.imag,
                         "multiplicity": z.multiplicity, "residual": z.residual})
    table = Table(("R", "re", "im", "multiplicity", "residual"), rows, ("re", "im"))
    return Report(cfg.echo(), {"zeros": table}, summary, failed=failed)


def _run_dichotomy(cfg: ExperimentConfig) -> Report:
    seq = cfg.coefficient_sequence()
    if "beta" in cfg.extra and seq.kind == "quadratic_phase":
        seq = from_descriptor({**seq.descriptor(), "beta": cfg.extra["beta"]})
    F = TaylorFunction(seq, PrecisionContext(cfg.precision_bits))
    table, rows, failed = _count_table(F, cfg.radii)
    summary = _fit_summary(rows)
    ok = [r for r in rows if not r["failed"]]
    if ok:
        summary["min_ratio_n_over_R"] = min(r["n_F"] / r["R"] for r in ok)
    if "classification" not in summary and "exponent" in summary:
        summary["classification"] = "linear zero growth" if summary["exponent"] >= 0.85 else "sublinear zero growth"
    return Report(cfg.echo(), {"count": table}, summary, failed=failed)


SQRT_SAMPLE_POINTS = (1, 5j, -10, 20 + 20j, 50, -50, 30j, -25 - 25j, 35 - 35j, -3 + 40j)
SQRT_GROWTH_RADII = (1, 4, 16, 64, 256)


def sqrt_example_bits(R_max: float, requested: int) -> int:
    """Working precision for counting cos(sqrt n)+2 zeros: at least 3 bits per unit of radius."""
    return max(requested, int(math.ceil(3 * R_max / 64)) * 64)


def _run_sqrt(cfg: ExperimentConfig) -> Report:
    from .constructions.borel import g_factor_contour

    seq = cos_sqrt_plus2()
    radii = cfg.radii
    bits = sqrt_example_bits(max(radii), cfg.precision_bits)
    count_table, rows, failed = _count_table(TaylorFunction(seq, PrecisionContext(bits)), radii)
    summary = _fit_summary(rows)
    summary["counting_precision_bits"] = bits
    if "exponent" in summary:
        summary["exponent_in_window"] = 0.35 <= summary["exponent"] <= 0.65
    ctx = PrecisionContext(cfg.precision_bits)
    F = TaylorFunction(seq, ctx)
    points = [complex(z) for z in cfg.get("sample_points", SQRT_SAMPLE_POINTS)]
    fact_rows = []
    for z in points:
        G = g_factor_contour(z, ctx)
        f = F(z)
        residual = float(abs(f - ctx.mp.exp(z) * G) / abs(f))
        fact_rows.append({"re": z.real, "im": z.imag, "residual": residual})
    growth_rows = []
    for r in SQRT_GROWTH_RADII:
        G = g_factor_contour(-r, ctx)
        growth_rows.append({"r": r, "log_abs_G": float(ctx.mp.log(abs(G))), "bound_3_sqrt_r": 3 * math.sqrt(r)})
    summary["max_factorization_residual"] = max(r["residual"] for r in fact_rows)
    summary["growth_bound_holds"] = all(r["log_abs_G"] <= r["bound_3_sqrt_r"] for r in growth_rows)
    tables = {
        "count": count_table,
        "factorization": Table(("re", "im", "residual"), fact_rows, ("|z|", "residual")),
        "growth": Table(("r", "log_abs_G", "bound_3_sqrt_r"), growth_rows, ("sqrt r", "log|G(-r)|")),
    }
    return Report(cfg.echo(), tables, summary, failed=failed)


def _interp_rows(F, R, n_max, h):
    from .correlation import interp_g

    mp = F.ctx.mp
    rows = []
    for n in range(n_max + 1):
        try:
            g = interp_g(F, h, n, R)
        except (PrecisionError, ConvergenceError) as exc:
            rows.append({"h": h, "n": n, "abs_deviation": "", "precision_bits": F.ctx.precision_bits,
                         "R": R, "failed": 1, "error": str(exc)})
            continue
        target = F.seq.value(n, mp) * mp.conj(F.seq.value(n + h, mp))
        rows.append({"h": h, "n": n, "abs_deviation": float(abs(g - target)),
                     "precision_bits": F.ctx.precision_bits, "R": R, "failed": 0})
    return rows


def _run_interp(cfg: ExperimentConfig) -> Report:
    F = cfg.taylor()
    R = _number(cfg.get("R", 40), "R")
    n_max = int(cfg.get("n_max", 25))
    chunks = parallel_map(partial(_interp_rows, F, R, n_max), list(cfg.h_list or (0,)))
    rows = [r for chunk in chunks for r in chunk]
    failed = any(r["failed"] for r in rows)
    columns = ("h", "n", "abs_deviation", "precision_bits", "R") + (("failed",) if failed else ())
    ok = [r["abs_deviation"] for r in rows if not r["failed"]]
    summary = {"max_deviation": max(ok) if ok else None, "evaluations": len(rows)}
    table = Table(columns, [{k: r[k] for k in columns} for r in rows], ("n", "log10 deviation"))
    return Report(cfg.echo(), {"interp": table}, summary, failed=failed)


def _run_hadamard(cfg: ExperimentConfig) -> Report:
    from .hadamard import (COSINE_FAMILY, EXPM1_FAMILY, ZeroModel, build_hadamard, claim1_envelope,
                           g_R_profile, v_R_boundary_scan)
    from .zeros import locate_zeros

    F = cfg.taylor()
    R = _number(cfg.get("R", 50), "R")
    delta = _number(cfg.get("delta", 0.1), "delta")
    eta = _number(cfg.get("eta", 0.5), "eta")
    mu = _number(cfg.get("mu", 0.45), "mu")
    families = {"cosine_oracle": COSINE_FAMILY, "expm1_oracle": EXPM1_FAMILY}
    family = families.get(F.seq.kind)
    if family is not None:
        model = ZeroModel.from_family(family, R)
    else:
        zs = locate_zeros(F, R)
        sigma = cfg.get("sigma")
        if sigma is None:
            # declared bound: observed density at R with a factor-2 margin, at least 1/R
            sigma = 2 * max(zs.winding_total, 1) / R
        model = ZeroModel.from_zero_set(zs, sigma=_number(sigma, "sigma"))
    data = build_hadamard(model, F=F)
    r_max = min(R ** (1 - delta), R / 2)
    radii = [r_max * k / 20 for k in range(1, 21)]
    profile = g_R_profile(data, radii)
    sums = [{"j": j, "re": s.real, "im": s.imag, "error": e,
             "envelope": claim1_envelope(data.sigma, j, R)} for j, (s, e) in enumerate(data.s, start=2)]
    scan = v_R_boundary_scan(model, R ** (1 - delta), eta, mu, points=int(cfg.get("theta_points", 360)))
    summary = {"R": R, "a_R_re": data.a_R.real, "a_R_im": data.a_R.imag, "flags": list(data.flags),
               "inside_zeros": len(model.inside), "sigma": data.sigma, "alpha_prime": cfg.get("alpha_prime"),
               "delta": delta, "max_abs_g_R": max(abs(r["g_R"]) for r in profile),
               "max_v_R_on_arc": max(r["v_R"] for r in scan)}
    tables = {
        "g_profile": Table(("r", "theta_star", "g_R", "error"), profile, ("r", "g_R")),
        "power_sums": Table(("j", "re", "im", "error", "envelope"), sums, ("j", "log |s_j|")),
        "v_boundary": Table(("theta", "v_R"), scan, ("theta", "v_R")),
    }
    return Report(cfg.echo(), tables, summary)


def _run_subharmonic(cfg: ExperimentConfig) -> Report:
    from .constructions.subharmonic import SubharmonicExample, proposition_report, u_eval

    R = _number(cfg.get("R", 10000), "R")
    ex = SubharmonicExample(R, PrecisionContext(cfg.precision_bits))
    points = int(cfg.get("theta_points", 720))
    summary = proposition_report(ex, theta_points=points, grid_density=cfg.get("grid_density", 100))
    rows = []
    for r in (1.0, math.sqrt(R), R / 4, R / 2, R):
        peak = max(u_eval(r * cmath.exp(2j * math.pi * k / points), ex) for k in range(points))
        rows.append({"r": r, "u_r": u_eval(r, ex), "max_theta_u": peak, "bound": r + 5})
    return Report(cfg.echo(), {"u_profile": Table(("r", "u_r", "max_theta_u", "bound"), rows, ("r", "u"))}, summary)


def _membership(mask):
    from .constructions.combi import periodic_mask

    if mask in (None, "all"):
        return lambda n: True
    if mask == "even":
        return lambda n: n % 2 == 0
    if isinstance(mask, dict) and set(mask) == {"period", "residues"}:
        return periodic_mask(int(mask["period"]), mask["residues"])
    raise ConfigError("mask must be 'all', 'even' or {period, residues}")


def _run_combi(cfg: ExperimentConfig) -> Report:
    from .constructions.combi import combi_find, recheck

    d = cfg.get("d", 1)
    d = Fraction(d) if isinstance(d, (int, str)) else Fraction(str(d))
    R = int(cfg.get("R", 1000))
    membership = _membership(cfg.get("mask", "all"))
    witness = combi_find(membership, d, R)
    check = recheck(witness, membership)
    row = {"d": str(d), "R": R, "c1": str(witness.c1), "c2": str(witness.c2), "x": witness.x,
           "h": witness.h, "size_J": len(witness.J), "size_K": len(witness.K), "overlap": witness.overlap,
           "recheck_ok": int(check["ok"])}
    summary = {"x": witness.x, "h": witness.h, "overlap": witness.overlap, "c2R": float(witness.c2 * R),
               "recheck_ok": check["ok"], "witness": witness.to_dict(), "recheck": check}
    return Report(cfg.echo(), {"witness": Table(tuple(row), [row])}, summary)


RUNNERS = {
    "count": _run_count, "locate": _run_locate, "dichotomy-scan": _run_dichotomy,
    "sqrt-example": _run_sqrt, "interp-verify": _run_interp, "hadamard-profile": _run_hadamard,
    "subharmonic": _run_subharmonic, "combi": _run_combi,
}


def run(config: ExperimentConfig) -> Report:
    start = time.perf_counter()
    report = RUNNERS[config.experiment](config)
    report.runtime_seconds = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# output


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return repr(value)
    return value


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return list(value)
    return str(value)


def _path(prefix: str, name: str) -> str:
    if prefix.endswith(os.sep) or os.path.isdir(prefix):
        return os.path.join(prefix, name)
    return prefix + name


def emit_plotdata(report: Report, prefix: str) -> dict:
    """Write one CSV per table, the JSON summary and a manifest; return the manifest."""
    tag = report.config["experiment"]
    manifest = {"experiment": tag, "tables": {}}
    directory = os.path.dirname(_path(prefix, "x"))
    if directory:
        os.makedirs(directory, exist_ok=True)
    for name, table in report.tables.items():
        path = _path(prefix, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([_cell(row.get(c, "")) for c in table.columns])
        manifest["tables"][name] = {"file": os.path.basename(path), "columns": list(table.columns),
                                    "axes": list(table.axes)}
    summary_path = _path(prefix, f"{tag}.json")
    with open(summary_path, "w") as fh:
        json.dump(report.summary_json(), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    manifest["summary"] = os.path.basename(summary_path)
    with open(_path(prefix, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


__all__ = ["EXPERIMENTS", "ExperimentConfig", "Report", "Table", "config_from_dict", "emit_plotdata",
           "parse_config", "run", "sqrt_example_bits"]
