"""Randomized sweeps over generated cases.

Each trial draws from its own stream, ``SeedSequence(seed, spawn_key=(trial,))``,
so a case depends only on (seed, trial, family) and trials can run in any
order or in parallel without changing the summary.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .chain import ChainReport, ConjugateExponents
from .expr import parse
from .hermite import HHInput, hh_report
from .integral import WeightPartition, verify_chain
from .quadrature import Interval, QuadratureConfig
from .sums import DiscreteWeightPartition, PositiveTuple, verify_sum_chain

__all__ = [
    "FAMILIES",
    "SweepConfig",
    "SweepSummary",
    "IntegralCase",
    "SumCase",
    "HHCase",
    "case_rng",
    "generate_case",
    "run_case",
    "run_sweep",
    "is_violation",
]

FAMILIES = ("poly", "exp-trig", "mixed", "tuples", "hh")
INTEGRAL_FAMILIES = ("poly", "exp-trig", "mixed")
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class SweepConfig:
    trials: int
    seed: int = 0
    family: str = "mixed"
    p_range: tuple[float, float] = (1.05, 10.0)
    n_range: tuple[int, int] = (1, 10_000)
    report_tol: float | None = None  # None: each module's default policy
    max_subdivisions: int = 200
    keep_reports: bool = False

    def __post_init__(self) -> None:
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {', '.join(FAMILIES)}; got {self.family!r}")
        lo, hi = self.p_range
        if not (1.0 < lo <= hi <= 64.0):
            raise ValueError(f"p_range must satisfy 1 < low <= high <= 64, got {self.p_range!r}")
        nlo, nhi = self.n_range
        if not (1 <= nlo <= nhi):
            raise ValueError(f"n_range must satisfy 1 <= low <= high, got {self.n_range!r}")
        object.__setattr__(self, "p_range", (float(lo), float(hi)))
        object.__setattr__(self, "n_range", (int(nlo), int(nhi)))

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(max_subdivisions=self.max_subdivisions)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_range"] = list(self.p_range)
        d["n_range"] = list(self.n_range)
        return d


# ---------------------------------------------------------------------------
# cases

@dataclass(frozen=True)
class IntegralCase:
    f: str
    g: str
    p: float
    a: float
    b: float
    weights: tuple[str, ...]
    partition_kind: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        return d

    def exps(self) -> ConjugateExponents:
        return ConjugateExponents.from_p(self.p)

    def partition(self) -> WeightPartition:
        return WeightPartition(tuple(parse(w) for w in self.weights), Interval(self.a, self.b))


@dataclass(frozen=True)
class SumCase:
    a: tuple[float, ...]
    b: tuple[float, ...]
    p: float
    rows: tuple[tuple[float, ...], ...]
    partition_kind: str

    def to_dict(self) -> dict:
        return {
            "a": list(self.a),
            "b": list(self.b),
            "p": self.p,
            "rows": [list(r) for r in self.rows],
            "partition_kind": self.partition_kind,
        }


@dataclass(frozen=True)
class HHCase:
    f: str
    f_prime: str
    p: float
    a: float
    b: float

    def to_dict(self) -> dict:
        return asdict(self)

    def input(self) -> HHInput:
        return HHInput(parse(self.f), parse(self.f_prime), Interval(self.a, self.b),
                       ConjugateExponents.from_p(self.p))


def case_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def _r(v: float, digits: int = 3) -> float:
    # rounded constants keep generated expressions short and readable
    return float(round(float(v), digits))


def _interval(rng: np.random.Generator, lo: float = -10.0, hi: float = 10.0,
              max_len: float = 4.0) -> tuple[float, float]:
    a = _r(rng.uniform(lo, hi - 0.25))
    length = rng.uniform(0.25, min(max_len, hi - a))
    b = _r(a + length)
    if b <= a:
        b = a + 0.25
    return a, b


def _poly(rng: np.random.Generator, center: float) -> str:
    degree = int(rng.integers(0, 5))
    coeffs = [_r(rng.uniform(-5, 5)) for _ in range(degree + 1)]
    if all(c == 0.0 for c in coeffs):
        coeffs[0] = 1.0
    shift = f"(x - {center!r})"
    parts = [repr(coeffs[0])]
    for k, c in enumerate(coeffs[1:], start=1):
        parts.append(f"{c!r}*{shift}" if k == 1 else f"{c!r}*{shift}^{k}")
    return " + ".join(parts)


def _exp_trig(rng: np.random.Generator, center: float) -> str:
    c = _r(rng.uniform(-5, 5)) or 1.0
    k = _r(rng.uniform(-1, 1))
    w = _r(rng.uniform(0.2, 3.0))
    phi = _r(rng.uniform(0, math.pi))
    shift = f"(x - {center!r})"
    templates = (
        f"{c!r}*exp({k!r}*{shift})",
        f"{c!r}*sin({w!r}*x + {phi!r})",
        f"{c!r}*cos({w!r}*x + {phi!r})",
        f"exp({k!r}*{shift})*cos({w!r}*x + {phi!r})",
        f"{c!r}*exp({k!r}*{shift}) + sin({w!r}*x)",
        f"{c!r}*ln(1 + {shift}^2)",
        f"sqrt(1 + {w!r}*{shift}^2)",
    )
    return templates[int(rng.integers(len(templates)))]


def _mixed(rng: np.random.Generator, center: float) -> str:
    kind = int(rng.integers(4))
    if kind == 0:
        return _poly(rng, center)
    if kind == 1:
        return _exp_trig(rng, center)
    if kind == 2:
        return f"({_poly(rng, center)})*({_exp_trig(rng, center)})"
    return f"abs({_poly(rng, center)}) + {_exp_trig(rng, center)}"


def _clamp(text: str) -> str:
    """``min(max(e, 0), 1)`` written with abs only."""
    return f"(abs({text}) - abs({text} - 1) + 1)/2"


def _partition(rng: np.random.Generator, a: float, b: float) -> tuple[str, tuple[str, ...]]:
    kind = ("linear", "trig", "uniform", "constants", "clamped", "shifted-trig", "product")[
        int(rng.integers(7))
    ]
    width = b - a
    linear = (f"({b!r} - x)/{width!r}", f"(x - {a!r})/{width!r}")
    if kind == "linear":
        return kind, linear
    if kind == "trig":
        return kind, ("sin(x)^2", "cos(x)^2")
    if kind == "uniform":
        n = int(rng.integers(2, 7))
        return kind, tuple(repr(1.0 / n) for _ in range(n))
    if kind == "constants":
        n = int(rng.integers(2, 9))
        r = rng.uniform(0.05, 1.0, size=n)
        r = r / math.fsum(r)
        return kind, tuple(repr(float(v)) for v in r)
    if kind == "clamped":
        mid = _r(0.5 * (a + b))
        slope = _r(rng.uniform(-3, 3) / width, 6)
        inner = f"{_r(rng.uniform(0, 1))!r} + {slope!r}*(x - {mid!r})"
        w = _clamp(inner)
        return kind, (w, f"1 - {w}")
    if kind == "shifted-trig":
        w = _r(rng.uniform(0.2, 3.0))
        phi = _r(rng.uniform(0, math.pi))
        arg = f"{w!r}*x + {phi!r}"
        return kind, (f"sin({arg})^2", f"cos({arg})^2")
    # product of the linear pair with a trig pair: four weights
    return kind, tuple(f"({lin})*{t}" for lin in linear for t in ("sin(x)^2", "cos(x)^2"))


def _p(rng: np.random.Generator, p_range: tuple[float, float]) -> float:
    lo, hi = p_range
    p = _r(rng.uniform(lo, hi), 6)
    return min(max(p, lo), hi) if p > 1.0 else lo


def generate_case(rng: np.random.Generator, family: str, config: SweepConfig | None = None):
    """Draw one case of ``family``; deterministic in the generator state."""
    p_range = config.p_range if config else (1.05, 10.0)
    n_range = config.n_range if config else (1, 10_000)
    if family in INTEGRAL_FAMILIES:
        a, b = _interval(rng)
        center = _r(0.5 * (a + b))
        draw = {"poly": _poly, "exp-trig": _exp_trig, "mixed": _mixed}[family]
        f = draw(rng, center)
        g = draw(rng, center)
        p = _p(rng, p_range)
        kind, weights = _partition(rng, a, b)
        return IntegralCase(f, g, p, a, b, weights, kind)
    if family == "tuples":
        lo, hi = n_range
        n = int(round(math.exp(rng.uniform(math.log(lo), math.log(hi + 0.5)))))
        n = min(max(n, lo), hi)
        a = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), size=n))
        b = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), size=n))
        p = _p(rng, p_range)
        kind = ("linear", "trig", "random")[int(rng.integers(3))]
        if kind == "linear":
            rows = DiscreteWeightPartition.linear(n).rows
        elif kind == "trig":
            rows = DiscreteWeightPartition.trig(n).rows
        else:
            m = int(rng.integers(2, 9))
            raw = rng.uniform(0.0, 1.0, size=(m, n))
            rows = raw / raw.sum(axis=0)
        return SumCase(tuple(a.tolist()), tuple(b.tolist()), p,
                       tuple(tuple(r) for r in rows.tolist()), kind)
    if family == "hh":
        a, b = _interval(rng, -3.0, 3.0, 3.0)
        p = _p(rng, p_range)
        c = _r(rng.uniform(0.1, 2.0))
        kind = int(rng.integers(3))
        if kind == 0:
            m = int(rng.integers(1, 4))
            f = f"x^{2 * m}"
            fp = f"{2 * m}*x^{2 * m - 1}" if m > 1 else "2*x"
        elif kind == 1:
            f = f"exp({c!r}*x)"
            fp = f"{c!r}*exp({c!r}*x)"
        else:
            f = f"(exp({c!r}*x) + exp(-{c!r}*x))/2"
            fp = f"{c!r}*(exp({c!r}*x) - exp(-{c!r}*x))/2"
        return HHCase(f, fp, p, a, b)
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# running

def is_violation(report: ChainReport | dict) -> bool:
    """Recheck the chain from the raw numbers, ignoring the stored verdict."""
    r = report.to_dict() if hasattr(report, "to_dict") else report
    if "defect" in r:
        tol = r["tolerance"]
        bad = r["refined"] > r["dragomir"] + tol
        if r["convexity_ok"]:
            bad = bad or r["defect"] > r["refined"] + tol
        return bad or r["moment_residual"] > 1e-9
    tol = r["tolerance"]
    total = math.fsum(r["refined_terms"])
    if r["classical"] == 0.0:
        return not (r["lhs"] <= tol and total <= tol)
    return not (r["lhs"] <= total + tol and total <= r["classical"] + tol) or not r["chain_ok"]


def run_case(case, config: SweepConfig):
    if isinstance(case, IntegralCase):
        return verify_chain(parse(case.f), parse(case.g), case.exps(), case.partition(),
                            config.quadrature(), config.report_tol)
    if isinstance(case, SumCase):
        return verify_sum_chain(PositiveTuple(case.a), PositiveTuple(case.b),
                                ConjugateExponents.from_p(case.p),
                                DiscreteWeightPartition(case.rows), config.report_tol)
    if isinstance(case, HHCase):
        return hh_report(case.input(), config.quadrature(), config.report_tol)
    raise TypeError(f"not a case: {case!r}")


def _gaps(report) -> tuple[float, float, float | None]:
    if hasattr(report, "dragomir"):
        upper, mid, low = report.dragomir, report.refined, report.defect
    else:
        upper, mid, low = report.classical, report.refined_total, report.lhs
    ratio = (upper - mid) / upper if upper > 0 else None
    return upper - mid, mid - low, ratio


def _trial(args: tuple[SweepConfig, int]) -> dict:
    config, index = args
    case = generate_case(case_rng(config.seed, index), config.family, config)
    out: dict[str, Any] = {"trial": index}
    try:
        report = run_case(case, config)
    except Exception as exc:  # recorded, never fatal to the sweep
        out["error"] = f"{type(exc).__name__}: {exc}"
        out["inputs"] = case.to_dict()
        return out
    out["report"] = report.to_dict()
    out["violation"] = is_violation(report)
    if out["violation"]:
        out["inputs"] = case.to_dict()
    out["gaps"] = _gaps(report)
    return out


def _stats(values: list[float]) -> dict[str, float | int | None]:
    if not values:
        return {"count": 0, "min": None, "mean": None, "max": None,
                **{f"q{int(q * 100):02d}": None for q in QUANTILES}}
    arr = np.sort(np.asarray(values, dtype=float))
    out: dict[str, float | int | None] = {
        "count": int(arr.size),
        "min": float(arr[0]),
        "mean": math.fsum(values) / len(values),
        "max": float(arr[-1]),
    }
    for q in QUANTILES:
        out[f"q{int(q * 100):02d}"] = float(np.quantile(arr, q))
    return out


@dataclass
class SweepSummary:
    config: dict
    trials_run: int
    violations: list[dict]
    errors: list[dict]
    gap_refined: dict
    gap_lhs: dict
    tightening_ratio: dict
    all_reports: list[dict] = field(default_factory=list, repr=False)
    version: str = __version__

    @property
    def reports(self) -> list[dict] | None:
        return self.all_reports if self.config.get("keep_reports") else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("all_reports")
        if self.config.get("keep_reports"):
            d["reports"] = self.all_reports
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @property
    def ok(self) -> bool:
        return not self.violations


def run_sweep(config: SweepConfig, jobs: int = 1) -> SweepSummary:
    """Run every trial; ``jobs > 1`` spreads them over worker processes."""
    work = [(config, i) for i in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_trial, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        outcomes = [_trial(w) for w in work]
    outcomes.sort(key=lambda o: o["trial"])

    violations, errors, reports = [], [], []
    gap_refined, gap_lhs, ratios = [], [], []
    for o in outcomes:
        if "error" in o:
            errors.append({"trial": o["trial"], "error": o["error"], "inputs": o["inputs"]})
            continue
        if o["violation"]:
            violations.append({"trial": o["trial"], "inputs": o["inputs"], "report": o["report"]})
        gr, gl, ratio = o["gaps"]
        gap_refined.append(gr)
        gap_lhs.append(gl)
        if ratio is not None:
            ratios.append(ratio)
        reports.append({"trial": o["trial"], "report": o["report"]})
    return SweepSummary(
        config=config.to_dict(),
        trials_run=len(outcomes),
        violations=violations,
        errors=errors,
        gap_refined=_stats(gap_refined),
        gap_lhs=_stats(gap_lhs),
        tightening_ratio=_stats(ratios),
        all_reports=reports,
    )
