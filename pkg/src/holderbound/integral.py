"""Integral Hölder bounds: classical, weight-partition refinements, split point.

All integrals of ``|f|^p`` are evaluated on ``|f| / M`` with ``M`` a sampled
maximum of ``|f|`` and rescaled afterwards, so large ``p`` (up to 64) does not
overflow.  Zeros of ``f``, ``g`` and of every ``abs``/``sqrt`` argument are
located first and passed to the quadrature as break points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.optimize import brentq

from .chain import ChainReport, ConjugateExponents, build_report
from .expr import DomainError, Node, check_nonnegative, const, kink_candidates, parse, sample_grid, var
from .quadrature import Interval, IntegralResult, QuadratureConfig, ToleranceNotReached, integrate

__all__ = [
    "WeightPartition",
    "InvalidPartition",
    "young_bound",
    "lhs_integral",
    "classical_bound",
    "refined_bound_weighted",
    "refined_bound_linear",
    "split_point_bound",
    "verify_chain",
    "find_kinks",
]

PARTITION_SAMPLES = 1001
_KINK_GRID = 129


class InvalidPartition(ValueError):
    pass


def _as_node(e: Node | str) -> Node:
    return parse(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class WeightPartition:
    """Nonnegative weight functions summing to one on ``interval``.

    Both conditions are checked on a 1001-point grid at construction.
    """

    weights: tuple[Node, ...]
    interval: Interval

    def __post_init__(self) -> None:
        weights = tuple(_as_node(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) < 2:
            raise InvalidPartition("a partition needs at least two weights")
        a, b = self.interval
        for i, w in enumerate(weights):
            if not check_nonnegative(w, self.interval, PARTITION_SAMPLES):
                raise InvalidPartition(f"weight {i} ({w}) is negative somewhere on [{a}, {b}]")
        fns = [w.compile() for w in weights]
        for x in sample_grid(a, b, PARTITION_SAMPLES):
            s = math.fsum(fn(x) for fn in fns)
            if abs(s - 1.0) > 1e-10:
                raise InvalidPartition(f"weights sum to {s!r} at x = {x!r}, not 1")

    @classmethod
    def linear(cls, interval: Interval) -> "WeightPartition":
        """``((b - x)/(b - a), (x - a)/(b - a))``."""
        a, b = interval
        x = var()
        width = const(b - a)
        return cls((( const(b) - x) / width, (x - const(a)) / width), interval)

    @classmethod
    def trig(cls, interval: Interval) -> "WeightPartition":
        return cls((parse("sin(x)^2"), parse("cos(x)^2")), interval)

    @classmethod
    def constant(cls, values: Sequence[float], interval: Interval) -> "WeightPartition":
        return cls(tuple(const(v) for v in values), interval)

    @property
    def n(self) -> int:
        return len(self.weights)


def young_bound(x: float, y: float, exps: ConjugateExponents) -> tuple[float, float]:
    """Return ``(x*y, x^p/p + y^q/q)``; the first never exceeds the second."""
    if x < 0 or y < 0:
        raise ValueError("young_bound needs x, y >= 0")
    return x * y, x**exps.p / exps.p + y**exps.q / exps.q


# ---------------------------------------------------------------------------
# helpers

def find_kinks(nodes: Iterable[Node], interval: Interval) -> tuple[float, ...]:
    """Interior points where a node or one of its abs/sqrt arguments changes sign."""
    a, b = interval
    grid = sample_grid(a, b, _KINK_GRID)
    found = set()
    seen = set()
    for node in nodes:
        for cand in (node, *kink_candidates(node)):
            if cand in seen:
                continue
            seen.add(cand)
            fn = cand.compile()
            try:
                vals = [fn(x) for x in grid]
            except DomainError:
                continue
            for (x0, v0), (x1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
                if v0 == 0.0:
                    found.add(x0)
                elif v0 * v1 < 0.0:
                    try:
                        found.add(brentq(fn, x0, x1, xtol=1e-15, rtol=4 * 2.220446049250313e-16))
                    except (ValueError, DomainError, RuntimeError):
                        pass
    return tuple(sorted(c for c in found if a < c < b))


def _scale(f: Node, interval: Interval) -> float:
    fn = f.compile()
    m = max(abs(fn(x)) for x in sample_grid(interval.a, interval.b, _KINK_GRID))
    return m if m > 0.0 else 1.0


def _checked(res: IntegralResult, interval: Interval) -> float:
    if not res.converged:
        raise ToleranceNotReached(res, interval)
    return max(res.value, 0.0)


class _Setup:
    """Scales and break points shared by every integral of one (f, g) pair."""

    def __init__(self, f, g, exps, interval, cfg, extra: Iterable[Node] = ()):
        self.f = _as_node(f)
        self.g = _as_node(g)
        self.exps = exps
        self.interval = interval
        self.cfg = cfg or QuadratureConfig()
        self.kinks = find_kinks((self.f, self.g, *extra), interval)
        self.f_scale = _scale(self.f, interval)
        self.g_scale = _scale(self.g, interval)

    def _integral(self, integrand, lo: float, hi: float) -> float:
        if lo == hi:
            return 0.0
        sub = Interval(lo, hi)
        res = integrate(integrand, sub, self.cfg, [k for k in self.kinks if lo < k < hi])
        return _checked(res, sub)

    def power_norm(self, which: str, weight: Node | None = None, lo=None, hi=None) -> float:
        """``(int w |h|^r)^(1/r)`` for h = f (r = p) or h = g (r = q)."""
        if which == "f":
            h, r, scale = self.f.compile(), self.exps.p, self.f_scale
        else:
            h, r, scale = self.g.compile(), self.exps.q, self.g_scale
        inv = 1.0 / scale
        if weight is None:
            def integrand(x):
                return (abs(h(x)) * inv) ** r
        else:
            w = weight.compile()

            def integrand(x):
                wx = w(x)
                if wx <= 0.0:
                    return 0.0
                return wx * (abs(h(x)) * inv) ** r

        lo = self.interval.a if lo is None else lo
        hi = self.interval.b if hi is None else hi
        value = self._integral(integrand, lo, hi)
        return scale * value ** (1.0 / r) if value > 0.0 else 0.0

    def holder_term(self, weight: Node | None = None, lo=None, hi=None) -> float:
        return self.power_norm("f", weight, lo, hi) * self.power_norm("g", weight, lo, hi)

    def lhs(self) -> float:
        f, g = self.f.compile(), self.g.compile()
        return self._integral(lambda x: abs(f(x) * g(x)), self.interval.a, self.interval.b)


# ---------------------------------------------------------------------------
# public operations

def lhs_integral(f, g, interval: Interval, cfg: QuadratureConfig | None = None) -> float:
    """``int_a^b |f g| dx``."""
    return _Setup(f, g, ConjugateExponents(2.0, 2.0), interval, cfg).lhs()


def classical_bound(f, g, exps: ConjugateExponents, interval: Interval,
                    cfg: QuadratureConfig | None = None) -> float:
    """``(int |f|^p)^(1/p) (int |g|^q)^(1/q)``."""
    return _Setup(f, g, exps, interval, cfg).holder_term()


def _refined(setup: _Setup, partition: WeightPartition) -> tuple[tuple[float, ...], float]:
    terms = tuple(setup.holder_term(w) for w in partition.weights)
    return terms, math.fsum(terms)


def refined_bound_weighted(f, g, exps: ConjugateExponents, partition: WeightPartition,
                           cfg: QuadratureConfig | None = None) -> tuple[tuple[float, ...], float]:
    """Per-weight Hölder terms and their sum for an arbitrary partition."""
    setup = _Setup(f, g, exps, partition.interval, cfg, partition.weights)
    return _refined(setup, partition)


def refined_bound_linear(f, g, exps: ConjugateExponents, interval: Interval,
                         cfg: QuadratureConfig | None = None) -> tuple[tuple[float, ...], float]:
    return refined_bound_weighted(f, g, exps, WeightPartition.linear(interval), cfg)


def split_point_bound(f, g, exps: ConjugateExponents, interval: Interval, lam: float,
                      cfg: QuadratureConfig | None = None) -> float:
    """Hölder applied separately on ``[a, c]`` and ``[c, b]``, ``c = lam*b + (1-lam)*a``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    setup = _Setup(f, g, exps, interval, cfg)
    c = interval.point(lam)
    left = setup.holder_term(lo=interval.a, hi=c) if c > interval.a else 0.0
    right = setup.holder_term(lo=c, hi=interval.b) if c < interval.b else 0.0
    return left + right


def verify_chain(f, g, exps: ConjugateExponents, partition: WeightPartition,
                 cfg: QuadratureConfig | None = None, report_tol: float | None = None) -> ChainReport:
    """Compute lhs, refined terms and classical bound and check their order.

    ``report_tol`` defaults to ``1e-8 * max(1, classical)``.
    """
    setup = _Setup(f, g, exps, partition.interval, cfg, partition.weights)
    lhs = setup.lhs()
    terms, _ = _refined(setup, partition)
    classical = setup.holder_term()
    return build_report(lhs, terms, classical, report_tol)
