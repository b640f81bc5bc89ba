"""Trapezoid-defect bounds for functions whose ``|f'|^q`` is convex.

Two closed-form bounds on ``|(f(a) + f(b))/2 - mean(f)|`` are compared: the
classical one built from ``(|f'(a)|^q + |f'(b)|^q)/2`` and the sharper one
that averages the two one-sided means ``(2u + v)/3`` and ``(u + 2v)/3``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .chain import ConjugateExponents
from .expr import Node, parse, sample_grid
from .quadrature import Interval, QuadratureConfig, ToleranceNotReached, integrate

__all__ = [
    "HHInput",
    "HHReport",
    "DerivativeMismatch",
    "trapezoid_defect",
    "dragomir_bound",
    "refined_hh_bound",
    "convexity_probe",
    "hh_report",
    "moment_integral",
    "moment_closed_form",
    "power_mean_gap",
]

_CHECK_POINTS = 21


class DerivativeMismatch(ValueError):
    pass


def _derivative(fn, x: float, h: float) -> float:
    # fourth-order central difference
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


@dataclass(frozen=True)
class HHInput:
    """``f`` with its user-supplied derivative, checked at 21 interior points."""

    f: Node
    f_prime: Node
    interval: Interval
    exps: ConjugateExponents

    def __post_init__(self) -> None:
        for name in ("f", "f_prime"):
            v = getattr(self, name)
            if isinstance(v, str):
                object.__setattr__(self, name, parse(v))
        a, b = self.interval
        fn, dfn = self.f.compile(), self.f_prime.compile()
        step = (b - a) / (_CHECK_POINTS + 1)
        for j in range(1, _CHECK_POINTS + 1):
            x = a + j * step
            h = min(1e-3 * max(1.0, abs(x)), step / 4)
            approx = _derivative(fn, x, h)
            given = dfn(x)
            if abs(approx - given) > max(1e-6, 1e-6 * abs(given)):
                raise DerivativeMismatch(
                    f"f_prime({x!r}) = {given!r} but f changes at rate {approx!r}"
                )

    def endpoint_slopes(self) -> tuple[float, float]:
        fp = self.f_prime.compile()
        return abs(fp(self.interval.a)), abs(fp(self.interval.b))


@dataclass(frozen=True)
class HHReport:
    defect: float
    dragomir: float
    refined: float
    convexity_ok: bool
    ordering_ok: bool
    bound_ok: bool
    moment_residual: float
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def trapezoid_defect(inp: HHInput, cfg: QuadratureConfig | None = None) -> float:
    a, b = inp.interval
    fn = inp.f.compile()
    res = integrate(fn, inp.interval, cfg)
    if not res.converged:
        raise ToleranceNotReached(res, inp.interval)
    return abs((fn(a) + fn(b)) / 2.0 - res.value / (b - a))


def _qmean(u: float, v: float, wu: float, wv: float, q: float) -> float:
    """``((wu*u^q + wv*v^q) / (wu + wv))^(1/q)`` computed on ``u, v / max(u, v)``."""
    top = max(u, v)
    if top == 0.0:
        return 0.0
    s = (wu * (u / top) ** q + wv * (v / top) ** q) / (wu + wv)
    return top * s ** (1.0 / q)


def dragomir_bound(inp: HHInput) -> float:
    p, q = inp.exps.p, inp.exps.q
    u, v = inp.endpoint_slopes()
    return inp.interval.length / (2.0 * (p + 1.0) ** (1.0 / p)) * _qmean(u, v, 1.0, 1.0, q)


def refined_hh_bound(inp: HHInput) -> float:
    p, q = inp.exps.p, inp.exps.q
    u, v = inp.endpoint_slopes()
    bracket = _qmean(u, v, 2.0, 1.0, q) + _qmean(u, v, 1.0, 2.0, q)
    return inp.interval.length / (4.0 * (p + 1.0) ** (1.0 / p)) * bracket


def convexity_probe(e: Node | str, q: float, interval: Interval, samples: int = 101) -> bool:
    """Midpoint-convexity test of ``|e|^q`` on every pair of a uniform grid.

    Slack is ``1e-10 * max(1, rhs)``.  A sampling probe, not a proof.
    """
    if samples < 3:
        raise ValueError("samples must be at least 3")
    e = parse(e) if isinstance(e, str) else e
    fn = e.compile()
    xs = sample_grid(interval.a, interval.b, samples)
    vals = np.array([abs(fn(x)) ** q for x in xs])
    i, j = np.triu_indices(samples, k=1)
    mids = np.array([abs(fn(0.5 * (xs[s] + xs[t]))) ** q for s, t in zip(i, j)])
    rhs = 0.5 * (vals[i] + vals[j])
    return bool(np.all(mids <= rhs + 1e-10 * np.maximum(1.0, rhs)))


def moment_closed_form(p: float) -> float:
    """``int_0^1 t |1 - 2t|^p dt``."""
    return 1.0 / (2.0 * (p + 1.0))


def moment_integral(p: float, cfg: QuadratureConfig | None = None) -> float:
    """Quadrature of ``int_0^1 t |1 - 2t|^p dt`` with the kink at 1/2 declared."""
    res = integrate(lambda t: t * abs(1.0 - 2.0 * t) ** p, Interval(0.0, 1.0), cfg, breakpoints=[0.5])
    if not res.converged:
        raise ToleranceNotReached(res, Interval(0.0, 1.0))
    return res.value


def power_mean_gap(u, v, s):
    """``((u+v)/2)^s - ((2u+v)/3)^s/2 - ((u+2v)/3)^s/2``; nonnegative for s in (0, 1]."""
    u, v, s = np.asarray(u, float), np.asarray(v, float), np.asarray(s, float)
    return ((u + v) / 2) ** s - 0.5 * ((2 * u + v) / 3) ** s - 0.5 * ((u + 2 * v) / 3) ** s


def default_hh_tolerance(dragomir: float) -> float:
    return 1e-8 * max(1.0, dragomir)


def hh_report(inp: HHInput, cfg: QuadratureConfig | None = None, report_tol: float | None = None,
              samples: int = 101) -> HHReport:
    defect = trapezoid_defect(inp, cfg)
    dragomir = dragomir_bound(inp)
    refined = refined_hh_bound(inp)
    tol = default_hh_tolerance(dragomir) if report_tol is None else report_tol
    residual = abs(moment_integral(inp.exps.p, cfg) - moment_closed_form(inp.exps.p))
    convex = convexity_probe(inp.f_prime, inp.exps.q, inp.interval, samples)
    return HHReport(
        defect=defect,
        dragomir=dragomir,
        refined=refined,
        convexity_ok=convex,
        ordering_ok=refined <= dragomir + tol,
        bound_ok=defect <= refined + tol,
        moment_residual=residual,
        tolerance=tol,
    )
