"""The ordered triple lhs <= refined <= classical and its verdict."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

__all__ = ["ConjugateExponents", "ChainReport", "build_report", "default_tolerance", "P_MAX"]

P_MAX = 64.0


@dataclass(frozen=True)
class ConjugateExponents:
    """Hölder conjugate pair ``1/p + 1/q = 1`` with ``1 < p <= 64``."""

    p: float
    q: float

    def __post_init__(self) -> None:
        p, q = float(self.p), float(self.q)
        if not p > 1.0:
            raise ValueError(f"p must exceed 1, got {p!r}")
        if p > P_MAX:
            raise ValueError(f"p must not exceed {P_MAX:g}, got {p!r}")
        if not q > 1.0 or not math.isfinite(q):
            raise ValueError(f"q must exceed 1, got {q!r}")
        if abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
            raise ValueError(f"1/p + 1/q must equal 1, got p={p!r}, q={q!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_p(cls, p: float) -> "ConjugateExponents":
        p = float(p)
        if not p > 1.0:
            raise ValueError(f"p must exceed 1, got {p!r}")
        return cls(p, p / (p - 1.0))

    def swapped(self) -> "ConjugateExponents":
        return ConjugateExponents(self.q, self.p)


@dataclass(frozen=True)
class ChainReport:
    """Values of one chain check.

    ``gap_refined = classical - refined_total`` and
    ``gap_lhs = refined_total - lhs``; both are nonnegative in exact
    arithmetic.
    """

    lhs: float
    refined_terms: tuple[float, ...]
    refined_total: float
    classical: float
    gap_refined: float
    gap_lhs: float
    chain_ok: bool
    tolerance: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["refined_terms"] = list(self.refined_terms)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ChainReport":
        d = dict(d)
        d["refined_terms"] = tuple(d["refined_terms"])
        return cls(**d)


def default_tolerance(classical: float) -> float:
    return 1e-8 * max(1.0, abs(classical))


def build_report(lhs: float, terms, classical: float, tol: float | None = None) -> ChainReport:
    terms = tuple(float(t) for t in terms)
    total = math.fsum(terms)
    if tol is None:
        tol = default_tolerance(classical)
    if classical == 0.0:
        # a vanishing classical bound forces everything to vanish
        ok = lhs <= tol and total <= tol
    else:
        ok = lhs <= total + tol and total <= classical + tol
    return ChainReport(
        lhs=float(lhs),
        refined_terms=terms,
        refined_total=total,
        classical=float(classical),
        gap_refined=float(classical) - total,
        gap_lhs=total - float(lhs),
        chain_ok=bool(ok),
        tolerance=float(tol),
    )
