"""Discrete Hölder bounds for positive tuples.

Every sum goes through :func:`math.fsum` (exactly rounded), so results do not
depend on summation order.  Power sums are formed on ``a / max(a)`` and
rescaled, which keeps ``a_k^p`` inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .chain import ChainReport, ConjugateExponents, build_report

__all__ = [
    "PositiveTuple",
    "DiscreteWeightPartition",
    "SumChainReport",
    "sum_lhs",
    "classical_sum_bound",
    "refined_sum_weighted",
    "refined_sum_linear",
    "verify_sum_chain",
    "default_sum_tolerance",
]

SumChainReport = ChainReport


@dataclass(frozen=True, eq=False)
class PositiveTuple:
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise ValueError("a tuple needs at least one entry")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tuple entries must be finite")
        if not np.all(arr > 0):
            k = int(np.argmin(arr > 0))
            raise ValueError(f"tuple entries must be positive; entry {k} is {float(arr[k])!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def scaled(self, c: float) -> "PositiveTuple":
        return PositiveTuple(self.values * c)


@dataclass(frozen=True, eq=False)
class DiscreteWeightPartition:
    """``m >= 2`` nonnegative rows of length ``n`` whose columns sum to one."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 2 or rows.shape[1] < 1:
            raise ValueError(f"need an m x n array with m >= 2, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)) or np.any(rows < 0):
            raise ValueError("partition entries must be finite and nonnegative")
        col = [math.fsum(rows[:, k]) for k in range(rows.shape[1])]
        bad = [k for k, s in enumerate(col) if abs(s - 1.0) > 1e-12]
        if bad:
            k = bad[0]
            raise ValueError(f"column {k} sums to {col[k]!r}, not 1")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def linear(cls, n: int) -> "DiscreteWeightPartition":
        """Rows ``c_k = k/n`` and ``d_k = (n - k)/n`` for ``k = 1..n``."""
        k = np.arange(1, n + 1, dtype=float)
        return cls(np.vstack([k / n, (n - k) / n]))

    @classmethod
    def trig(cls, n: int) -> "DiscreteWeightPartition":
        k = np.arange(1, n + 1, dtype=float)
        return cls(np.vstack([np.sin(k) ** 2, np.cos(k) ** 2]))

    @classmethod
    def degenerate(cls, n: int, m: int = 2) -> "DiscreteWeightPartition":
        rows = np.zeros((m, n))
        rows[0] = 1.0
        return cls(rows)


def _tuple(v) -> PositiveTuple:
    return v if isinstance(v, PositiveTuple) else PositiveTuple(v)


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = _tuple(a), _tuple(b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return a.values, b.values


def _power_norm(v: np.ndarray, r: float, weights: np.ndarray | None = None) -> float:
    """``(sum_k w_k v_k^r)^(1/r)`` for positive ``v``."""
    top = float(v.max())
    powers = (v / top) ** r
    if weights is not None:
        powers = weights * powers
    s = math.fsum(powers)
    return top * s ** (1.0 / r) if s > 0.0 else 0.0


def sum_lhs(a, b) -> float:
    a, b = _pair(a, b)
    return math.fsum(a * b)


def classical_sum_bound(a, b, exps: ConjugateExponents) -> float:
    a, b = _pair(a, b)
    return _power_norm(a, exps.p) * _power_norm(b, exps.q)


def _terms(a: np.ndarray, b: np.ndarray, exps: ConjugateExponents,
           partition: DiscreteWeightPartition) -> tuple[float, ...]:
    if partition.n != a.size:
        raise ValueError(f"partition has {partition.n} columns but tuples have length {a.size}")
    return tuple(
        _power_norm(a, exps.p, row) * _power_norm(b, exps.q, row) for row in partition.rows
    )


def refined_sum_weighted(a, b, exps: ConjugateExponents, partition: DiscreteWeightPartition):
    """Return ``(terms, total)`` with one Hölder term per partition row."""
    a, b = _pair(a, b)
    terms = _terms(a, b, exps, partition)
    return terms, math.fsum(terms)


def refined_sum_linear(a, b, exps: ConjugateExponents):
    n = len(_tuple(a))
    return refined_sum_weighted(a, b, exps, DiscreteWeightPartition.linear(n))


def default_sum_tolerance(classical: float) -> float:
    return 1e-9 * classical


def verify_sum_chain(a, b, exps: ConjugateExponents, partition: DiscreteWeightPartition | None = None,
                     report_tol: float | None = None) -> ChainReport:
    """Chain check for tuples; ``partition`` defaults to the linear rows.

    ``report_tol`` defaults to ``1e-9 * classical``.
    """
    a, b = _pair(a, b)
    if partition is None:
        partition = DiscreteWeightPartition.linear(a.size)
    lhs = math.fsum(a * b)
    terms = _terms(a, b, exps, partition)
    classical = _power_norm(a, exps.p) * _power_norm(b, exps.q)
    tol = default_sum_tolerance(classical) if report_tol is None else report_tol
    return build_report(lhs, terms, classical, tol)


def read_tuple(source: str | Iterable[str]) -> list[float]:
    """Parse comma- and/or newline-separated numbers; ``#`` starts a comment."""
    lines = source.splitlines() if isinstance(source, str) else source
    out = []
    for line in lines:
        line = line.split("#", 1)[0]
        for tok in line.replace(",", " ").split():
            out.append(float(tok))
    return out


def read_rows(source: str | Sequence[str]) -> list[list[float]]:
    """One partition row per non-empty line, entries comma-separated."""
    lines = source.splitlines() if isinstance(source, str) else source
    rows = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([float(t) for t in line.replace(",", " ").split()])
    return rows
