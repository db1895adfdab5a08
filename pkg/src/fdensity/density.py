"""Subsets of the positive integers and their finite-horizon densities."""

from __future__ import annotations

import bisect
import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

import numpy as np

from .errors import DomainError, ParameterError
from .modulus import Modulus, evaluate

# Largest exponent accepted by closed-form nth-element formulas that
# produce astronomically large elements.
MAX_EXPONENT = 1 << 26


@dataclass(frozen=True, eq=False)
class NatSet:
    """A subset of N = {1, 2, ...}.

    ``enumerate`` returns a fresh ascending iterator.  ``count`` and ``nth``
    are optional closed forms for ``|{k <= n : k in K}|`` and the j-th
    element (1-based).
    """

    name: str
    member: Callable[[int], bool] = field(repr=False)
    enumerate: Callable[[], Iterator[int]] = field(repr=False)
    count: Optional[Callable[[int], int]] = field(default=None, repr=False)
    nth: Optional[Callable[[int], int]] = field(default=None, repr=False)
    finite: bool = False

    def __contains__(self, k):
        return k >= 1 and self.member(k)

    def __iter__(self):
        return self.enumerate()


def count_upto(K: NatSet, n: int) -> int:
    """Number of elements of ``K`` not exceeding ``n``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if K.count is not None:
        return int(K.count(n))
    c = 0
    for k in K.enumerate():
        if k > n:
            break
        c += 1
    return c


def brute_count(K: NatSet, n: int) -> int:
    """Count by testing membership of every k <= n."""
    return sum(1 for k in range(1, n + 1) if K.member(k))


def nth_element(K: NatSet, j: int) -> int:
    """The j-th smallest element of ``K`` (1-based).

    Raises IndexError when ``K`` has fewer than ``j`` elements.
    """
    if j < 1:
        raise DomainError("element index is 1-based")
    if K.nth is not None:
        return K.nth(j)
    if j > MAX_EXPONENT:
        raise OverflowError(f"enumerating {j} elements of {K.name} is not feasible")
    try:
        return next(itertools.islice(K.enumerate(), j - 1, None))
    except StopIteration:
        raise IndexError(f"{K.name} has fewer than {j} elements") from None


def elements_upto(K: NatSet, n: int) -> list:
    out = []
    for k in K.enumerate():
        if k > n:
            break
        out.append(k)
    return out


# ---------------------------------------------------------------------------
# Set constructors
# ---------------------------------------------------------------------------


def _is_square(k):
    return k >= 1 and math.isqrt(k) ** 2 == k


def squares() -> NatSet:
    return NatSet("squares", _is_square, lambda: (j * j for j in itertools.count(1)),
                  count=lambda n: math.isqrt(n) if n >= 1 else 0, nth=lambda j: j * j)


def evens() -> NatSet:
    return NatSet("evens", lambda k: k % 2 == 0, lambda: itertools.count(2, 2),
                  count=lambda n: max(n, 0) // 2, nth=lambda j: 2 * j)


def odds() -> NatSet:
    return NatSet("odds", lambda k: k % 2 == 1, lambda: itertools.count(1, 2),
                  count=lambda n: (max(n, 0) + 1) // 2, nth=lambda j: 2 * j - 1)


def _pow2_nth(j):
    if j > MAX_EXPONENT:
        raise OverflowError(f"2**{j} is too large to construct")
    return 1 << j


def powers_of_two() -> NatSet:
    """{2, 4, 8, ...}; 1 = 2**0 is excluded."""
    return NatSet("pow2", lambda k: k >= 2 and k & (k - 1) == 0,
                  lambda: (1 << r for r in itertools.count(1)),
                  count=lambda n: n.bit_length() - 1 if n >= 1 else 0, nth=_pow2_nth)


def finite(values) -> NatSet:
    vals = sorted(set(int(v) for v in values))
    if vals and vals[0] < 1:
        raise DomainError("elements of N are positive integers")
    members = frozenset(vals)
    name = "finite[" + ",".join(str(v) for v in vals) + "]"

    def nth(j):
        if j > len(vals):
            raise IndexError(f"{name} has only {len(vals)} elements")
        return vals[j - 1]

    return NatSet(name, members.__contains__, lambda: iter(vals),
                  count=lambda n: bisect.bisect_right(vals, n), nth=nth, finite=True)


def complement(K: NatSet) -> NatSet:
    def enum():
        return (k for k in itertools.count(1) if not K.member(k))

    return NatSet(f"compl({K.name})", lambda k: not K.member(k), enum,
                  count=lambda n: max(n, 0) - count_upto(K, max(n, 0)))


def union(K1: NatSet, K2: NatSet) -> NatSet:
    def enum():
        last = None
        for k in heapq.merge(K1.enumerate(), K2.enumerate()):
            if k != last:
                yield k
                last = k

    return NatSet(f"union({K1.name},{K2.name})", lambda k: K1.member(k) or K2.member(k),
                  enum, finite=K1.finite and K2.finite)


def from_predicate(name: str, predicate: Callable[[int], bool]) -> NatSet:
    return NatSet(name, predicate,
                  lambda: (k for k in itertools.count(1) if predicate(k)))


# ---------------------------------------------------------------------------
# Density ratios
# ---------------------------------------------------------------------------


def natural_density_ratio(K: NatSet, n: int) -> float:
    """``|K(n)| / n``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return count_upto(K, n) / n


def f_density_ratio(K: NatSet, f: Modulus, n: int):
    """``f(|K(n)|) / f(n)``; a Fraction when ``f`` has an exact form."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not f.unbounded:
        raise ParameterError(f"f-density needs an unbounded modulus; {f.name} is bounded")
    c = count_upto(K, n)
    fc, fn = evaluate(f, c), evaluate(f, n)
    if isinstance(fc, Fraction) and isinstance(fn, Fraction):
        return fc / fn
    return float(fc) / float(fn)


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def geometric_grid(lo: int, hi: int, factor=2) -> list:
    """Increasing integers lo, lo*factor, ... not exceeding hi."""
    if lo < 1 or hi < lo:
        raise ParameterError(f"bad grid bounds {lo}:{hi}")
    if factor <= 1:
        raise ParameterError("grid factor must exceed 1")
    out = []
    if float(factor).is_integer():
        step = int(factor)
        v = int(lo)
        while v <= hi:
            out.append(v)
            v *= step
        return out
    v = float(lo)
    while v <= hi * (1 + 1e-12):
        n = int(round(v))
        if not out or n > out[-1]:
            out.append(n)
        v *= factor
    return out


DEFAULT_GRID = tuple(2 ** j for j in range(4, 21))


@dataclass
class RatioTrace:
    """Ratios sampled along a horizon grid with a finite-horizon verdict.

    ``verdict`` is one of ``consistent``, ``inconclusive`` or ``diverging``;
    ``limit`` is the value a ``consistent`` verdict refers to.
    """

    grid: tuple
    counts: tuple
    values: tuple
    verdict: str
    limit: Optional[float]
    tol: float
    trend: int
    oscillation: float
    f_counts: Optional[tuple] = None
    f_ns: Optional[tuple] = None
    set_name: str = ""
    modulus_name: Optional[str] = None

    @property
    def last(self) -> float:
        return self.values[-1]

    def consistent_with(self, L: float, tol: Optional[float] = None) -> bool:
        tol = self.tol if tol is None else tol
        return abs(self.values[-1] - L) <= tol and self.oscillation < tol

    def header(self) -> list:
        if self.f_counts is None:
            return ["n", "count", "ratio"]
        return ["n", "count", "f_count", "f_n", "ratio"]

    def rows(self) -> list:
        if self.f_counts is None:
            return [[n, c, v] for n, c, v in zip(self.grid, self.counts, self.values)]
        return [list(r) for r in zip(self.grid, self.counts, self.f_counts, self.f_ns,
                                     self.values)]

    def to_dict(self) -> dict:
        return {
            "set": self.set_name,
            "modulus": self.modulus_name,
            "verdict": self.verdict,
            "limit": self.limit,
            "tol": self.tol,
            "trend": self.trend,
            "oscillation": self.oscillation,
            "columns": self.header(),
            "rows": self.rows(),
        }


def trace_verdict(values, limit=None, tol=0.01, window=3):
    """Classify the tail of a sampled sequence.

    Returns ``(verdict, limit, trend, oscillation)``.
    """
    tail = np.asarray(values[-window:], dtype=float)
    osc = float(np.ptp(tail))
    delta = float(tail[-1] - tail[0])
    trend = 0 if abs(delta) <= 1e-12 else (1 if delta > 0 else -1)
    last = float(tail[-1])
    if limit is not None:
        if abs(last - limit) <= tol and osc < tol:
            return "consistent", float(limit), trend, osc
    elif osc < tol:
        return "consistent", last, trend, osc
    steps = np.diff(tail)
    monotone = bool(np.all(steps >= -1e-15) or np.all(steps <= 1e-15))
    return ("inconclusive" if monotone else "diverging"), limit, trend, osc


def density_trend(K: NatSet, f: Optional[Modulus] = None, grid=None, limit=None,
                  tol: float = 0.01, window: int = 3) -> RatioTrace:
    """Natural (``f=None``) or f-density ratios of ``K`` along ``grid``."""
    grid = tuple(int(n) for n in (DEFAULT_GRID if grid is None else grid))
    if len(grid) < 4 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("grid must be increasing with at least 4 points")
    counts = tuple(count_upto(K, n) for n in grid)
    if f is None:
        values = tuple(c / n for c, n in zip(counts, grid))
        f_counts = f_ns = None
    else:
        if not f.unbounded:
            raise ParameterError(f"f-density needs an unbounded modulus; {f.name} is bounded")
        f_counts = tuple(float(evaluate(f, c)) for c in counts)
        f_ns = tuple(float(evaluate(f, n)) for n in grid)
        values = tuple(float(f_density_ratio(K, f, n)) for n in grid)
    verdict, L, trend, osc = trace_verdict(values, limit, tol, window)
    return RatioTrace(grid, counts, values, verdict, L, tol, trend, osc, f_counts, f_ns,
                      K.name, None if f is None else f.name)


__all__ = [
    "DEFAULT_GRID",
    "NatSet",
    "RatioTrace",
    "brute_count",
    "complement",
    "count_upto",
    "density_trend",
    "elements_upto",
    "evens",
    "f_density_ratio",
    "finite",
    "from_predicate",
    "geometric_grid",
    "natural_density_ratio",
    "nth_element",
    "odds",
    "powers_of_two",
    "squares",
    "trace_verdict",
    "union",
]
