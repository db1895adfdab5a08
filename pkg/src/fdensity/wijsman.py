"""Metric spaces, closed sets as distance oracles, and sequences of closed sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError


def euclidean(x, y):
    return abs(x - y)


@dataclass(frozen=True)
class MetricSpace:
    """A metric space known through its distance and a list of witness points.

    The witness points stand in for "every x in X" in all diagnostics.
    ``kind`` is ``real``, ``complex``, ``halfline`` ([0, inf)) or ``abstract``.
    """

    kind: str
    dist: Callable = field(repr=False, default=euclidean)
    witness_points: tuple = ()

    def admit(self, x):
        """Map a candidate witness into the space (clamping for the half-line)."""
        if self.kind == "halfline":
            return max(float(x), 0.0)
        return x

    def with_witnesses(self, points) -> "MetricSpace":
        return MetricSpace(self.kind, self.dist, tuple(self.admit(p) for p in points))

    def metric_violation(self, points=None, tol=1e-12):
        """First witness triple breaking a metric axiom, or None."""
        pts = list(self.witness_points if points is None else points)
        d = self.dist
        for x in pts:
            if abs(d(x, x)) > tol:
                return ("identity", x)
        for x, y in itertools.product(pts, repeat=2):
            if abs(d(x, y) - d(y, x)) > tol or d(x, y) < 0:
                return ("symmetry", x, y)
        for x, y, z in itertools.product(pts, repeat=3):
            if d(x, z) > d(x, y) + d(y, z) + tol:
                return ("triangle", x, y, z)
        return None


def real_line(witnesses=(0.0,)) -> MetricSpace:
    return MetricSpace("real", euclidean, tuple(witnesses))


def complex_plane(witnesses=(0.0,)) -> MetricSpace:
    return MetricSpace("complex", euclidean, tuple(witnesses))


def half_line(witnesses=(0.0,)) -> MetricSpace:
    return MetricSpace("halfline", euclidean, tuple(max(float(w), 0.0) for w in witnesses))


@dataclass(frozen=True)
class ClosedSet:
    """A non-empty closed set represented by ``x -> d(x, A)``."""

    name: str
    dist_to: Callable = field(repr=False)

    def __call__(self, x):
        return self.dist_to(x)


def singleton(p, dist=euclidean) -> ClosedSet:
    return ClosedSet(f"{{{p}}}", lambda x: dist(x, p))


def finite_set(points, dist=euclidean) -> ClosedSet:
    pts = tuple(points)
    if not pts:
        raise ParameterError("closed sets must be non-empty")
    return ClosedSet("{" + ", ".join(str(p) for p in pts) + "}",
                     lambda x: min(dist(x, p) for p in pts))


def circle(center, radius) -> ClosedSet:
    """``{z : |z - center| = radius}`` in the plane."""
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    return ClosedSet(f"circle({center}, {radius})", lambda x: abs(abs(x - center) - radius))


def lipschitz_violation(A: ClosedSet, pairs, dist=euclidean, tol=1e-12):
    """First pair with ``|d(x,A) - d(y,A)| > dist(x,y)``, or None."""
    for x, y in pairs:
        if abs(A.dist_to(x) - A.dist_to(y)) > dist(x, y) + tol:
            return (x, y)
    return None


@dataclass(frozen=True)
class SetSequence:
    """An indexed family ``k -> A_k`` (k >= 1) of closed sets.

    ``vectorized``, when given, maps ``(x, n)`` to the array
    ``[d(x, A_1), ..., d(x, A_n)]`` and must agree with ``at``.
    """

    name: str
    at: Callable[[int], ClosedSet] = field(repr=False)
    vectorized: Optional[Callable] = field(default=None, repr=False)

    def distances(self, x, n: int) -> np.ndarray:
        if n < 0:
            raise DomainError("n must be nonnegative")
        if self.vectorized is not None:
            return np.asarray(self.vectorized(x, n), dtype=float)
        return np.array([self.at(k).dist_to(x) for k in range(1, n + 1)], dtype=float)

    def distances_by_index(self, x, n: int) -> np.ndarray:
        """Same values as ``distances`` computed through ``at`` only."""
        return np.array([self.at(k).dist_to(x) for k in range(1, n + 1)], dtype=float)


def constant_sequence(A: ClosedSet) -> SetSequence:
    return SetSequence(f"const({A.name})", lambda k: A,
                       lambda x, n: np.full(n, A.dist_to(x), dtype=float))


def sequence_from_function(name, at) -> SetSequence:
    return SetSequence(name, at)


# ---------------------------------------------------------------------------
# Sequences from the worked examples
# ---------------------------------------------------------------------------


def _indices(n):
    return np.arange(1, n + 1, dtype=np.int64)


def _square_mask(k):
    r = np.floor(np.sqrt(k.astype(float))).astype(np.int64)
    r += (r + 1) * (r + 1) <= k
    r -= r * r > k
    return r * r == k


def _pow2_mask(k):
    return (k >= 2) & ((k & (k - 1)) == 0)


def _is_square(k):
    return math.isqrt(k) ** 2 == k


def _r03_at(k):
    return circle(1, 1 / k) if _is_square(k) else singleton(0)


def _r03_vec(x, n):
    k = _indices(n)
    return np.where(_square_mask(k), np.abs(abs(x - 1) - 1.0 / k), abs(x))


def _e2_at(k):
    return singleton(k) if _is_square(k) else singleton(0)


def _e2_vec(x, n):
    k = _indices(n)
    return np.where(_square_mask(k), np.abs(x - k), abs(x))


def _e4_at(k):
    return singleton(-1) if k % 2 == 0 else singleton(1)


def _e4_vec(x, n):
    k = _indices(n)
    return np.where(k % 2 == 0, abs(x + 1), abs(x - 1))


def _e3_at(k):
    return singleton(k) if k >= 2 and k & (k - 1) == 0 else singleton(0)


def _e3_vec(x, n):
    k = _indices(n)
    return np.where(_pow2_mask(k), np.abs(x - k), abs(x))


@dataclass(frozen=True)
class ExampleSequence:
    """A worked example: its space, sequence, candidate limit and witnesses."""

    id: str
    space: MetricSpace
    sequence: SetSequence
    limit: Optional[ClosedSet]

    @property
    def witnesses(self) -> tuple:
        return self.space.witness_points


PAPER_SEQUENCES = ("R03", "E2", "E4", "E3")


def paper_sequence(id: str) -> ExampleSequence:
    """Built-in example sequences.

    R03: circles ``|z - 1| = 1/k`` at square k, else {0}, in the plane.
    E2: {k} at square k, else {0}, on the line.
    E4: {-1} at even k, {1} at odd k, on the line; no candidate limit.
    E3: {k} at k a power of two (k >= 2), else {0}, on [0, inf).
    """
    key = id.upper()
    if key == "R03":
        return ExampleSequence(key, complex_plane((0.0, 1.0, -2.5)),
                               SetSequence("R03", _r03_at, _r03_vec), singleton(0))
    if key == "E2":
        return ExampleSequence(key, real_line((0.0, 1.0, -2.5)),
                               SetSequence("E2", _e2_at, _e2_vec), singleton(0))
    if key == "E4":
        return ExampleSequence(key, real_line((0.0, 2.0, -0.5)),
                               SetSequence("E4", _e4_at, _e4_vec), None)
    if key == "E3":
        return ExampleSequence(key, half_line((0.0, 1.0, 10.0)),
                               SetSequence("E3", _e3_at, _e3_vec), singleton(0))
    raise ParameterError(f"unknown sequence id {id!r}; expected one of {PAPER_SEQUENCES}")


def alternating_cesaro_mean(x: float, k: int) -> float:
    """Closed form of ``(1/k) sum_{i<=k} d(x, A_i)`` for the E4 sequence.

    Even k: ``|x|`` outside [-1, 1] and 1 inside.  Odd k: ``|x - 1/k|``
    outside and ``1 - x/k`` inside.
    """
    inside = -1.0 <= x <= 1.0
    if k % 2 == 0:
        return 1.0 if inside else abs(x)
    return 1.0 - x / k if inside else abs(x - 1.0 / k)


def alternating_cesaro_limit(x: float) -> float:
    """Limit of the E4 Cesaro means: 1 on [-1, 1], ``|x|`` elsewhere."""
    return 1.0 if -1.0 <= x <= 1.0 else abs(x)


__all__: Sequence[str] = [
    "ClosedSet",
    "ExampleSequence",
    "MetricSpace",
    "PAPER_SEQUENCES",
    "SetSequence",
    "alternating_cesaro_limit",
    "alternating_cesaro_mean",
    "circle",
    "complex_plane",
    "constant_sequence",
    "euclidean",
    "finite_set",
    "half_line",
    "lipschitz_violation",
    "paper_sequence",
    "real_line",
    "singleton",
]
