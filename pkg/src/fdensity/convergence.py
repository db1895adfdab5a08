"""Finite-horizon diagnostics for convergence modes of sequences of closed sets.

Every status is relative to a horizon grid, a tolerance and a finite list of
witness points; none of them asserts an actual limit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import kernels
from .density import finite
from .errors import ConstructionError, DomainError, ParameterError
from .modulus import Modulus, evaluate, identity, lemma_modulus_from_set
from .wijsman import ClosedSet, SetSequence

MODES = ("wijsman", "stat", "f_stat", "cesaro", "strong_cesaro", "strong_cesaro_f")
DEFAULT_EPSILONS = (1.0, 0.1, 0.01)
DEFAULT_SCAN_GRID = tuple(2 ** j for j in range(4, 18))


@dataclass(frozen=True)
class DeviationSpec:
    """Witness point, threshold and candidate limit defining K_{x,eps}."""

    x: Any
    epsilon: float
    limit: ClosedSet

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")


def _check_n(n):
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")


def deviations(seq: SetSequence, x, A: ClosedSet, n: int) -> np.ndarray:
    """``|d(x, A_k) - d(x, A)|`` for k = 1..n."""
    return np.abs(seq.distances(x, n) - A.dist_to(x))


def deviation_count(seq: SetSequence, spec: DeviationSpec, n: int) -> int:
    """``|K_{x,eps}(n)| = |{k <= n : |d(x,A_k) - d(x,A)| >= eps}|``."""
    _check_n(n)
    return int(np.count_nonzero(deviations(seq, spec.x, spec.limit, n) >= spec.epsilon))


def stat_ratio(seq: SetSequence, spec: DeviationSpec, n: int) -> float:
    return deviation_count(seq, spec, n) / n


def f_stat_ratio(seq: SetSequence, spec: DeviationSpec, f: Modulus, n: int) -> float:
    """``f(|K_{x,eps}(n)|) / f(n)``."""
    _check_n(n)
    if not f.unbounded:
        raise ParameterError(f"f-statistical ratios need an unbounded modulus; {f.name} is bounded")
    c = deviation_count(seq, spec, n)
    return float(evaluate(f, c)) / float(evaluate(f, n))


def cesaro_mean(seq: SetSequence, x, n: int) -> float:
    """``(1/n) sum_{k<=n} d(x, A_k)``."""
    _check_n(n)
    return float(np.sum(seq.distances(x, n))) / n


def strong_cesaro_mean(seq: SetSequence, x, A: ClosedSet, n: int) -> float:
    _check_n(n)
    return float(np.sum(deviations(seq, x, A, n))) / n


def strong_cesaro_f_mean(seq: SetSequence, x, A: ClosedSet, f: Modulus, n: int) -> float:
    _check_n(n)
    return float(np.sum(evaluate(f, deviations(seq, x, A, n)))) / n


def dyadic_block_mean(seq: SetSequence, x, A: ClosedSet, r: int, f: Optional[Modulus] = None) -> float:
    """``2**-r * sum_{k=2**r}^{2**(r+1)-1} g(|d(x,A_k) - d(x,A)|)`` with g = f or the identity."""
    if r < 0:
        raise DomainError("block index must be nonnegative")
    lo, hi = 1 << r, (1 << (r + 1)) - 1
    dev = deviations(seq, x, A, hi)[lo - 1:]
    if f is not None:
        dev = evaluate(f, dev)
    return float(np.sum(dev)) / (1 << r)


@dataclass
class BoundedProbe:
    sup: float
    argmax: int
    growth: bool
    sup_half: float

    def to_dict(self):
        return {"sup": self.sup, "argmax": self.argmax, "growth": self.growth,
                "sup_half": self.sup_half}


def bounded_probe(seq: SetSequence, x, n: int, growth_ratio: float = 1.1) -> BoundedProbe:
    """Finite-horizon ``sup_{k<=n} d(x, A_k)``.

    ``growth`` is set when the sup over k <= n exceeds ``growth_ratio``
    times the sup over k <= n // 2.
    """
    _check_n(n)
    d = seq.distances(x, n)
    k = int(np.argmax(d))
    sup = float(d[k])
    half = float(np.max(d[: max(n // 2, 1)]))
    return BoundedProbe(sup, k + 1, sup > growth_ratio * half, half)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass
class ModeVerdict:
    mode: str
    status: str
    evidence: list = field(default_factory=list)
    refutation: Optional[dict] = None
    note: str = ""

    def to_dict(self):
        return {"mode": self.mode, "status": self.status, "note": self.note,
                "refutation": self.refutation, "evidence": self.evidence}


@dataclass
class ConvergenceVerdict:
    """Per-mode statuses with the traces that justify them."""

    sequence: str
    limit: Optional[str]
    modulus: str
    grid: tuple
    epsilons: tuple
    witnesses: tuple
    tol: float
    modes: dict
    boundedness: dict
    notes: list = field(default_factory=list)

    def status(self, mode: str) -> str:
        return self.modes[mode].status

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "limit": self.limit,
            "modulus": self.modulus,
            "grid": list(self.grid),
            "epsilons": list(self.epsilons),
            "witnesses": [_jsonable(w) for w in self.witnesses],
            "tol": self.tol,
            "modes": {m: v.to_dict() for m, v in self.modes.items()},
            "boundedness": {str(_jsonable(x)): p.to_dict() for x, p in self.boundedness.items()},
            "notes": list(self.notes),
        }

    def csv_rows(self) -> list:
        """Rows ``mode, x, epsilon, n, value`` for every evidence trace."""
        rows = []
        for mode, v in self.modes.items():
            for tr in v.evidence:
                for n, val in zip(tr["n"], tr["values"]):
                    rows.append([mode, _jsonable(tr["x"]), tr.get("epsilon", ""), n, val])
        return rows


def _jsonable(x):
    if isinstance(x, complex):
        return x.real if x.imag == 0 else [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _witness_scan(seq, A, f, x, grid, eps):
    n = grid[-1]
    dist = seq.distances(x, n)
    out = {"x": x, "dist_sums": np.cumsum(dist)[np.asarray(grid) - 1]}
    if A is not None:
        dev = np.abs(dist - A.dist_to(x))
        fdev = evaluate(f, dev)
        counts, sums, fsums, _ = kernels.scan_deviations(
            np.ascontiguousarray(dev), np.ascontiguousarray(fdev, dtype=float),
            np.asarray(eps, dtype=float), np.asarray(grid, dtype=np.int64))
        out.update(counts=counts, sums=sums, fsums=fsums)
        out["dA"] = A.dist_to(x)
        tail = dev
    else:
        tail = np.abs(dist - dist[-1])
    lo2, lo1 = grid[-3], grid[-2]
    seg_prev = tail[lo2:lo1]
    seg_last = tail[lo1:n]
    out["tail_prev"] = float(seg_prev.max()) if seg_prev.size else 0.0
    out["tail_last"] = float(seg_last.max()) if seg_last.size else 0.0
    out["tail_argmax"] = lo1 + int(np.argmax(seg_last)) + 1 if seg_last.size else n
    out["tail_trace"] = [float(tail[a:b].max()) if b > a else 0.0
                         for a, b in zip((0,) + tuple(grid[:-1]), grid)]
    out["probe"] = bounded_probe(seq, x, n)
    return out


def _trend_status(traces, tol, grid):
    """Status of traces that should shrink to zero.

    Consistent when every trace ends at or below ``tol``; refuted when some
    trace exceeds ``tol`` at the last two grid points without dropping by
    more than ``tol`` between them.
    """
    refutation = None
    all_ok = True
    for tr in traces:
        v = tr["values"]
        if v[-1] > tol:
            all_ok = False
            if v[-2] > tol and v[-1] >= v[-2] - tol and refutation is None:
                refutation = {"x": _jsonable(tr["x"]), "epsilon": tr.get("epsilon", tol),
                              "n": grid[-1], "value": v[-1]}
    if all_ok:
        return "consistent", None
    if refutation is not None:
        return "refuted", refutation
    return "inconclusive", None


def classify(seq: SetSequence, A: Optional[ClosedSet], f: Optional[Modulus] = None, *,
             grid=None, epsilons=None, witnesses=None, tol: float = 0.01,
             workers: int = 1, lemma_from_deviations: bool = False) -> ConvergenceVerdict:
    """Finite-horizon status of every convergence mode.

    ``witnesses`` defaults to nothing; callers pass the space's witness
    points.  With ``A=None`` only plain Wijsman convergence (Cauchy form) is
    assessed; the other modes are reported inconclusive with the Cesaro
    means as evidence.  ``lemma_from_deviations`` replaces ``f`` by the
    concave slowly varying modulus built from the largest deviation set
    found at the horizon.
    """
    f = identity() if f is None else f
    grid = tuple(int(n) for n in (DEFAULT_SCAN_GRID if grid is None else grid))
    if len(grid) < 3 or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("grid must be increasing positive integers, at least 3 points")
    eps = tuple(float(e) for e in (DEFAULT_EPSILONS if epsilons is None else epsilons))
    if not eps or min(eps) <= 0:
        raise ParameterError("epsilons must be positive")
    witnesses = tuple(witnesses or ())
    if not witnesses:
        raise ParameterError("at least one witness point is required")
    notes = []

    if lemma_from_deviations and A is not None:
        f, note = _lemma_for_deviations(seq, A, witnesses, eps, grid[-1], f)
        notes.append(note)

    def scan(x):
        return _witness_scan(seq, A, f, x, grid, eps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scans = list(pool.map(scan, witnesses))
    else:
        scans = [scan(x) for x in witnesses]

    g = np.asarray(grid, dtype=float)
    modes = {}

    # plain Wijsman: persistence of tail deviations across the last two grid intervals
    refutation = None
    for s in scans:
        for e in sorted(eps, reverse=True):
            if s["tail_prev"] >= e and s["tail_last"] >= e:
                refutation = {"x": _jsonable(s["x"]), "epsilon": e, "n": s["tail_argmax"],
                              "value": s["tail_last"]}
                break
        if refutation:
            break
    evidence = [{"x": s["x"], "n": list(grid), "values": s["tail_trace"]} for s in scans]
    if refutation:
        status = "refuted"
    elif all(s["tail_last"] <= tol for s in scans):
        status = "consistent"
    else:
        status = "inconclusive"
    modes["wijsman"] = ModeVerdict("wijsman", status, evidence, refutation,
                                   "" if A is not None else "Cauchy form, no candidate limit")

    if A is None:
        means = [{"x": s["x"], "n": list(grid), "values": (s["dist_sums"] / g).tolist()}
                 for s in scans]
        for mode in MODES[1:]:
            modes[mode] = ModeVerdict(mode, "inconclusive",
                                      means if mode == "cesaro" else [],
                                      note="no candidate limit")
    else:
        stat_tr, fstat_tr = [], []
        fn = np.array([float(evaluate(f, int(n))) for n in grid])
        for s in scans:
            for i, e in enumerate(eps):
                c = s["counts"][i]
                stat_tr.append({"x": s["x"], "epsilon": e, "n": list(grid),
                                "values": (c / g).tolist()})
                if f.unbounded:
                    fc = np.array([float(evaluate(f, int(v))) for v in c])
                    fstat_tr.append({"x": s["x"], "epsilon": e, "n": list(grid),
                                     "values": (fc / fn).tolist()})
        st, ref = _trend_status(stat_tr, tol, grid)
        modes["stat"] = ModeVerdict("stat", st, stat_tr, ref)
        if f.unbounded:
            st, ref = _trend_status(fstat_tr, tol, grid)
            modes["f_stat"] = ModeVerdict("f_stat", st, fstat_tr, ref)
        else:
            modes["f_stat"] = ModeVerdict("f_stat", "inconclusive",
                                          note=f"{f.name} is bounded; f-density undefined")
        ces = [{"x": s["x"], "n": list(grid),
                "values": np.abs(s["dist_sums"] / g - s["dA"]).tolist()} for s in scans]
        st, ref = _trend_status(ces, tol, grid)
        modes["cesaro"] = ModeVerdict("cesaro", st, ces, ref)
        strong = [{"x": s["x"], "n": list(grid), "values": (s["sums"] / g).tolist()}
                  for s in scans]
        st, ref = _trend_status(strong, tol, grid)
        modes["strong_cesaro"] = ModeVerdict("strong_cesaro", st, strong, ref)
        strong_f = [{"x": s["x"], "n": list(grid), "values": (s["fsums"] / g).tolist()}
                    for s in scans]
        st, ref = _trend_status(strong_f, tol, grid)
        modes["strong_cesaro_f"] = ModeVerdict("strong_cesaro_f", st, strong_f, ref)

    for v in modes.values():
        for tr in v.evidence:
            tr["x"] = _jsonable(tr["x"])

    return ConvergenceVerdict(seq.name, None if A is None else A.name, f.name, grid, eps,
                              witnesses, tol, modes, {s["x"]: s["probe"] for s in scans},
                              notes)


def _lemma_for_deviations(seq, A, witnesses, eps, horizon, fallback):
    best = None
    for x in witnesses:
        dev = deviations(seq, x, A, horizon)
        for e in eps:
            idx = np.nonzero(dev >= e)[0] + 1
            if best is None or idx.size > best[2].size:
                best = (x, e, idx)
    x, e, idx = best
    K = finite(idx.tolist()) if idx.size else None
    built = None
    if K is not None:
        k = 3
        while True:
            try:
                built = lemma_modulus_from_set(K, k)[0]
            except ConstructionError:
                break
            k += 1
    if built is None:
        return fallback, f"deviation set at x={x}, eps={e} too small for a lemma modulus"
    return built, f"modulus built from deviation set at x={x}, eps={e} ({idx.size} indices)"


def limits_agree(A: ClosedSet, B: ClosedSet, witnesses, tol: float = 1e-9) -> bool:
    """Whether the distance oracles of A and B agree at every witness."""
    return all(abs(A.dist_to(x) - B.dist_to(x)) <= tol for x in witnesses)


def cesaro_limit_profile(seq: SetSequence, witnesses, n: int) -> dict:
    """Cesaro means at horizon ``n`` for each witness (pointwise limit estimates)."""
    return {x: cesaro_mean(seq, x, n) for x in witnesses}


# ---------------------------------------------------------------------------
# Exceptional sets
# ---------------------------------------------------------------------------


@dataclass
class ExceptionalSetResult:
    set: tuple
    f_density_ratio_at_horizon: float
    max_deviation_outside: float
    levels: tuple
    cuts: tuple
    target: float
    target_missed: bool
    achieved_ratio: float
    horizon: int

    def to_dict(self):
        return {
            "size": len(self.set),
            "f_density_ratio_at_horizon": self.f_density_ratio_at_horizon,
            "max_deviation_outside": self.max_deviation_outside,
            "levels": list(self.levels),
            "cuts": list(self.cuts),
            "target": self.target,
            "target_missed": self.target_missed,
            "achieved_ratio": self.achieved_ratio,
            "horizon": self.horizon,
        }


def exceptional_set(seq: SetSequence, x, A: ClosedSet, f: Modulus, horizon: int,
                    levels=(2, 4, 8, 16, 32), target: float = 0.01,
                    checkpoints=None) -> ExceptionalSetResult:
    """Finite-horizon set off which ``d(x, A_k)`` approaches ``d(x, A)``.

    Level ``j`` collects the indices with deviation at least ``1/j``.  The
    k-th band (deviation in ``[1/j_k, 1/j_{k-1})``) joins the set only past
    its cut ``n_k``: the least value, not below the previous cut, such that
    ``f(|B_{j_k}(n)|) / f(n) <= target * 2**(1-k)`` at every checkpoint
    ``n >= n_k``.  A band whose ratio fails at the horizon is cut at the
    horizon and so contributes nothing.
    """
    _check_n(horizon)
    levels = tuple(int(j) for j in levels)
    if not levels or levels[0] < 1 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ParameterError("levels must be strictly increasing positive integers")
    if not target > 0:
        raise ParameterError("target must be positive")
    checkpoints = (horizon,) if checkpoints is None else tuple(sorted(int(c) for c in checkpoints))
    if any(c < 1 or c > horizon for c in checkpoints):
        raise ParameterError("checkpoints must lie in [1, horizon]")

    dev = deviations(seq, x, A, horizon)
    idx = np.arange(1, horizon + 1)
    f_at = {}

    def fval(c):
        c = int(c)
        if c not in f_at:
            f_at[c] = float(evaluate(f, c))
        return f_at[c]

    cp = np.asarray(checkpoints, dtype=np.int64)
    level_masks = [dev >= 1.0 / j for j in levels]
    cuts = []
    members = np.zeros(horizon, dtype=bool)
    prev_cut = 0
    prev_mask = np.zeros(horizon, dtype=bool)
    for k, mask in enumerate(level_masks):
        tk = target * 2.0 ** (-k)
        counts = np.cumsum(mask)[cp - 1]
        fails = [int(n) for n, c in zip(cp, counts) if fval(c) / fval(n) > tk]
        cut = prev_cut if not fails else max(prev_cut, fails[-1] + 1)
        cut = min(cut, horizon)
        band = mask & ~prev_mask
        members |= band & (idx > cut)
        cuts.append(cut)
        prev_cut, prev_mask = cut, mask

    chosen = idx[members]
    ratio = fval(chosen.size) / fval(horizon)
    outside = dev[~members]
    max_out = float(outside.max()) if outside.size else 0.0
    achieved = fval(np.count_nonzero(level_masks[0])) / fval(horizon)
    missed = ratio > target or max_out >= 1.0 / levels[0]
    return ExceptionalSetResult(tuple(int(i) for i in chosen), ratio, max_out, levels,
                                tuple(cuts), target, missed, achieved, horizon)


__all__ = [
    "BoundedProbe",
    "ConvergenceVerdict",
    "DEFAULT_EPSILONS",
    "DEFAULT_SCAN_GRID",
    "DeviationSpec",
    "ExceptionalSetResult",
    "MODES",
    "ModeVerdict",
    "bounded_probe",
    "cesaro_limit_profile",
    "cesaro_mean",
    "classify",
    "deviation_count",
    "deviations",
    "dyadic_block_mean",
    "exceptional_set",
    "f_stat_ratio",
    "limits_agree",
    "stat_ratio",
    "strong_cesaro_f_mean",
    "strong_cesaro_mean",
]
