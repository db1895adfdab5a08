"""Finite-horizon reproductions of the worked examples.

Each fixture returns a :class:`FixtureResult` carrying the numbers it
checked, so a failure can be reported with its evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import convergence as cv
from . import density as ds
from . import modulus as md
from . import wijsman as wj


@dataclass
class FixtureResult:
    name: str
    passed: bool
    checks: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)

    def failing(self) -> list:
        return [k for k, ok in self.checks.items() if not ok]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        nums = ", ".join(f"{k}={_fmt(v)}" for k, v in self.numbers.items())
        out = f"[{status}] {self.name}: {nums}"
        if not self.passed:
            out += f" (failed: {', '.join(self.failing())})"
        return out

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks,
                "numbers": {k: _jsonable(v) for k, v in self.numbers.items()}}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _result(name, checks, numbers):
    checks = {k: bool(v) for k, v in checks.items()}
    return FixtureResult(name, all(checks.values()), checks, numbers)


def _pow2_grid(lo, hi):
    return [1 << j for j in range(lo, hi.bit_length()) if (1 << j) <= hi]


def density_fixture(grid_max: int = 1 << 20, tol: float = 0.01) -> FixtureResult:
    """Squares: natural density 0 and log-density 1/2; evens and odds: log-density rising to 1."""
    grid = ds.geometric_grid(16, grid_max, 2)
    f = md.log1p()
    sq_f = ds.density_trend(ds.squares(), f, grid, limit=0.5, tol=tol)
    sq_n = ds.density_trend(ds.squares(), None, grid, limit=0.0, tol=tol)
    checks = {"squares_log_half": sq_f.verdict == "consistent",
              "squares_natural_zero": sq_n.verdict == "consistent"}
    numbers = {"squares_log_ratio": sq_f.last, "squares_ratio": sq_n.last,
               "verdict": sq_f.verdict}
    tail = [n for n in grid if n >= 1 << 10] or grid
    for K in (ds.evens(), ds.odds()):
        vals = [float(ds.f_density_ratio(K, f, n)) for n in tail]
        rising = all(b > a for a, b in zip(vals, vals[1:]))
        high = vals[-1] >= 0.94 if tail[-1] >= 1 << 20 else True
        checks[f"{K.name}_rising"] = rising and high
        numbers[f"{K.name}_log_ratio"] = vals[-1]
    return _result("density (squares, evens, odds)", checks, numbers)


def r03_fixture(grid_max: int = 1 << 14, eps: float = 0.5, threshold: float = 0.1) -> FixtureResult:
    """Statistically but not plainly convergent circles; log-statistical convergence fails."""
    ex = wj.paper_sequence("R03")
    grid = _pow2_grid(4, grid_max)
    spec = cv.DeviationSpec(0.0, eps, ex.limit)
    count = cv.deviation_count(ex.sequence, spec, grid[-1])
    verdict = cv.classify(ex.sequence, ex.limit, md.log1p(), grid=grid, epsilons=(eps,),
                          witnesses=ex.witnesses, tol=threshold)
    stat = cv.stat_ratio(ex.sequence, spec, grid[-1])
    fstat = cv.f_stat_ratio(ex.sequence, spec, md.log1p(), grid[-1])
    checks = {
        "wijsman_refuted": verdict.status("wijsman") == "refuted",
        "stat_consistent": verdict.status("stat") == "consistent" and stat <= threshold,
        "log_stat_not_consistent": verdict.status("f_stat") != "consistent",
    }
    numbers = {"n": grid[-1], "deviations": count, "stat_ratio": stat, "log_stat_ratio": fstat}
    return _result("R03 circles", checks, numbers)


def e2_fixture(grid_max: int = 1 << 14, threshold: float = 0.1) -> FixtureResult:
    """Statistically convergent but Cesaro means diverge."""
    ex = wj.paper_sequence("E2")
    grid = _pow2_grid(4, grid_max)
    n = grid[-1]
    m100 = cv.cesaro_mean(ex.sequence, 0.0, 100)
    mean = cv.cesaro_mean(ex.sequence, 0.0, n)
    stat = cv.stat_ratio(ex.sequence, cv.DeviationSpec(0.0, 0.01, ex.limit), n)
    verdict = cv.classify(ex.sequence, ex.limit, md.identity(), grid=grid, epsilons=(0.5,),
                          witnesses=ex.witnesses, tol=0.01)
    checks = {
        "mean_at_100": m100 == 3.85,
        "mean_grows": mean >= 0.3 * math.sqrt(n),
        "stat_small": stat <= threshold,
        "cesaro_refuted": verdict.status("cesaro") == "refuted",
    }
    return _result("E2 escaping singletons", checks,
                   {"mean_100": m100, "n": n, "mean_n": mean, "stat_ratio": stat})


def e4_fixture(grid_max: int = 1 << 10) -> FixtureResult:
    """Alternating singletons: pointwise Cesaro limits exist but no closed set produces them."""
    ex = wj.paper_sequence("E4")
    seq = ex.sequence
    top = min(grid_max, 1 << 10)
    d0 = seq.distances(0.0, top)
    means0 = np.cumsum(d0) / np.arange(1, top + 1)
    at_zero = bool(np.all(means0 == 1.0))
    d2 = seq.distances(2.0, top)
    even = np.arange(2, top + 1, 2)
    means2 = (np.cumsum(d2) / np.arange(1, top + 1))[even - 1]
    at_two = bool(np.all(means2 == 2.0))
    err = 0.0
    kmax = min(top, 1000)
    ks = np.arange(1, kmax + 1)
    for x in ex.witnesses:
        means = np.cumsum(seq.distances(x, kmax)) / ks
        closed = np.array([wj.alternating_cesaro_mean(x, int(k)) for k in ks])
        err = max(err, float(np.max(np.abs(means - closed))))
    profile = cv.cesaro_limit_profile(seq, ex.witnesses, top)
    floor = min(profile.values())
    missed = cv.exceptional_set(seq, 0.0, wj.singleton(0), md.identity(), top).target_missed
    checks = {
        "mean_at_zero": at_zero,
        "mean_at_two_even": at_two,
        "closed_form": err <= 1e-12,
        "limit_at_least_one": floor >= 1.0 - 1.0 / top,
        "exceptional_set_missed": missed,
    }
    return _result("E4 alternating", checks,
                   {"n": top, "closed_form_error": err, "min_limit": floor})


def e3_fixture(grid_max: int = 1 << 14, r_range=range(5, 15)) -> FixtureResult:
    """Strongly Cesaro summable with respect to log1p but not plainly."""
    ex = wj.paper_sequence("E3")
    f = md.log1p()
    plain = {r: cv.dyadic_block_mean(ex.sequence, 0.0, ex.limit, r) for r in r_range}
    logged = {r: cv.dyadic_block_mean(ex.sequence, 0.0, ex.limit, r, f) for r in r_range}
    grid = _pow2_grid(4, grid_max)
    verdict = cv.classify(ex.sequence, ex.limit, f, grid=grid, epsilons=(0.5,),
                          witnesses=ex.witnesses, tol=0.01)
    checks = {
        "plain_blocks_one": all(v == 1.0 for v in plain.values()),
        "log_blocks_small": all(v <= 0.01 for r, v in logged.items() if r >= 10),
        "log_block_r10": 10 not in logged or abs(logged[10] - math.log(1025) / 1024) <= 1e-3,
        "strong_f_consistent": verdict.status("strong_cesaro_f") == "consistent",
        "strong_refuted": verdict.status("strong_cesaro") == "refuted",
    }
    return _result("E3 dyadic spikes", checks,
                   {"log_block_r10": logged.get(10), "strong_mean": verdict.modes[
                       "strong_cesaro"].evidence[0]["values"][-1]})


def moduli_fixture(k_max: int = 20, seed: int = 0) -> FixtureResult:
    """Lemma construction on the squares, and the extended Cantor modulus."""
    K = ds.squares()
    f, sched = md.lemma_modulus_from_set(K, k_max)
    inv = sched.check(lambda m: ds.count_upto(K, m))
    n = sched.n
    ratio = ds.f_density_ratio(K, f, n[-1])
    slopes = f.exact_form.slopes
    inside = [k for k in range(1, k_max) if 10 * n[k] <= n[-1]][-2:]
    sv = [f(a * n[k]) / f(n[k]) for a in (2, 10) for k in inside]

    rng = np.random.default_rng(seed)
    u = rng.random(1000)
    eq_third = float(np.max(np.abs(md.cantor(u / 3) - md.cantor(u) / 2)))
    eq_sym = float(np.max(np.abs(md.cantor(1 - u) - (1 - md.cantor(u)))))
    quarter = md.cantor(0.25)
    ge = md.cantor_ext()
    witness = md.concavity_witness(ge, np.arange(10.0))
    xy = rng.random((10_000, 2)) * 9.0
    excess = md.subadditivity_excess(ge, xy[:, 0], xy[:, 1])
    checks = {
        "schedule_invariants": all(inv.values()),
        "knot_identities": md.knot_identities(f, sched),
        "density_ratio": ratio >= Fraction(k_max - 2, k_max),
        "slopes_decreasing": all(b < a for a, b in zip(slopes, slopes[1:])),
        "slow_variation": all(1 <= r <= Fraction(5, 4) for r in sv),
        "cantor_equations": max(eq_third, eq_sym) <= 1e-12,
        "cantor_quarter": abs(quarter - 1 / 3) <= 1e-12,
        "cantor_ext_witness": witness == (1.0, 3.0),
        "cantor_ext_subadditive": bool(np.all(excess <= 0)),
    }
    numbers = {"k_max": k_max, "n_3": n[3], "n_4": n[4], "density_ratio": float(ratio),
               "max_sv_ratio": float(max(sv)), "witness": witness}
    return _result("moduli (lemma, Cantor)", checks, numbers)


def run_all(grid_max: int | None = None, tol: float = 0.01) -> list:
    """Run every fixture.  ``grid_max`` caps the horizons; ``tol`` sets the density tolerance."""
    def cap(default):
        return default if grid_max is None else min(default, grid_max)

    return [
        density_fixture(cap(1 << 20), tol),
        r03_fixture(cap(1 << 14)),
        e2_fixture(cap(1 << 14)),
        e4_fixture(cap(1 << 10)),
        e3_fixture(cap(1 << 14)),
        moduli_fixture(),
    ]


__all__ = ["FixtureResult", "density_fixture", "e2_fixture", "e3_fixture", "e4_fixture",
           "moduli_fixture", "r03_fixture", "run_all"]
