"""Randomized trials of the finite-n inequalities behind the convergence results.

Each trial draws a modulus, a perturbed sequence of singletons around a
limit point, a witness, an epsilon and a horizon, then evaluates every
inequality through the library's own operations.
"""

import math
from dataclasses import dataclass

import numpy as np

from fdensity import convergence as cv
from fdensity import density as ds
from fdensity import modulus as md
from fdensity import wijsman as wj


def modulus_pool():
    lemma = md.lemma_modulus_from_set(ds.squares(), 6)[0]
    return [
        md.identity(),
        md.log1p(),
        md.power(0.5),
        md.power(0.25),
        md.scale(3.0),
        md.cantor_ext(),
        md.combine("linear", md.log1p(), md.power(0.5), 2.0, 0.5),
        md.combine("max", md.scale(0.5), md.log1p()),
        md.combine("compose", md.log1p(), md.power(0.5)),
        lemma,
    ]


@dataclass
class Trial:
    f: md.Modulus
    seq: wj.SetSequence
    x: float
    A: wj.ClosedSet
    eps: float
    n: int


def draw(rng, pool) -> Trial:
    n = int(rng.integers(8, 600))
    a = float(rng.normal())
    k = np.arange(1, n + 1)
    sigma = rng.uniform(0, 0.4)
    q = rng.uniform(0, 0.4)
    spikes = rng.random(n) < q
    p = a + np.where(spikes, rng.uniform(-20, 20, n), rng.normal(0, sigma, n) / np.sqrt(k))
    seq = wj.SetSequence("trial", lambda i: wj.singleton(p[i - 1]),
                         lambda x, m: np.abs(x - p[:m]))
    x = float(rng.normal(0, 3))
    eps = float(10 ** rng.uniform(-2.5, 0.5))
    f = pool[int(rng.integers(len(pool)))]
    return Trial(f, seq, x, wj.singleton(a), eps, n)


def _slack(f, *vals):
    return max(f.slack, 1e-9) * (sum(abs(float(v)) for v in vals) + 1.0)


def _f(f, t):
    return float(md.evaluate(f, t))


def scaling_bound(t: Trial) -> bool:
    """n <= p |K| implies f(n) <= p f(|K|)."""
    K = cv.deviation_count(t.seq, cv.DeviationSpec(t.x, t.eps, t.A), t.n)
    if K == 0:
        return True
    p = -(-t.n // K)
    lhs, rhs = _f(t.f, t.n), p * _f(t.f, K)
    return lhs <= rhs + _slack(t.f, lhs, rhs)


def cesaro_bound(t: Trial) -> bool:
    """|mean - d(x,A)| <= eps + M_x |K|/n with M_x = sup_k d(x,A_k) + d(x,A)."""
    dA = t.A.dist_to(t.x)
    mean = cv.cesaro_mean(t.seq, t.x, t.n)
    M = cv.bounded_probe(t.seq, t.x, t.n).sup + dA
    stat = cv.stat_ratio(t.seq, cv.DeviationSpec(t.x, t.eps, t.A), t.n)
    lhs, rhs = abs(mean - dA), t.eps + M * stat
    return lhs <= rhs + 1e-12 * (M + 1)


def split_delta(f, eps) -> float:
    """Largest delta in (0, 1] (to bisection precision) with f(delta) < eps."""
    if _f(f, 1.0) < eps:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _f(f, mid) < eps:
            lo = mid
        else:
            hi = mid
    return lo


def delta_split_bound(t: Trial) -> bool:
    """strong_f <= eps + 2 f(1) / delta * strong whenever f < eps on [0, delta]."""
    delta = split_delta(t.f, t.eps)
    if delta == 0.0:
        return True
    sf = cv.strong_cesaro_f_mean(t.seq, t.x, t.A, t.f, t.n)
    s = cv.strong_cesaro_mean(t.seq, t.x, t.A, t.n)
    rhs = t.eps + 2 * _f(t.f, 1.0) / delta * s
    return sf <= rhs + _slack(t.f, sf, rhs)


def beta_bound(t: Trial) -> bool:
    """strong <= strong_f / beta with beta the minimum of f(t)/t on a grid covering the data."""
    dev = cv.deviations(t.seq, t.x, t.A, t.n)
    top = max(float(dev.max()), 1.0) * 2
    grid = np.concatenate([np.geomspace(1e-3, top, 200), dev[dev > 0]])
    beta = float(np.min(md.evaluate(t.f, grid) / grid))
    if beta <= 0:
        return True
    s = cv.strong_cesaro_mean(t.seq, t.x, t.A, t.n)
    sf = cv.strong_cesaro_f_mean(t.seq, t.x, t.A, t.f, t.n)
    return s <= sf / beta + _slack(t.f, s, sf / beta) / beta


def supermultiplicative_constant(f, n, eps) -> float:
    """min of f(x eps) / (f(x) f(eps)) over x = 1..n."""
    xs = np.arange(1, n + 1, dtype=float)
    return float(np.min(md.evaluate(f, xs * eps) / (md.evaluate(f, xs) * _f(f, eps))))


def density_chain_bound(t: Trial) -> bool:
    """strong_f >= c (f(|K|)/f(n)) (f(n)/n) f(eps)."""
    c = supermultiplicative_constant(t.f, t.n, t.eps)
    sf = cv.strong_cesaro_f_mean(t.seq, t.x, t.A, t.f, t.n)
    fr = cv.f_stat_ratio(t.seq, cv.DeviationSpec(t.x, t.eps, t.A), t.f, t.n)
    rhs = c * fr * _f(t.f, t.n) / t.n * _f(t.f, t.eps)
    return sf >= rhs - _slack(t.f, sf, rhs)


CHECKS = {
    "scaling": scaling_bound,
    "cesaro": cesaro_bound,
    "delta_split": delta_split_bound,
    "beta": beta_bound,
    "density_chain": density_chain_bound,
}


def run(trials: int, seed: int = 0) -> dict:
    """Violation counts per inequality over ``trials`` random draws."""
    rng = np.random.default_rng(seed)
    pool = modulus_pool()
    failures = {name: [] for name in CHECKS}
    for i in range(trials):
        t = draw(rng, pool)
        for name, check in CHECKS.items():
            if not check(t):
                failures[name].append((i, t.f.name, t.x, t.eps, t.n))
    return failures
