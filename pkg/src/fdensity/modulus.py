"""Modulus functions: construction, combination, evaluation and sampled checks.

A modulus is a map ``f: [0, inf) -> [0, inf)`` with ``f(x) = 0`` only at 0,
subadditive, nondecreasing and continuous.  Nothing here proves those
properties; the checks only search a finite grid for counterexamples.
"""

from __future__ import annotations

import bisect
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConstructionError, DomainError, ParameterError

EXACT_SLACK = 1e-12
COMPOSED_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """A sampling grid on ``[0, inf)``.

    Exactly one of ``step`` (arithmetic grid) or ``factor`` (geometric grid)
    is set.
    """

    start: float
    stop: float
    step: float | None = None
    factor: float | None = None

    def __post_init__(self):
        if (self.step is None) == (self.factor is None):
            raise ParameterError("GridSpec needs exactly one of step or factor")
        if self.start < 0 or self.stop < self.start:
            raise ParameterError(f"bad grid bounds [{self.start}, {self.stop}]")
        if self.step is not None and self.step <= 0:
            raise ParameterError("grid step must be positive")
        if self.factor is not None and (self.factor <= 1 or self.start <= 0):
            raise ParameterError("geometric grid needs factor > 1 and start > 0")

    @classmethod
    def linear(cls, start, stop, step):
        return cls(float(start), float(stop), step=float(step))

    @classmethod
    def geometric(cls, start, stop, factor):
        return cls(float(start), float(stop), factor=float(factor))

    def points(self) -> np.ndarray:
        if self.step is not None:
            n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
            return self.start + self.step * np.arange(n + 1)
        pts = []
        t = self.start
        while t <= self.stop * (1 + 1e-12):
            pts.append(t)
            t *= self.factor
        return np.array(pts)


def as_grid(grid) -> np.ndarray:
    """Sorted, de-duplicated float array of nonnegative grid points."""
    pts = grid.points() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)
    pts = np.unique(np.ravel(pts))
    if pts.size == 0:
        raise ParameterError("empty grid")
    if pts[0] < 0 or not np.all(np.isfinite(pts)):
        raise DomainError("grid points must be finite and nonnegative")
    return pts


def refine(pts: np.ndarray) -> np.ndarray:
    """Insert the midpoint of every adjacent pair."""
    out = np.empty(2 * pts.size - 1)
    out[0::2] = pts
    out[1::2] = 0.5 * (pts[:-1] + pts[1:])
    return out


# ---------------------------------------------------------------------------
# Exact piecewise-affine functions
# ---------------------------------------------------------------------------


def _int_to_str(n: int) -> str:
    limit = getattr(sys, "get_int_max_str_digits", None)
    if limit is None:
        return str(n)
    old = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        return str(n)
    finally:
        sys.set_int_max_str_digits(old)


def _str_to_int(s: str) -> int:
    limit = getattr(sys, "get_int_max_str_digits", None)
    if limit is None:
        return int(s)
    old = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        return int(s)
    finally:
        sys.set_int_max_str_digits(old)


def _as_exact_int(x) -> int:
    if isinstance(x, bool):
        raise ParameterError("knot abscissa must be an integer")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise ParameterError(f"knot abscissa {x!r} is not an integer")


class PiecewiseAffine:
    """Exact piecewise-affine function through integer/rational knots.

    Knots ``(x_k, y_k)`` start at ``(0, 0)`` and increase strictly in both
    coordinates.  Past the last knot the last segment's slope is continued.
    """

    def __init__(self, knots: Iterable[tuple]):
        xs, ys = [], []
        for x, y in knots:
            xs.append(_as_exact_int(x))
            ys.append(Fraction(y))
        if len(xs) < 2:
            raise ParameterError("need at least two knots")
        if xs[0] != 0 or ys[0] != 0:
            raise ParameterError("first knot must be (0, 0)")
        for i in range(1, len(xs)):
            if xs[i] <= xs[i - 1]:
                raise ParameterError(f"knot abscissas not increasing at index {i}")
            if ys[i] <= ys[i - 1]:
                raise ParameterError(f"knot ordinates not increasing at index {i}")
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        self.slopes = tuple(
            (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)
        )
        self._xf = np.array([_float_or_inf(x) for x in xs])
        self._yf = np.array([float(y) for y in ys])
        self._sf = np.array([float(s) for s in self.slopes])

    def __len__(self):
        return len(self.xs)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseAffine):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __repr__(self):
        return f"PiecewiseAffine({len(self.xs)} knots)"

    def exact(self, x) -> Fraction:
        if x < 0:
            raise DomainError(f"negative argument {x}")
        i = bisect.bisect_right(self.xs, x) - 1
        i = min(i, len(self.slopes) - 1)
        return self.ys[i] + self.slopes[i] * (x - self.xs[i])

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        i = np.searchsorted(self._xf, arr, side="right") - 1
        i = np.clip(i, 0, len(self._sf) - 1)
        with np.errstate(invalid="ignore"):
            dx = np.where(self._sf[i] == 0.0, 0.0, arr - self._xf[i])
        return self._yf[i] + self._sf[i] * dx

    def convexity_kink(self) -> int | None:
        """Index of the first knot where the slope increases, else None."""
        for i in range(1, len(self.slopes)):
            if self.slopes[i] > self.slopes[i - 1]:
                return i
        return None

    def is_concave(self) -> bool:
        return self.convexity_kink() is None

    def to_json(self) -> str:
        return json.dumps(
            [[_int_to_str(x), y.numerator, y.denominator] for x, y in zip(self.xs, self.ys)]
        )

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseAffine":
        rows = json.loads(text)
        return cls((_str_to_int(x), Fraction(int(p), int(q))) for x, p, q in rows)


def _float_or_inf(x: int) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Modulus values
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Modulus:
    """An evaluable candidate modulus with its declared properties.

    ``func`` receives a float ndarray and must return one of the same shape.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    unbounded: bool = True
    concave: bool = False
    slowly_varying: bool = False
    exact_form: PiecewiseAffine | None = field(default=None, repr=False)
    slack: float = EXACT_SLACK

    @property
    def claims(self) -> frozenset:
        names = ("unbounded", "concave", "slowly_varying")
        return frozenset(n for n in names if getattr(self, n))

    def __call__(self, x):
        return evaluate(self, x)

    @classmethod
    def from_function(cls, name, func, *, vectorized=True, **claims) -> "Modulus":
        """Wrap an arbitrary function; scalar functions are vectorized."""
        f = func if vectorized else np.vectorize(func, otypes=[float])
        return cls(name, f, **claims)


def evaluate(m: Modulus, x):
    """Value of ``m`` at ``x``.

    Integers and Fractions go through the exact form when ``m`` has one and
    come back as a Fraction; everything else is evaluated in floating point.
    """
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        if x < 0:
            raise DomainError(f"modulus argument must be nonnegative, got {x}")
        if m.exact_form is not None:
            return m.exact_form.exact(x)
        x = float(x)
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or (arr < 0).any():
        raise DomainError("modulus argument must be nonnegative")
    out = np.asarray(m.func(arr), dtype=float)
    if arr.ndim == 0:
        return float(out)
    return out


def identity() -> Modulus:
    return Modulus("id", lambda x: np.array(x, dtype=float), concave=True,
                   exact_form=PiecewiseAffine([(0, 0), (1, 1)]))


def scale(a) -> Modulus:
    if not a > 0:
        raise ParameterError(f"scale factor must be positive, got {a}")
    a_exact = Fraction(a)
    af = float(a)
    return Modulus(f"scale({af:g})", lambda x: af * x, concave=True,
                   exact_form=PiecewiseAffine([(0, 0), (1, a_exact)]))


def power(p) -> Modulus:
    if not 0 < p <= 1:
        raise ParameterError(f"power must lie in (0, 1], got {p}")
    if p == 1:
        return identity()
    pf = float(p)
    return Modulus(f"pow({p:g})", lambda x: np.power(x, pf), concave=True)


def log1p() -> Modulus:
    return Modulus("log1p", np.log1p, concave=True, slowly_varying=True)


def bounded_ratio() -> Modulus:
    """``x / (1 + x)``, a bounded modulus."""
    return Modulus("ratio", lambda x: x / (1.0 + x), unbounded=False, concave=True,
                   slowly_varying=True)


# ---------------------------------------------------------------------------
# Cantor function and its extension to [0, inf)
# ---------------------------------------------------------------------------


def cantor(x):
    """Ternary Cantor function on [0, 1].

    Ternary digits are scanned up to the first 1; digits 0/2 become binary
    0/1.  Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
        raise DomainError("cantor is defined on [0, 1]")
    out = kernels.cantor_many(np.ascontiguousarray(arr.ravel())).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def extended_cantor(x):
    """``G_e(x) = 2**(k-1) * cantor(x / 3**(k-1))``, k minimal with x <= 3**(k-1)."""
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or (arr < 0).any() or np.isinf(arr).any():
        raise DomainError("extended_cantor is defined on [0, inf)")
    flat = arr.ravel()
    span = np.ones_like(flat)
    height = np.ones_like(flat)
    grow = flat > span
    while grow.any():
        span[grow] *= 3.0
        height[grow] *= 2.0
        grow = flat > span
    u = np.minimum(flat / span, 1.0)
    out = (height * kernels.cantor_many(np.ascontiguousarray(u))).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def cantor_ext() -> Modulus:
    # G is only Holder continuous (exponent log 2 / log 3), so a rounding
    # error of 2**-53 in the argument moves the value by about 1e-10.
    return Modulus("cantor_ext", extended_cantor, slack=COMPOSED_SLACK)


# ---------------------------------------------------------------------------
# Combinations
# ---------------------------------------------------------------------------


def combine(kind: str, m1: Modulus, m2: Modulus, a=1.0, b=1.0) -> Modulus:
    """``compose`` gives m1(m2(x)); ``linear`` a*m1 + b*m2; ``max`` the pointwise max."""
    if kind == "compose":
        f1, f2 = m1.func, m2.func
        return Modulus(
            f"compose({m1.name},{m2.name})",
            lambda x: f1(np.asarray(f2(x), dtype=float)),
            unbounded=m1.unbounded and m2.unbounded,
            concave=m1.concave and m2.concave,
            slowly_varying=(not m1.unbounded) or (m1.slowly_varying and m2.unbounded),
            slack=COMPOSED_SLACK,
        )
    if kind == "linear":
        if not (a > 0 and b > 0):
            raise ParameterError(f"linear combination needs a, b > 0, got {a}, {b}")
        f1, f2 = m1.func, m2.func
        af, bf = float(a), float(b)
        return Modulus(
            f"lin({a:g},{m1.name},{b:g},{m2.name})",
            lambda x: af * f1(x) + bf * f2(x),
            unbounded=m1.unbounded or m2.unbounded,
            concave=m1.concave and m2.concave,
            slowly_varying=m1.slowly_varying and m2.slowly_varying,
            slack=COMPOSED_SLACK,
        )
    if kind == "max":
        f1, f2 = m1.func, m2.func
        return Modulus(
            f"max({m1.name},{m2.name})",
            lambda x: np.maximum(f1(x), f2(x)),
            unbounded=m1.unbounded or m2.unbounded,
            slowly_varying=m1.slowly_varying and m2.slowly_varying,
            slack=COMPOSED_SLACK,
        )
    raise ParameterError(f"unknown combination kind {kind!r}")


# ---------------------------------------------------------------------------
# Sampled checks
# ---------------------------------------------------------------------------


@dataclass
class AxiomReport:
    """Outcome of a sampled axiom check.

    A passing flag means only that no violation was found on the grid.
    Each failed flag has an entry in ``counterexamples``.
    """

    zero_ok: bool
    monotone_ok: bool
    subadditive_ok: bool
    continuity_ok: bool
    counterexamples: dict = field(default_factory=dict)
    oscillations: tuple = ()
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return self.zero_ok and self.monotone_ok and self.subadditive_ok and self.continuity_ok

    @property
    def counterexample(self):
        for key in ("zero", "monotone", "subadditive", "continuity"):
            if key in self.counterexamples:
                return self.counterexamples[key]
        return None

    def to_dict(self) -> dict:
        return {
            "zero_ok": self.zero_ok,
            "monotone_ok": self.monotone_ok,
            "subadditive_ok": self.subadditive_ok,
            "continuity_ok": self.continuity_ok,
            "counterexamples": {k: [float(v) for v in c] for k, c in self.counterexamples.items()},
            "oscillations": [float(o) for o in self.oscillations],
            "pairs_checked": self.pairs_checked,
        }


def subadditivity_excess(m: Modulus, x, y, tol=None):
    """``f(x+y) - f(x) - f(y) - slack``; positive entries are violations."""
    tol = m.slack if tol is None else tol
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fx, fy = evaluate(m, x), evaluate(m, y)
    fxy = evaluate(m, x + y)
    return fxy - fx - fy - tol * (np.abs(fx) + np.abs(fy) + 1.0)


def _max_step(f: np.ndarray) -> float:
    return float(np.max(np.abs(np.diff(f)))) if f.size > 1 else 0.0


def check_axioms(m: Modulus, grid, pairs: int = 0, seed: int = 0, tol=None,
                 max_grid_pairs: int = 2_000_000) -> AxiomReport:
    """Search ``grid`` for violations of the modulus axioms.

    Subadditivity is tested on every grid pair (x <= y) when there are at
    most ``max_grid_pairs`` of them, plus ``pairs`` uniform random pairs
    drawn from the grid's range.  Continuity is judged from the largest
    jump between adjacent samples on the grid and two successive midpoint
    refinements: it must not grow, and its extrapolated limit must be small
    compared with the coarse value.
    """
    tol = m.slack if tol is None else tol
    pts = as_grid(grid)
    f = evaluate(m, pts)
    found = {}

    f0 = evaluate(m, 0.0)
    pos = pts > 0
    bad_zero = np.nonzero(pos & ~(f > 0))[0]
    zero_ok = f0 == 0.0 and bad_zero.size == 0
    if f0 != 0.0:
        found["zero"] = (0.0, f0)
    elif bad_zero.size:
        found["zero"] = (pts[bad_zero[0]], f[bad_zero[0]])

    drops = f[1:] < f[:-1] - tol * (np.abs(f[:-1]) + 1.0)
    monotone_ok = not drops.any()
    if not monotone_ok:
        i = int(np.argmax(drops))
        found["monotone"] = (pts[i], pts[i + 1])

    n = pts.size
    xs, ys = [], []
    if n * (n + 1) // 2 <= max_grid_pairs:
        i, j = np.triu_indices(n)
        xs.append(pts[i])
        ys.append(pts[j])
    if pairs:
        rng = np.random.default_rng(seed)
        lo, hi = pts[0], pts[-1]
        xs.append(rng.uniform(lo, hi, pairs))
        ys.append(rng.uniform(lo, hi, pairs))
    subadditive_ok = True
    checked = 0
    if xs:
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        checked = x.size
        excess = subadditivity_excess(m, x, y, tol)
        viol = excess > 0
        if viol.any():
            subadditive_ok = False
            k = int(np.argmax(viol))
            found["subadditive"] = (x[k], y[k])

    fine = refine(pts)
    finer = refine(fine)
    osc = (_max_step(f), _max_step(evaluate(m, fine)), _max_step(evaluate(m, finer)))
    continuity_ok = _oscillation_vanishes(osc, tol * (float(np.max(np.abs(f))) + 1.0))
    if not continuity_ok:
        found["continuity"] = _largest_jump(pts, f)

    return AxiomReport(zero_ok, monotone_ok, subadditive_ok, continuity_ok, found, osc, checked)


def _oscillation_vanishes(osc, atol) -> bool:
    o0, o1, o2 = osc
    if o1 > o0 + atol or o2 > o1 + atol:
        return False
    if o0 <= atol:
        return True
    d1, d2 = o0 - o1, o1 - o2
    # Aitken extrapolation of o0, o1, o2 toward zero spacing
    if d1 > atol and d2 > atol and abs(d1 - d2) > atol:
        limit = o2 - d2 * d2 / (d1 - d2)
    else:
        limit = o2 - d2
    return limit <= 0.5 * o0


def _largest_jump(pts, f):
    i = int(np.argmax(np.abs(np.diff(f))))
    return (pts[i], pts[i + 1])


@dataclass
class BetaReport:
    beta_estimate: float
    inf_estimate: float
    gap: float
    nonincreasing: bool
    grid: tuple
    ratios: tuple

    def to_dict(self) -> dict:
        return {
            "beta_estimate": self.beta_estimate,
            "inf_estimate": self.inf_estimate,
            "gap": self.gap,
            "nonincreasing": self.nonincreasing,
        }


def beta_limit(m: Modulus, grid=None, tol=None) -> BetaReport:
    """Estimate ``lim f(t)/t`` by its value at the largest grid point and
    by the grid minimum of ``f(t)/t``."""
    grid = GridSpec.geometric(1, 1e6, 10 ** 0.25) if grid is None else grid
    pts = as_grid(grid)
    if pts[0] <= 0:
        raise DomainError("beta_limit grid must be strictly positive")
    tol = m.slack if tol is None else tol
    ratios = evaluate(m, pts) / pts
    beta = float(ratios[-1])
    inf = float(np.min(ratios))
    nonincr = bool(np.all(np.diff(ratios) <= tol * (ratios[:-1] + 1.0)))
    return BetaReport(beta, inf, abs(beta - inf), nonincr, tuple(pts.tolist()),
                      tuple(ratios.tolist()))


@dataclass
class SlowVariationRow:
    a: float
    xs: tuple
    ratios: tuple
    skipped: tuple
    consistent: bool


@dataclass
class SlowVariationProfile:
    rows: dict
    tol: float

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.rows.values())

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "consistent": self.consistent,
            "rows": {
                str(a): {"ratios": list(r.ratios), "skipped": len(r.skipped),
                         "consistent": r.consistent}
                for a, r in self.rows.items()
            },
        }


def _scaled(a, x):
    if isinstance(x, int) and not isinstance(x, bool):
        if float(a).is_integer():
            return int(a) * x
        return Fraction(a) * x
    return float(a) * float(x)


def slow_variation_profile(m: Modulus, a_list=(2, 10), x_grid=None,
                           tol_sv: float = 0.2) -> SlowVariationProfile:
    """Ratios ``f(a x) / f(x)`` along ``x_grid`` for each ``a``.

    The verdict for ``a`` is positive when the last ratio is within
    ``tol_sv`` of 1 and, for ``a > 1``, the distance to 1 never grows.
    Integer grid points are evaluated exactly when ``m`` has an exact form.
    The default grid is the interior knots for piecewise-affine moduli with
    at least four knots and ``10, 100, ..., 1e6`` otherwise.
    """
    if x_grid is None:
        form = m.exact_form
        if form is not None and len(form.xs) >= 4:
            # interior knots; the affine tail past the last knot is only an extension
            x_grid = list(form.xs[1:-1])
        else:
            x_grid = GridSpec.geometric(10, 1e6, 10).points()
    rows = {}
    for a in a_list:
        if not a > 0:
            raise ParameterError(f"scale factors must be positive, got {a}")
        xs, ratios, skipped = [], [], []
        for x in x_grid:
            fx = evaluate(m, x)
            if fx == 0:
                skipped.append(x)
                continue
            fax = evaluate(m, _scaled(a, x))
            if isinstance(fx, Fraction) and isinstance(fax, Fraction):
                r = float(fax / fx)
            else:
                r = float(fax) / float(fx)
            xs.append(x)
            ratios.append(r)
        ok = bool(ratios) and abs(ratios[-1] - 1.0) <= tol_sv
        if ok and a > 1:
            dist = [abs(r - 1.0) for r in ratios]
            ok = all(d2 <= d1 + 1e-12 for d1, d2 in zip(dist, dist[1:]))
        rows[a] = SlowVariationRow(a, tuple(xs), tuple(ratios), tuple(skipped), ok)
    return SlowVariationProfile(rows, tol_sv)


def concavity_witness(m: Modulus, grid=None):
    """A pair ``(x, y)`` with ``m((x+y)/2) < (m(x) + m(y))/2``, or None.

    Moduli with an exact piecewise-affine form are checked through their
    slopes; the pair returned then straddles the first convex kink.  Other
    moduli are scanned over grid pairs with x ascending, then y ascending.
    """
    if m.exact_form is not None:
        i = m.exact_form.convexity_kink()
        if i is None:
            return None
        return (m.exact_form.xs[i - 1], m.exact_form.xs[i + 1])
    if grid is None:
        raise ParameterError("a grid is required for moduli without exact form")
    pts = as_grid(grid)
    f = evaluate(m, pts)
    i, j = np.triu_indices(pts.size, k=1)
    fmid = evaluate(m, 0.5 * (pts[i] + pts[j]))
    avg = 0.5 * (f[i] + f[j])
    viol = fmid < avg - m.slack * (avg + 1.0)
    if not viol.any():
        return None
    k = int(np.argmax(viol))
    return (float(pts[i[k]]), float(pts[j[k]]))


# ---------------------------------------------------------------------------
# Modulus induced by a uniformly continuous function
# ---------------------------------------------------------------------------


def modulus_from_uniform_function(g: Callable, window: float = 100.0,
                                  step: float = 0.01) -> Modulus:
    """Windowed modulus of continuity of ``g``.

    ``f(t)`` approximates the sup of ``|g(x) - g(y)|`` over ``x, y`` in
    ``[0, window]`` with ``|x - y| <= t``, tabulated at multiples of
    ``step`` and linearly interpolated.  It is exact only when the sup over
    ``[0, inf)`` is attained inside the window; past ``window`` it is
    constant.
    """
    if not (window > 0 and step > 0):
        raise ParameterError("window and step must be positive")
    n = int(math.floor(window / step + 1e-9))
    xs = step * np.arange(n + 1)
    try:
        gv = np.asarray(g(xs), dtype=float)
        if gv.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        gv = np.array([float(g(v)) for v in xs])
    if not np.all(np.isfinite(gv)):
        raise ConstructionError("g is not finite on the window")
    if np.ptp(gv) == 0:
        raise ConstructionError("g is constant on the window; f would vanish identically")
    table = np.maximum.accumulate(kernels.oscillation_by_lag(np.ascontiguousarray(gv)))
    lags = np.arange(n + 1, dtype=float)

    def f(t):
        return np.interp(np.asarray(t, dtype=float) / step, lags, table)

    return Modulus(f"uniform(window={window:g},step={step:g})", f, unbounded=False,
                   slack=COMPOSED_SLACK)


# ---------------------------------------------------------------------------
# Concave, slowly varying modulus with full density on a given set
# ---------------------------------------------------------------------------


@dataclass
class LemmaSchedule:
    """Knot positions ``n_0 = 0 < n_1 < ...`` of the constructed modulus."""

    n: tuple
    k_max: int

    def check(self, count_upto: Callable[[int], int]) -> dict:
        """Evaluate the four schedule invariants exactly.

        ``count_upto(m)`` must return the number of set elements <= m.
        """
        n = self.n
        last = len(n) - 1
        gaps = all(n[k + 1] - n[k] < n[k + 2] - n[k + 1] for k in range(0, last - 1))
        doubling = all(2 * n[k] < n[k + 1] for k in range(1, last))
        growth = all(n[k + 1] >= k * n[k] for k in range(1, last))
        counting = all(count_upto(n[k + 1]) > n[k] for k in range(1, last))
        return {"gaps_increasing": gaps, "doubling": doubling,
                "ratio_at_least_k": growth, "count_exceeds_previous": counting}


def lemma_modulus_from_set(K, k_max: int):
    """Piecewise-affine modulus with ``f(n_k) = k`` whose f-density of ``K`` is 1.

    The knots follow a greedy rule: ``n_1`` is the least ``m >= 2`` with an
    element of ``K`` at most ``m``; ``n_{k+1}`` is the least ``m`` with
    ``m >= k n_k``, ``m > 2 n_k``, ``m - n_k > n_k - n_{k-1}`` and with the
    ``(n_k + 1)``-th element of ``K`` at most ``m``.  All arithmetic is on
    Python integers.
    """
    if k_max < 3:
        raise ParameterError("k_max must be at least 3")
    from .density import nth_element

    try:
        first = nth_element(K, 1)
    except (IndexError, OverflowError) as exc:
        raise ConstructionError(f"{K.name} is empty", achieved=0) from exc
    n = [0, max(2, first)]
    for k in range(1, k_max):
        try:
            needed = nth_element(K, n[k] + 1)
        except (IndexError, OverflowError) as exc:
            raise ConstructionError(
                f"{K.name} yields too few elements: built {k} of {k_max} knots",
                achieved=k,
            ) from exc
        n.append(max(k * n[k], 2 * n[k] + 1, 2 * n[k] - n[k - 1] + 1, needed))
    schedule = LemmaSchedule(tuple(n), k_max)
    form = PiecewiseAffine((nk, k) for k, nk in enumerate(n))
    modulus = Modulus(f"lemma({K.name},{k_max})", form, concave=True, slowly_varying=True,
                      exact_form=form)
    return modulus, schedule


def knot_identities(m: Modulus, schedule: LemmaSchedule) -> bool:
    """True when ``m(n_k) == k`` exactly at every knot."""
    return all(evaluate(m, nk) == k for k, nk in enumerate(schedule.n))


__all__: Sequence[str] = [
    "AxiomReport",
    "BetaReport",
    "GridSpec",
    "LemmaSchedule",
    "Modulus",
    "PiecewiseAffine",
    "SlowVariationProfile",
    "as_grid",
    "beta_limit",
    "bounded_ratio",
    "cantor",
    "cantor_ext",
    "check_axioms",
    "combine",
    "concavity_witness",
    "evaluate",
    "extended_cantor",
    "identity",
    "knot_identities",
    "lemma_modulus_from_set",
    "log1p",
    "modulus_from_uniform_function",
    "power",
    "scale",
    "slow_variation_profile",
    "subadditivity_excess",
]
