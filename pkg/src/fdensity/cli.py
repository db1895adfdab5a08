"""Command-line front-end.

Exit codes: 0 success, 1 fixture or verdict failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import convergence as cv
from . import density as ds
from . import fixtures
from . import modulus as md
from . import wijsman as wj
from .errors import FDensityError, ParseError
from .expr import parse_modulus, parse_set

WORKERS_ENV = "FDENSITY_WORKERS"

DEFAULTS = {
    "density": {"grid": "16:1048576:2", "tol": 0.01, "format": "csv"},
    "modulus": {"grid": "0:10:0.01", "format": "json", "pairs": 10_000, "seed": 0},
    "classify": {"modulus": "id", "grid": "16:131072:2", "eps": "1,0.1,0.01", "tol": 0.01,
                 "format": "json"},
    "paper-examples": {"tol": 0.01, "format": "text"},
}


class UsageError(FDensityError):
    pass


def parse_grid(text: str, geometric: bool):
    """``min:max:factor`` (integer geometric grid) or ``min:max:step`` (linear)."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like min:max:{'factor' if geometric else 'step'}, got {text!r}")
    try:
        lo, hi, third = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid bounds must be numbers, got {text!r}") from None
    if geometric:
        if lo < 1 or hi < lo or third <= 1:
            raise UsageError("grid needs max >= min >= 1 and factor > 1")
        return ds.geometric_grid(int(lo), int(hi), third)
    if lo < 0 or hi < lo or third <= 0:
        raise UsageError("grid needs max >= min >= 0 and step > 0")
    return md.GridSpec.linear(lo, hi, third)


def parse_eps(text: str) -> tuple:
    try:
        eps = tuple(float(e) for e in str(text).split(","))
    except ValueError:
        raise UsageError(f"epsilons must be comma-separated numbers, got {text!r}") from None
    if any(e <= 0 for e in eps):
        raise UsageError("epsilons must be positive")
    return eps


def _num(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, int) and v.bit_length() > 63:
        return md._int_to_str(v)
    return v


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, default=_num) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_density(args) -> int:
    if not args.set:
        raise UsageError("density needs --set")
    K = parse_set(args.set)
    f = parse_modulus(args.modulus) if args.modulus else None
    grid = parse_grid(args.grid, geometric=True)
    trace = ds.density_trend(K, f, grid, limit=args.limit, tol=float(args.tol))
    if args.format == "json":
        _emit(_json_text(trace.to_dict()), args.out)
    else:
        _emit(_csv_text(trace.header(), [[_num(v) for v in r] for r in trace.rows()]), args.out)
    return 0


def modulus_report(f: md.Modulus, grid, pairs: int = 10_000, seed: int = 0) -> dict:
    axioms = md.check_axioms(f, grid, pairs=pairs, seed=seed)
    report = {
        "modulus": f.name,
        "claims": sorted(f.claims),
        "axioms": axioms.to_dict(),
        "beta": md.beta_limit(f).to_dict(),
        "slow_variation": md.slow_variation_profile(f, (2, 4, 10)).to_dict(),
        "concavity_witness": md.concavity_witness(f, grid),
    }
    if f.exact_form is not None and len(f.exact_form.xs) > 2:
        report["knots"] = [[k, _num(x), _num(f.exact_form.exact(x))]
                           for k, x in enumerate(f.exact_form.xs)]
        report["knot_identities"] = all(f.exact_form.exact(x) == k
                                        for k, x in enumerate(f.exact_form.xs))
    return report


def cmd_modulus(args) -> int:
    src = args.modulus
    if not src:
        raise UsageError("modulus needs --expr")
    f = parse_modulus(src)
    grid = parse_grid(args.grid, geometric=False)
    report = modulus_report(f, grid, int(args.pairs), int(args.seed))
    if args.format == "csv":
        rows = [["zero_ok", report["axioms"]["zero_ok"]],
                ["monotone_ok", report["axioms"]["monotone_ok"]],
                ["subadditive_ok", report["axioms"]["subadditive_ok"]],
                ["continuity_ok", report["axioms"]["continuity_ok"]],
                ["beta_estimate", report["beta"]["beta_estimate"]],
                ["inf_estimate", report["beta"]["inf_estimate"]],
                ["slowly_varying", report["slow_variation"]["consistent"]],
                ["concavity_witness", report["concavity_witness"]]]
        _emit(_csv_text(["key", "value"], rows), args.out)
    else:
        _emit(_json_text(report), args.out)
    return 0


def _workers(args) -> int:
    raw = args.workers if args.workers is not None else os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"worker count must be an integer, got {raw!r}") from None
    return max(n, 1)


def cmd_classify(args) -> int:
    if not args.seq:
        raise UsageError("classify needs --seq")
    try:
        ex = wj.paper_sequence(args.seq)
    except FDensityError as exc:
        raise UsageError(str(exc)) from None
    f = parse_modulus(args.modulus)
    grid = parse_grid(args.grid, geometric=True)
    eps = parse_eps(args.eps)
    witnesses = ex.witnesses
    if args.witness:
        witnesses = tuple(ex.space.admit(float(w)) for w in str(args.witness).split(","))
    verdict = cv.classify(ex.sequence, ex.limit, f, grid=grid, epsilons=eps,
                          witnesses=witnesses, tol=float(args.tol), workers=_workers(args),
                          lemma_from_deviations=bool(args.lemma))
    if args.format == "csv":
        _emit(_csv_text(["mode", "x", "epsilon", "n", "value"], verdict.csv_rows()), args.out)
    else:
        _emit(_json_text(verdict.to_dict()), args.out)
    return 0


def cmd_paper_examples(args) -> int:
    grid_max = None if args.grid_max is None else int(args.grid_max)
    if grid_max is not None and grid_max < 64:
        raise UsageError("--grid-max must be at least 64")
    results = fixtures.run_all(grid_max, float(args.tol))
    passed = sum(r.passed for r in results)
    if args.format == "json":
        text = _json_text({"passed": passed, "total": len(results),
                           "fixtures": [r.to_dict() for r in results]})
    else:
        lines = [r.line() for r in results]
        lines.append(f"{passed}/{len(results)} fixtures pass")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0 if passed == len(results) else 1


COMMANDS = {
    "density": cmd_density,
    "modulus": cmd_modulus,
    "classify": cmd_classify,
    "paper-examples": cmd_paper_examples,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdensity",
        description="Density by moduli and convergence diagnostics for sequences of closed sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats)
        p.add_argument("--config", help="JSON file with defaults for any flag")

    p = sub.add_parser("density", help="density ratios of a set along a grid")
    p.add_argument("--set", help="set expression, e.g. squares or compl(evens)")
    p.add_argument("--modulus", "--expr", dest="modulus", help="modulus expression")
    p.add_argument("--grid", help="min:max:factor")
    p.add_argument("--limit", type=float, help="candidate limit for the verdict")
    p.add_argument("--tol", type=float)
    common(p, ("csv", "json"))

    p = sub.add_parser("modulus", help="validate a modulus")
    p.add_argument("--expr", "--modulus", dest="modulus", help="modulus expression")
    p.add_argument("--grid", help="min:max:step")
    p.add_argument("--pairs", type=int, help="random subadditivity pairs")
    p.add_argument("--seed", type=int)
    common(p, ("json", "csv"))

    p = sub.add_parser("classify", help="classify a built-in sequence of closed sets")
    p.add_argument("--seq", help="sequence id: " + ", ".join(wj.PAPER_SEQUENCES))
    p.add_argument("--modulus", "--expr", dest="modulus")
    p.add_argument("--grid", help="min:max:factor")
    p.add_argument("--eps", help="comma-separated epsilons")
    p.add_argument("--tol", type=float)
    p.add_argument("--witness", help="comma-separated witness points (real)")
    p.add_argument("--workers", help=f"thread count (default ${WORKERS_ENV} or 1)")
    p.add_argument("--lemma", action="store_true", default=None,
                   help="use the lemma modulus built from the deviation set")
    common(p, ("json", "csv"))

    p = sub.add_parser("paper-examples", help="run the worked-example fixtures")
    p.add_argument("--tol", type=float, help="tolerance for the density limit checks")
    p.add_argument("--grid-max", type=int, help="cap on every horizon")
    common(p, ("text", "json"))
    return parser


def _apply_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    values = {}
    for key, value in cfg.items():
        attr = "modulus" if key == "expr" else key.replace("-", "_")
        if attr == "command" or not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        values[attr] = value
    for key, value in DEFAULTS[args.command].items():
        values.setdefault(key.replace("-", "_"), value)
    for attr, value in values.items():
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"fdensity: parse error: {exc} (token {exc.token!r})", file=sys.stderr)
        return 2
    except FDensityError as exc:
        print(f"fdensity: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
