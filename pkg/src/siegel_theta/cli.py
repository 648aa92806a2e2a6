"""Command line interface: ``siegel-theta <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 insufficient trace bound.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from fractions import Fraction

from sympy import isprime

from .binary import (
    class_reps,
    ladder_check,
    level_p_reps,
    theta_independence_mod_p,
    weber_check,
)
from .core_forms import HalfIntegralForm, level
from .kitaoka import kappa_report
from .qexp import BoundError, FourierExpansion, add, scale
from .singular import (
    detect_singularity,
    freitag_decompose,
    required_trace_bound,
    verify_freitag_identity,
)
from .theta import theta_expansion

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _form(text):
    try:
        return HalfIntegralForm(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid form {text!r}: {exc}") from exc


def _load(path):
    try:
        with open(path) as fh:
            return FourierExpansion.loads(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read expansion {path}: {exc}") from exc


def _check_p(p, m=1):
    if not isprime(p):
        raise UsageError(f"p={p} is not prime")
    if m < 1:
        raise UsageError("m must be >= 1")


def cmd_theta(args):
    if args.degree < 0 or args.bound < 0:
        raise UsageError("degree and bound must be nonnegative")
    s = _form(args.form)
    try:
        f = theta_expansion(s, args.degree, args.bound)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _dump(f.to_json(), args.out)
    return EXIT_OK


def cmd_detect(args):
    _check_p(args.p, args.m)
    f = _load(args.file)
    _dump(detect_singularity(f, args.p, args.m).to_json(), args.out)
    return EXIT_OK


def cmd_decompose(args):
    _check_p(args.p, args.m)
    f = _load(args.file)
    det_bound = args.det_bound
    trace_bound = args.trace_bound
    if args.bound_auto:
        if det_bound is None:
            raise UsageError("--bound-auto needs --det-bound")
        verdict = detect_singularity(f, args.p, args.m)
        if verdict.state == "singular" and verdict.p_rank:
            need = required_trace_bound(verdict.p_rank, det_bound)
            if f.trace_bound < need:
                raise BoundError(f"det bound {det_bound} needs trace bound {need}, file has {f.trace_bound}")
    report = freitag_decompose(f, args.p, args.m, det_bound=det_bound, trace_bound=trace_bound)
    _dump(report.to_json(), args.out)
    return EXIT_OK if report.residual_congruent else EXIT_FAIL


def cmd_classes(args):
    if args.level_p is not None:
        _check_p(args.level_p)
        reps = level_p_reps(args.level_p)
        header = {"level_p": args.level_p}
    elif args.disc is not None:
        try:
            reps = class_reps(args.disc)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        header = {"disc": args.disc}
    else:
        raise UsageError("give a discriminant or --level-p")
    header["classes"] = [
        {"abc": [f.a, f.b, f.c], "S": f.form().tolist(), "level": level(f.form()),
         "primitive": f.is_primitive()}
        for f in reps
    ]
    header["count"] = len(reps)
    _dump(header, args.out)
    return EXIT_OK


# -- verification suites -----------------------------------------------------


def _random_theta_combination(rng, degree, bound, pool, count):
    picks = rng.sample(pool, min(count, len(pool)))
    f = FourierExpansion.zero(degree, bound)
    used = []
    for s in picks:
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if c == 0:
            c = Fraction(1)
        f = add(f, scale(c, theta_expansion(s, degree, bound)))
        used.append({"S": s.tolist(), "c": str(c)})
    return f, used


def suite_freitag(seed, trials=3, bound=6):
    rng = random.Random(seed)
    pool = [f.form() for disc in range(-3, -40, -1) if disc % 4 in (0, 1) for f in class_reps(disc)]
    pool = [s for s in pool if s.trace <= bound]
    cases = []
    for n, r in ((2, 2), (1, 2)):
        for _ in range(trials):
            f, used = _random_theta_combination(rng, n + r, bound, pool, rng.randint(1, 4))
            cases.append({"n": n, "r": r, "terms": used, "pass": verify_freitag_identity(f, r)})
    return {"suite": "freitag", "seed": seed, "cases": cases, "pass": all(c["pass"] for c in cases)}


def suite_kitaoka(p, samples=5, seed=0):
    reps = level_p_reps(p)
    if not reps:
        raise UsageError(f"no level {p} binary forms")
    results = [kappa_report(f.form(), p, samples=samples, seed=seed) for f in reps]
    return {"suite": "kitaoka", "p": p, "results": results, "pass": all(r["pass"] for r in results)}


def suite_weber(dmin, bound):
    failures = [d for d in range(-3, dmin - 1, -1) if d % 4 in (0, 1) and not weber_check(d, bound)]
    return {"suite": "weber", "dmin": dmin, "bound": bound, "failures": failures, "pass": not failures}


def suite_ladder(p, bound):
    res = ladder_check(p, bound=bound)
    return {"suite": "ladder", "p": p, "bound": bound,
            "checks": {f"{k}({i},{j})": ok for (k, i, j), ok in res.items()},
            "pass": all(res.values())}


def suite_independence(p, bound):
    rk, h = theta_independence_mod_p(p, bound)
    return {"suite": "independence", "p": p, "bound": bound, "rank": rk, "h": h, "pass": rk == h}


def cmd_verify(args):
    if args.suite == "freitag":
        report = suite_freitag(args.seed, bound=args.bound or 6)
    elif args.suite == "kitaoka":
        _check_p(args.p)
        report = suite_kitaoka(args.p, seed=args.seed)
    elif args.suite == "weber":
        report = suite_weber(args.dmin, args.bound or 500)
    elif args.suite == "ladder":
        _check_p(args.p)
        report = suite_ladder(args.p, args.bound or 50)
    else:
        _check_p(args.p)
        report = suite_independence(args.p, args.bound or 200)
    _dump(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_kitaoka(args):
    s = _form(args.form)
    try:
        report = kappa_report(s, args.d if args.d else level(s), samples=args.samples, seed=args.seed,
                              tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _dump(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="siegel-theta", description="Siegel theta series toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_opt(p):
        p.add_argument("--out", "-o", help="write JSON here instead of stdout")

    p = sub.add_parser("theta", help="theta series expansion of a form")
    p.add_argument("--form", required=True, help="doubled matrix 2S as JSON")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--bound", type=int, required=True, help="trace bound")
    out_opt(p)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("detect", help="p-rank of an expansion mod p^m")
    p.add_argument("file")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    out_opt(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("decompose", help="theta decomposition mod p^m")
    p.add_argument("file")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--det-bound", type=int)
    p.add_argument("--trace-bound", type=int)
    p.add_argument("--bound-auto", action="store_true",
                   help="fail unless the file reaches the trace bound needed for --det-bound")
    out_opt(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("classes", help="binary class representatives")
    p.add_argument("disc", type=int, nargs="?")
    p.add_argument("--level-p", type=int)
    out_opt(p)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=["freitag", "kitaoka", "weber", "ladder", "independence"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=7)
    p.add_argument("--dmin", type=int, default=-200)
    p.add_argument("--bound", type=int)
    out_opt(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kitaoka", help="degree 1 Kitaoka transformation check")
    p.add_argument("--form", required=True)
    p.add_argument("--d", type=int, help="divisor of the level (default: the level)")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    out_opt(p)
    p.set_defaults(func=cmd_kitaoka)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except BoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (UsageError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
