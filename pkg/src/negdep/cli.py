"""Command-line front end: JSON measures in, JSON verdicts out.

Exit codes: 0 when the property holds or the command succeeded, 1 when the
property fails (the JSON carries the certificate), 2 on usage or input errors
(reported as JSON on standard error).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import constructions, oracle, search_lp
from .dependence_checks import (
    coordinate_gaps,
    fkg_report,
    na_covariance_rows,
    na_interior_margin,
    na_report,
    nc_report,
    pa_report,
)
from .errors import InfeasibleOnSupport, NegDepError
from .measure_core import (
    Polynomial,
    Table,
    as_rational,
    format_rational,
    induce_grid,
    load_measure,
    marginal,
    measure_to_dict,
    mix,
    translate_scale,
    tv_distance,
)
from .monotone_lattice import count_upsets

log = logging.getLogger("negdep")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _budget(text: str) -> int:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value.denominator != 1 or value <= 0:
        raise argparse.ArgumentTypeError(f"budget must be a positive integer, got {text!r}")
    return int(value)


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> tuple:
    return tuple(_rational(t) for t in text.split(",") if t.strip())


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load(path, induce=False):
    mu = load_measure(path)
    if induce and mu.grid is None:
        log.info("inducing a grid from the support of %s", path)
        mu = induce_grid(mu)
    return mu


# check


def _write_table(path, prop, mu, budget):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if prop == "nc":
            w.writerow(["i", "j", "covariance"])
            for (i, j), gap in sorted(coordinate_gaps(mu).items()):
                w.writerow([i, j, format_rational(-gap)])
            return
        w.writerow(["I", "J", "U", "V", "covariance"])
        for I, J, U, V, cov in na_covariance_rows(mu, budget):
            w.writerow([json.dumps(list(I)), json.dumps(list(J)), json.dumps(U), json.dumps(V), format_rational(cov)])


def cmd_check(args) -> int:
    mu = _load(args.file, args.induce_grid)
    start = time.perf_counter()
    if args.property == "nc":
        report = nc_report(mu)
    elif args.property == "na":
        report = na_report(mu, budget=args.budget, full_margin=args.full_margin, workers=args.threads)
    elif args.property == "pa":
        report = pa_report(mu, budget=args.budget, full_margin=args.full_margin)
    elif args.property == "fkg":
        report = fkg_report(mu)
    else:
        report = na_interior_margin(mu, budget=args.budget, workers=args.threads)
    log.info("%s check took %.3fs", args.property, time.perf_counter() - start)
    if args.emit_table:
        if args.property not in ("nc", "na", "interior-margin"):
            raise UsageError("--emit-table is available for nc, na and interior-margin")
        _write_table(args.emit_table, args.property, mu, args.budget)
        log.info("wrote covariance table to %s", args.emit_table)
    _emit(report.to_dict())
    if args.property == "interior-margin":
        return 0 if report.margin > 0 else 1
    return 0 if report.holds else 1


# construct


def cmd_construct(args) -> int:
    kind = args.kind
    extra = {}
    if kind == "lemma1":
        mu = constructions.lemma1_measure(args.n, args.weights)
    elif kind == "corner-pair":
        pair = constructions.skewed_corner_pair(args.h)
        mu = {"high": pair.mu_high, "low": pair.nu_low}.get(args.component)
        if mu is None:
            mu = mix(pair.mu_high, pair.nu_low, Fraction(1, 2))
    elif kind == "penalty":
        mu = constructions.pairwise_penalty_measure(args.n, args.q)
    else:
        if args.input is None or args.alpha is None or args.c is None:
            raise UsageError("inject needs --input, --alpha and --c")
        out = constructions.inject_positive_correlation(_load(args.input), args.alpha, args.c)
        mu = out.measure
        extra["radicand"] = None if out.radicand is None else format_rational(out.radicand)
    _emit({**measure_to_dict(mu), **extra})
    return 0


def cmd_mix(args) -> int:
    _emit(measure_to_dict(mix(_load(args.a), _load(args.b), args.lam)))
    return 0


def cmd_tv(args) -> int:
    _emit({"tv": format_rational(tv_distance(_load(args.a), _load(args.b)))})
    return 0


def cmd_marginal(args) -> int:
    _emit(measure_to_dict(marginal(_load(args.file), args.indices)))
    return 0


def cmd_map(args) -> int:
    mu = _load(args.file)
    shift = args.shift
    if shift is not None and len(shift) == 1:
        shift = shift * mu.dimension
    _emit(measure_to_dict(translate_scale(mu, args.scale, shift)))
    return 0


# search


def cmd_search(args) -> int:
    if args.kind == "nonconvex":
        if args.h is not None:
            pair = constructions.skewed_corner_pair(args.h)
            mu, nu = pair.mu_high, pair.nu_low
        elif args.mu and args.nu:
            mu, nu = _load(args.mu), _load(args.nu)
        else:
            raise UsageError("nonconvex needs --h or both --mu and --nu")
        witness = search_lp.nonconvex_witness(mu, nu, args.lambdas, family=args.family, budget=args.budget)
        if witness is None:
            _emit({"witness": None})
            return 1
        _emit({"witness": witness.to_dict(), "lambda": format_rational(witness.lam),
               "gap": format_rational(witness.mixture_covariance)})
        return 0

    if args.file is None:
        raise UsageError(f"{args.kind} needs a measure file")
    mu = _load(args.file)
    if args.kind == "weak-counterexample":
        n = mu.dimension
        tests = [Polynomial.linear(c) for c in args.linear_test]
        if any(len(c) != n for c in args.linear_test):
            raise UsageError(f"--linear-test needs {n} coefficients")
        try:
            nu = search_lp.weak_counterexample(mu, tests, target=args.target, budget=args.budget)
        except InfeasibleOnSupport as exc:
            _emit({"measure": None, "infeasible": True, "farkas": [format_rational(y) for y in exc.farkas]})
            return 1
        report = na_report(nu, budget=args.budget)
        _emit({"measure": measure_to_dict(nu), "na_report": report.to_dict(),
               "test_integrals": [format_rational(nu.expectation(f)) for f in tests]})
        return 0

    extra = [json_direction(d) for d in args.extra_direction]
    probe = search_lp.tv_interior_probe(
        mu, args.radius, args.trials, seed=args.seed, property=args.property,
        extra_directions=extra, budget=args.budget,
    )
    _emit(probe.to_dict())
    return 0 if probe.failures == 0 else 1


def json_direction(text: str) -> dict:
    """``{"x,y,...": weight}`` JSON object into a direction mapping."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad --extra-direction: {exc}") from None
    return {tuple(as_rational(c) for c in k.split(",")): as_rational(v) for k, v in raw.items()}


# verify


def cmd_verify(args) -> int:
    if args.kind == "dedekind":
        m = args.m
        fast = count_upsets((2,) * m, args.budget)
        slow = oracle.dedekind_count(m)
        _emit({"m": m, "enumerated": fast, "brute_force": slow, "agree": fast == slow})
        return 0 if fast == slow else 1
    if args.kind == "chebyshev":
        if args.f is None or args.g is None:
            raise UsageError("chebyshev needs --f and --g value lists")
        mu = _load(args.file, induce=True)
        r = len(mu.grid[0])
        f, g = Table((r,), args.f), Table((r,), args.g)
        cov = oracle.chebyshev_1d_check(mu, f, g)
        _emit({"covariance": format_rational(cov), "nonnegative": cov >= 0})
        return 0 if cov >= 0 else 1
    mu = _load(args.file, args.induce_grid)
    verdict = oracle.brute_force_dependence(mu, args.property, args.samples, args.seed)
    check = na_report if args.property == "na" else pa_report
    report = check(mu, budget=args.budget)
    agree = verdict.holds == report.holds
    _emit({
        "property": args.property,
        "oracle_verdict": verdict.holds,
        "checker_verdict": report.holds,
        "agree": agree,
        "exhaustive": verdict.exhaustive,
        "functions_checked": verdict.functions_checked,
        "worst_covariance": None if verdict.worst_covariance is None else format_rational(verdict.worst_covariance),
    })
    return 0 if agree else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="negdep", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="test a dependence property")
    c.add_argument("property", choices=["nc", "na", "pa", "fkg", "interior-margin"])
    c.add_argument("file")
    c.add_argument("--budget", type=_budget, default=10**7)
    c.add_argument("--full-margin", action="store_true", help="scan everything for the exact margin")
    c.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    c.add_argument("--emit-table", metavar="CSV")
    c.add_argument("--induce-grid", action="store_true", help="grid the support if none is declared")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("construct", help="build a named measure")
    k.add_argument("kind", choices=["lemma1", "corner-pair", "penalty", "inject"])
    k.add_argument("--n", type=int, default=3)
    k.add_argument("--weights", type=_rational_list)
    k.add_argument("--h", type=_rational, default=Fraction(1, 8))
    k.add_argument("--component", choices=["high", "low", "mixture"], default="high")
    k.add_argument("--q", type=_rational, default=Fraction(1, 3))
    k.add_argument("--alpha", type=_rational)
    k.add_argument("--c", type=_rational)
    k.add_argument("--input")
    k.set_defaults(func=cmd_construct)

    m = sub.add_parser("mix", help="lam * A + (1 - lam) * B")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--lam", type=_rational, required=True)
    m.set_defaults(func=cmd_mix)

    t = sub.add_parser("tv", help="total variation distance (sum convention)")
    t.add_argument("a")
    t.add_argument("b")
    t.set_defaults(func=cmd_tv)

    g = sub.add_parser("marginal", help="push forward onto a subset of coordinates")
    g.add_argument("file")
    g.add_argument("--indices", type=_int_list, required=True)
    g.set_defaults(func=cmd_marginal)

    a = sub.add_parser("map", help="x -> scale * x + shift")
    a.add_argument("file")
    a.add_argument("--scale", type=_rational, default=Fraction(1))
    a.add_argument("--shift", type=_rational_list)
    a.set_defaults(func=cmd_map)

    s = sub.add_parser("search", help="counterexample and witness searches")
    s.add_argument("kind", choices=["nonconvex", "weak-counterexample", "tv-probe"])
    s.add_argument("file", nargs="?")
    s.add_argument("--budget", type=_budget, default=10**7)
    s.add_argument("--h", type=_rational)
    s.add_argument("--mu")
    s.add_argument("--nu")
    s.add_argument("--family", choices=["nc", "na"], default="nc")
    s.add_argument("--lambdas", type=_rational_list)
    s.add_argument("--linear-test", type=_rational_list, action="append", default=[])
    s.add_argument("--target", type=_int_list, default=(0, 1))
    s.add_argument("--radius", type=_rational, default=Fraction(1, 100))
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--property", choices=["nc", "na"], default="na")
    s.add_argument("--extra-direction", action="append", default=[], help='JSON like {"1,1,1": "1", "1,0,0": "-1"}')
    s.set_defaults(func=cmd_search)

    v = sub.add_parser("verify", help="brute-force cross-checks")
    v.add_argument("kind", choices=["oracle", "dedekind", "chebyshev"])
    v.add_argument("file", nargs="?")
    v.add_argument("--property", choices=["na", "pa"], default="na")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=_budget, default=10**7)
    v.add_argument("--m", type=int, default=3)
    v.add_argument("--f", type=_rational_list)
    v.add_argument("--g", type=_rational_list)
    v.add_argument("--induce-grid", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(message)s",
        )
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        if args.command == "verify" and args.kind in ("oracle", "chebyshev") and args.file is None:
            raise UsageError(f"verify {args.kind} needs a measure file")
        return args.func(args)
    except (UsageError, NegDepError, ValueError, OSError, json.JSONDecodeError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
