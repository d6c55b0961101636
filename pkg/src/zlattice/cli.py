"""Batch command-line front end.

Exit codes: 0 success, 1 usage, 2 numerical-tolerance failure, 3 singular
symbol, 4 I/O or schema error.  Result documents are written with sorted keys
and a fixed float format so identical inputs give byte-identical outputs; the
--threads flag (default from ZLATTICE_THREADS) is accepted for interface
compatibility but all computation is sequential and deterministic regardless.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import fixtures, problems
from .errors import SchemaError, SingularSymbol, ZLatticeError
from .fractional import cesaro, weyl_am
from .lattice import Box, load, save
from .solver import residual, solve, uniqueness_probe
from .ztransform import (
    Outside,
    PolyAnnulus,
    TransformEvaluator,
    eval_forward,
    forward_evaluator,
    invert_contour,
    propose_radii,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_SINGULAR = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' with decimal literals ('2+0i', '-1.5-2i', '3', '2i')."""
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError as e:
        raise SchemaError(f"bad complex literal {text!r}") from e


def parse_point(text: str) -> tuple[complex, ...]:
    return tuple(parse_complex(p) for p in text.split(","))


def parse_reals(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as e:
        raise SchemaError(f"bad number list {text!r}") from e


def parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as e:
        raise SchemaError(f"bad integer list {text!r}") from e


def parse_window(text: str) -> Box:
    """'0:12,-3:3' -> Box((0,-3),(12,3))."""
    lo, hi = [], []
    for part in text.split(","):
        try:
            a, b = part.split(":")
            lo.append(int(a))
            hi.append(int(b))
        except ValueError as e:
            raise SchemaError(f"bad window component {part!r}") from e
    return Box(tuple(lo), tuple(hi))


def fmt_complex(v: complex) -> str:
    v = complex(v)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real:.17g}{sign}{abs(v.imag):.17g}i"


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_report(path, payload):
    if path:
        payload = dict(payload)
        payload["elapsed_s"] = time.process_time()
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True, default=str)
            fh.write("\n")


def _rational_evaluator(doc: dict) -> TransformEvaluator:
    try:
        n = int(doc["n"])
        num = [(tuple(t["j"]), complex(*t["c"])) for t in doc["numerator"]]
        den = [(tuple(t["j"]), complex(*t["c"])) for t in doc["denominator"]]
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad rational document: {e}") from e

    def poly(terms, z):
        acc = 0.0 + 0j
        for j, c in terms:
            w = c
            for zi, ji in zip(z, j):
                w *= zi**ji
            acc += w
        return acc

    def fn(z):
        return poly(num, z) / poly(den, z)

    axes = tuple(Outside(0.0) for _ in range(n))
    if "region" in doc:
        axes = tuple(Outside(float(r)) for r in doc["region"])
    return TransformEvaluator(fn, PolyAnnulus(axes))


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def cmd_transform(args) -> int:
    if args.action == "eval":
        f = load(args.seq)
        z = parse_point(args.at)
        val, tail = eval_forward(f, z, with_tail=True)
        flat = np.atleast_1d(np.asarray(val)).reshape(-1)
        print(",".join(fmt_complex(v) for v in flat))
        _write_report(
            args.report,
            {
                "command": "transform eval",
                "inputs": {args.seq: _digest(args.seq)},
                "tail_bound": tail,
            },
        )
        return EXIT_OK

    # invert
    if args.seq:
        f = load(args.seq)
        F = forward_evaluator(f)
        source = args.seq
    elif args.rational:
        with open(args.rational) as fh:
            F = _rational_evaluator(json.load(fh))
        source = args.rational
    elif args.fixture == "probability":
        F = fixtures.probability_evaluator()
        source = "fixture:probability"
    elif args.fixture == "binomial":
        F = fixtures.binomial_evaluator()
        source = "fixture:binomial"
    else:
        raise SchemaError("invert needs --seq, --rational, or a known --fixture")
    window = parse_window(args.window)
    if args.radii:
        radii = parse_reals(args.radii)
    elif F.sequence_envelope is not None:
        radii = propose_radii(F.sequence_envelope)
    else:
        raise SchemaError("no --radii given and no envelope to propose from")
    grid = parse_ints(args.grid) if args.grid else None
    res = invert_contour(F, radii, window, grid=grid)
    save(res.table, args.out)
    _write_report(
        args.report,
        {
            "command": "transform invert",
            "source": source,
            "radii": list(radii),
            "grid": list(res.grid),
            "aliasing_max": None if res.aliasing is None else float(np.max(res.aliasing)),
        },
    )
    return EXIT_OK


def cmd_convolve(args) -> int:
    from .convolution import conv_axes, conv_general

    a = load(args.a)
    b = load(args.b)
    window = parse_window(args.window)
    if args.mode == "axes":
        if not args.axes:
            raise SchemaError("axes mode needs --axes")
        out, ledger = conv_axes(
            a, b, parse_ints(args.axes), window, tol=args.tol, return_ledger=True
        )
    else:
        # faltung / weyl / general differ only in the declared domains, which
        # travel with the tables themselves
        out, ledger = conv_general(a, b, window, tol=args.tol, return_ledger=True)
    save(out, args.out)
    _write_report(
        args.report,
        {
            "command": f"convolve {args.mode}",
            "inputs": {args.a: _digest(args.a), args.b: _digest(args.b)},
            "tail_ledger_max": None if ledger is None else float(np.max(ledger)),
        },
    )
    return EXIT_OK


def cmd_fractional(args) -> int:
    if args.action == "cesaro":
        table = cesaro(args.alpha, args.len - 1)
        save(table, args.out)
        _write_report(args.report, {"command": "fractional cesaro", "alpha": args.alpha})
        return EXIT_OK
    # weyl
    import math

    f = load(args.seq)
    window = parse_window(args.window)
    m = args.m if args.m is not None else math.ceil(args.alpha)
    kernel = cesaro(m - args.alpha, args.kernel_len)
    out = weyl_am(kernel, m, f, window, enforce=not args.no_enforce)
    save(out, args.out)
    _write_report(
        args.report,
        {"command": "fractional weyl", "alpha": args.alpha, "m": m},
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    with open(args.problem) as fh:
        doc = json.load(fh)
    prob, f = problems.problem_from_doc(doc)
    radii = parse_reals(args.radii)
    kernel_window = parse_window(args.kernel_window)
    check_window = parse_window(args.check_window)
    # u must cover the check window padded by the problem's largest shift;
    # convolution-type problems additionally need u from the start of its
    # support (the kernel has memory over the whole past)
    pad = prob.max_shift()
    lo = [a - pad for a in check_window.lo]
    hi = [b + pad for b in check_window.hi]
    from .solver import OperatorPencil

    if not isinstance(prob, OperatorPencil):
        start = [kw + fl for kw, fl in zip(kernel_window.lo, f.support.lo)]
        lo = [min(a, s) for a, s in zip(lo, start)]
    out_window = Box(tuple(lo), tuple(hi))
    result = solve(prob, f, radii, kernel_window, out_window,
                   orthant_variant=args.orthant)
    save(result.u, args.out)
    rep = residual(prob, result.u, f, check_window)
    payload = {
        "command": "solve",
        "inputs": {args.problem: _digest(args.problem)},
        "residual": rep["max_residual"],
        "error_ledger": result.ledger,
        "min_rcond": result.kernel.min_rcond,
        "tolerance": args.tol,
    }
    _write_report(args.report, payload)
    print(f"residual {rep['max_residual']:.6e} (ledger {result.ledger:.6e})")
    return EXIT_OK if rep["max_residual"] <= args.tol else EXIT_TOLERANCE


def cmd_probe(args) -> int:
    with open(args.problem) as fh:
        doc = json.load(fh)
    prob, _ = problems.problem_from_doc(doc)
    radii = parse_reals(args.radii)
    rng = np.random.default_rng(args.seed)
    samples = []
    for _ in range(args.samples):
        phases = rng.uniform(0.0, 2.0 * np.pi, size=len(radii))
        samples.append(tuple(r * np.exp(1j * p) for r, p in zip(radii, phases)))
    report = uniqueness_probe(prob, samples, threshold=args.threshold)
    print(report["verdict"], f"(min sigma {report['min_sigma']:.6e})")
    _write_report(args.report, {"command": "probe-uniqueness", **{
        k: v for k, v in report.items() if k != "roots"
    }})
    return EXIT_OK


def cmd_fixtures(args) -> int:
    name = args.name
    if name == "probability":
        K = args.window
        F = fixtures.probability_evaluator(args.p, args.q)
        res = invert_contour(F, (2.0, 2.0), Box((0, 0), (K, K)), grid=(64, 64))
        exact = fixtures.probability_table(args.p, args.q, K)
        worst = 0.0
        for k in exact.support.points():
            if k[1] <= k[0]:
                worst = max(worst, abs(res.table.at(k) - exact.at(k)))
        if args.out:
            save(exact, args.out)
        ok = worst <= 1e-9
        print(f"{'PASS' if ok else 'FAIL'} probability max abs dev {worst:.3e}")
        return EXIT_OK if ok else EXIT_TOLERANCE
    if name == "binomial":
        K = args.window
        F = fixtures.binomial_evaluator(args.a_coef, args.b_coef)
        res = invert_contour(F, (1.0, 1.0), Box((0, 0), (K, K)), grid=(96, 96))
        exact = fixtures.binomial_table(args.a_coef, args.b_coef, K)
        worst = 0.0
        for k in exact.support.points():
            ref = exact.at(k)
            worst = max(worst, abs(res.table.at(k) - ref) / abs(ref))
        if args.out:
            save(exact, args.out)
        ok = worst <= 1e-9
        print(f"{'PASS' if ok else 'FAIL'} binomial max rel dev {worst:.3e}")
        return EXIT_OK if ok else EXIT_TOLERANCE
    if name == "diagonal":
        f = fixtures.diagonal_table(2.0, args.window)
        worst = 0.0
        for t in range(10):
            z = (2.2 + 0.1 * t, 1.3 + 0.05 * t)
            ref = fixtures.diagonal_closed_form(2.0, z)
            dev = abs(eval_forward(f, z) - ref) / abs(ref)
            tail = fixtures.diagonal_tail(2.0, args.window, z)
            worst = max(worst, max(dev - tail / abs(ref), 0.0))
        if args.out:
            save(f, args.out)
        ok = worst <= 1e-10
        print(f"{'PASS' if ok else 'FAIL'} diagonal max rel dev beyond tail {worst:.3e}")
        return EXIT_OK if ok else EXIT_TOLERANCE
    if name == "geometric":
        table = fixtures.geometric_table(K=args.window)
        save(table, args.out or "geometric.json")
        print("PASS geometric table written")
        return EXIT_OK
    if name == "gaussian":
        table = fixtures.gaussian_table(2, args.window)
        save(table, args.out or "gaussian.json")
        print("PASS gaussian table written")
        return EXIT_OK
    raise SchemaError(f"unknown fixture {name!r}; known: {sorted(fixtures.FIXTURES)}")


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    p = _Parser(prog="zlattice", description=__doc__)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("ZLATTICE_THREADS", "1")),
        help="accepted for compatibility; computation is sequential",
    )
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="forward evaluation / contour inversion")
    ts = t.add_subparsers(dest="action", required=True)
    te = ts.add_parser("eval")
    te.add_argument("--seq", required=True)
    te.add_argument("--at", required=True, help='point as "a+bi,c+di"')
    te.add_argument("--report")
    ti = ts.add_parser("invert")
    ti.add_argument("--seq")
    ti.add_argument("--rational")
    ti.add_argument("--fixture")
    ti.add_argument("--radii")
    ti.add_argument("--window", required=True, help='box as "lo:hi,lo:hi"')
    ti.add_argument("--grid")
    ti.add_argument("--out", required=True)
    ti.add_argument("--report")
    t.set_defaults(fn=cmd_transform)

    c = sub.add_parser("convolve")
    c.add_argument("--mode", choices=["faltung", "weyl", "general", "axes"], default="general")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--axes")
    c.add_argument("--window", required=True)
    c.add_argument("--tol", type=float, default=1e-12)
    c.add_argument("--out", required=True)
    c.add_argument("--report")
    c.set_defaults(fn=cmd_convolve)

    fr = sub.add_parser("fractional")
    fs = fr.add_subparsers(dest="action", required=True)
    fc = fs.add_parser("cesaro")
    fc.add_argument("--alpha", type=float, required=True)
    fc.add_argument("--len", type=int, default=64)
    fc.add_argument("--out", required=True)
    fc.add_argument("--report")
    fw = fs.add_parser("weyl")
    fw.add_argument("--alpha", type=float, required=True)
    fw.add_argument("--m", type=int)
    fw.add_argument("--seq", required=True)
    fw.add_argument("--window", required=True)
    fw.add_argument("--kernel-len", type=int, default=256, dest="kernel_len")
    fw.add_argument("--no-enforce", action="store_true")
    fw.add_argument("--out", required=True)
    fw.add_argument("--report")
    fr.set_defaults(fn=cmd_fractional)

    s = sub.add_parser("solve")
    s.add_argument("--problem", required=True)
    s.add_argument("--radii", required=True)
    s.add_argument("--kernel-window", required=True, dest="kernel_window")
    s.add_argument("--check-window", required=True, dest="check_window")
    s.add_argument("--out", required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--orthant", action="store_true",
                   help="enforce the staircase initial conditions on the data")
    s.add_argument("--report")
    s.set_defaults(fn=cmd_solve)

    u = sub.add_parser("probe-uniqueness")
    u.add_argument("--problem", required=True)
    u.add_argument("--radii", required=True)
    u.add_argument("--samples", type=int, default=32)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--threshold", type=float, default=1e-10)
    u.add_argument("--report")
    u.set_defaults(fn=cmd_probe)

    fx = sub.add_parser("fixtures")
    fx.add_argument("name")
    fx.add_argument("--p", type=float, default=0.3)
    fx.add_argument("--q", type=float, default=0.7)
    fx.add_argument("--a-coef", type=float, default=0.3, dest="a_coef")
    fx.add_argument("--b-coef", type=float, default=0.4, dest="b_coef")
    fx.add_argument("--window", type=int, default=12)
    fx.add_argument("--out")
    fx.set_defaults(fn=cmd_fixtures)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        code = args.fn(args)
    except SingularSymbol as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SINGULAR
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ZLatticeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    return code


if __name__ == "__main__":
    sys.exit(main())
