"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 mathematical precondition
violation, 4 resource guard.  All subcommands are deterministic given argv
plus config (pseudorandom seeds live in the config and are echoed back).

The `verify` subcommand reads a JSON config file (ExperimentConfig schema);
explicit flags override file values.  Reports land in --out, or in
$SEMIORBITS_OUT_DIR (default: current directory) named <experiment>.csv.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .combinatorics import b_tree_size, find_common_gap
from .errors import SemiorbitsError
from .ff import make_extension_field, make_prime_field, mul_order, small_order_set
from .intpoly import cyclotomic, format_poly, is_special, parse_poly, resultant
from .orbits import GeneratorSet, orbit, DEFAULT_ORBIT_CAP
from .verify import EXPERIMENTS, ExperimentConfig, run_experiment

OUT_DIR_ENV = "SEMIORBITS_OUT_DIR"


def _field(p: int, s: int):
    if s == 1:
        return make_prime_field(p)
    return make_extension_field(p, s)


def cmd_order(args) -> int:
    ctx = _field(args.p, args.s)
    print(mul_order(ctx.from_index(args.element % ctx.q)))
    return 0


def cmd_cyclotomic(args) -> int:
    print(format_poly(cyclotomic(args.n)))
    return 0


def cmd_resultant(args) -> int:
    print(resultant(parse_poly(args.f), parse_poly(args.g)))
    return 0


def cmd_orbit(args) -> int:
    if len(args.rest) < 2:
        print("orbit needs generators followed by a start point", file=sys.stderr)
        return 2
    gens = [parse_poly(text) for text in args.rest[:-1]]
    ctx = _field(args.p, args.s)
    x = ctx.from_index(int(args.rest[-1]) % ctx.q)
    rec = orbit(GeneratorSet(gens), x, args.cap)
    if args.json:
        print(
            json.dumps(
                {
                    "start": x.index,
                    "T": rec.T,
                    "truncated": rec.truncated,
                    "levels": [
                        {"element": v.index, "level": rec.levels[v]}
                        for v in rec.order_found
                    ],
                },
                sort_keys=True,
            )
        )
        return 0
    print("T=%d" % rec.T)
    if rec.truncated:
        print("truncated")
    for v in rec.order_found:
        print("%d %d" % (rec.levels[v], v.index))
    return 0


def cmd_btree(args) -> int:
    print(b_tree_size(args.k, args.h))
    return 0


def cmd_gap(args) -> int:
    rep = find_common_gap(args.indices, args.N)
    if args.json:
        print(
            json.dumps(
                {"r": rep.r, "count": rep.count, "T": rep.T, "N": rep.N},
                sort_keys=True,
            )
        )
    else:
        print("r=%d count=%d" % (rep.r, rep.count))
    return 0


def cmd_special(args) -> int:
    cls = is_special(parse_poly(args.f))
    if args.json:
        doc = {"kind": cls.kind}
        if cls.witness is not None:
            doc["witness"] = [str(Fraction(a)) for a in cls.witness]
        if cls.normal_form is not None:
            doc["normal_form"] = format_poly(cls.normal_form)
        print(json.dumps(doc, sort_keys=True))
    else:
        print(cls.kind)
    return 0


def cmd_gamma(args) -> int:
    ctx = _field(args.p, args.s)
    members = sorted(v.index for v in small_order_set(ctx, args.t))
    out = " ".join(str(m) for m in members)
    if args.json:
        print(json.dumps(members))
    else:
        print(out)
    return 0


def _split_ints(text: str):
    return tuple(int(part) for part in text.replace(",", " ").split())


def _split_polys(text: str):
    return tuple(part.strip() for part in text.split(",") if part.strip())


def cmd_verify(args) -> int:
    if args.experiment not in EXPERIMENTS:
        print(
            "unknown experiment %r; valid ids: %s"
            % (args.experiment, ", ".join(sorted(EXPERIMENTS))),
            file=sys.stderr,
        )
        return 2
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    data["experiment"] = args.experiment
    overrides = {
        "generators": _split_polys(args.generators) if args.generators else None,
        "s": args.field_degree,
        "primes": _split_ints(args.primes) if args.primes else None,
        "prime_min": args.prime_min,
        "prime_max": args.prime_max,
        "starts": _split_ints(args.starts) if args.starts else None,
        "sample": args.sample,
        "seed": args.seed,
        "t": args.t,
        "t_exponent": args.t_exponent,
        "N": args.N,
        "h": args.h,
        "l": args.l,
        "C": args.C,
        "c": args.c,
        "c1": args.c1,
        "r_max": args.r_max,
        "s_max": args.s_max,
        "n_max": args.n_max,
        "trials": args.trials,
        "orbit_cap": args.orbit_cap,
        "stream": json.loads(args.stream) if args.stream else None,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    for key, flag in (
        ("include_level_0", args.include_level_0),
        ("allow_special", args.allow_special),
        ("diagnostics", args.diagnostics),
        ("h_from_n", args.h_from_n),
    ):
        if flag:
            data[key] = True
    cfg = ExperimentConfig.from_dict(data)
    report = run_experiment(cfg)
    out = args.out
    if out is None:
        out_dir = os.environ.get(OUT_DIR_ENV, ".")
        out = os.path.join(out_dir, "%s.csv" % cfg.experiment)
    text = report.to_json() if out.endswith(".json") else report.to_csv()
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    if args.json:
        print(json.dumps({"out": out, "summary": report.body_dict()["summary"]},
                         sort_keys=True))
    else:
        print("%s out=%s" % (report.summary_line(), out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiorbits",
        description="Exact semigroup-orbit statistics over finite fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("order", help="multiplicative order of an element of F_{p^s}")
    sp.add_argument("p", type=int)
    sp.add_argument("s", type=int)
    sp.add_argument("element", type=int, help="element index in [0, p^s)")
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("cyclotomic", help="print the n-th cyclotomic polynomial")
    sp.add_argument("n", type=int)
    sp.set_defaults(func=cmd_cyclotomic)

    sp = sub.add_parser("resultant", help="resultant of two integer polynomials")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.set_defaults(func=cmd_resultant)

    sp = sub.add_parser("orbit", help="BFS orbit of a point under a system")
    sp.add_argument("p", type=int)
    sp.add_argument("s", type=int)
    sp.add_argument("rest", nargs="+", metavar="poly... x",
                    help="generator polynomials, then the start index")
    sp.add_argument("--cap", type=int, default=DEFAULT_ORBIT_CAP)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("btree", help="complete k-ary tree size B(k,h)")
    sp.add_argument("k", type=int)
    sp.add_argument("h", type=int)
    sp.set_defaults(func=cmd_btree)

    sp = sub.add_parser("gap", help="most frequent small gap among visit times")
    sp.add_argument("N", type=int)
    sp.add_argument("indices", type=int, nargs="+")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("special", help="classify a polynomial up to linear conjugacy")
    sp.add_argument("f")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_special)

    sp = sub.add_parser("gamma", help="elements of order at most t in F_{p^s}*")
    sp.add_argument("p", type=int)
    sp.add_argument("s", type=int)
    sp.add_argument("t", type=int)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("verify", help="run an experiment harness")
    sp.add_argument("experiment")
    sp.add_argument("config", nargs="?", help="JSON config file")
    sp.add_argument("--out", help="report path (.csv or .json)")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--generators", help="comma-separated polynomial texts")
    sp.add_argument("--field-degree", type=int, dest="field_degree",
                    help="extension degree s")
    sp.add_argument("--primes", help="comma-separated primes")
    sp.add_argument("--prime-min", type=int)
    sp.add_argument("--prime-max", type=int)
    sp.add_argument("--starts", help="comma-separated start indices")
    sp.add_argument("--sample", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--t-exponent", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--h", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--C", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--c1", type=float)
    sp.add_argument("--r-max", type=int)
    sp.add_argument("--s-max", type=int)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--orbit-cap", type=int)
    sp.add_argument("--stream", help="stream description as JSON text")
    sp.add_argument("--include-level-0", action="store_true")
    sp.add_argument("--allow-special", action="store_true")
    sp.add_argument("--diagnostics", action="store_true")
    sp.add_argument("--h-from-n", action="store_true")
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SemiorbitsError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print("bad JSON: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
