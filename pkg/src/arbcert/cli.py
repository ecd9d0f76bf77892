"""Command-line interface.

Exit codes: 0 no arbitrage (or verification passed), 10 arbitrage found,
2 invalid input, 1 failed verification or disagreement.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .errors import ArbcertError
from .espm import example1_model, expected_liquidation, espm_falsify, terminal_measure
from .ftap import decide, verify_certificate
from .generator import GeneratorConfig, generate_model
from .market import is_arbitrage, is_self_financing
from .oracle import exhaustive_search, simple_search

EXIT_NA = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_ARBITRAGE = 10


def _range(text: str) -> tuple:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected a range 'lo..hi', got {text!r}")
    try:
        return Fraction(lo), Fraction(hi)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _int_range(text: str) -> tuple:
    lo, hi = _range(text)
    if lo.denominator != 1 or hi.denominator != 1:
        raise argparse.ArgumentTypeError(f"integer range expected, got {text!r}")
    return int(lo), int(hi)


def _emit(out, doc, fmt, text_lines):
    if fmt == "json":
        print(io.dumps(doc), file=out)
    else:
        for line in text_lines:
            print(line, file=out)


def _verdict_lines(verdict, tree):
    doc = io.verdict_to_dict(verdict, tree)
    if not verdict.arbitrage:
        lines = ["verdict: NoArbitrage", "price process S:"]
        lines += [f"  {n}: {v}" for n, v in doc["certificate"]["S"].items()]
        lines.append("one-step measures Q:")
        for n, row in doc["certificate"]["Q"].items():
            lines.append(f"  {n}: " + ", ".join(f"{c}={w}" for c, w in row.items()))
        return lines
    w = doc["witness"]
    lines = [
        "verdict: Arbitrage",
        f"witness: t={w['t']} node={w['node']} case={w['case']} z={w['z']}",
        f"stopping cut: {' '.join(w['stop'])}",
        "post-trade holdings (cash, shares):",
    ]
    lines += [f"  {n}: ({x}, {y})" for n, (x, y) in doc["strategy"]["post_trade"].items()]
    return lines


def cmd_check(args, out):
    model = io.read_model(args.model)
    verdict = decide(model)
    doc = io.verdict_to_dict(verdict, model.tree)
    if args.format == "json":
        _emit(out, doc, "json", [])
    else:
        print(f"verdict: {doc['verdict']}", file=out)
    return EXIT_ARBITRAGE if verdict.arbitrage else EXIT_NA


def cmd_certificate(args, out):
    model = io.read_model(args.model)
    verdict = decide(model)
    if verdict.arbitrage:
        print("model admits arbitrage; no certificate exists (see 'arbitrage')", file=sys.stderr)
        return EXIT_ARBITRAGE
    doc = io.certificate_to_dict(verdict.certificate, model.tree)
    _emit(out, doc, args.format, _verdict_lines(verdict, model.tree)[1:])
    return EXIT_NA


def cmd_arbitrage(args, out):
    model = io.read_model(args.model)
    verdict = decide(model)
    if not verdict.arbitrage:
        print("model is arbitrage-free (see 'certificate')", file=sys.stderr)
        return EXIT_NA
    doc = io.verdict_to_dict(verdict, model.tree)
    _emit(out, {"strategy": doc["strategy"], "witness": doc["witness"]}, args.format,
          _verdict_lines(verdict, model.tree)[1:])
    return EXIT_ARBITRAGE


def _read_doc(path):
    try:
        with open(path) as fh:
            return io.load_json(fh.read())
    except OSError as exc:
        raise ArbcertError(f"cannot read {path}: {exc}") from exc


def cmd_verify(args, out):
    model = io.read_model(args.model)
    if args.certificate:
        doc = _read_doc(args.certificate)
        if isinstance(doc, dict) and "certificate" in doc:
            doc = doc["certificate"]
        report = verify_certificate(model, io.certificate_from_dict(doc))
        for node, reason in report.failures:
            print(f"FAIL {node}: {reason}", file=out)
        print("certificate: " + ("ok" if report.ok else "rejected"), file=out)
        return EXIT_NA if report.ok else EXIT_FAIL
    doc = _read_doc(args.strategy)
    if isinstance(doc, dict) and "strategy" in doc:
        doc = doc["strategy"]
    s = io.strategy_from_dict(doc)
    ok = is_arbitrage(model, s)
    if not ok:
        for node, delta in is_self_financing(model, s).violations:
            print(f"FAIL {node}: unfunded trade ({delta.x}, {delta.y})", file=out)
    print("strategy: " + ("arbitrage" if ok else "not an arbitrage"), file=out)
    return EXIT_NA if ok else EXIT_FAIL


def cmd_oracle(args, out):
    model = io.read_model(args.model)
    if args.method == "simple":
        s = simple_search(model)
    else:
        s = exhaustive_search(model)
    found = s is not None
    doc = {"method": args.method, "verdict": "Arbitrage" if found else "NoArbitrage"}
    if found:
        doc["strategy"] = io.strategy_to_dict(s, model.tree)
    _emit(out, doc, args.format, [f"{args.method}: {doc['verdict']}"])
    return EXIT_ARBITRAGE if found else EXIT_NA


def cmd_agree(args, out):
    model = io.read_model(args.model)
    verdicts = {
        "decide": decide(model).arbitrage,
        "exhaustive": exhaustive_search(model) is not None,
        "simple": simple_search(model) is not None,
    }
    for name, arb in verdicts.items():
        print(f"{name}: {'Arbitrage' if arb else 'NoArbitrage'}", file=out)
    agree = len(set(verdicts.values())) == 1
    print("agree" if agree else "DISAGREE", file=out)
    return EXIT_NA if agree else EXIT_FAIL


def cmd_gen(args, out):
    cfg = GeneratorConfig(
        seed=args.seed,
        depth=args.depth,
        branching=args.branching,
        price_range=args.price,
        price_den=args.price_den,
        spread_prob=args.spread_prob,
        spread_range=args.spread,
        fixed_range=args.fixed,
        max_nodes=args.max_nodes,
    )
    text = io.serialize_model(generate_model(cfg))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


DEFAULT_Q_GRID = tuple(Fraction(k, 10) for k in range(1, 10))


def cmd_espm_demo(args, out):
    model = example1_model()
    verdict = decide(model)
    rows = []
    for q in args.q or DEFAULT_Q_GRID:
        measure = terminal_measure({"u": q, "d": 1 - q})
        s = espm_falsify(model, measure)
        y = s.post_trade["root"].y
        rows.append({"q_u": str(q), "y": str(y),
                     "expected_liquidation": str(expected_liquidation(model, measure, s))})
    doc = {"model": io.model_to_dict(model), **io.verdict_to_dict(verdict, model.tree), "falsifiers": rows}
    lines = _verdict_lines(verdict, model.tree)
    lines.append("falsifying buy-and-hold positions (q(u), y, E_Q[L]):")
    lines += [f"  {r['q_u']:>5}  y={r['y']:>4}  {r['expected_liquidation']}" for r in rows]
    _emit(out, doc, args.format, lines)
    return EXIT_NA


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arbcert", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_model(name, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("model", help="model file (JSON)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    with_model("check", "decide arbitrage").set_defaults(func=cmd_check)
    with_model("certificate", "print the no-arbitrage certificate").set_defaults(func=cmd_certificate)
    with_model("arbitrage", "print the arbitrage strategy and witness").set_defaults(func=cmd_arbitrage)

    sp = with_model("verify", "check a certificate or strategy file against a model")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--certificate")
    grp.add_argument("--strategy")
    sp.set_defaults(func=cmd_verify)

    sp = with_model("oracle", "independent brute-force verdict")
    sp.add_argument("--method", choices=("exhaustive", "simple"), default="exhaustive")
    sp.set_defaults(func=cmd_oracle)

    with_model("agree", "cross-check decide against both oracle methods").set_defaults(func=cmd_agree)

    sp = sub.add_parser("gen", help="generate a random model file")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--branching", type=_int_range, default=(2, 3), metavar="A..B")
    sp.add_argument("--price", type=_range, default=(Fraction(1), Fraction(3)), metavar="LO..HI")
    sp.add_argument("--price-den", type=int, default=4)
    sp.add_argument("--spread-prob", type=Fraction, default=Fraction(1, 2))
    sp.add_argument("--spread", type=_range, default=(Fraction(0), Fraction(1)), metavar="LO..HI")
    sp.add_argument("--fixed", type=_range, default=(Fraction(1, 8), Fraction(1)), metavar="LO..HI")
    sp.add_argument("--max-nodes", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("espm-demo", help="no-arbitrage model without a separating measure")
    sp.add_argument("--q", type=Fraction, action="append", help="weight of the up node (repeatable)")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_espm_demo)
    return p


def run_cli(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else 0
    try:
        return args.func(args, out)
    except ArbcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
