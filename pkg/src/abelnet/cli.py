"""Command-line front end.

Exit codes: 0 success, 1 a test or identity came out false, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import algebra, dynamics, enumeration, recurrence
from .core import Configuration, Network
from .errors import AbelnetError, BoxTooSmall, InvalidSpec, UnknownLetter
from .netfile import NetworkFileError, load
from .series import SeriesTable

OK, FALSE, BAD_INPUT = 0, 1, 2


class _Output:
    """Collects (key, value) rows and prints them as aligned text or TSV."""

    def __init__(self, tsv: bool, header: Sequence[str] = ("key", "value")):
        self.tsv = tsv
        self.header = list(header)
        self.rows: list[list[str]] = []

    def add(self, *cells):
        self.rows.append([_fmt(c) for c in cells])

    def emit(self, stream=None):
        stream = stream or sys.stdout
        if self.tsv:
            stream.write("\t".join(self.header) + "\n")
            for r in self.rows:
                stream.write("\t".join(r) + "\n")
            return
        width = max((len(r[0]) for r in self.rows), default=0)
        for r in self.rows:
            stream.write(r[0].ljust(width) + "  " + " ".join(r[1:]) + "\n")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(_fmt(c) for c in v) + ")"
    if isinstance(v, (set, frozenset)):
        return "{" + ",".join(_fmt(c) for c in sorted(v)) + "}"
    return str(v)


def _matrix(m) -> str:
    return "[" + "; ".join(" ".join(_fmt(c) for c in row) for row in m) + "]"


def _scalar(tok: str):
    tok = tok.strip()
    try:
        v = json.loads(tok)
    except json.JSONDecodeError:
        return tok
    return _tuplify(v)


def _tuplify(v):
    return tuple(_tuplify(c) for c in v) if isinstance(v, list) else v


def _parse_list(text: str | None) -> list | None:
    """Either a JSON array or a comma-separated list of scalars."""
    if text is None:
        return None
    text = text.strip()
    if text.startswith("["):
        try:
            return [_tuplify(v) for v in json.loads(text)]
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"cannot parse {text!r}: {exc.msg}") from None
    return [_scalar(t) for t in text.split(",")] if text else []


def _config(net: Network, args) -> Configuration:
    x = _parse_list(args.x)
    q = _parse_list(args.q)
    if x is not None and not all(isinstance(c, int) for c in x):
        raise InvalidSpec("--x needs integers")
    return net.config(x, q)


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return args.jobs
    return enumeration.default_jobs()


# ------------------------------------------------------------------ commands


def cmd_validate(net: Network, args) -> int:
    from .zoo import validate_abelian

    report = validate_abelian(net)
    out = _Output(args.format == "tsv", ("vertex", "state", "first", "second", "kind"))
    for v in report.violations:
        out.add(v.vertex, v.state, v.first, v.second, v.kind)
    if args.format == "tsv":
        out.emit()
    elif report.ok:
        print("valid abelian network")
    else:
        print(f"{len(report.violations)} violation(s):")
        out.emit()
    return OK if report.ok else FALSE


def cmd_invariants(net: Network, args) -> int:
    out = _Output(args.format == "tsv")
    status = OK
    cls = algebra.classify(net)
    out.add("class", cls.tag)
    out.add("letters", list(net.alphabet))
    out.add("P", _matrix(algebra.production_matrix(net)))
    out.add("|Z^A/K|", algebra.kernel_index(net))
    connected = algebra.is_strongly_connected(net)
    critical = connected and cls.tag == algebra.CRITICAL
    if connected:
        out.add("s", algebra.exchange_rate(net))
    out.add("r", algebra.period_vector(net) if critical else "n/a")
    groth = algebra.grothendieck_invariants(net)
    out.add("Grothendieck", str(groth))
    out.add("Tor", str(algebra.torsion_group(net)))
    if not connected:
        out.add("capacity", "n/a")
    elif cls.tag == algebra.SUBCRITICAL:
        out.add("capacity", str(recurrence.UNBOUNDED))
    elif cls.tag == algebra.CRITICAL:
        try:
            out.add("capacity", recurrence.capacity(net, None, args.box))
        except BoxTooSmall as exc:
            out.add("capacity", f">= {exc.value} (box too small)")
            status = FALSE
        out.add("Stop", set(recurrence.stoppable_levels(net)))
    else:
        out.add("capacity", "n/a")
    out.emit()
    return status


def cmd_recurrent(net: Network, args) -> int:
    out = _Output(args.format == "tsv")
    cls = algebra.classify(net)
    if cls.tag == algebra.SUBCRITICAL:
        q = _config(net, args).q
        k = _parse_list(args.witness)
        verdict = recurrence.burning_test_subcritical(net, q, k)
        out.add("test", "burning (subcritical)")
        out.add("witness", tuple(k) if k else recurrence.default_witness(net))
    elif cls.tag == algebra.CRITICAL:
        cfg = _config(net, args)
        if recurrence.is_agent(net):
            verdict = recurrence.cycle_test(net, cfg)
            out.add("test", "cycle")
            out.add("cycles", [tuple(c) for c in recurrence.rotor_digraph(net, cfg.q).cycles()]
                    if algebra.is_locally_recurrent(net, cfg.q) else "n/a")
        else:
            cert = recurrence.burning_test_critical(net, cfg)
            verdict = cert.verdict
            out.add("test", "burning (critical)")
            out.add("word", cert.witness)
            out.add("counts", cert.counts)
            out.add("state returned", "yes" if cert.state_returned else "no")
    else:
        print("recurrence tests need a subcritical or critical network", file=sys.stderr)
        return BAD_INPUT
    out.rows.insert(0, ["recurrent", "yes" if verdict else "no"])
    out.emit()
    return OK if verdict else FALSE


def cmd_series(net: Network, args) -> int:
    det = brute = None
    if args.mode in ("det", "both"):
        det = enumeration.series_determinant(net, args.maxdeg)
    if args.mode in ("brute", "both"):
        brute = enumeration.series_bruteforce(net, args.maxdeg, _jobs(args))
    table: SeriesTable = det if det is not None else brute
    if args.format == "tsv":
        names = [f"e[{_fmt(a)}]" for a in net.alphabet]
        out = _Output(True, names + ["coefficient"])
        for line in table.to_text().splitlines():
            exp, coef = line.split(" : ")
            out.rows.append(exp.split(",") + [coef])
        out.emit()
    else:
        sys.stdout.write(table.to_text())
    if det is not None and brute is not None:
        diffs = det.differences(brute)
        for e, a, b in diffs:
            print(f"mismatch at {','.join(map(str, e))}: determinant {a}, enumeration {b}", file=sys.stderr)
        return FALSE if diffs else OK
    return OK


def _rule(net: Network, text: str) -> dynamics.UpdateRule:
    name, _, arg = text.partition(":")
    if name == "parallel":
        return dynamics.parallel()
    if name == "sequential":
        return dynamics.sequential(_parse_list(arg) if arg else None)
    if name == "savings":
        return dynamics.savings(_parse_list(arg))
    if name == "ladder":
        return dynamics.ladder()
    raise InvalidSpec(f"unknown rule {text!r}; use parallel, sequential[:order], savings:S or ladder")


def cmd_simulate(net: Network, args) -> int:
    rule = _rule(net, args.rule)
    cfg = _config(net, args)
    if args.report == "activity":
        act = dynamics.activity_vector(net, cfg, rule, cap=args.steps)
        out = _Output(args.format == "tsv", ("letter", "activity"))
        for a, v in zip(net.alphabet, act):
            out.add(_fmt(a), v)
        out.emit()
        return OK
    out = _Output(args.format == "tsv", ("step", "x", "q", "word"))
    cur = cfg
    for i in range(args.steps):
        nxt, w = dynamics.update(rule, net, cur)
        out.add(str(i), cur.x, cur.q, " ".join(_fmt(a) for a in w) or "-")
        cur = nxt
    out.add(str(args.steps), cur.x, cur.q, "")
    out.emit()
    return OK


COMMANDS = {
    "validate": cmd_validate,
    "invariants": cmd_invariants,
    "recurrent": cmd_recurrent,
    "series": cmd_series,
    "simulate": cmd_simulate,
}


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abelnet", description="Analyse abelian networks described in a JSON file.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="network file")
        p.add_argument("--format", choices=("text", "tsv"), default="text")
        return p

    def config_flags(p):
        p.add_argument("--x", help="letter counts, comma separated or a JSON array")
        p.add_argument("--q", help="local states, comma separated or a JSON array")

    common(sub.add_parser("validate", help="check the commutation axioms"))
    p = common(sub.add_parser("invariants", help="classification, groups, capacity and stoppable levels"))
    p.add_argument("--box", type=int, default=None, help="half-width of the capacity search box")
    p = common(sub.add_parser("recurrent", help="test a configuration for recurrence"))
    config_flags(p)
    p.add_argument("--witness", help="positive vector k for the subcritical test")
    p = common(sub.add_parser("series", help="generating function of recurrent configurations"))
    p.add_argument("--maxdeg", type=int, default=5)
    p.add_argument("--mode", choices=("det", "brute", "both"), default="det")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: ABELNET_JOBS or 1)")
    p = common(sub.add_parser("simulate", help="iterate an update rule"))
    config_flags(p)
    p.add_argument("--rule", default="parallel", help="parallel, sequential[:order], savings:S or ladder")
    p.add_argument("--steps", type=int, default=100_000, help="update steps (orbit) or cycle search cap (activity)")
    p.add_argument("--report", choices=("activity", "orbit"), default="activity")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parser().parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        net = load(args.file)
    except NetworkFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    try:
        return COMMANDS[args.command](net, args)
    except (InvalidSpec, UnknownLetter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except AbelnetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FALSE


if __name__ == "__main__":
    sys.exit(main())
