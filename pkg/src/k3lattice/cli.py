"""Command line interface.

Exit codes: 0 when a result was computed (whatever the verdict), 1 for
usage errors, 2 for mathematical precondition failures.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import catalog, families, glue, lefschetz
from . import lattice as lat
from .errors import DomainError
from .exactmath import factorize
from .expr import ExprSyntaxError, parse, pretty

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _int_pair(text: str) -> tuple[int, int]:
    xs = _int_list(text)
    if len(xs) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return xs[0], xs[1]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="canonical JSON output")
    common.add_argument("--registry", help="family registry file (overrides $K3LATTICE_REGISTRY)")
    common.add_argument("--fixtures", help="printed-system fixture file (overrides $K3LATTICE_FIXTURES)")

    p = _Parser(prog="k3lattice", description="Exact lattice computations for K3 automorphisms.",
                parents=[common])
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    s = sub.add_parser("info", parents=[common], help="invariants of a lattice expression")
    s.add_argument("expr")

    s = sub.add_parser("embed", parents=[common], help="primitive embedding tests")
    s.add_argument("s_expr")
    s.add_argument("w_expr")

    s = sub.add_parser("overlattices", parents=[common], help="even overlattices of given index")
    s.add_argument("expr")
    s.add_argument("--index", type=int, required=True)

    s = sub.add_parser("involution", parents=[common], help="non-symplectic involutions")
    s.add_argument("action", choices=["classify"])
    s.add_argument("r", type=int)
    s.add_argument("a", type=int)
    s.add_argument("delta", type=int)

    s = sub.add_parser("order3", parents=[common], help="non-symplectic automorphisms of order 3")
    s.add_argument("action", choices=["classify"])
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)

    s = sub.add_parser("lefschetz", parents=[common], help="holomorphic Lefschetz systems")
    s.add_argument("target", nargs="*", help="'fixture m14' or 'fixture m22'")
    s.add_argument("--order", type=int)
    s.add_argument("--types", type=_int_list, default=[])
    s.add_argument("--forced-zero", type=_int_list, default=[])
    g = s.add_mutually_exclusive_group()
    g.add_argument("--h", type=int)
    g.add_argument("--h-range", type=_int_pair, metavar="LO,HI",
                   help="use --h-range=LO,HI when LO is negative")
    s.add_argument("--bound", type=int, default=lefschetz.DEFAULT_BOUND)
    s.add_argument("--convention", choices=lefschetz.CONVENTIONS, default="matrix")

    s = sub.add_parser("table", parents=[common], help="admissible ranks and moduli")
    s.add_argument("which", choices=["rank"])
    s.add_argument("--m", type=int)

    s = sub.add_parser("family", parents=[common], help="registry lookup")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--fixed", required=True)
    return p


# ---------------------------------------------------------------------------
# verbs; each returns (payload, plain text)


def cmd_info(args):
    e = parse(args.expr)
    L = catalog.evaluate_any(e)
    inv = L.invariants()
    neg = inv.signature[1]
    out = {
        "expr": pretty(e),
        "rank": inv.rank,
        "signature": list(inv.signature),
        "det": (-1) ** neg * inv.det_abs,
        "invariant_factors": list(inv.invariant_factors),
        "length": lat.length_of(inv.invariant_factors),
        "known_by": "gram" if isinstance(L, lat.Lattice) else "invariants",
        "gram": [list(r) for r in L.gram] if isinstance(L, lat.Lattice) else None,
        "p_elementary": None,
        "delta": None,
    }
    primes = sorted({p for d in inv.invariant_factors for p in _primes(d)})
    if len(primes) == 1 and all(d == primes[0] for d in inv.invariant_factors):
        out["p_elementary"] = {"p": primes[0], "a": len(inv.invariant_factors)}
        if primes[0] == 2 and isinstance(L, lat.Lattice):
            out["delta"] = lat.delta_invariant(L)
    text = [f"{out['expr']}: rank {out['rank']}, signature {tuple(out['signature'])}, det {out['det']}",
            f"discriminant group: {_group(inv.invariant_factors)}"]
    if out["p_elementary"]:
        pe = out["p_elementary"]
        line = f"{pe['p']}-elementary, a = {pe['a']}"
        if out["delta"] is not None:
            line += f", delta = {out['delta']}"
        text.append(line)
    return out, "\n".join(text)


def _primes(d: int) -> list[int]:
    return list(factorize(d))


def _group(factors) -> str:
    return " x ".join(f"Z/{d}" for d in factors) or "trivial"


def cmd_embed(args):
    out = glue.embed_report(args.s_expr, args.w_expr)
    out = {"s": pretty(parse(args.s_expr)), "w": pretty(parse(args.w_expr)), **out}
    lines = [f"verdict: {out['verdict']}",
             f"length test: {out['length']['status']} ({out['length']['reason']})",
             f"block inclusion: {out['direct_summand']['status']} ({out['direct_summand']['reason']})"]
    if "split_off_unimodular" in out:
        so = out["split_off_unimodular"]
        lines.append(f"split off: exists = {so['exists']} ({so['reason']})")
    return out, "\n".join(lines)


def cmd_overlattices(args):
    L = catalog.evaluate(args.expr)
    Ws = glue.overlattices(L, args.index)
    out = {"expr": pretty(parse(args.expr)), "index": args.index, "count": len(Ws),
           "lattices": [{"gram": [list(r) for r in W.gram], "det": W.det,
                         "invariant_factors": list(W.invariant_factors)} for W in Ws]}
    text = [f"{len(Ws)} even overlattice(s) of index {args.index}"]
    for W in Ws:
        text.append(f"  det {W.det}, group {_group(W.invariant_factors)}")
    return out, "\n".join(text)


def cmd_involution(args):
    inv = families.InvolutionInvariants(args.r, args.a, args.delta)
    admits = families.admits_symplectic_involution(inv)
    try:
        fl = families.involution_invariants_to_fixed_locus(inv).to_json()
    except DomainError:
        fl = None
    rep = None
    verdict = None
    try:
        rep = catalog.s_representative(*inv.triple)
    except DomainError:
        pass
    if rep is not None and inv.r >= 8:
        verdict = glue.primitive_embedding_length_obstruction(
            catalog.evaluate("E8(2)"), catalog.evaluate(rep)).to_json()
    out = {"r": inv.r, "a": inv.a, "delta": inv.delta, "admits_symplectic": admits,
           "fixed_locus": fl, "ns_representative": rep, "e8_2_embedding": verdict}
    text = [f"(r, a, delta) = {inv.triple}: admits symplectic involution: {admits}"]
    if fl:
        text.append(f"fixed locus: {fl['kind']}, {fl['curves']} curve(s), genus {fl['genus']}")
    if rep:
        text.append(f"NS representative: {rep}")
    return out, "\n".join(text)


def cmd_order3(args):
    fl = families.FixedLocusP3(args.n, args.k)
    admits = families.admits_symplectic_order3(fl)
    try:
        fam = families.registry_lookup(3, (args.n, args.k), args.registry).to_json()
    except DomainError:
        fam = None
    out = {"n": args.n, "k": args.k, "admits_symplectic": admits, "family": fam}
    return out, f"fixed locus ({args.n},{args.k}): admits symplectic order 3: {admits}"


def cmd_lefschetz(args):
    if args.target:
        if len(args.target) != 2 or args.target[0] != "fixture":
            raise UsageError("expected 'lefschetz fixture m14|m22' or 'lefschetz --order M ...'")
        which = args.target[1]
        sys_ = lefschetz.printed_system(which, args.fixtures)
        sols = lefschetz.solve_nonneg(sys_, args.bound)
        out = {"fixture": which, "m": sys_.m, "unknowns": list(sys_.unknowns),
               "bound": args.bound, "solutions": sols}
        return out, f"printed system {which}: {len(sols)} nonnegative solution(s)"
    if args.order is None:
        raise UsageError("lefschetz needs --order or 'fixture NAME'")
    if args.h_range is not None:
        h = args.h_range
    else:
        h = 0 if args.h is None else args.h
    hyp = lefschetz.FixedLocusHypothesis(args.order, tuple(args.types), tuple(args.forced_zero),
                                         h, args.convention)
    sys_ = lefschetz.build_system(hyp)
    sols = lefschetz.solve_nonneg(sys_, args.bound)
    out = {"m": args.order, "convention": args.convention, "unknowns": list(sys_.unknowns),
           "h_range": list(hyp.h_range), "bound": args.bound,
           "system": sys_.to_json()["rows"], "solutions": sols}
    text = [f"order {args.order}, unknowns {', '.join(sys_.unknowns)}: {len(sols)} solution(s)"]
    text += ["  " + ", ".join(f"{k}={v}" for k, v in s.items()) for s in sols]
    return out, "\n".join(text)


def cmd_table(args):
    if args.m is not None:
        row = families.tablerank_row(args.m)
        return row.to_json(), _table_text([row])
    rows = [families.tablerank_row(m) for m in range(2, 9)]
    return {"rows": [r.to_json() for r in rows]}, _table_text(rows)


def _table_text(rows) -> str:
    out = ["m | rank NS | rank T | moduli"]
    for r in rows:
        out.append(f"{r.m} | " + " | ".join(r.display()))
    return "\n".join(out)


def cmd_family(args):
    f = families.registry_lookup(args.order, args.fixed, args.registry)
    out = f.to_json()
    text = [f"{f.id}: NS {f.ns or '?'} (rank {f.ns_rank}), T {f.t or '?'} (rank {f.t_rank})",
            f"moduli {f.moduli}, admits symplectic of the same order: {f.admits_symplectic_same_order}"]
    return out, "\n".join(text)


VERBS = {
    "info": cmd_info, "embed": cmd_embed, "overlattices": cmd_overlattices,
    "involution": cmd_involution, "order3": cmd_order3, "lefschetz": cmd_lefschetz,
    "table": cmd_table, "family": cmd_family,
}


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=True)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    want_json = "--json" in (argv if argv is not None else sys.argv[1:])
    try:
        args = build_parser().parse_args(argv)
        if not args.verb:
            raise UsageError("no verb given; try --help")
        payload, text = VERBS[args.verb](args)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return 1
    except (DomainError, ExprSyntaxError) as exc:
        if want_json:
            print(dumps({"error": exc.to_json()}), file=stdout)
        else:
            print(f"error: {exc}", file=stderr)
        return 2
    if args.json:
        payload = {"verb": args.verb, "schema_version": SCHEMA_VERSION, **payload}
        print(dumps(payload), file=stdout)
    else:
        print(text, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())
