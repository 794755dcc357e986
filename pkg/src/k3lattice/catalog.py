"""Named lattices and evaluation of lattice expressions.

Root lattices (``A_n``, ``D_n``, ``E6``, ``E7``, ``E8``) are negative
definite; ``A2(-1)`` is the positive definite twist.  A trailing integer
argument on any block rescales its Gram matrix.

Some catalog entries (``Omega(m)`` for m >= 3) are only known through
rank, signature and discriminant group; they evaluate to
:class:`LatticeInvariants` and cannot be turned into a Gram matrix.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import lru_cache

from . import lattice as lat
from .errors import InvariantsOnly, UnknownName, UnrealizableInvariants
from .expr import Block, LatticeExpr, LiteralGram, Repeat, Sum, flatten, parse, pretty
from .lattice import Lattice, LatticeInvariants

# Provenance of catalog definitions: "printed" means the lattice appears explicitly
# in the source; "cited-literature" means only quoted from elsewhere;
# "derived" means chosen here and verified by invariants.
OMEGA_PERP = {
    2: ("U*3 + E8(2)", "printed"),
    3: ("U + U(3)*2 + A2*2", "printed"),
    4: ("U + U(4)*2 + <-2>*2", "derived"),
    5: ("U + U(5)*2", "printed"),
}

# (rank, invariant factors, provenance); Omega(m) is negative definite
OMEGA_INVARIANTS = {
    2: (8, (2,) * 8, "printed"),
    3: (12, (3,) * 6, "printed"),
    4: (14, (2, 2, 4, 4, 4, 4), "printed"),
    5: (16, (5,) * 4, "printed"),
    6: (16, (6,) * 4, "cited-literature"),
    7: (18, (7,) * 3, "cited-literature"),
    8: (18, (2, 4, 8, 8), "cited-literature"),
}

# representatives printed in the source for the involution invariant lattices
PRINTED_S = {
    (9, 9, 1): "<2> + E8(2)",
    (10, 10, 0): "U(2) + E8(2)",
    (10, 8, 0): "U + E8(2)",
    (10, 6, 0): "U + N",
    (18, 0, 0): "U + E8*2",
}

_ROOT = re.compile(r"^([ADE])(\d+)$")


def cartan_gram(kind: str, n: int) -> tuple[tuple[int, ...], ...]:
    """Negative definite Gram matrix of the root lattice of type ``kind_n``."""
    edges: list[tuple[int, int]]
    if kind == "A" and n >= 1:
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "D" and n >= 4:
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    elif kind == "E" and n in (6, 7, 8):
        edges = [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]
    else:
        raise UnknownName(f"no root lattice {kind}{n}")
    G = [[-2 * int(i == j) for j in range(n)] for i in range(n)]
    for i, j in edges:
        G[i][j] = G[j][i] = 1
    return tuple(map(tuple, G))


@lru_cache(maxsize=None)
def nikulin_lattice() -> Lattice:
    """Index-2 overlattice of <-2>^8 glued by half the sum of the basis."""
    base = Lattice(tuple(tuple(-2 * int(i == j) for j in range(8)) for i in range(8)))
    N, _ = lat.overlattice_from_glue(base, [(Fraction(1, 2),) * 8], "N")
    return N


def _scaled(gram, scale: int | None, name: str) -> Lattice:
    if scale is None:
        return Lattice(gram, name)
    return lat.rescale(Lattice(gram, name), scale)


def _block_lattice(b: Block) -> Lattice | LatticeInvariants:
    name, params = b.name, b.params
    label = pretty(b)

    def one_scale():
        if len(params) > 1:
            raise UnknownName(f"{name} takes at most one argument")
        return params[0] if params else None

    if name == "U":
        n = one_scale() or 1
        return Lattice(((0, n), (n, 0)), label)
    if name == "<>":
        return Lattice(((params[0],),), label)
    m = _ROOT.match(name)
    if m:
        L = _scaled(cartan_gram(m.group(1), int(m.group(2))), one_scale(), name)
        return Lattice(L.gram, label)
    if name == "N":
        s = one_scale()
        L = nikulin_lattice() if s is None else lat.rescale(nikulin_lattice(), s)
        return Lattice(L.gram, label)
    if name == "H5":
        return Lattice(_scaled(((2, 1), (1, -2)), one_scale(), name).gram, label)
    if name == "K7":
        return Lattice(_scaled(((-4, 1), (1, -2)), one_scale(), name).gram, label)
    if name in ("S", "OmegaPerp", "Omega", "T", "Tprime"):
        return evaluate_any(definition(b))
    raise UnknownName(f"unknown lattice name {label!r}")


def definition(b: Block) -> LatticeExpr | LatticeInvariants:
    """Expansion of a composite catalog name into its defining expression."""
    name, params = b.name, b.params
    if name == "S":
        if len(params) != 3:
            raise UnknownName("S takes three arguments (r, a, delta)")
        return parse(s_representative(*params))
    if name == "OmegaPerp":
        if len(params) != 1 or params[0] not in OMEGA_PERP:
            raise UnknownName(f"no catalog entry for {pretty(b)}")
        return parse(OMEGA_PERP[params[0]][0])
    if name == "Omega":
        if len(params) != 1 or params[0] not in OMEGA_INVARIANTS:
            raise UnknownName(f"no catalog entry for {pretty(b)}")
        if params[0] == 2:
            return parse("E8(2)")
        r, factors, _ = OMEGA_INVARIANTS[params[0]]
        return LatticeInvariants(r, (0, r), factors, pretty(b))
    if name == "T":
        table = {6: "U + U(3) + A2*2", 7: "U + U(3) + A2", 8: "U + U(3)", 9: "A2(-1)"}
        if params and params[0] in table:
            return parse(table[params[0]])
    if name == "Tprime":
        if params and 6 <= params[0] <= 8:
            k = 8 - params[0]
            return parse("U + U" + (f" + A2*{k}" if k else ""))
    raise UnknownName(f"no catalog entry for {pretty(b)}")


def is_composite(b: Block) -> bool:
    return b.name in ("S", "OmegaPerp", "Omega", "T", "Tprime")


def expand_blocks(e: LatticeExpr) -> list[LatticeExpr]:
    """Flattened summands with composite names replaced by their definitions."""
    out: list[LatticeExpr] = []
    for x in flatten(e):
        if isinstance(x, Block) and is_composite(x):
            d = definition(x)
            if isinstance(d, LatticeInvariants):
                out.append(x)
            else:
                out.extend(expand_blocks(d))
        else:
            out.append(x)
    return out


def evaluate_any(e: LatticeExpr | LatticeInvariants | str) -> Lattice | LatticeInvariants:
    if isinstance(e, str):
        e = parse(e)
    if isinstance(e, LatticeInvariants):
        return e
    parts = []
    for x in flatten(e):
        if isinstance(x, LiteralGram):
            parts.append(Lattice(x.matrix, pretty(x)))
        else:
            parts.append(_block_lattice(x))
    name = pretty(e)
    if len(parts) == 1:
        p = parts[0]
        if isinstance(p, Lattice):
            return Lattice(p.gram, name)
        return LatticeInvariants(p.rank, p.signature, p.invariant_factors, name)
    if all(isinstance(p, Lattice) for p in parts):
        return Lattice(lat.direct_sum(*parts).gram, name)
    invs = [p.invariants() for p in parts]
    return LatticeInvariants(
        sum(i.rank for i in invs),
        (sum(i.signature[0] for i in invs), sum(i.signature[1] for i in invs)),
        lat.merge_invariant_factors(*[i.invariant_factors for i in invs]),
        name,
    )


def evaluate(e: LatticeExpr | str) -> Lattice:
    """Evaluate to a Gram matrix; raises InvariantsOnly for invariant-only entries."""
    L = evaluate_any(e)
    if not isinstance(L, Lattice):
        raise InvariantsOnly(f"{L.name} is known only by its invariants")
    return L


def make_named(name: str) -> Lattice:
    return evaluate(name)


# ---------------------------------------------------------------------------
# 2-elementary hyperbolic representatives S(r, a, delta)

# (expression, rank, length, delta); hyperbolic part first
_POSITIVE = [("U", 2, 0, 0), ("U(2)", 2, 2, 0), ("<2>", 1, 1, 1)]
_NEGATIVE = [
    ("E8", 8, 0, 0), ("E8(2)", 8, 8, 0), ("N", 8, 6, 0), ("D8", 8, 2, 0),
    ("E7", 7, 1, 1), ("D6", 6, 2, 1), ("D4", 4, 2, 0), ("<-2>", 1, 1, 1),
]


@lru_cache(maxsize=None)
def s_representative(r: int, a: int, delta: int) -> str:
    """Expression for a 2-elementary lattice of signature (1, r-1) with invariants (r, a, delta).

    Uses the printed representative where one exists, else the shortest
    block sum found by search.  The result is verified by recomputing its
    invariants.
    """
    key = (r, a, delta)
    if key in PRINTED_S:
        expr = PRINTED_S[key]
    else:
        expr = _search_s(r, a, delta)
        if expr is None:
            raise UnrealizableInvariants(f"no catalog representative for S{key}")
    L = evaluate(expr)
    inv = lat.two_elementary_invariants(L)
    if (inv.r, inv.a, inv.delta) != key or L.signature != (1, r - 1):
        raise UnrealizableInvariants(f"catalog candidate {expr} has wrong invariants")
    return expr


def _search_s(r: int, a: int, delta: int) -> str | None:
    best = None
    for pname, pr, pa, pd in _POSITIVE:
        rest = r - pr
        if rest < 0:
            continue
        for count in range(0, rest + 1):
            if best is not None and count + 1 >= best[0]:
                break
            for combo in itertools.combinations_with_replacement(range(len(_NEGATIVE)), count):
                blocks = [_NEGATIVE[i] for i in combo]
                if sum(b[1] for b in blocks) != rest:
                    continue
                if pa + sum(b[2] for b in blocks) != a:
                    continue
                if max([pd] + [b[3] for b in blocks]) != delta:
                    continue
                cand = (count + 1, [pname] + [b[0] for b in blocks])
                if best is None or cand[0] < best[0]:
                    best = cand
                break
    if best is None:
        return None
    return pretty(parse(" + ".join(_compress(best[1]))))


def _compress(names: list[str]) -> list[str]:
    out = []
    for k, grp in itertools.groupby(names):
        n = len(list(grp))
        out.append(k if n == 1 else f"{k}*{n}")
    return out
