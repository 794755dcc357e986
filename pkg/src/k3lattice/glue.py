"""Overlattices from isotropic subgroups and primitive-embedding tests."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import catalog
from . import exactmath as em
from . import lattice as lat
from .errors import NotExpression, NotUnimodular, RankMismatch, TooLarge
from .expr import Block, LatticeExpr, parse, pretty
from .lattice import AnyLattice, DiscriminantForm, Lattice, LatticeInvariants

MAX_GROUP_ORDER = 2 ** 16

OBSTRUCTED = "Obstructed"
INCONCLUSIVE = "Inconclusive"
EMBEDDED = "EmbeddedByConstruction"


@dataclass(frozen=True)
class IsotropicSubgroup:
    ambient: DiscriminantForm
    generators: tuple[tuple[int, ...], ...]
    elements: frozenset = field(compare=False, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass
class Check:
    test: str
    prime: int
    lhs: int
    rhs: int
    ok: bool

    def to_json(self) -> dict:
        return {"test": self.test, "q": self.prime, "lhs": self.lhs, "rhs": self.rhs, "ok": self.ok}


@dataclass
class EmbeddingVerdict:
    status: str
    reason: str = ""
    witness: list[list[int]] | None = None
    checks: list[Check] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "witness": self.witness,
                "checks": [c.to_json() for c in self.checks]}


# ---------------------------------------------------------------------------
# overlattices


def _closure(F: DiscriminantForm, elems: frozenset, x) -> frozenset:
    out = set(elems)
    frontier = list(elems)
    while frontier:
        nxt = []
        for e in frontier:
            y = F.add(e, x)
            if y not in out:
                out.add(y)
                nxt.append(y)
        frontier = nxt
    return frozenset(out)


def isotropic_subgroups(F: DiscriminantForm, order: int) -> list[IsotropicSubgroup]:
    """All subgroups of ``F`` of the given order on which q vanishes."""
    if F.order > MAX_GROUP_ORDER:
        raise TooLarge(f"discriminant group of order {F.order} exceeds {MAX_GROUP_ORDER}")
    if order < 1 or F.order % order:
        return []
    zero = F.zero()
    iso = [e for e in F.elements() if e != zero and F.q(e) == 0 and order % F.element_order(e) == 0]
    start = IsotropicSubgroup(F, (), frozenset([zero]))
    seen = {start.elements: start}
    layer = [start]
    found = []
    while layer:
        nxt = []
        for H in layer:
            if H.order == order:
                found.append(H)
                continue
            for x in iso:
                if x in H.elements or any(F.b(x, g) != 0 for g in H.generators):
                    continue
                E = _closure(F, H.elements, x)
                if order % len(E) or E in seen:
                    continue
                K = IsotropicSubgroup(F, H.generators + (x,), E)
                seen[E] = K
                nxt.append(K)
        layer = nxt
    return found


def overlattices(L: Lattice, index: int) -> list[Lattice]:
    """Even overlattices of ``L`` of the given index, one per isotropic subgroup."""
    if index < 2:
        raise ValueError("index must be at least 2")
    F = lat.discriminant_form(L)
    out = []
    for H in isotropic_subgroups(F, index):
        glue = [F.vector(g) for g in H.generators]
        W, _ = lat.overlattice_from_glue(L, glue)
        assert abs(W.det) * index * index == abs(L.det)
        out.append(W)
    out.sort(key=lambda W: W.gram)
    return out


# ---------------------------------------------------------------------------
# length obstruction


def _prime_powers(*invs: LatticeInvariants) -> list[int]:
    qs = set()
    for inv in invs:
        for d in inv.invariant_factors:
            for p, e in em.factorize(d).items():
                qs.update(p ** k for k in range(1, e + 1))
    return sorted(qs)


def primitive_embedding_length_obstruction(S: AnyLattice, W: AnyLattice) -> EmbeddingVerdict:
    """Necessary conditions for a primitive embedding of ``S`` into ``W``.

    Every test is recorded; the first failing one becomes the reason.
    """
    s, w = S.invariants(), W.invariants()
    if s.rank > w.rank:
        raise RankMismatch(f"rank {s.rank} does not fit into rank {w.rank}")
    m = w.rank - s.rank
    checks = [
        Check("signature+", 0, s.signature[0], w.signature[0], s.signature[0] <= w.signature[0]),
        Check("signature-", 0, s.signature[1], w.signature[1], s.signature[1] <= w.signature[1]),
    ]
    for q in _prime_powers(s, w):
        lw, ls = lat.length_of(w.invariant_factors, q), lat.length_of(s.invariant_factors, q)
        checks.append(Check("b", q, lw, ls + m, lw <= ls + m))
    for q in _prime_powers(s, w):
        if em.factorize(q) == {q: 1}:
            lw, ls = lat.length_of(w.invariant_factors, q), lat.length_of(s.invariant_factors, q)
            checks.append(Check("c", q, lw, ls - m, lw >= ls - m))
    bad = next((c for c in checks if not c.ok), None)
    if bad is None:
        return EmbeddingVerdict(INCONCLUSIVE, "no necessary condition fails", checks=checks)
    if bad.test.startswith("signature"):
        reason = f"signature: {bad.lhs} > {bad.rhs}"
    elif bad.test == "b":
        reason = f"(b) at q={bad.prime}: {bad.lhs} > {bad.rhs - m} + {m}"
    else:
        reason = f"(c) at p={bad.prime}: {bad.lhs} < {bad.rhs + m} - {m}"
    return EmbeddingVerdict(OBSTRUCTED, reason, checks=checks)


# ---------------------------------------------------------------------------
# splitting off a unimodular summand


@dataclass
class SplitResult:
    rank: int
    signature: tuple[int, int]
    invariant_factors: tuple[int, ...]
    exists: bool | None
    reason: str

    def to_json(self) -> dict:
        return {"rank": self.rank, "signature": list(self.signature),
                "invariant_factors": list(self.invariant_factors),
                "exists": self.exists, "reason": self.reason}


def split_off_unimodular(S: Lattice, W: AnyLattice | str | LatticeExpr) -> SplitResult:
    """Invariants of ``L`` with ``S + L = W`` and whether such ``L`` can exist.

    ``exists`` is None when neither the length bound, a block decomposition
    nor the odd p-elementary hyperbolic criterion settles the question.
    """
    if not S.is_unimodular():
        raise NotUnimodular(f"{S!r} is not unimodular")
    wexpr = None
    if not isinstance(W, (Lattice, LatticeInvariants)):
        wexpr = parse(W) if isinstance(W, str) else W
        W = catalog.evaluate_any(wexpr)
    w = W.invariants()
    if S.rank > w.rank:
        raise RankMismatch(f"rank {S.rank} does not fit into rank {w.rank}")
    r = w.rank - S.rank
    sig = (w.signature[0] - S.signature[0], w.signature[1] - S.signature[1])
    factors = w.invariant_factors

    def result(ok, why):
        return SplitResult(r, sig, factors, ok, why)

    if min(sig) < 0:
        return result(False, "signature of the complement would be negative")
    if len(factors) > r:
        return result(False, f"length {len(factors)} exceeds complement rank {r}")
    if r == 0:
        return result(not factors, "complement is zero")
    if wexpr is not None and S.name:
        rest = _subtract_blocks(catalog.expand_blocks(parse(S.name)), catalog.expand_blocks(wexpr))
        if rest is not None:
            return result(True, "complement is a direct summand: " + (" + ".join(map(pretty, rest)) or "0"))
    primes = {p for d in factors for p in em.factorize(d)}
    if len(primes) == 1 and all(d in primes for d in factors):
        p = primes.pop()
        if p != 2 and sig[0] == 1:
            ok = lat.exists_hyperbolic_p_elementary(p, r, len(factors))
            return result(ok, f"{p}-elementary hyperbolic criterion for rank {r}, length {len(factors)}")
    return result(None, "no test decides existence")


def _subtract_blocks(small: list, big: list):
    need = Counter(pretty(b) for b in small)
    have = Counter(pretty(b) for b in big)
    if need - have:
        return None
    left = have - need
    rest = []
    for b in big:
        if left[pretty(b)] > 0:
            left[pretty(b)] -= 1
            rest.append(b)
    return rest


# ---------------------------------------------------------------------------
# embeddings by construction

# A2(-1) inside U + U(3): x = e + f, y = e - 2f + e' + f'
_A2_TWIST_WITNESS = ((1, 1, 0, 0), (1, -2, 1, 1))


def _as_expr(x) -> LatticeExpr:
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, (Lattice, LatticeInvariants)):
        raise NotExpression("direct_summand_embedding needs expressions, not Gram matrices")
    return x


def direct_summand_embedding(S, W) -> EmbeddingVerdict:
    """Embed ``S`` into ``W`` block by block, with the witness verified.

    Each block of ``S`` is matched to an equal block of ``W``.  A block
    ``A2(-1)`` may instead use a pair ``U``, ``U(3)`` of ``W`` through a
    fixed explicit embedding.
    """
    sb = catalog.expand_blocks(_as_expr(S))
    wb = catalog.expand_blocks(_as_expr(W))
    wl = [catalog.evaluate(b) for b in wb]
    offsets = [0]
    for L in wl:
        offsets.append(offsets[-1] + L.rank)
    n = offsets[-1]
    used = [False] * len(wb)
    rows: list[list[int]] = []
    wnames = [pretty(b) for b in wb]

    def take(name):
        for i, w in enumerate(wnames):
            if not used[i] and w == name:
                used[i] = True
                return i
        return None

    # plain matches first so the gadget only consumes leftovers
    pending = []
    for b in sb:
        i = take(pretty(b))
        if i is None:
            pending.append(b)
            continue
        for k in range(wl[i].rank):
            rows.append([int(c == offsets[i] + k) for c in range(n)])
    reason = "block inclusion"
    for b in pending:
        if pretty(b) != "A2(-1)":
            return EmbeddingVerdict(INCONCLUSIVE, f"no block of W matches {pretty(b)}")
        i, j = take("U"), take("U(3)")
        if i is None or j is None:
            return EmbeddingVerdict(INCONCLUSIVE, "no free U + U(3) pair for A2(-1)")
        for x in _A2_TWIST_WITNESS:
            v = [0] * n
            v[offsets[i]], v[offsets[i] + 1] = x[0], x[1]
            v[offsets[j]], v[offsets[j] + 1] = x[2], x[3]
            rows.append(v)
        reason = "block inclusion with A2(-1) in U + U(3)"
    Ls = catalog.evaluate(_as_expr(S)) if sb else None
    Lw = lat.direct_sum(*wl)
    if Ls is None or not verify_primitive_embedding(Ls, Lw, rows):
        return EmbeddingVerdict(INCONCLUSIVE, "witness failed verification")
    return EmbeddingVerdict(EMBEDDED, reason, witness=rows)


def verify_primitive_embedding(S: Lattice, W: Lattice, rows: Sequence[Sequence[int]]) -> bool:
    """Check that ``rows`` (in W coordinates) span a primitive copy of ``S``."""
    if len(rows) != S.rank:
        return False
    G = em.matmul(em.matmul(rows, W.gram), em.transpose(rows))
    if [list(r) for r in G] != [list(r) for r in S.gram]:
        return False
    # primitive iff all invariant factors of the embedding matrix are 1
    return all(d == 1 for d in em.invariant_factors(rows)[: S.rank])


def embed_report(S, W) -> dict:
    """Every test for the pair, as used by the CLI."""
    Se = _as_expr(S)
    We = _as_expr(W)
    Sl, Wl = catalog.evaluate_any(Se), catalog.evaluate_any(We)
    length = primitive_embedding_length_obstruction(Sl, Wl)
    try:
        direct = direct_summand_embedding(Se, We)
    except Exception as exc:  # invariant-only blocks cannot be matched
        direct = EmbeddingVerdict(INCONCLUSIVE, str(exc))
    out = {"length": length.to_json(), "direct_summand": direct.to_json()}
    if isinstance(Sl, Lattice) and Sl.is_unimodular():
        out["split_off_unimodular"] = split_off_unimodular(Sl, We).to_json()
    if direct.status == EMBEDDED:
        out["verdict"] = EMBEDDED
    elif length.status == OBSTRUCTED or out.get("split_off_unimodular", {}).get("exists") is False:
        out["verdict"] = OBSTRUCTED
    else:
        out["verdict"] = INCONCLUSIVE
    return out
