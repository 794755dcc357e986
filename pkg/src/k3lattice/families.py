"""Classification layer: family registry and same-order coexistence verdicts."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import catalog, glue
from . import lattice as lat
from .errors import (
    InvalidTriple,
    NotDivisible,
    OutOfRange,
    Unsupported,
    UnsupportedPrime,
    UnknownFamily,
)
from .lefschetz import euler_phi

REGISTRY_ENV = "K3LATTICE_REGISTRY"

IMPOSSIBLE = "Impossible"
AT_MOST_COUNTABLE = "AtMostCountable"
GENERIC_IMPOSSIBLE = "GenericImpossible"
GENERIC_TWO_DIM_IMPOSSIBLE = "GenericTwoDimImpossible"
CRITERION_BY_INVARIANTS = "CriterionByInvariants"


# ---------------------------------------------------------------------------
# involutions


@dataclass(frozen=True)
class InvolutionInvariants:
    r: int
    a: int
    delta: int

    def __post_init__(self):
        if not 1 <= self.r <= 20:
            raise InvalidTriple(f"r={self.r} outside 1..20")
        if not 0 <= self.a <= min(self.r, 22 - self.r):
            raise InvalidTriple(f"a={self.a} outside 0..{min(self.r, 22 - self.r)}")
        if self.delta not in (0, 1):
            raise InvalidTriple("delta must be 0 or 1")

    @property
    def triple(self):
        return (self.r, self.a, self.delta)


@dataclass(frozen=True)
class FixedLocusP2:
    kind: str  # "empty", "two_elliptic" or "curves"
    k: int = 0
    g: int = 0

    @property
    def rational_curves(self) -> int:
        if self.kind != "curves":
            return 0
        return self.k if self.g == 0 else self.k - 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "curves": self.k, "genus": self.g,
                "rational_curves": self.rational_curves}


def involution_invariants_to_fixed_locus(inv: InvolutionInvariants) -> FixedLocusP2:
    if inv.triple == (10, 10, 0):
        return FixedLocusP2("empty")
    if inv.triple == (10, 8, 0):
        return FixedLocusP2("two_elliptic", 2, 1)
    if (inv.r - inv.a) % 2:
        raise InvalidTriple(f"r - a must be even, got {inv.triple}")
    return FixedLocusP2("curves", (inv.r - inv.a) // 2 + 1, (22 - inv.r - inv.a) // 2)


def admits_symplectic_involution(inv: InvolutionInvariants) -> bool:
    if inv.a > 16 - inv.r:
        return True
    return inv.delta == 0 and (inv.r, inv.a) == (10, 6)


# ---------------------------------------------------------------------------
# order 3


@dataclass(frozen=True)
class FixedLocusP3:
    n: int
    k: int

    @property
    def genus(self) -> int:
        """Genus of the one possibly non-rational fixed curve."""
        return self.k + 3 - self.n


def order3_admissible(fl: FixedLocusP3) -> bool:
    n, k = fl.n, fl.k
    if not (0 <= n <= 9 and 0 <= k <= 6):
        return False
    if k == 0:
        return n == 3
    return max(0, n - 3) <= k <= n + 1


def admits_symplectic_order3(fl: FixedLocusP3) -> bool:
    if not order3_admissible(fl):
        raise UnknownFamily(f"no order-3 family with fixed locus ({fl.n},{fl.k})")
    return fl.k == fl.n - 3 and 6 <= fl.n <= 9


# ---------------------------------------------------------------------------
# numerology


def moduli_dimension(rank_t: int, m: int) -> int:
    phi = euler_phi(m)
    if rank_t < phi or rank_t % phi:
        raise NotDivisible(f"phi({m}) = {phi} does not divide rank {rank_t}")
    if m == 2:
        return rank_t - 2
    return rank_t // phi - 1


def omega_rank(m: int) -> int:
    if m not in catalog.OMEGA_INVARIANTS:
        raise OutOfRange(f"m={m} outside 2..8")
    return catalog.OMEGA_INVARIANTS[m][0]


@dataclass(frozen=True)
class TableRow:
    m: int
    rho: tuple[int, ...]
    rank_t: tuple[int, ...]
    moduli: tuple[int, ...]

    def display(self) -> list[str]:
        if not self.rho:
            return ["-", "-", "-"]
        if self.m == 2:
            return [f"≥ {min(self.rho)}", f"≤ {max(self.rank_t)}", f"≤ {max(self.moduli)}"]
        return [", ".join(map(str, xs)) for xs in (self.rho, self.rank_t, self.moduli)]

    def to_json(self) -> dict:
        return {"m": self.m, "rho": list(self.rho), "rankT": list(self.rank_t),
                "moduli": list(self.moduli), "display": self.display()}


def tablerank_row(m: int) -> TableRow:
    """Admissible Picard ranks, transcendental ranks and moduli for order m."""
    if not 2 <= m <= 8:
        raise OutOfRange(f"m={m} outside 2..8")
    rho_min = omega_rank(m) + 1
    phi = euler_phi(m)
    # T carries a positive definite 2-plane, so its rank is at least 2
    ranks = [t for t in range(22 - rho_min, 1, -1) if t % phi == 0]
    return TableRow(m, tuple(22 - t for t in ranks), tuple(ranks),
                    tuple(moduli_dimension(t, m) for t in ranks))


# ---------------------------------------------------------------------------
# coexistence verdicts


def p_to_2p_extension(p: int, fixes_a_curve: bool) -> bool:
    if p in (5, 13, 17, 19):
        return True
    if p in (7, 11):
        return bool(fixes_a_curve)
    raise UnsupportedPrime(f"p={p} not in 5, 7, 11, 13, 17, 19")


def same_order_coexistence(m: int) -> dict:
    if not 2 <= m <= 8:
        raise OutOfRange(f"m={m} outside 2..8")
    if m in (7, 8):
        return {"order": m, "verdict": IMPOSSIBLE}
    if m == 5:
        return {"order": m, "verdict": AT_MOST_COUNTABLE, "rigid_example": True}
    if m == 2:
        return {"order": m, "verdict": CRITERION_BY_INVARIANTS, "criterion": "involution classify"}
    if m == 3:
        return {"order": m, "verdict": CRITERION_BY_INVARIANTS, "criterion": "order3 classify"}
    if m == 4:
        return {"order": m, "verdict": GENERIC_TWO_DIM_IMPOSSIBLE,
                "rigid_example": True, "one_dim_example": True}
    return {"order": m, "verdict": GENERIC_IMPOSSIBLE, "one_dim_example": True}


def symplectic_fixed_points(n: int) -> int:
    table = load_registry()["symplectic_fixed_points"]
    if str(n) not in table:
        raise Unsupported(f"no fixed point count recorded for order {n}")
    return table[str(n)]["value"]


def order6_generic_check() -> glue.EmbeddingVerdict:
    """Length test for Omega(6) against the NS of the generic (9,6) surface.

    With the recorded invariants of Omega(6) the test is inconclusive; the
    registry verdict for order 6 does not rest on it.
    """
    return glue.primitive_embedding_length_obstruction(
        catalog.evaluate_any("Omega(6)"), catalog.evaluate_any("U + E8*2 + A2"))


def order4_generic_check(t: lat.AnyLattice | None = None) -> glue.EmbeddingVerdict:
    """Any 2-elementary rank-6 T against the complement of Omega(4)."""
    if t is None:
        t = lat.LatticeInvariants(6, (2, 4), (2,) * 6)
    return glue.primitive_embedding_length_obstruction(t, catalog.evaluate_any("OmegaPerp(4)"))


def order5_generic_check() -> glue.EmbeddingVerdict:
    return glue.primitive_embedding_length_obstruction(
        catalog.evaluate("U + H5"), catalog.evaluate("OmegaPerp(5)"))


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class FamilyDescriptor:
    id: str
    order: int
    fixed_key: str
    ns: str | None
    t: str | None
    ns_rank: int
    t_rank: int
    moduli: int
    admits_symplectic_same_order: bool | None
    record: dict

    @classmethod
    def from_record(cls, rec: dict) -> "FamilyDescriptor":
        return cls(rec["id"], rec["order"], rec["fixed_key"], rec.get("ns"), rec.get("t"),
                   rec["ns_rank"], rec["t_rank"], rec["moduli"],
                   rec.get("admits_symplectic_same_order"), rec)

    def to_json(self) -> dict:
        return dict(self.record)


def registry_path(path: str | Path | None = None) -> Path | None:
    p = path or os.environ.get(REGISTRY_ENV)
    return Path(p) if p else None


@lru_cache(maxsize=8)
def _load(path: str | None) -> dict:
    if path is not None:
        return json.loads(Path(path).read_text())
    return json.loads(resources.files("k3lattice").joinpath("data/registry.json").read_text())


def load_registry(path: str | Path | None = None) -> dict:
    p = registry_path(path)
    return _load(str(p) if p else None)


def families(path: str | Path | None = None) -> list[FamilyDescriptor]:
    return [FamilyDescriptor.from_record(r) for r in load_registry(path)["families"]]


def normalize_key(order: int, key) -> str:
    if isinstance(key, (tuple, list)):
        return ",".join(str(int(x)) for x in key)
    return str(key).replace(" ", "").strip("()")


def registry_lookup(order: int, fixed_locus, path: str | Path | None = None) -> FamilyDescriptor:
    key = normalize_key(order, fixed_locus)
    for f in families(path):
        if f.order == order and f.fixed_key == key:
            return f
    raise UnknownFamily(f"no registry family of order {order} with fixed locus {key!r}")


def check_descriptor(f: FamilyDescriptor) -> list[str]:
    """Consistency problems of a registry record (empty when sound)."""
    problems = []
    if f.ns_rank + f.t_rank != 22:
        problems.append("rank(NS) + rank(T) != 22")
    try:
        if moduli_dimension(f.t_rank, f.order) != f.moduli:
            problems.append("moduli does not match the formula")
    except NotDivisible:
        problems.append("phi(order) does not divide rank(T)")
    ns = catalog.evaluate(f.ns) if f.ns else None
    t = catalog.evaluate(f.t) if f.t else None
    if ns is not None and ns.rank != f.ns_rank:
        problems.append("NS expression has the wrong rank")
    if t is not None and t.rank != f.t_rank:
        problems.append("T expression has the wrong rank")
    if ns is not None and ns.signature[0] != 1:
        problems.append("NS is not hyperbolic")
    if t is not None and t.signature[0] != 2:
        problems.append("T does not have two positive directions")
    if ns is not None and t is not None:
        if lat.merge_invariant_factors(ns.invariant_factors) != lat.merge_invariant_factors(t.invariant_factors):
            problems.append("NS and T have different discriminant groups")
    if "provenance" not in f.record or "source" not in f.record:
        problems.append("missing source or provenance")
    return problems


def complementary_forms(f: FamilyDescriptor) -> bool:
    """q_NS isomorphic to -q_T, as required for orthogonal complements in a unimodular lattice."""
    ns, t = catalog.evaluate(f.ns), catalog.evaluate(f.t)
    return lat.forms_isomorphic(lat.discriminant_form(ns), lat.discriminant_form(t).negated())
