"""Even lattices, discriminant forms and p-elementary invariants."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, prod
from typing import Iterator, Sequence, Union

from . import exactmath as em
from .errors import (
    DegenerateLattice,
    EvenPrime,
    Not2Elementary,
    OddLattice,
    ZeroScale,
)

# all elements of the discriminant group are checked for delta up to this size
DELTA_FULL_SCAN = 2 ** 12


def mod2(x: Fraction) -> Fraction:
    return x - 2 * (x.numerator // (2 * x.denominator))


def mod1(x: Fraction) -> Fraction:
    return x - x.numerator // x.denominator


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class Lattice:
    """Even nondegenerate lattice given by its Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        if not g:
            raise DegenerateLattice("lattice must have rank >= 1")
        if not em.is_symmetric(g):
            raise ValueError("Gram matrix is not symmetric")
        if any(g[i][i] % 2 for i in range(len(g))):
            raise OddLattice("Gram matrix has an odd diagonal entry")
        if em.det(g) == 0:
            raise DegenerateLattice("Gram matrix is singular")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return em.det(self.gram)

    @cached_property
    def signature(self) -> tuple[int, int]:
        return em.signature(self.gram)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in em.invariant_factors(self.gram) if d > 1)

    def invariants(self) -> "LatticeInvariants":
        return LatticeInvariants(self.rank, self.signature, self.invariant_factors, self.name)

    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram], "name": self.name}

    @classmethod
    def from_json(cls, obj: dict) -> "Lattice":
        return cls(tuple(tuple(r) for r in obj["gram"]), obj.get("name"))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Lattice{label} rank={self.rank} det={self.det}>"


@dataclass(frozen=True)
class LatticeInvariants:
    """Rank, signature and discriminant group of a lattice known only by its invariants."""

    rank: int
    signature: tuple[int, int]
    invariant_factors: tuple[int, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors",
                           tuple(sorted(d for d in self.invariant_factors if d > 1)))
        if sum(self.signature) != self.rank:
            raise ValueError("signature does not add up to rank")

    @property
    def det_abs(self) -> int:
        return prod(self.invariant_factors)

    def invariants(self) -> "LatticeInvariants":
        return self


AnyLattice = Union[Lattice, LatticeInvariants]


def merge_invariant_factors(*lists: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors of a direct sum of finite abelian groups."""
    by_prime: dict[int, list[int]] = {}
    for ds in lists:
        for d in ds:
            for p, e in em.factorize(d).items():
                by_prime.setdefault(p, []).append(e)
    n = max((len(v) for v in by_prime.values()), default=0)
    out = [1] * n
    for p, exps in by_prime.items():
        exps.sort()
        for k, e in enumerate(exps):
            out[n - len(exps) + k] *= p ** e
    return tuple(d for d in out if d > 1)


def length_of(factors: Sequence[int], q: int | None = None) -> int:
    """Minimal number of generators, or the number of factors divisible by ``q``."""
    if q is None:
        return sum(1 for d in factors if d > 1)
    return sum(1 for d in factors if d % q == 0)


# ---------------------------------------------------------------------------
# constructions


def direct_sum(*lattices: Lattice) -> Lattice:
    names = [L.name for L in lattices]
    name = " + ".join(names) if all(names) else None
    return Lattice(tuple(map(tuple, em.block_diag(*[L.gram for L in lattices]))), name)


def rescale(L: Lattice, n: int) -> Lattice:
    if n == 0:
        raise ZeroScale("scale factor must be nonzero")
    name = f"{L.name}({n})" if L.name else None
    return Lattice(tuple(tuple(n * x for x in row) for row in L.gram), name)


# ---------------------------------------------------------------------------
# discriminant group and form


@dataclass(frozen=True)
class DiscriminantGroup:
    invariant_factors: tuple[int, ...]
    # generator i in coordinates of the lattice basis (rational)
    generator_coords: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def length(self, q: int | None = None) -> int:
        return length_of(self.invariant_factors, q)


def discriminant_group(L: Lattice) -> DiscriminantGroup:
    D, U, V = em.smith_normal_form(L.gram)
    n = L.rank
    factors, gens = [], []
    for i in range(n):
        d = D[i][i]
        if d > 1:
            factors.append(d)
            gens.append(tuple(Fraction(V[r][i], d) for r in range(n)))
    return DiscriminantGroup(tuple(factors), tuple(gens))


@dataclass(frozen=True)
class DiscriminantForm:
    """Finite quadratic form ``q: A -> Q/2Z`` on ``A = prod Z/d_i``.

    Elements are integer tuples ``c`` with ``0 <= c_i < d_i``.  The form is
    determined by ``q`` on generators and the pairing ``b`` between them.
    """

    invariant_factors: tuple[int, ...]
    q_values: tuple[Fraction, ...]
    b_matrix: tuple[tuple[Fraction, ...], ...]
    group: DiscriminantGroup | None = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def length(self, q: int | None = None) -> int:
        return length_of(self.invariant_factors, q)

    def normalize(self, c: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(c, self.invariant_factors))

    def add(self, c1, c2) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(c1, c2, self.invariant_factors))

    def scale(self, k: int, c) -> tuple[int, ...]:
        return tuple((k * x) % d for x, d in zip(c, self.invariant_factors))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.invariant_factors)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*[range(d) for d in self.invariant_factors])

    def q(self, c: Sequence[int]) -> Fraction:
        k = len(c)
        s = sum((c[i] * c[i] * self.q_values[i] for i in range(k)), Fraction(0))
        s += 2 * sum((c[i] * c[j] * self.b_matrix[i][j]
                      for i in range(k) for j in range(i + 1, k)), Fraction(0))
        return mod2(s)

    def b(self, c1: Sequence[int], c2: Sequence[int]) -> Fraction:
        k = len(c1)
        return mod1(sum((c1[i] * c2[j] * self.b_matrix[i][j]
                         for i in range(k) for j in range(k)), Fraction(0)))

    def element_order(self, c: Sequence[int]) -> int:
        o = 1
        for x, d in zip(c, self.invariant_factors):
            o = _lcm(o, d // gcd(x, d))
        return o

    def vector(self, c: Sequence[int]) -> tuple[Fraction, ...]:
        """Representative in the rational span of the lattice."""
        if self.group is None:
            raise ValueError("form carries no lattice coordinates")
        gens = self.group.generator_coords
        n = len(gens[0]) if gens else 0
        return tuple(sum((x * g[r] for x, g in zip(c, gens)), Fraction(0)) for r in range(n))

    def negated(self) -> "DiscriminantForm":
        return DiscriminantForm(
            self.invariant_factors,
            tuple(mod2(-x) for x in self.q_values),
            tuple(tuple(mod1(-x) for x in row) for row in self.b_matrix),
        )

    def check_consistency(self) -> bool:
        """``q(x+y) - q(x) - q(y) == 2 b(x, y)`` on generator pairs."""
        k = len(self.invariant_factors)
        basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        for x in basis:
            for y in basis:
                lhs = mod2(self.q(self.add(x, y)) - self.q(x) - self.q(y))
                if lhs != mod2(2 * self.b(x, y)):
                    return False
        return True


def discriminant_form(L: Lattice) -> DiscriminantForm:
    grp = discriminant_group(L)
    G = L.gram
    vecs = grp.generator_coords

    def pair(u, v):
        return sum((u[i] * G[i][j] * v[j] for i in range(len(u)) for j in range(len(v))), Fraction(0))

    qv = tuple(mod2(pair(v, v)) for v in vecs)
    bm = tuple(tuple(mod1(pair(u, v)) for v in vecs) for u in vecs)
    return DiscriminantForm(grp.invariant_factors, qv, bm, grp)


def orthogonal_sum(F1: DiscriminantForm, F2: DiscriminantForm) -> DiscriminantForm:
    k1, k2 = len(F1.invariant_factors), len(F2.invariant_factors)
    z = Fraction(0)
    bm = [list(r) + [z] * k2 for r in F1.b_matrix] + [[z] * k1 + list(r) for r in F2.b_matrix]
    return DiscriminantForm(F1.invariant_factors + F2.invariant_factors,
                            F1.q_values + F2.q_values, tuple(map(tuple, bm)))


def forms_isomorphic(F1: DiscriminantForm, F2: DiscriminantForm) -> bool:
    """Decide isometry of two finite quadratic forms by backtracking.

    Generators of ``F1`` are mapped one at a time onto elements of ``F2``
    with matching order, ``q`` value and pairings; the partial image must
    stay independent.  Intended for the small groups met in this library.
    """
    if merge_invariant_factors(F1.invariant_factors) != merge_invariant_factors(F2.invariant_factors):
        return False
    if F1.order != F2.order:
        return False
    k = len(F1.invariant_factors)
    if k == 0:
        return True
    elems = list(F2.elements())
    info = {e: (F2.element_order(e), F2.q(e)) for e in elems}
    gens1 = [tuple(int(i == j) for j in range(k)) for i in range(k)]

    def search(i: int, images: list, span: frozenset) -> bool:
        if i == k:
            return len(span) == F2.order
        d = F1.invariant_factors[i]
        target_q = F1.q_values[i]
        for h in elems:
            o, qh = info[h]
            if d % o or qh != target_q:
                continue
            if any(F2.b(h, images[j]) != F1.b_matrix[i][j] for j in range(i)):
                continue
            multiples = [F2.scale(s, h) for s in range(d)]
            new_span = frozenset(F2.add(x, m) for x in span for m in multiples)
            if len(new_span) != len(span) * d:
                continue
            if search(i + 1, images + [h], new_span):
                return True
        return False

    return search(0, [], frozenset([F2.zero()]))


# ---------------------------------------------------------------------------
# lengths and p-elementary invariants


def length(L: AnyLattice, q: int | None = None) -> int:
    return length_of(L.invariant_factors, q)


def is_p_elementary(L: AnyLattice, p: int) -> bool:
    return all(d == p for d in L.invariant_factors)


def delta_invariant(L: Lattice) -> int:
    if not is_p_elementary(L, 2):
        raise Not2Elementary(f"{L!r} is not 2-elementary")
    F = discriminant_form(L)
    if F.order <= DELTA_FULL_SCAN:
        values = (F.q(c) for c in F.elements())
    else:
        k = len(F.invariant_factors)
        basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        values = itertools.chain(
            (F.q(e) for e in basis),
            (F.q(F.add(x, y)) for x, y in itertools.combinations(basis, 2)),
        )
    return 0 if all(v.denominator == 1 for v in values) else 1


@dataclass(frozen=True)
class PElementaryInvariants:
    p: int
    r: int
    a: int
    delta: int | None
    signature: tuple[int, int]

    def __post_init__(self):
        if not 0 <= self.a <= self.r:
            raise ValueError("need 0 <= a <= r")
        if (self.delta is not None) != (self.p == 2):
            raise ValueError("delta is defined exactly when p = 2")

    @property
    def triple(self) -> tuple:
        return (self.r, self.a, self.delta) if self.p == 2 else (self.r, self.a)


def two_elementary_invariants(L: Lattice) -> PElementaryInvariants:
    delta = delta_invariant(L)
    return PElementaryInvariants(2, L.rank, length(L), delta, L.signature)


def p_elementary_invariants(L: Lattice, p: int) -> PElementaryInvariants:
    if p == 2:
        return two_elementary_invariants(L)
    if not is_p_elementary(L, p):
        raise ValueError(f"{L!r} is not {p}-elementary")
    return PElementaryInvariants(p, L.rank, length(L), None, L.signature)


def exists_hyperbolic_p_elementary(p: int, r: int, a: int) -> bool:
    """Existence of an even hyperbolic p-elementary lattice of rank r and length a (p odd)."""
    if p == 2:
        raise EvenPrime("criterion is stated for odd primes only")
    if a > r or r % 2 or a < 0:
        return False
    if a % 2 == 0:
        if r % 4 != 2:
            return False
    else:
        if p % 4 != (-1) ** (r // 2 - 1) % 4:
            return False
    if r % 8 != 2 and not (r > a > 0):
        return False
    return True


def overlattice_from_glue(L: Lattice, glue: Sequence[Sequence[Fraction]],
                          name: str | None = None) -> tuple[Lattice, list[tuple[Fraction, ...]]]:
    """Lattice spanned by ``L`` and rational glue vectors (in ``L`` coordinates).

    Returns the new lattice together with its basis expressed in the
    coordinates of ``L``.  Raises if the span is not integral or not even.
    """
    n = L.rank
    den = 1
    for v in glue:
        for x in v:
            den = _lcm(den, Fraction(x).denominator)
    rows = [[den * int(i == j) for j in range(n)] for i in range(n)]
    rows += [[int(Fraction(x) * den) for x in v] for v in glue]
    H = em.hermite_normal_form(rows)
    basis = [tuple(Fraction(x, den) for x in r) for r in H]
    G = L.gram
    gram = [[sum((u[i] * G[i][j] * v[j] for i in range(n) for j in range(n)), Fraction(0))
             for v in basis] for u in basis]
    if any(x.denominator != 1 for row in gram for x in row):
        raise ValueError("glue vectors do not span an integral lattice")
    return Lattice(tuple(tuple(int(x) for x in row) for row in gram), name), basis
