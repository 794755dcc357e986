"""Holomorphic Lefschetz systems over cyclotomic fields.

Elements of Q(zeta_m) are coefficient vectors in the power basis
``1, zeta, ..., zeta^(phi(m)-1)``.  Polynomials are lists of coefficients,
lowest degree first.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import exactmath as em
from .errors import DegenerateType, DivisionByZero, OutOfRange

DEFAULT_BOUND = 24
DEFAULT_H_RANGE = (-24, 24)
CONVENTIONS = ("matrix", "fraction")


# ---------------------------------------------------------------------------
# polynomials over Q


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    r = [Fraction(x) for x in a]
    _trim(r)
    q = [Fraction(0)] * max(len(r) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(r) >= len(b):
        c = r[-1] / lead
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] -= c * y
        _trim(r)
    return _trim(q), r


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial."""
    if m < 1:
        raise OutOfRange("m must be positive")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num, rem = poly_divmod(num, cyclotomic_polynomial(d))
            assert not rem
    return tuple(int(x) for x in num)


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


# ---------------------------------------------------------------------------
# the field Q(zeta_m)


@dataclass(frozen=True)
class Cyclotomic:
    m: int
    coeffs: tuple[Fraction, ...]

    @classmethod
    def from_poly(cls, m: int, p: Sequence) -> "Cyclotomic":
        phi = cyclotomic_polynomial(m)
        _, r = poly_divmod(p, phi)
        n = len(phi) - 1
        return cls(m, tuple(r) + (Fraction(0),) * (n - len(r)))

    @classmethod
    def const(cls, m: int, c) -> "Cyclotomic":
        return cls.from_poly(m, [Fraction(c)])

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "Cyclotomic":
        return cls.from_poly(m, [0] * (k % m) + [1])

    def _check(self, other: "Cyclotomic"):
        if self.m != other.m:
            raise ValueError("elements of different cyclotomic fields")

    def __add__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.const(self.m, other)
        self._check(other)
        return Cyclotomic(self.m, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            c = Fraction(other)
            return Cyclotomic(self.m, tuple(c * x for x in self.coeffs))
        self._check(other)
        return Cyclotomic.from_poly(self.m, poly_mul(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise DivisionByZero("zero has no inverse")
        # extended Euclid on (self, Phi_m); Phi_m is irreducible so gcd is constant
        r0, r1 = [Fraction(x) for x in cyclotomic_polynomial(self.m)], _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _sub(s0, poly_mul(q, s1))
        return Cyclotomic.from_poly(self.m, [x / r1[0] for x in s1])

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    def to_complex(self, k: int = 1) -> complex:
        """Image under zeta -> exp(2 pi i k / m); for sanity checks only."""
        import cmath

        z = cmath.exp(2j * cmath.pi * k / self.m)
        return sum(float(c) * z ** i for i, c in enumerate(self.coeffs))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def _sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def cyc_add(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a + b


def cyc_mul(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a * b


def cyc_inv(a: Cyclotomic) -> Cyclotomic:
    return a.inverse()


# ---------------------------------------------------------------------------
# local contributions


def max_type(m: int) -> int:
    return (m - 1) // 2


def local_denominator(m: int, t: int, convention: str = "matrix") -> Cyclotomic:
    """det(I - A_{m,t}) for the chosen indexing convention."""
    if convention == "matrix":
        e1, e2 = t + 1, m - t
    elif convention == "fraction":
        e1, e2 = t, m - t + 1
    else:
        raise ValueError(f"unknown convention {convention!r}")
    one = Cyclotomic.const(m, 1)
    return (one - Cyclotomic.zeta(m, e1)) * (one - Cyclotomic.zeta(m, e2))


def point_contribution(m: int, t: int, convention: str = "matrix") -> Cyclotomic:
    if m < 3:
        raise OutOfRange("isolated fixed point types need m >= 3")
    if not 1 <= t <= max_type(m):
        raise OutOfRange(f"type t={t} outside 1..{max_type(m)} for m={m}")
    d = local_denominator(m, t, convention)
    if d.is_zero():
        raise DegenerateType(f"det(I - A) vanishes for m={m}, t={t} ({convention})")
    return d.inverse()


def curve_contribution(m: int, g: int) -> Cyclotomic:
    if m < 2:
        raise OutOfRange("m must be at least 2")
    one = Cyclotomic.const(m, 1)
    z = Cyclotomic.zeta(m)
    return (one + z) * (1 - g) / ((one - z) * (one - z))


def lefschetz_number(m: int) -> Cyclotomic:
    if m < 2:
        raise OutOfRange("m must be at least 2")
    return Cyclotomic.const(m, 1) + Cyclotomic.zeta(m, m - 1)


# ---------------------------------------------------------------------------
# systems and their nonnegative solutions


@dataclass(frozen=True)
class FixedLocusHypothesis:
    m: int
    unknown_types: tuple[int, ...]
    forced_zero_types: tuple[int, ...] = ()
    h: int | tuple[int, int] = 0
    convention: str = "matrix"

    def __post_init__(self):
        object.__setattr__(self, "unknown_types", tuple(sorted(set(self.unknown_types))))
        object.__setattr__(self, "forced_zero_types", tuple(sorted(set(self.forced_zero_types))))
        if set(self.unknown_types) & set(self.forced_zero_types):
            raise ValueError("a type cannot be both unknown and forced to zero")
        lo, hi = self.h_range
        if lo > hi:
            raise ValueError("empty h range")

    @property
    def h_range(self) -> tuple[int, int]:
        return (self.h, self.h) if isinstance(self.h, int) else tuple(self.h)


@dataclass(frozen=True)
class LefschetzSystem:
    m: int
    unknowns: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    h_range: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {"m": self.m, "unknowns": list(self.unknowns),
                "rows": [[str(x) for x in row] + [str(c)] for row, c in zip(self.matrix, self.rhs)]}


def build_system(hyp: FixedLocusHypothesis) -> LefschetzSystem:
    """Coefficient equations of sum n_t a(t) + h b = L(eta) in the power basis."""
    m = hyp.m
    cols = [point_contribution(m, t, hyp.convention) for t in hyp.unknown_types]
    cols.append(curve_contribution(m, 0))
    names = tuple(f"n{t}" for t in hyp.unknown_types) + ("h",)
    rhs = lefschetz_number(m).coeffs
    rows = tuple(tuple(c.coeffs[i] for c in cols) for i in range(len(rhs)))
    return LefschetzSystem(m, names, rows, rhs, hyp.h_range)


def solve_nonneg(sys: LefschetzSystem, bound: int = DEFAULT_BOUND,
                 h_range: tuple[int, int] | None = None) -> list[dict[str, int]]:
    """Integer solutions with 0 <= n_t <= bound and h in its range.

    The affine solution space is computed exactly; only the free variables
    are enumerated over their boxes.  Output is sorted lexicographically in
    the order of ``sys.unknowns``.
    """
    names = sys.unknowns
    n = len(names)
    if h_range is None:
        h_range = sys.h_range or DEFAULT_H_RANGE
    boxes = [(h_range[0], h_range[1]) if v == "h" else (0, bound) for v in names]
    rows = [list(r) + [c] for r, c in zip(sys.matrix, sys.rhs)]
    R, pivots = em.rref(rows) if rows else ([], [])
    if n in pivots:
        return []
    free = [c for c in range(n) if c not in pivots]
    sols = []
    for vals in itertools.product(*[range(boxes[f][0], boxes[f][1] + 1) for f in free]):
        x = [0] * n
        for f, v in zip(free, vals):
            x[f] = v
        ok = True
        for i, c in enumerate(pivots):
            v = R[i][n] - sum((R[i][f] * x[f] for f in free), Fraction(0))
            if v.denominator != 1 or not boxes[c][0] <= v <= boxes[c][1]:
                ok = False
                break
            x[c] = int(v)
        if ok:
            sols.append(tuple(x))
    sols.sort()
    return [dict(zip(names, s)) for s in sols]


def brute_force_nonneg(sys: LefschetzSystem, bound: int = DEFAULT_BOUND,
                       h_range: tuple[int, int] | None = None) -> list[dict[str, int]]:
    """Scan the whole box; slow, used as an independent check."""
    names = sys.unknowns
    if h_range is None:
        h_range = sys.h_range or DEFAULT_H_RANGE
    ranges = [range(h_range[0], h_range[1] + 1) if v == "h" else range(bound + 1) for v in names]
    out = []
    for x in itertools.product(*ranges):
        if all(sum(a * v for a, v in zip(row, x)) == c for row, c in zip(sys.matrix, sys.rhs)):
            out.append(dict(zip(names, x)))
    return out


# ---------------------------------------------------------------------------
# printed integer systems

FIXTURE_ENV = "K3LATTICE_FIXTURES"


def fixture_path(path: str | Path | None = None) -> Path | None:
    import os

    p = path or os.environ.get(FIXTURE_ENV)
    return Path(p) if p else None


def load_fixtures(path: str | Path | None = None) -> dict:
    p = fixture_path(path)
    if p is not None:
        return json.loads(Path(p).read_text())
    return json.loads(resources.files("k3lattice").joinpath("data/lefschetz_fixtures.json").read_text())


def printed_system(which: str, path: str | Path | None = None) -> LefschetzSystem:
    data = load_fixtures(path)["systems"]
    if which not in data:
        raise OutOfRange(f"no printed system {which!r}; known: {sorted(data)}")
    rec = data[which]
    rows = rec["rows"]
    return LefschetzSystem(
        rec["m"], tuple(rec["unknowns"]),
        tuple(tuple(Fraction(x) for x in r[:-1]) for r in rows),
        tuple(Fraction(r[-1]) for r in rows),
    )


def check_printed_system(which: str, bound: int = DEFAULT_BOUND,
                         path: str | Path | None = None) -> list[dict[str, int]]:
    return solve_nonneg(printed_system(which, path), bound)
