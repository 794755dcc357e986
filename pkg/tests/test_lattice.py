from fractions import Fraction

import pytest
from hypothesis import given, settings

from k3lattice import catalog
from k3lattice import exactmath as em
from k3lattice import lattice as lat
from k3lattice.errors import DegenerateLattice, EvenPrime, Not2Elementary, OddLattice, ZeroScale

from strategies import even_lattices

ev = catalog.evaluate


def test_constructor_rejects_bad_grams():
    with pytest.raises(OddLattice):
        lat.Lattice(((1,),))
    with pytest.raises(DegenerateLattice):
        lat.Lattice(((0, 0), (0, 2)))
    with pytest.raises(DegenerateLattice):
        lat.Lattice(())


def test_direct_sum_and_rescale():
    L = ev("U + U(3) + A2*2")
    assert L.rank == 8 and abs(L.det) == 81
    assert ev("U(5)").gram == ((0, 5), (5, 0))
    assert abs(ev("E8(2)").det) == 2 ** 8
    assert ev("A2").signature == (0, 2)
    assert lat.rescale(ev("A2"), -1).signature == (2, 0)
    with pytest.raises(ZeroScale):
        lat.rescale(ev("U"), 0)


def test_discriminant_groups():
    assert ev("U").invariant_factors == ()
    assert ev("U(5)").invariant_factors == (5, 5)
    assert ev("E8(2)").invariant_factors == (2,) * 8


def test_discriminant_form_values():
    F = lat.discriminant_form(ev("A2"))
    assert F.invariant_factors == (3,)
    assert F.q_values[0] in (Fraction(-2, 3) % 2, Fraction(4, 3))
    F = lat.discriminant_form(ev("<2>"))
    assert F.q_values == (Fraction(1, 2),)


def test_lengths():
    assert lat.length(ev("K7"), 7) == 1
    assert lat.length(ev("U(3)")) == 2
    assert lat.length(catalog.evaluate_any("OmegaPerp(4)"), 4) == 4


def test_p_elementary():
    assert lat.is_p_elementary(ev("E8(2)"), 2)
    S = ev("U + H5")
    assert lat.is_p_elementary(S, 5) and lat.length(S) == 1
    M = ev("U(3) + <2>")
    assert not any(lat.is_p_elementary(M, p) for p in (2, 3))


def test_delta():
    assert lat.delta_invariant(ev("U(2) + E8(2)")) == 0
    assert lat.delta_invariant(ev("<2> + E8(2)")) == 1
    assert lat.delta_invariant(ev("U + N")) == 0
    with pytest.raises(Not2Elementary):
        lat.delta_invariant(ev("A2"))


def test_two_elementary_invariants():
    assert lat.two_elementary_invariants(ev("U + N")).triple == (10, 6, 0)
    assert lat.two_elementary_invariants(ev("<2> + E8(2)")).triple == (9, 9, 1)
    assert lat.two_elementary_invariants(ev("U + E8(2)")).triple == (10, 8, 0)


def test_delta_after_adding_minus_two():
    for e in ["U + N", "U(2) + E8(2)", "U + E8(2)", "U + D8 + D4", "<2> + E8(2)"]:
        L = ev(e)
        inv = lat.two_elementary_invariants(L)
        M = lat.direct_sum(L, ev("<-2>"))
        out = lat.two_elementary_invariants(M)
        assert out.delta == 1 and out.r == inv.r + 1 and out.a == inv.a + 1


def test_exists_hyperbolic_p_elementary():
    assert lat.exists_hyperbolic_p_elementary(3, 6, 6) is False
    assert lat.exists_hyperbolic_p_elementary(7, 4, 3) is True
    assert lat.exists_hyperbolic_p_elementary(11, 2, 2) is True
    with pytest.raises(EvenPrime):
        lat.exists_hyperbolic_p_elementary(2, 2, 2)


@pytest.mark.parametrize("expr,p", [("U(7) + K7", 7), ("U(11)", 11), ("H5", 5), ("H5 + E8", 5),
                                    ("U(3) + A2", 3), ("U + A2", 3), ("U(5)", 5), ("U(3)", 3),
                                    ("U + E6", 3), ("U(3) + E6", 3)])
def test_hyperbolic_witnesses_are_consistent(expr, p):
    L = ev(expr)
    assert L.signature[0] == 1 and lat.is_p_elementary(L, p)
    assert lat.exists_hyperbolic_p_elementary(p, L.rank, lat.length(L))


def test_nikulin_form_matches_u2_cubed():
    F = lat.discriminant_form(ev("N"))
    G = lat.discriminant_form(ev("U(2)*3"))
    assert lat.forms_isomorphic(F, G)
    assert not lat.forms_isomorphic(F, lat.discriminant_form(ev("<2>*6")))


def test_forms_isomorphic_sign():
    A2 = lat.discriminant_form(ev("A2"))
    E6 = lat.discriminant_form(ev("E6"))
    # A2 + E6 glues to E8, so the two forms are opposite
    assert lat.forms_isomorphic(A2, E6.negated())
    assert not lat.forms_isomorphic(A2, E6)
    assert not lat.forms_isomorphic(A2, A2.negated())


def test_json_round_trip():
    L = ev("K7")
    assert lat.Lattice.from_json(L.to_json()) == L


def test_complement_determinants_in_k3_lattice():
    # E8(2) sits in E8 + E8 as the anti-diagonal; its complement is the diagonal, also E8(2)
    E8 = ev("E8")
    n = 8
    big = lat.direct_sum(ev("U*3"), E8, E8)
    anti = [[0] * 6 + [int(i == j) for j in range(n)] + [-int(i == j) for j in range(n)] for i in range(n)]
    diag = [[0] * 6 + [int(i == j) for j in range(n)] + [int(i == j) for j in range(n)] for i in range(n)]
    g = lambda rows: em.matmul(em.matmul(rows, big.gram), em.transpose(rows))
    S, T = lat.Lattice(g(anti)), lat.Lattice(g(diag))
    assert S.gram == ev("E8(2)").gram
    assert abs(S.det) == abs(T.det)
    assert all(x == 0 for x in sum(em.matmul(em.matmul(anti, big.gram), em.transpose(diag)), []))


# --- property tests -------------------------------------------------------


@settings(max_examples=1000, deadline=None)
@given(even_lattices(max_rank=8))
def test_group_order_equals_det(L):
    F = lat.discriminant_form(L)
    assert F.order == abs(L.det)
    assert F.check_consistency()


def _primes(*Ls):
    return {p for L in Ls for d in L.invariant_factors for p in em.factorize(d)}


@settings(max_examples=1000, deadline=None)
@given(even_lattices(max_rank=4), even_lattices(max_rank=4))
def test_length_additive_under_sum(L1, L2):
    M = lat.direct_sum(L1, L2)
    assert abs(M.det) == abs(L1.det) * abs(L2.det)
    for p in _primes(L1, L2):
        assert lat.length(M, p) == lat.length(L1, p) + lat.length(L2, p)


def _pair(G, u, v):
    return sum((u[i] * G[i][j] * v[j] for i in range(len(u)) for j in range(len(v))), Fraction(0))


@settings(max_examples=1000, deadline=None)
@given(even_lattices(max_rank=4), even_lattices(max_rank=4))
def test_sum_form_restricts_to_summands(L1, L2):
    M = lat.direct_sum(L1, L2)
    F1, F2 = lat.discriminant_form(L1), lat.discriminant_form(L2)
    G = M.gram
    n1, n2 = L1.rank, L2.rank
    vecs1 = [tuple(v) + (0,) * n2 for v in F1.group.generator_coords]
    vecs2 = (0,) * n1
    vecs2 = [vecs2 + tuple(v) for v in F2.group.generator_coords]
    for vecs, F in ((vecs1, F1), (vecs2, F2)):
        for i, v in enumerate(vecs):
            # v lies in the dual of M
            assert all(x.denominator == 1 for x in em.matvec(G, v))
            assert lat.mod2(_pair(G, v, v)) == F.q_values[i]
            for j, w in enumerate(vecs):
                assert lat.mod1(_pair(G, v, w)) == F.b_matrix[i][j]
    for v in vecs1:
        for w in vecs2:
            assert lat.mod1(_pair(G, v, w)) == 0
    assert lat.discriminant_form(M).order == F1.order * F2.order
