import itertools

import pytest

from k3lattice import catalog, glue
from k3lattice import exactmath as em
from k3lattice import lattice as lat
from k3lattice.errors import NotUnimodular, RankMismatch
from k3lattice.lattice import LatticeInvariants

ev = catalog.evaluate

SMALL_DISC = ["U", "U(2)", "U(3)", "U(4)", "U(5)", "U(9)", "<2>", "<-2>*2", "<-2>*4", "<-2>*6", "<2> + <-2>",
              "A2", "A2*2", "A2*3", "A2*4", "A3", "A4", "A6", "D4", "D4*2", "D5", "D6", "D8", "E6", "E6*2",
              "E7", "E8", "U + A2*2", "U(3) + A2*2", "U + U(3) + A2*2", "U + U(3) + A2", "U + U(3)",
              "A2(-1)", "U(3)*2", "H5", "K7", "U + H5", "U(2)*3", "N", "U + N", "D4 + A2", "U(2) + D4",
              "U + K7", "H5*2", "<-6>", "<-4> + <4>", "<-12>", "U(6)"]


def _brute_force_overlattices(L, p):
    """Index-p overlattices from every isotropic cyclic subgroup of order p."""
    F = lat.discriminant_form(L)
    subgroups = set()
    for c in F.elements():
        if F.element_order(c) == p and F.q(c) == 0:
            subgroups.add(frozenset(F.scale(k, c) for k in range(p)))
    out = []
    for H in subgroups:
        c = next(x for x in H if x != F.zero())
        W, _ = lat.overlattice_from_glue(L, [F.vector(c)])
        out.append(W.gram)
    return sorted(out)


@pytest.mark.parametrize("expr", SMALL_DISC)
def test_overlattices_match_brute_force(expr):
    L = ev(expr)
    assert abs(L.det) <= 81
    for p in sorted(em.factorize(L.det)) or [2]:
        found = glue.overlattices(L, p)
        assert sorted(W.gram for W in found) == _brute_force_overlattices(L, p)
        for W in found:
            assert abs(W.det) * p * p == abs(L.det)
            assert all(W.gram[i][i] % 2 == 0 for i in range(W.rank))


def test_overlattice_counts():
    assert glue.overlattices(ev("U"), 2) == []
    assert glue.overlattices(ev("A2*2"), 3) == []
    assert len(glue.overlattices(ev("<-2>*8"), 2)) == 71


def test_nikulin_from_all_ones_glue():
    L = ev("<-2>*8")
    F = lat.discriminant_form(L)
    ones = next(c for c in F.elements() if all(F.vector(c)[i] % 1 != 0 for i in range(8)))
    W, _ = lat.overlattice_from_glue(L, [F.vector(ones)])
    assert any(W.gram == V.gram for V in glue.overlattices(L, 2))
    assert lat.forms_isomorphic(lat.discriminant_form(W), lat.discriminant_form(ev("U(2)*3")))


def test_isotropic_subgroup_orders():
    F = lat.discriminant_form(ev("U(3)*2"))
    for H in glue.isotropic_subgroups(F, 9):
        assert H.order == 9
        assert all(F.q(x) == 0 for x in H.elements)
        assert all(F.b(x, y) == 0 for x in H.elements for y in H.elements)


# --- length obstruction ---------------------------------------------------


def test_order5_obstruction():
    v = glue.primitive_embedding_length_obstruction(ev("U + H5"), ev("U + U(5)*2"))
    assert v.status == glue.OBSTRUCTED
    assert v.reason == "(b) at q=5: 4 > 1 + 2"


def test_order4_obstruction():
    T = LatticeInvariants(6, (2, 4), (2,) * 6)
    v = glue.primitive_embedding_length_obstruction(T, catalog.evaluate_any("OmegaPerp(4)"))
    assert v.status == glue.OBSTRUCTED
    assert v.reason == "(b) at q=4: 4 > 0 + 2"


def test_e8_2_into_length_one():
    W = LatticeInvariants(13, (1, 12), (2,))
    v = glue.primitive_embedding_length_obstruction(ev("E8(2)"), W)
    assert v.status == glue.OBSTRUCTED
    assert v.reason == "(c) at p=2: 1 < 8 - 5"


def test_uu_into_omega_perp3_is_inconclusive_by_length():
    v = glue.primitive_embedding_length_obstruction(ev("U + U"), ev("OmegaPerp(3)"))
    assert v.status == glue.INCONCLUSIVE
    b = next(c for c in v.checks if c.test == "b" and c.prime == 3)
    assert (b.lhs, b.rhs) == (6, 6)


def test_signature_obstruction_and_rank_mismatch():
    v = glue.primitive_embedding_length_obstruction(ev("A2(-1)"), ev("U"))
    assert v.status == glue.OBSTRUCTED and v.reason.startswith("signature")
    with pytest.raises(RankMismatch):
        glue.primitive_embedding_length_obstruction(ev("E8"), ev("U"))


def test_unimodular_summand_keeps_lengths():
    for e in ["U + U(5)*2", "OmegaPerp(3)", "U(2) + E8(2)"]:
        W = ev(e)
        WU = lat.direct_sum(W, ev("U"))
        for q in (2, 3, 4, 5, 8, 9):
            assert lat.length(WU, q) == lat.length(W, q)


# --- split off / direct summand -------------------------------------------


def test_split_off_examples():
    r = glue.split_off_unimodular(ev("U + U"), "OmegaPerp(3)")
    assert (r.rank, r.signature, r.exists) == (6, (1, 5), False)
    assert r.invariant_factors == (3,) * 6
    assert glue.split_off_unimodular(ev("U"), "U + E8(2)").exists is True
    assert glue.split_off_unimodular(ev("U"), "U(2) + E8(2)").exists is False
    with pytest.raises(NotUnimodular):
        glue.split_off_unimodular(ev("U(2)"), "U + E8(2)")


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_t_lattices_embed(n):
    v = glue.direct_summand_embedding(f"T({n})", "OmegaPerp(3)")
    assert v.status == glue.EMBEDDED
    assert glue.verify_primitive_embedding(ev(f"T({n})"), ev("OmegaPerp(3)"), v.witness)


def test_direct_summand_negative():
    assert glue.direct_summand_embedding("U + U", "OmegaPerp(3)").status == glue.INCONCLUSIVE


PIECES = ["U", "U(2)", "U(3)", "A2", "E8(2)", "<-2>", "D4", "H5", "E6", "U(5)"]


def test_soundness_over_catalog_pairs():
    exprs = [" + ".join(c) for k in (1, 2, 3) for c in itertools.combinations_with_replacement(PIECES, k)]
    lattices = {e: ev(e) for e in exprs}
    lattices = {e: L for e, L in lattices.items() if L.rank <= 12}
    embedded = 0
    for s, S in lattices.items():
        for w, W in lattices.items():
            if S.rank > W.rank:
                continue
            if glue.direct_summand_embedding(s, w).status == glue.EMBEDDED:
                embedded += 1
                assert glue.primitive_embedding_length_obstruction(S, W).status != glue.OBSTRUCTED, (s, w)
    assert embedded > 100
