import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etalab.conjugacy import conj_class, sl2z_is_torsion
from etalab.groups import (
    BudgetExceeded,
    ExceedsCap,
    ball,
    ball_count,
    cyclic,
    free_group,
    heisenberg3,
    integer_lattice,
    psi,
    sl2z,
    sphere_counts,
    trace,
    word_length,
)
from etalab.growth import (
    GrowthConstants,
    class_ball_count,
    estimate_growth_rate,
    growth_rate,
    sigma_constants,
)


# --- word length and balls ----------------------------------------------------


def test_word_length_lattice():
    z2 = integer_lattice(2)
    assert word_length(z2, z2.element("aaB")) == 3


@pytest.mark.parametrize("G", [integer_lattice(1), free_group(2), sl2z(), heisenberg3()])
def test_identity_has_length_zero(G):
    assert word_length(G, G.identity) == 0


def test_sl2z_x_squared(oracle):
    G = sl2z()
    x2 = G.element("xx")
    # x^2 = -I is not a generator, so its length is not 1
    assert x2.value == (-1, 0, 0, -1)
    assert x2.value not in {G.element(s).value for s in G.generators}
    assert word_length(G, x2) == oracle["sl2z_word_length_x2"] == 2


def test_word_length_cap_marker():
    G = integer_lattice(1)
    r = word_length(G, G.element("a" * 9), cap=3)
    assert isinstance(r, ExceedsCap) and str(r) == "> 3"


def test_ball_counts_trivial():
    assert ball_count(integer_lattice(1), 3) == 7
    assert ball_count(integer_lattice(2), 2) == 13


def test_free_ball_counts(oracle):
    F = free_group(2)
    assert ball_count(F, 2) == oracle["f2_ball_2"] == 17
    for n, c in oracle["f2_ball_counts_4_12"][:5]:
        assert ball_count(F, n) == c


def test_budget_exceeded_reports_partial_radius():
    F = free_group(2)
    with pytest.raises(BudgetExceeded) as exc:
        ball_count(F, 10, budget=1000)
    assert exc.value.reached_radius == 5  # |B_5| = 485, |B_6| = 1457


def test_heisenberg_sphere_growth_is_polynomial():
    fit = estimate_growth_rate([(n, ball_count(heisenberg3(), n)) for n in range(4, 11)])
    assert fit.subexponential


@given(st.lists(st.sampled_from("aAbB"), max_size=12), st.lists(st.sampled_from("aAbB"), max_size=12))
@settings(max_examples=60, deadline=None)
def test_free_group_axioms(u, v):
    F = free_group(2)
    g, h = F.element(u), F.element(v)
    assert F.multiply(g, F.invert(g)).value == F.identity_value
    assert F.invert(F.multiply(g, h)).value == F.multiply(F.invert(h), F.invert(g)).value


@given(st.lists(st.sampled_from("xXyY"), max_size=14))
@settings(max_examples=60, deadline=None)
def test_psi_is_a_homomorphism_to_z12(w):
    G = sl2z()
    g = G.element(w)
    # psi of a word is the sum of generator values, and it respects inverses
    assert (psi(g) + psi(G.invert(g))) % 12 == 0
    assert psi(G.multiply(g, G.element("x"))) == (psi(g) + 3) % 12


# --- psi table and conjugacy ----------------------------------------------------


def test_psi_table(oracle):
    G = sl2z()
    table = {w: psi(G.element(w)) for w in oracle["sl2z_psi_table"]}
    assert table == oracle["sl2z_psi_table"]


def test_torsion_classes():
    G = sl2z()
    assert sl2z_is_torsion(G.element("x")) and sl2z_is_torsion(G.element("y"))
    assert not sl2z_is_torsion(G.element("xy"))
    cx = conj_class(G, "x")
    assert cx.member(G.element("yxY"))
    assert not cx.member(G.element("xxx"))  # same trace, psi 9
    assert trace(G.element("xxx")) == trace(G.element("x"))


def test_free_class_by_cyclic_reduction():
    F = free_group(2)
    c = conj_class(F, "abAB")
    assert c.member(F.element("bABa"))  # rotation
    assert c.member(F.element("aabABA"))
    assert not c.member(F.element("baBA"))  # inverse commutator


def test_free_commutator_class_counts(oracle):
    F = free_group(2)
    c = conj_class(F, "abAB")
    assert class_ball_count(F, c, 4) == oracle["f2_commutator_class_ball_4"]
    assert class_ball_count(F, c, 6) == oracle["f2_commutator_class_ball_6"]


def test_class_ball_count_singletons():
    Z = integer_lattice(1)
    five = conj_class(Z, "aaaaa")
    assert class_ball_count(Z, five, 4) == 0
    assert class_ball_count(Z, five, 5) == 1
    for G in (Z, free_group(2), sl2z()):
        e = conj_class(G, G.identity)
        assert all(class_ball_count(G, e, n) == 1 for n in range(4))


def test_heisenberg_central_classes():
    H = heisenberg3()
    z = H.multiply(H.multiply(H.element("x"), H.element("y")), H.multiply(H.element("X"), H.element("Y")))
    assert conj_class(H, z).member(z)
    cx = conj_class(H, "x")
    assert cx.member(H.conjugate(H.element("y"), H.element("x")))


# --- growth -------------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2, 3])
def test_lattice_growth_subexponential(d):
    fit = growth_rate(integer_lattice(d))
    assert fit.rate == 0 and fit.subexponential


def test_free_growth_within_two_percent(oracle):
    fit = estimate_growth_rate([tuple(p) for p in oracle["f2_ball_counts_4_12"]])
    assert abs(fit.rate - math.log(3)) <= 0.02 * math.log(3)
    assert growth_rate(free_group(2)).rate == pytest.approx(fit.rate, rel=1e-12)


def test_growth_edge_cases():
    assert estimate_growth_rate([(1, 7), (2, 7), (3, 7)]).rate == 0
    with pytest.raises(ValueError):
        estimate_growth_rate([(1, 3), (2, 9)])
    assert growth_rate(cyclic(5), (2, 6)).subexponential


def test_sigma_formulas_exact():
    L3 = math.log(3)
    assert sigma_constants(0.0, 0.0, 0.0, 1.0) == (0.0, 0.0, 0.0)
    sg, su, sr = sigma_constants(L3, 0.0, L3, 1.0)
    assert sg == 2 * L3 and sr == 2 * L3 and su == 0.0
    assert sigma_constants(L3, L3, 0.0, 0.5) == (4 * L3, 4 * L3, 0.0)
    with pytest.raises(ValueError):
        sigma_constants(1.0, 0.0, 0.0, 0.0)
    gc = GrowthConstants.build(L3, R=L3)
    assert gc.to_dict()["sigma_R"] == 2 * L3


def test_ball_is_deterministic():
    assert [g.value for g in ball(sl2z(), 3)] == [g.value for g in ball(sl2z(), 3)]
    assert sphere_counts(free_group(2), 3) == [1, 4, 12, 36]
