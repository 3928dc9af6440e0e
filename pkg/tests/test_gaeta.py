from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import rr_rel
from p2gaeta.chern import ChernCharacter, LogChern, euler, ideal_points, rel_euler, serre_dual, tangent, to_log
from p2gaeta.cones import is_tangential, is_triangular
from p2gaeta.exceptional import is_above_dlp
from p2gaeta.gaeta import (
    BettiTable,
    Case,
    InternalInconsistency,
    NotPure,
    OutOfRange,
    ResolutionShape,
    UnsupportedRank,
    decompose_betti,
    divisorial_gaeta,
    exceptional_resolution,
    gaeta_case,
    gaeta_numbers,
    gaeta_resolution,
    endpoint_inequality_holds,
    minimal_twist,
    secondary_edge_resolution,
)
from p2gaeta.gradecoh import ideal_betti, sample_points

U = LogChern(3, Fraction(2, 3), Fraction(17, 9))
UD = serre_dual(U)
shape = ResolutionShape.from_terms


def points(n):
    return LogChern(1, 0, n)


def test_minimal_twist_examples():
    assert minimal_twist(points(6)) == 3
    assert minimal_twist(points(12)) == 4
    assert minimal_twist(U) == 0


def test_gaeta_resolution_examples():
    assert gaeta_resolution(U) == shape([(0, 1), (-1, 6)], [(-2, 4)])
    assert str(gaeta_resolution(U)) == "O(-2)^4 -> O(0) + O(-1)^6"
    assert gaeta_resolution(points(6)) == shape([(-3, 4)], [(-4, 3)])
    assert gaeta_resolution(points(12)) == shape([(-4, 3)], [(-6, 2)])
    assert gaeta_resolution(UD) == shape([(-5, 6)], [(-7, 1), (-6, 2)])
    # Euler sequence 0 -> O(-5) -> O(-4)^3 -> T(-5) -> 0
    assert gaeta_resolution(tangent(-5)) == shape([(-4, 3)], [(-5, 1)])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 18, 21, 24])
def test_points_shape_matches_sampled_ideal(n):
    # second route: the Betti table of actual general points over F_p
    sampled = ideal_betti(sample_points("general", n, seed=n))
    assert gaeta_resolution(points(n)).betti == sampled


def test_gaeta_case_examples():
    tri = gaeta_case(U)
    assert tri.case is Case.POSITIVE and tri.controlling.gamma == 0
    assert tri.F == (ChernCharacter(1, 0, 0), 1)
    tri = gaeta_case(points(12))
    assert tri.case is Case.EXCEPTIONAL
    assert tri.controlling.gamma == Fraction(7, 2)
    tri = gaeta_case(UD)
    assert tri.case is Case.EXCEPTIONAL and tri.controlling.gamma == Fraction(22, 5)
    assert [(t.slope, t.exponent) for t in tri.left] == [(-7, 1)]
    assert [(t.slope, t.exponent) for t in tri.right] == [(Fraction(-9, 2), 2)]


def test_exceptional_resolution_examples():
    left, right = exceptional_resolution(U)
    assert [(t.slope, t.exponent) for t in right] == [(-1, 6), (0, 1)]
    assert [(t.slope, t.exponent) for t in left] == [(-2, 4)]
    left, right = exceptional_resolution(points(6))
    assert all(t.rank == 1 for t in left + right)
    assert [(t.slope, t.exponent) for t in left] == [(-4, 3)]
    assert [(t.slope, t.exponent) for t in right] == [(-3, 4)]


def test_decompose_examples():
    m = decompose_betti(UD)
    assert {k: int(v) for k, v in m.numbers.items()} == {"n1": 0, "n2": 6, "l1": 0, "l2": -2, "j1": 1, "j2": 0}
    m = decompose_betti(points(12))
    assert m.total_shape == shape([(-4, 3)], [(-6, 2)])
    assert m.block_B.betti.entries == {(1, -4): 3}
    assert m.block_B.character == ChernCharacter(3, -12, 24)
    assert m.block_A_shape.betti.entries == {(2, -6): 2}
    # the special-point B-block T(-5) has the same generators plus one cancelling syzygy
    assert gaeta_resolution(tangent(-5)).betti.entries == {(1, -4): 3, (2, -5): 1}
    assert divisorial_gaeta(points(12)).betti == gaeta_resolution(tangent(-5)).betti + m.block_A_shape.betti \
        + BettiTable({(1, -5): 1})


def test_decompose_line_bundle_gamma():
    # gamma = 2 with alpha = 1, beta = 3: F = O(-3)^chi(O(-3), I_6), W = O(-4)^(-chi(O(-1), I_6))
    m = decompose_betti(points(6))
    assert m.case is Case.EXCEPTIONAL
    assert m.block_B.betti.entries == {(1, -3): 4}
    assert m.block_A_shape.betti.entries == {(2, -4): 3}
    assert m.total_shape.betti == m.block_B.betti + m.block_A_shape.betti


def test_divisorial_examples():
    assert divisorial_gaeta(points(6)) == shape([(-3, 1), (-2, 1)], [(-5, 1)])
    assert divisorial_gaeta(points(12)) == shape([(-5, 1), (-4, 3)], [(-6, 2), (-5, 1)], [-5])
    with pytest.raises(NotPure):
        divisorial_gaeta(points(7))
    with pytest.raises(OutOfRange):
        divisorial_gaeta(points(3))


def test_secondary_edge_examples():
    assert secondary_edge_resolution(U) == shape([(-5, 6)], [(-7, 1), (-6, 2)])
    with pytest.raises(UnsupportedRank):
        secondary_edge_resolution(points(5))
    assert gaeta_resolution(serre_dual(serre_dual(U))) == gaeta_resolution(U)


def test_shape_rejects_bad_data():
    with pytest.raises(InternalInconsistency):
        ResolutionShape(((0, 1),), (), ChernCharacter(2, 0, 0))
    with pytest.raises(InternalInconsistency):
        shape([(-1, 1)], [(-1, 1)])
    with pytest.raises(ValueError):
        BettiTable({(3, 0): 1})


def test_betti_render():
    text = gaeta_resolution(points(6)).betti.render()
    assert text.splitlines()[-1].split() == ["3", "|", "4", "3"]


def test_json_layout():
    assert gaeta_resolution(U).to_json() == {"syzygies": [[-2, 4]], "generators": [[0, 1], [-1, 6]]}


def test_case_consistency_for_points():
    for n in range(1, 201):
        xi = points(n)
        tri = gaeta_case(xi)
        res = gaeta_resolution(xi)
        pure = len(res.generators) == 1 and len(res.syzygies) == 1
        assert (tri.case is Case.EXCEPTIONAL) == (tri.chi_gamma == 0)
        family = is_triangular(n) is not None or is_tangential(n) is not None
        assert pure == family
        assert pure == (tri.case is Case.EXCEPTIONAL and tri.controlling.bundle.rank <= 2)


# -- random characters -----------------------------------------------------------


@st.composite
def sheaf_characters(draw):
    r = draw(st.integers(1, 6))
    c1 = draw(st.integers(0, r - 1))
    chi = draw(st.integers(-40, 3))
    xi = to_log(ChernCharacter(r, c1, chi - r - Fraction(3 * c1, 2)))
    assume(is_above_dlp(xi))
    assume(abs(minimal_twist(xi)) <= 10)
    return xi


@settings(max_examples=500, deadline=None)
@given(sheaf_characters())
def test_betti_additivity(xi):
    m = decompose_betti(xi)
    assert m.total_shape.betti == m.block_B.betti + m.block_A_shape.betti
    n, l, j = gaeta_numbers(xi, m.d)
    nums = m.numbers
    assert (n, l, j) == (nums["n1"] + nums["n2"], nums["l1"] + nums["l2"], nums["j1"] + nums["j2"])
    assert m.total_shape == gaeta_resolution(xi)


@settings(max_examples=300, deadline=None)
@given(sheaf_characters())
def test_character_conservation_and_signs(xi):
    res = gaeta_resolution(xi)
    assert res.character == xi.ch
    assert all(m >= 0 for _, m in res.generators + res.syzygies)
    left, right = exceptional_resolution(xi)
    total = ChernCharacter(0, 0, 0)
    for t in right:
        total = total + t.character * t.exponent
    for t in left:
        total = total - t.character * t.exponent
    assert total == xi.ch
    assert all(t.exponent > 0 for t in left + right)


@settings(max_examples=300, deadline=None)
@given(sheaf_characters())
def test_case_sign_and_thresholds(xi):
    tri = gaeta_case(xi)
    g = tri.controlling.bundle
    # oracle: chi(E_{-gamma}, U) from the log formula
    s = rr_rel((g.rank, -g.slope, g.discriminant), (xi.r, xi.mu, xi.delta))
    expected = Case.POSITIVE if s > 0 else Case.NEGATIVE if s < 0 else Case.EXCEPTIONAL
    assert tri.case is expected
    assert tri.block_b - tri.block_a == xi.ch
    assert endpoint_inequality_holds(xi, tri)


@settings(max_examples=200, deadline=None)
@given(sheaf_characters())
def test_minimal_twist_is_first_positive_chi(xi):
    d = minimal_twist(xi)
    assert euler(xi.ch.twist(d)) > 0
    assert euler(xi.ch.twist(d - 1)) <= 0
    assert rel_euler(LogChern(1, -d, 0), xi) == euler(xi.ch.twist(d))
