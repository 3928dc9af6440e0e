import dataclasses
from fractions import Fraction

import pytest

from oracles import rr_rel
from p2gaeta.chern import ChernCharacter, ideal_points, pairing, to_log
from p2gaeta.cones import (
    SUPPORTED_TABLES,
    CurveClass,
    DivisorClass,
    UnsupportedN,
    conjecture_check,
    destabilizer_character,
    dual_curve_certificate,
    eff_primary_edge,
    interpolating_shape,
    is_tangential,
    is_triangular,
    mov_primary_edge,
    printed_interpolating_shape,
    sbld_table,
    table_consistency,
    wall_value,
)
from p2gaeta.gaeta import Case, gaeta_case


def test_number_families():
    assert [n for n in range(1, 60) if is_triangular(n)] == [1, 3, 6, 10, 15, 21, 28, 36, 45, 55]
    assert [n for n in range(1, 200) if is_tangential(n)] == [4, 12, 24, 40, 60, 84, 112, 144, 180]
    assert is_triangular(0) is None and is_tangential(0) is None


@pytest.mark.parametrize("r", range(3, 11))
def test_mov_edge_triangular(r):
    n = r * (r + 1) // 2
    edge = mov_primary_edge(n)
    assert edge.family == "triangular" and edge.parameter == r
    assert edge.divisor == DivisorClass(r - 1 + Fraction(1, r - 1))
    curve, p = dual_curve_certificate(n)
    assert p == 0
    assert curve.h_deg == r - 1


@pytest.mark.parametrize("s", range(2, 7))
def test_mov_edge_tangential(s):
    n = 2 * s * (s + 1)
    edge = mov_primary_edge(n)
    assert edge.family == "tangential" and edge.parameter == s
    assert edge.divisor == DivisorClass(Fraction(8 * s * s - 4 * s + 1, 4 * s - 1))
    curve, p = dual_curve_certificate(n)
    assert p == 0
    assert curve.h_deg == 4 * s - 1


@pytest.mark.parametrize("n", [6, 10, 15, 21, 28, 36, 45, 55, 12, 24, 40, 60, 84])
def test_interpolating_bundle_slope_is_mov_edge(n):
    shape = interpolating_shape(n)
    ch = shape.character
    assert pairing(ch, ideal_points(n)) == 0
    assert ch.c1 / ch.r == mov_primary_edge(n).divisor.h
    # the multiple k scales the character
    assert interpolating_shape(n, 3).character == ch * 3


def test_unsupported_n():
    for n in (3, 5, 7, 13):
        with pytest.raises(UnsupportedN):
            mov_primary_edge(n)
    with pytest.raises(UnsupportedN):
        eff_primary_edge(1)


def test_eff_edge_examples():
    got = [eff_primary_edge(n).h for n in (2, 3, 4, 5, 6, 12)]
    assert got == [1, 1, Fraction(3, 2), 2, 2, Fraction(7, 2)]
    assert str(eff_primary_edge(12)) == "7/2 H - 1/2 B"


@pytest.mark.parametrize("n", range(2, 80))
def test_eff_edge_is_orthogonal(n):
    # a rank-one zeta of slope mu+ orthogonal to I_n; in the non-exceptional
    # case it must also be orthogonal to the factor F of the Gaeta triangle
    xi = (1, 0, n)
    x = eff_primary_edge(n).h
    tri = gaeta_case(to_log(ideal_points(n)))
    if tri.case is Case.EXCEPTIONAL:
        g = tri.controlling.bundle
        assert rr_rel((g.rank, -g.slope, g.discriminant), xi) == 0
        assert x == tri.controlling.gamma
        return
    # the discriminant that makes chi(zeta (x) I_n) vanish
    zeta = (1, -x, (x + 1) * (x + 2) / 2 - n)
    assert rr_rel(zeta, xi) == 0
    f = to_log(tri.F[0])
    assert rr_rel(zeta, (f.r, f.mu, f.delta)) == 0


@pytest.mark.parametrize("n", [6, 10, 15, 21, 28, 36, 45, 55, 12, 24, 40, 60, 84])
def test_eff_not_beyond_mov(n):
    assert eff_primary_edge(n).h <= mov_primary_edge(n).divisor.h


def test_divisor_curve_pairing():
    d = DivisorClass(Fraction(5, 2))
    assert d.pair(CurveClass(Fraction(2), Fraction(5))) == 0
    assert d.to_json() == {"H": "5/2", "B": "-1/2", "text": "5/2 H - 1/2 B"}


def test_destabilizer_names():
    assert destabilizer_character("O(-4)^3") == ChernCharacter(3, -12, 24)
    assert destabilizer_character("I_1(-2)") == ChernCharacter(1, -2, 1)
    assert destabilizer_character("E_1/2(-3)") == ChernCharacter(2, -5, Fraction(11, 2))
    assert destabilizer_character("T(-5)") == ChernCharacter(2, -7, Fraction(23, 2))
    with pytest.raises(ValueError):
        destabilizer_character("X(1)")


def test_wall_values():
    assert wall_value(destabilizer_character("O(-4)"), 12) == 5
    assert wall_value(destabilizer_character("F(2,-3,3/2)"), 12) == 5
    assert wall_value(destabilizer_character("O(-1)"), 2) == Fraction(5, 2)
    with pytest.raises(ValueError):
        wall_value(ChernCharacter(1, 0, 0), 3)


def test_table_shapes():
    assert SUPPORTED_TABLES == (2, 3, 4, 5, 6, 12)
    assert len(sbld_table(2)) == 1
    five = sbld_table(5)
    assert len(five) == 5
    assert [r.map_pattern for r in five if r.betti_id == "G(5)"] == ["g(5)''", "g(5)'", None]
    assert [r.base_locus for r in five][2:] == ["L_{3,3}", "L_3", "P2[5]"]
    twelve = sbld_table(12)
    assert len(twelve) == 12
    assert twelve[-1].base_locus == "P2[12]"
    assert twelve[-1].destabilizers == ("O(-4)", "O(-4)^2", "O(-4)^3", "F(2,-3,3/2)")
    with pytest.raises(UnsupportedN):
        sbld_table(7)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 12])
def test_tables_consistent(n):
    report = table_consistency(n)
    assert report.ok, report.violations
    slopes = [s for s in report.slopes if s is not None]
    assert all(a >= b for a, b in zip(slopes, slopes[1:]))
    assert all(a >= b for a, b in zip(report.walls, report.walls[1:]))
    for row in sbld_table(n):
        assert row.betti_shape.character == ideal_points(n)


def test_table_12_walls_and_slopes():
    report = table_consistency(12)
    assert report.slopes[8] == Fraction(11, 3)
    assert report.slopes[9] == Fraction(25, 7)
    assert report.walls[0] == Fraction(15, 2) and report.walls[-1] == 5
    assert report.to_json()["walls"][8] == "31/6"


def test_errata_are_flagged_and_printed_values_fail():
    rows = sbld_table(12)
    flagged = [r.betti_id for r in rows if r.erratum]
    assert flagged == ["G_9(12)", "G_2(12)"]
    printed = [dataclasses.replace(r, interpolating_shape=printed_interpolating_shape(r)) for r in rows]
    assert "G_9(12): chi(M (x) I_12) = -6" in table_consistency(12, printed).violations
    printed = [
        dataclasses.replace(r, destabilizers=r.printed_destabilizers or r.destabilizers) for r in rows
    ]
    assert any(v.startswith("G_2(12): wall 15/2") for v in table_consistency(12, printed).violations)
    g2 = rows[7]
    assert g2.printed_betti == rows[0].betti_shape and g2.betti_shape != g2.printed_betti


def test_row_json():
    out = sbld_table(12)[0].to_json()
    assert out["betti_id"] == "G_9(12)" and "erratum" in out
    assert "erratum" not in sbld_table(2)[0].to_json()


def test_conjecture_small():
    reports = conjecture_check(30)
    assert len(reports) == 222
    assert all(r.decomposition_found for r in reports)
    assert all(r.minimal_twist_matches and r.controlling_matches for r in reports)
    first = reports[0].to_json()
    assert (first["gamma"], first["rank"], first["d"], first["n"]) == ("3/2", 2, 2, 4)
    assert first["factor"] == "E_{-beta}" and first["multiplicity"] == 2
    with pytest.raises(ValueError):
        conjecture_check(2)


@pytest.mark.slow
def test_conjecture_rank_below_100():
    reports = conjecture_check(100)
    assert len(reports) == 236
    assert all(r.decomposition_found for r in reports)
