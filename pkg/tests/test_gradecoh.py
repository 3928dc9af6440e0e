from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_points, h0_line, h2_line, hilbert_function_of_points, rank_mod_p
from p2gaeta.chern import euler, ideal_points, tangent
from p2gaeta.gaeta import BettiTable, InternalInconsistency
from p2gaeta.gradecoh import (
    DEFAULT_PRIME,
    CohomologyReport,
    GradedMatrix,
    Infeasible,
    LineComplex,
    NotAComplex,
    NotGenericMatrix,
    PointConfig,
    Poly,
    check_prime,
    cohomology_of_length2,
    cohomology_of_presentation,
    euler_presentation,
    hilbert_burch,
    hilbert_function,
    hypercohomology,
    ideal_betti,
    ideal_resolution,
    induced_h0,
    line_cohomology,
    maximal_minors,
    minimal_k,
    qk_matrix,
    qk_section_count,
    qk_shape,
    resolution_of_ideal,
    sample_points,
    tangent_section_zero_locus,
    tensor_cohomology,
    verify_interpolation_tangential,
    verify_interpolation_triangular,
)
from p2gaeta.gradecoh import field
from p2gaeta.gradecoh.interpolation import h0_twisted_by_points, presentation_character, triangular_bundle
from p2gaeta.gradecoh.poly import dim

P = DEFAULT_PRIME
x, y, z = (Poly.variable(v) for v in "xyz")
seeds = st.integers(0, 2**32 - 1)


def rng(*key):
    return np.random.default_rng(list(key))


# -- field and forms -----------------------------------------------------------------


def test_check_prime():
    assert check_prime(32003) == 32003
    for bad in (1, 2, 9, 32001, 3_000_000_019):
        with pytest.raises(ValueError):
            check_prime(bad)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 9), st.integers(1, 9), st.integers(0, 9))
def test_rank_matches_oracle(seed, a, b, k):
    g = rng(seed)
    # a product through a k-dimensional space caps the rank at k
    m = field.matmul(g.integers(0, P, (a, k)), g.integers(0, P, (k, b)), P) if k else np.zeros((a, b), int)
    assert field.rank(m, P) == rank_mod_p(m.tolist(), P) <= min(a, b, k)
    ns = field.nullspace(m, P)
    assert ns.shape[0] == b - field.rank(m, P)
    assert not field.matmul(m, ns.T, P).any() if ns.size else True


def test_det_and_inverse():
    assert field.det([[1, 2], [3, 4]], P) == (-2) % P
    assert field.inverse(2, P) * 2 % P == 1
    with pytest.raises(ZeroDivisionError):
        field.inverse(0, P)


def test_poly_basics():
    assert dim(-1) == 0 and dim(0) == 1 and dim(3) == 10
    f = x * y - z * z
    assert f.degree == 2 and str(x * y) == "1*x^1*y^1*z^0"
    assert (f - f).is_zero()
    pts = np.array([[1, 1, 1], [2, 3, 5]])
    assert f.evaluate(pts).tolist() == [0, (6 - 25) % P]


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(0, 4), st.integers(0, 4))
def test_induced_h0_is_multiplication(seed, d, t):
    g = rng(seed)
    f, h = Poly.random(d, g), Poly.random(t, g)
    m = GradedMatrix([d], [0], {(0, 0): f})
    assert induced_h0(m, t).shape == (dim(d + t), dim(t))
    assert (induced_h0(m, t) @ h.vector() % P).tolist() == (f * h).vector().tolist()


@settings(max_examples=100, deadline=None)
@given(seeds, st.lists(st.integers(-4, 4), min_size=1, max_size=4),
       st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.integers(-3, 4))
def test_induced_h0_dimensions(seed, rows, cols, t):
    m = GradedMatrix.random(rows, cols, rng(seed), minimal=False)
    out = induced_h0(m, t)
    assert out.shape == (sum(h0_line(a + t) for a in rows), sum(h0_line(b + t) for b in cols))


# -- text formats ------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(seeds, st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_matrix_text_round_trip(seed, rows, cols):
    m = GradedMatrix.random(rows, cols, rng(seed), minimal=False)
    text = m.to_text()
    back = GradedMatrix.from_text(text)
    assert back == m and back.to_text() == text


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 12))
def test_points_text_round_trip(seed, n):
    cfg = sample_points("general", n, seed % 1000)
    back = PointConfig.from_text(cfg.to_text())
    assert back == cfg and back.to_text() == cfg.to_text()


def test_matrix_rejects_bad_entries():
    with pytest.raises(ValueError):
        GradedMatrix([1], [0], {(0, 0): x * y})
    with pytest.raises(IndexError):
        GradedMatrix([1], [0], {(1, 0): x})
    with pytest.raises(ValueError):
        GradedMatrix.from_text("prime: 7\n")


# -- cohomology ------------------------------------------------------------------------


def test_line_cohomology():
    for a in range(-8, 8):
        assert line_cohomology(a) == (h0_line(a), 0, h2_line(a))


def test_cohomology_examples():
    g = rng(0)
    # O(0) as coker(0 -> O)
    assert cohomology_of_presentation("cokernel", GradedMatrix([0], []), 0, g).dims == (1, 0, 0)
    e = triangular_bundle(3, 1, g)
    assert cohomology_of_presentation("cokernel", e, -2, g).dims == (0, 0, 0)
    assert cohomology_of_presentation("cokernel", e, 0, g).dims == (12, 0, 0)
    assert cohomology_of_presentation("cokernel", euler_presentation(0), 0, g, tangent(0)).dims == (8, 0, 0)
    assert cohomology_of_presentation("cokernel", euler_presentation(-5), 0, g, tangent(-5)).dims == (0, 0, 3)
    # Omega(1) = ker(O^3 -> O(1)) has no cohomology
    assert cohomology_of_presentation("kernel", euler_presentation(-1).transpose(), 0, g).dims == (0, 0, 0)
    # M(-12) for s = 5
    m = GradedMatrix.random([9] * 24, [7] * 5, g)
    assert cohomology_of_presentation("cokernel", m, -12, g).dims == (0, 6, 0)


def test_cohomology_rejects_bad_input():
    g = rng(1)
    with pytest.raises(NotGenericMatrix):
        cohomology_of_presentation("cokernel", GradedMatrix([0], [-1, -1], {(0, 0): x, (0, 1): y}), 0, g)
    with pytest.raises(ValueError):
        cohomology_of_presentation("sideways", euler_presentation(0), 0, g)
    with pytest.raises(InternalInconsistency):
        cohomology_of_presentation("cokernel", euler_presentation(0), 0, g, tangent(1))
    with pytest.raises(InternalInconsistency):
        CohomologyReport(1, 0, 0, Fraction(2))
    bad = LineComplex([euler_presentation(0), GradedMatrix.random([2], [1, 1, 1], g)], -2)
    with pytest.raises(NotAComplex):
        bad.check_composites()


def test_degenerate_ladder_equals_presentation():
    g = rng(2)
    for m in (euler_presentation(-4), triangular_bundle(4, 1, g)):
        empty = GradedMatrix(m.col_twists, [])
        for t in (-3, 0, 2):
            assert cohomology_of_length2(empty, m, t, g).dims == cohomology_of_presentation("cokernel", m, t, g).dims


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(-3, 3), st.integers(1, 3), st.integers(1, 3), st.integers(-6, 3))
def test_presentation_audit(seed, base, ncols, extra, t):
    g = rng(seed)
    rows = [base + 1 + int(v) for v in g.integers(0, 3, ncols + extra)]
    m = GradedMatrix.random(rows, [base] * ncols, g)
    rep = cohomology_of_presentation("cokernel", m, t, g)
    # the report audits chi itself; the H^0 sequence gives a second count
    assert rep.h0 - rep.h1 + rep.h2 == euler(presentation_character(m).twist(t))
    assert rep.h0 == sum(h0_line(a + t) for a in rows) - ncols * h0_line(base + t)
    hh = hypercohomology(LineComplex([m], -1), t)
    assert hh.get(-1, 0) == 0


def test_tensor_complex_kernel_route():
    g = rng(3)
    # T(-1) (x) Omega(1) = End(T): only the scalars
    a = euler_presentation(-1)
    rep = tensor_cohomology(a, euler_presentation(-1).transpose(), 0, g, b_kind="kernel")
    assert rep.dims == (1, 0, 0)
    with pytest.raises(ValueError):
        tensor_cohomology(a, a, 0, g, b_kind="sideways")


# -- points and ideals ---------------------------------------------------------------


def test_sample_points_strata():
    cfg = sample_points("L_3", 5, 0)
    assert cfg.n == 5
    line = cfg.witnesses[0][0]
    assert (line.evaluate(cfg.points) == 0).tolist() == [True, True, True, False, False]
    assert sample_points("general", 6, 4) == sample_points("general", 6, 4)
    on = sample_points("on_curve(2)", 7, 1)
    conic = on.witnesses[0][0]
    assert not conic.evaluate(on.points).any()
    with pytest.raises(Infeasible):
        sample_points("L_{3,3}", 6, 0)
    with pytest.raises(Infeasible):
        sample_points("M_3", 6, 0)
    with pytest.raises(ValueError):
        PointConfig(np.array([[1, 2, 3], [2, 4, 6]]), "general", 0)


@pytest.mark.parametrize("n", [3, 6, 9, 14])
def test_hilbert_function_matches_oracle(n):
    cfg = sample_points("general", n, n)
    pts = [tuple(int(v) for v in q) for q in cfg.points]
    assert hilbert_function(cfg, 5) == [hilbert_function_of_points(pts, t, P) for t in range(6)]


@pytest.mark.parametrize(
    "stratum, n, expected",
    [
        ("general", 6, {(1, -3): 4, (2, -4): 3}),
        ("L_3", 4, {(1, -2): 2, (1, -3): 1, (2, -3): 1, (2, -4): 1}),
        ("L_4", 6, {(1, -2): 1, (1, -3): 1, (1, -4): 1, (2, -4): 1, (2, -5): 1}),
        ("Q_6", 6, {(1, -2): 1, (1, -3): 1, (2, -5): 1}),
        ("L_{3,3}", 5, {(1, -2): 1, (1, -3): 2, (2, -4): 2}),
        ("C_12", 12, {(1, -3): 1, (1, -5): 3, (2, -6): 3}),
    ],
)
def test_ideal_betti_examples(stratum, n, expected):
    assert ideal_betti(sample_points(stratum, n, 3)).entries == expected
    assert ideal_resolution(sample_points(stratum, n, 3)).character == ideal_points(n)


def test_hilbert_burch_examples():
    m = GradedMatrix([-1, -1], [-2], {(0, 0): x, (1, 0): y})
    # the point (0:0:1) is cut out by (y, -x)
    assert hilbert_burch(m) == [y, -x]
    phi = qk_matrix(4, 1, rng(0))
    assert sorted(f.degree for f in hilbert_burch(phi)) == [8, 8, 8, 8, 8, 9]
    with pytest.raises(ValueError):
        maximal_minors(GradedMatrix([0], [-1], {(0, 0): x}))
    with pytest.raises(NotGenericMatrix):
        hilbert_burch(GradedMatrix([-1, -1], [-2]))


def test_hilbert_burch_g12():
    # the Gaeta matrix O(-6)^2 -> O(-4)^3 of twelve general points
    m = GradedMatrix.random([-4] * 3, [-6] * 2, rng(4))
    gens = hilbert_burch(m)
    assert [f.degree for f in gens] == [4, 4, 4]
    assert resolution_of_ideal(gens, 12).betti == BettiTable({(1, -4): 3, (2, -6): 2})


@pytest.mark.parametrize("rows, cols", [([-2, -2, -2], [-3, -3]), ([-3, -2, -2], [-4, -3]), ([-4] * 3, [-6] * 2)])
def test_hilbert_burch_round_trip(rows, cols):
    # minors of a random Hilbert-Burch matrix resolve back to the same shape
    for seed in range(50):
        m = GradedMatrix.random(rows, cols, rng(seed, 7))
        shape = resolution_of_ideal(hilbert_burch(m))
        expected = {}
        for t in rows:
            expected[(1, t)] = expected.get((1, t), 0) + 1
        for t in cols:
            expected[(2, t)] = expected.get((2, t), 0) + 1
        assert shape.betti.entries == expected


def test_zero_locus():
    for s in (2, 3):
        gens, betti = tangent_section_zero_locus(s, seed=0)
        assert betti == BettiTable({(1, -2 * s): 3, (2, -2 * s - 1): 1, (2, -4 * s + 1): 1})
        assert resolution_of_ideal(gens).character == ideal_points(4 * s * s - 2 * s + 1)
    with pytest.raises(ValueError):
        tangent_section_zero_locus(1, seed=0)


def test_qk_shape_and_matrix():
    assert str(qk_shape(4, 1)) == "O(-9) + O(-10)^4 -> O(-8)^5 + O(-9)"
    assert qk_shape(3, 0).character == ideal_points(24)
    phi = qk_matrix(5, 2, rng(1), euler_block=True)
    assert phi[(2, 5)] == x and phi[(4, 5)] == z and phi[(0, 5)] is None
    with pytest.raises(ValueError):
        qk_matrix(4, 2, rng(1), euler_block=True)
    with pytest.raises(ValueError):
        qk_matrix(2, 3, rng(1))


@pytest.mark.parametrize("s", [2, 3])
def test_qk_section_count(s):
    assert [qk_section_count(s, k, seed=1) for k in range(0, s + 1)] == list(range(0, s + 1))
    with pytest.raises(ValueError):
        qk_section_count(s, s + 1)


# -- interpolation -------------------------------------------------------------------


def test_interpolation_triangular():
    for r in (3, 4):
        result = verify_interpolation_triangular(r, 1, seed=0)
        assert result.passed and result.chi == 0
        assert result.to_json()["params"] == {"r": r, "k": 1, "n": r * (r + 1) // 2, "seed": 0}
    k, result = minimal_k(verify_interpolation_triangular, 3)
    assert k == 1 and result
    with pytest.raises(ValueError):
        verify_interpolation_triangular(2)


def test_interpolation_tangential():
    for s in (2, 3):
        result = verify_interpolation_tangential(s)
        assert result.passed and result.params["route"] == "ladder"
        assert all(row["h0"] == row["h1"] == row["h2"] == 0 for row in result.trials)
    with pytest.raises(ValueError):
        verify_interpolation_tangential(2, route="other")
    with pytest.raises(ValueError):
        verify_interpolation_tangential(1)


@pytest.mark.parametrize("stratum, h0", [("L_6", 5), ("L_5", 3), ("L_4", 1), ("general", 0), ("Q_6", 0)])
def test_negative_controls(stratum, h0):
    # six points with too many on a line do not interpolate for r = 3
    m = triangular_bundle(3, 1, rng(5))
    assert h0_twisted_by_points(m, sample_points(stratum, 6, 1)) == h0


def _product(forms):
    out = forms[0]
    for f in forms[1:]:
        out = out * f
    return out


def _grid_matrix(k, m):
    f = _product([x - z * i for i in range(1, k + 1)])
    g = _product([y - z * j for j in range(1, m + 1)])
    return GradedMatrix([-k, -m], [-k - m], {(0, 0): g, (1, 0): -f})


@pytest.mark.parametrize("r, k, m", [(3, 2, 3), (4, 2, 5), (4, 3, 3), (3, 1, 6), (4, 1, 10), (5, 3, 5)])
def test_ladder_matches_fiberwise(r, k, m):
    # two routes to h0(E (x) I_Z) for a grid complete intersection Z
    g = rng(r, k, m)
    e = triangular_bundle(r, 1, g)
    cfg = PointConfig(np.array(grid_points(k, m, P)), "grid", 0)
    expected = presentation_character(e).tensor(ideal_points(k * m))
    rep = tensor_cohomology(e, _grid_matrix(k, m), 0, g, expected)
    assert rep.h0 == h0_twisted_by_points(e, cfg)
    assert rep.h2 == 0
