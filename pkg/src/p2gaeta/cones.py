"""Divisor classes on the Hilbert scheme of points of the plane.

Classes are written a*H - b*(B/2) and curves by their degrees against H and
B/2.  The module holds the movable and effective edges, the dual curves that
certify extremality, the tables of stable base loci for small n, and a
numeric checker for the block decomposition of Gaeta resolutions attached to
exceptional bundles of higher rank.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .chern import ChernCharacter, LogChern, euler, fmt, ideal_points, line_bundle, pairing, rat, tangent
from .exceptional import ExceptionalSlope, controlling, enumerate_exceptionals, epsilon
from .gaeta import (
    BettiTable,
    Case,
    ResolutionShape,
    ZetaMapModel,
    decompose_betti,
    gaeta_case,
    gaeta_numbers,
    gaeta_resolution,
    minimal_twist,
    shape_from_numbers,
)


class UnsupportedN(ValueError):
    pass


def is_triangular(n: int) -> int | None:
    """r with n = r(r+1)/2, if any."""
    if n < 1:
        return None
    r = (math.isqrt(8 * n + 1) - 1) // 2
    return r if r * (r + 1) // 2 == n else None


def is_tangential(n: int) -> int | None:
    """s with n = 2s(s+1), if any."""
    if n < 1 or n % 4:
        return None
    s = is_triangular(n // 4)
    return s


@dataclass(frozen=True)
class CurveClass:
    h_deg: Fraction
    b_half_deg: Fraction

    def to_json(self) -> dict:
        return {"H": fmt(self.h_deg), "B/2": fmt(self.b_half_deg)}


@dataclass(frozen=True)
class DivisorClass:
    """h*H - b_half*(B/2)."""

    h: Fraction
    b_half: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "h", rat(self.h))
        object.__setattr__(self, "b_half", rat(self.b_half))

    def pair(self, curve: CurveClass) -> Fraction:
        return self.h * curve.h_deg - self.b_half * curve.b_half_deg

    def __str__(self):
        return f"{fmt(self.h)} H - {fmt(self.b_half / 2)} B"

    def to_json(self) -> dict:
        return {"H": fmt(self.h), "B": fmt(-self.b_half / 2), "text": str(self)}


def _scope(n: int) -> tuple[str, int]:
    r = is_triangular(n)
    if r is not None and n > 3:
        return "triangular", r
    s = is_tangential(n)
    if s is not None and s >= 2:
        return "tangential", s
    raise UnsupportedN(
        f"n = {n} is neither triangular above 3 nor tangential with s >= 2; "
        "other n need a separate Bridgeland wall computation"
    )


@dataclass(frozen=True)
class MovableEdge:
    divisor: DivisorClass
    family: str
    parameter: int
    interpolating_shape: ResolutionShape

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "parameter": self.parameter,
            "divisor": self.divisor.to_json(),
            "interpolating_bundle": self.interpolating_shape.to_json(),
        }


def interpolating_shape(n: int, k: int = 1) -> ResolutionShape:
    """coker(O(r-3)^{kr} -> O(r-2)^{k(2r-1)}) or coker(O(2s-3)^{ks} -> O(2s-1)^{k(5s-1)})."""
    family, p = _scope(n)
    if family == "triangular":
        return ResolutionShape.from_terms([(p - 2, k * (2 * p - 1))], [(p - 3, k * p)])
    return ResolutionShape.from_terms([(2 * p - 1, k * (5 * p - 1))], [(2 * p - 3, k * p)])


def mov_primary_edge(n: int) -> MovableEdge:
    family, p = _scope(n)
    if family == "triangular":
        h = Fraction(p * p - 2 * p + 2, p - 1)
    else:
        h = Fraction(8 * p * p - 4 * p + 1, 4 * p - 1)
    return MovableEdge(DivisorClass(h), family, p, interpolating_shape(n))


def dual_curve_certificate(n: int) -> tuple[CurveClass, Fraction]:
    """The pencil curve sweeping the Gaeta divisor, and its pairing with the movable edge.

    A pencil of n points on an integral curve of degree e and arithmetic genus g
    has degree e against H and n + g - 1 against B/2.  Triangular: e = r-1,
    smooth.  Tangential: e = 4s-1 with 2s^2-4s+1 nodes.
    """
    family, p = _scope(n)
    if family == "triangular":
        e = p - 1
        g = (e - 1) * (e - 2) // 2
    else:
        e = 4 * p - 1
        g = (e - 1) * (e - 2) // 2 - (2 * p * p - 4 * p + 1)
    curve = CurveClass(Fraction(e), Fraction(n + g - 1))
    return curve, mov_primary_edge(n).divisor.pair(curve)


def _orthogonal_slope(xi: ChernCharacter, f: ChernCharacter) -> Fraction:
    """Slope x of the zeta with chi(zeta (x) xi) = chi(zeta (x) f) = 0.

    Subtracting the two Riemann-Roch equations leaves a linear equation
    (a - b)(2x + a + b + 3) = 2(Delta_xi - Delta_f).
    """
    a, b = xi.c1 / xi.r, f.c1 / f.r
    da, db = xi.to_log().delta, f.to_log().delta
    return (2 * (da - db) / (a - b) - a - b - 3) / 2


def eff_primary_edge(n: int) -> DivisorClass:
    """mu+ H - B/2 with mu+ orthogonal to I_n and to the exceptional factor of its Gaeta triangle."""
    if n < 2:
        raise UnsupportedN("the effective edge needs n >= 2")
    xi = LogChern(1, 0, n)
    tri = gaeta_case(xi)
    if tri.case is Case.EXCEPTIONAL:
        return DivisorClass(tri.controlling.gamma)
    f_ch, _ = tri.F
    return DivisorClass(_orthogonal_slope(xi.ch, f_ch))


# -- stable base locus tables -----------------------------------------------

_NAME = re.compile(
    r"^(?:(?P<kind>O|T)\((?P<tw>-?\d+)\)|I_(?P<pts>\d+)\((?P<itw>-?\d+)\)"
    r"|E_1/2\((?P<etw>-?\d+)\)|F\((?P<fr>\d+),(?P<fmu>-?[\d/]+),(?P<fd>[\d/]+)\))"
    r"(?:\^(?P<mult>\d+))?$"
)


def destabilizer_character(name: str) -> ChernCharacter:
    """Character of a named object: O(k), T(k), I_j(k), E_1/2(k), F(r,mu,Delta), optionally ^m."""
    m = _NAME.match(name.replace(" ", ""))
    if not m:
        raise ValueError(f"cannot parse destabilizer {name!r}")
    if m["kind"] == "O":
        ch = line_bundle(int(m["tw"]))
    elif m["kind"] == "T":
        ch = tangent(int(m["tw"]))
    elif m["pts"] is not None:
        ch = ideal_points(int(m["pts"])).twist(int(m["itw"]))
    elif m["etw"] is not None:
        ch = tangent(int(m["etw"]) - 1)
    else:
        ch = LogChern(int(m["fr"]), rat(m["fmu"]), rat(m["fd"])).ch
    return ch * int(m["mult"] or 1)


def _shape(gens, syz, shared=()) -> ResolutionShape:
    return ResolutionShape.from_terms(gens, syz, shared)


@dataclass(frozen=True)
class SbldRow:
    betti_id: str
    map_pattern: str | None
    destabilizers: tuple
    base_locus: str
    betti_shape: ResolutionShape
    interpolating_shape: ResolutionShape | None
    wall_boundary: bool
    printed_destabilizers: tuple | None = None
    printed_interpolating: str | None = None
    printed_betti: ResolutionShape | None = None
    erratum: str | None = None

    def to_json(self) -> dict:
        out = {
            "betti_id": self.betti_id,
            "map_pattern": self.map_pattern,
            "destabilizers": list(self.destabilizers),
            "base_locus": self.base_locus,
            "betti": self.betti_shape.to_json(),
            "interpolating_bundle": self.interpolating_shape.to_json() if self.interpolating_shape else None,
            "wall_boundary": self.wall_boundary,
        }
        if self.erratum:
            out["erratum"] = self.erratum
        return out


def _row(betti_id, pattern, dest, locus, betti, interp, solid, **extra) -> SbldRow:
    return SbldRow(betti_id, pattern, tuple(dest), locus, betti, interp, solid, **extra)


def _coker(syz, gens, shared=()) -> ResolutionShape:
    return _shape(gens, syz, shared)


_G6_DEST = ("E_1/2(-3)", "F(2,-2,1)", "O(-3)", "O(-3)^2", "O(-3)^3", "O(-3)^4", "I_1(-2)")
_G12_DEST = ("O(-4)", "O(-4)^2", "O(-4)^3", "F(2,-3,3/2)")


def _tables() -> dict[int, list[SbldRow]]:
    t: dict[int, list[SbldRow]] = {}
    t[2] = [_row("G(2)", None, ["O(-1)"], "P2[2]", _shape([(-2, 1), (-1, 1)], [(-3, 1)]), None, True)]
    t[3] = [
        _row("G_1(3)", None, ["O(-1)"], "L_3", _shape([(-3, 1), (-1, 1)], [(-4, 1)]),
             _coker([(-2, 4)], [(0, 6)]), True),
        _row("G(3)", None, ["E_1/2(-2)", "I_1(-1)", "O(-2)"], "P2[3]", _shape([(-2, 3)], [(-3, 2)]),
             _coker([], [(1, 1)]), True),
    ]
    t[4] = [
        _row("G_2(4)", None, ["O(-1)"], "L_4", _shape([(-4, 1), (-1, 1)], [(-5, 1)]),
             _coker([(-1, 6)], [(0, 8)]), True),
        _row("G_1(4)", None, ["I_1(-1)"], "L_3", _shape([(-3, 1), (-2, 2)], [(-4, 1), (-3, 1)], [-3]),
             _coker([(-1, 2)], [(0, 2), (1, 2)]), True),
        _row("G(4)", None, ["O(-2)", "O(-2)^2"], "P2[4]", _shape([(-2, 2)], [(-4, 1)]),
             _coker([(0, 1)], [(1, 3)]), True),
    ]
    g5 = _shape([(-3, 2), (-2, 1)], [(-4, 2)])
    i5 = _coker([(0, 2)], [(1, 4)])
    t[5] = [
        _row("G_2(5)", None, ["O(-1)"], "L_5", _shape([(-5, 1), (-1, 1)], [(-6, 1)]),
             _coker([(-1, 8)], [(0, 10)]), True),
        _row("G_1(5)", None, ["I_1(-1)"], "L_4", _shape([(-4, 1), (-2, 2)], [(-5, 1), (-3, 1)]),
             _coker([(-1, 4)], [(0, 4), (1, 2)]), True),
        _row("G(5)", "g(5)''", ["I_2(-1)", "O(-2)"], "L_{3,3}", g5, i5, False),
        _row("G(5)", "g(5)'", ["I_2(-1)", "O(-2)"], "L_3", g5, i5, False),
        _row("G(5)", None, ["O(-2)"], "P2[5]", g5, i5, True),
    ]
    g6 = _shape([(-3, 4)], [(-4, 3)])
    t[6] = [
        _row("G_4(6)", None, ["O(-1)"], "L_6", _shape([(-6, 1), (-1, 1)], [(-7, 1)]),
             _coker([(-1, 10)], [(0, 12)]), True),
        _row("G_3(6)", None, ["I_1(-1)"], "L_5", _shape([(-5, 1), (-2, 2)], [(-6, 1), (-3, 1)]),
             _coker([(-1, 6)], [(0, 6), (1, 2)]), True),
        _row("G_2(6)", None, ["I_2(-1)"], "L_4",
             _shape([(-4, 1), (-3, 1), (-2, 1)], [(-5, 1), (-4, 1)], [-4]),
             _coker([(-1, 2)], [(1, 4)]), True),
        _row("G_1(6)", None, ["O(-2)"], "Q_6", _shape([(-3, 1), (-2, 1)], [(-5, 1)]),
             _coker([(0, 3)], [(1, 5)]), True),
        _row("G(6)", "g(6)'", _G6_DEST + ("I_3(-1)",), "L_3", g6, _coker([], [(2, 1)]), False),
        _row("G(6)", None, _G6_DEST, "P2[6]", g6, _coker([], [(2, 1)]), True),
    ]
    g9_12 = _shape([(-7, 1), (-4, 2), (-3, 1)], [(-8, 1), (-5, 2)])
    g1_12 = _shape([(-5, 1), (-4, 3)], [(-6, 2), (-5, 1)], [-5])
    g_12 = _shape([(-4, 3)], [(-6, 2)])
    i7 = _coker([(0, 6)], [(1, 6), (2, 2)])
    i4 = _coker([(1, 4)], [(2, 6)])
    i_last = _coker([(2, 1)], [(3, 3)])
    t[12] = [
        _row("G_9(12)", None, ["I_5(-1)"], "L_7", g9_12,
             _coker([(-1, 2), (0, 6)], [(1, 10)]), True,
             printed_interpolating="coker(O(1)^2 + O^6 -> O(1)^10)",
             erratum="interpolating bundle printed with O(1)^2 in place of O(-1)^2; "
                     "only O(-1)^2 is orthogonal to I_12"),
        _row("G_8(12)", None, ["O(-2)"], "Q_12", _shape([(-6, 1), (-2, 1)], [(-8, 1)]),
             _coker([(0, 9)], [(1, 11)]), True),
        _row("G_7(12)", None, ["I_1(-2)"], "Q_11", _shape([(-6, 2), (-3, 2)], [(-7, 2), (-4, 1)]), i7, False),
        _row("G_6(12)", None, ["I_6(-1)"], "L_6", _shape([(-6, 1), (-4, 4)], [(-7, 1), (-5, 3)]), i7, True),
        _row("G_5(12)", None, ["I_2(-2)"], "Q_10",
             _shape([(-5, 1), (-4, 1), (-3, 1)], [(-7, 1), (-5, 1)], [-5]),
             _coker([(0, 3)], [(1, 1), (2, 4)]), True),
        _row("G_4(12)", None, ["O(-3)"], "C_12", _shape([(-5, 3), (-3, 1)], [(-6, 3)]), i4, False),
        _row("G_3(12)", None, ["I_3(-2)"], "Q_9",
             _shape([(-5, 2), (-4, 3)], [(-6, 2), (-5, 2)], [-5]), i4, False),
        _row("G_2(12)", None, ["I_7(-1)"], "L_5", g1_12, i4, True,
             printed_destabilizers=("I_5(-1)",), printed_betti=g9_12,
             erratum="destabilizer and Betti diagram printed as copies of the G_9(12) row; "
                     "I_7(-1) and the diagram of five collinear plus seven general points fit L_5"),
        _row("G_1(12)", "g_1(12)'", ["I_1(-3)"], "C_11", g1_12,
             _coker([(1, 2)], [(2, 2), (3, 3)]), True),
        _row("G_1(12)", None, ["T(-5)"], "D_{T(-5)}", g1_12, _coker([(1, 2)], [(3, 9)]), True),
        _row("G(12)", "g(12)'", _G12_DEST + ("I_4(-2)",), "Q_8", g_12, i_last, False),
        _row("G(12)", None, _G12_DEST, "P2[12]", g_12, i_last, True),
    ]
    return t


_TABLES = _tables()
SUPPORTED_TABLES = tuple(sorted(_TABLES))


def sbld_table(n: int) -> list[SbldRow]:
    if n not in _TABLES:
        raise UnsupportedN(f"no stable base locus table for n = {n}; supported: {SUPPORTED_TABLES}")
    return list(_TABLES[n])


def printed_interpolating_shape(row: SbldRow) -> ResolutionShape | None:
    """The interpolating bundle exactly as printed, for rows carrying an erratum."""
    if row.betti_id == "G_9(12)":
        return _coker([(1, 2), (0, 6)], [(1, 10)], shared=[1])
    return row.interpolating_shape


def wall_value(kappa: ChernCharacter, n: int) -> Fraction:
    """(r(U) ch2(k) - r(k) ch2(U)) / (-c1(k) r(U)) for U = I_n."""
    if kappa.c1 >= 0:
        raise ValueError("a destabilizing subobject needs negative c1")
    return (kappa.ch2 + n * kappa.r) / (-kappa.c1)


@dataclass
class TableReport:
    n: int
    violations: list = field(default_factory=list)
    slopes: list = field(default_factory=list)
    walls: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ok": self.ok,
            "violations": self.violations,
            "slopes": [fmt(s) if s is not None else None for s in self.slopes],
            "walls": [fmt(w) for w in self.walls],
        }


def table_consistency(n: int, rows: list[SbldRow] | None = None) -> TableReport:
    """Orthogonality, slope order and wall order of a table, evaluated exactly."""
    rows = sbld_table(n) if rows is None else rows
    report = TableReport(n)
    xi = ideal_points(n)
    prev_slope = prev_wall = None
    for i, row in enumerate(rows):
        label = f"{row.betti_id} {row.map_pattern or ''}".strip()
        if row.betti_shape.character != xi:
            report.violations.append(f"{label}: Betti diagram does not resolve I_{n}")
        shape = row.interpolating_shape
        if shape is None:
            report.slopes.append(None)
        else:
            ch = shape.character
            if pairing(ch, xi) != 0:
                report.violations.append(f"{label}: chi(M (x) I_{n}) = {fmt(pairing(ch, xi))}")
            slope = ch.c1 / ch.r
            report.slopes.append(slope)
            if prev_slope is not None and slope > prev_slope:
                report.violations.append(f"{label}: slope {fmt(slope)} rises above {fmt(prev_slope)}")
            prev_slope = slope
        walls = {wall_value(destabilizer_character(k), n) for k in row.destabilizers}
        if len(walls) != 1:
            report.violations.append(f"{label}: destabilizers give distinct walls {sorted(map(fmt, walls))}")
        wall = max(walls)
        report.walls.append(wall)
        if prev_wall is not None and wall > prev_wall:
            report.violations.append(f"{label}: wall {fmt(wall)} lies above the previous row's {fmt(prev_wall)}")
        prev_wall = min(walls)
    return report


# -- conjecture check ---------------------------------------------------------


@dataclass(frozen=True)
class ConjectureReport:
    gamma: ExceptionalSlope
    d: int
    n: int
    decomposition_found: bool
    witness: ZetaMapModel | None
    factor: str | None
    multiplicity: int | None
    gamma_factor_feasible: bool
    minimal_twist_matches: bool
    controlling_matches: bool

    def to_json(self) -> dict:
        return {
            "gamma": fmt(self.gamma.slope),
            "rank": self.gamma.rank,
            "d": self.d,
            "n": self.n,
            "decomposition_found": self.decomposition_found,
            "factor": self.factor,
            "multiplicity": self.multiplicity,
            "gamma_factor_feasible": self.gamma_factor_feasible,
            "minimal_twist_matches": self.minimal_twist_matches,
            "controlling_matches": self.controlling_matches,
            "witness": self.witness.to_json() if self.witness else None,
        }


def _window_split(total: BettiTable, block: BettiTable, d: int) -> BettiTable | None:
    """total - block when it is a valid A-block: non-negative and inside {-d-2, -d-1, -d}."""
    window = {-d - 2, -d - 1, -d}
    rest = dict(total.entries)
    for key, mult in block.entries.items():
        if key[1] not in window:
            return None
        rest[key] = rest.get(key, 0) - mult
        if rest[key] < 0:
            return None
    try:
        return BettiTable(rest)
    except ValueError:
        return None


def _split_with(u: LogChern, f: ChernCharacter, d: int, max_mult: int):
    """Least m >= 1 such that m copies of the Gaeta resolution of f fit as the B-block."""
    total = shape_from_numbers(*gaeta_numbers(u, d), d)
    try:
        block = gaeta_resolution(f)
    except ValueError:
        return None
    for m in range(1, max_mult + 1):
        scaled = ResolutionShape.from_terms(
            [(t, k * m) for t, k in block.generators], [(t, k * m) for t, k in block.syzygies]
        )
        rest = _window_split(total.betti, scaled.betti, d)
        if rest is None:
            # removing more copies only makes the remainder smaller
            return None
        gens = [(t, k) for (p, t), k in rest.entries.items() if p == 1]
        syz = [(t, k) for (p, t), k in rest.entries.items() if p == 2]
        if gens or syz:
            return m, ZetaMapModel(total, scaled, ResolutionShape.from_terms(gens, syz), {}, d, None)
    return None


def conjecture_check(max_rank: int = 30, d_window=range(0, 200), min_rank: int = 2, max_mult: int = 64):
    """Block decompositions of the Gaeta resolution of I_n for every orthogonal pair (E*(d), n).

    For each exceptional E with mu_E in [0, 1) and min_rank <= rank < max_rank,
    and each d with n = chi(E*(d)) / r_E a positive integer, the Gaeta table of
    I_n at twist d must split as the resolution of a factor F^m plus a
    non-negative right-hand A-block in the same three twists.  The controlling
    factor E_{-gamma}^m is tried first, then the factor E_{-beta}^l of the
    triangle E_{-beta}^l -> I_n -> E_{-alpha-3}^k[1].
    """
    if max_rank < 3:
        raise ValueError("max_rank must be at least 3")
    reports = []
    for e in enumerate_exceptionals(max_rank, (0, 1)):
        if e.slope >= 1 or e.rank < min_rank:
            continue
        for d in d_window:
            e_star = e.ch.dual().twist(d)
            n = euler(e_star) / e.rank
            if n.denominator != 1 or n <= 0:
                continue
            n = int(n)
            u = LogChern(1, 0, n)
            gamma = epsilon(d - e.address.value)
            c = controlling(u)
            tri = gaeta_case(u, c)
            gamma_split = _split_with(u, e.ch.twist(-d), d, max_mult)
            found, factor, mult, witness = False, None, None, None
            if gamma_split is not None:
                found, factor = True, "E_{-gamma}"
                mult, witness = gamma_split
            elif tri.case is Case.EXCEPTIONAL and c.gamma == gamma.slope:
                try:
                    model = decompose_betti(u)
                except ValueError:
                    model = None
                if model is not None and model.d == d and tri.F[1] >= 1:
                    found, factor, mult, witness = True, "E_{-beta}", tri.F[1], model
            reports.append(
                ConjectureReport(
                    gamma=gamma,
                    d=d,
                    n=n,
                    decomposition_found=found,
                    witness=witness,
                    factor=factor,
                    multiplicity=mult,
                    gamma_factor_feasible=gamma_split is not None,
                    minimal_twist_matches=minimal_twist(u) == d,
                    controlling_matches=c.gamma == gamma.slope,
                )
            )
    reports.sort(key=lambda r: (r.gamma.rank, r.gamma.slope, r.d))
    return reports
