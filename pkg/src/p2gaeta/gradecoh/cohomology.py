"""Cohomology of sheaves presented by complexes of line-bundle sums.

Sums of line bundles on the plane have no H^1, so the hypercohomology
spectral sequence of a complex C^p has only the rows q = 0 and q = 2.  For a
complex of length at most three every differential past the first page runs
between empty spots, so ``HH^k = H^k(row 0) + H^(k-2)(row 2)``.  When the
complex has a single homology sheaf F in position p0 this gives
``h^i(F) = dim HH^(i + p0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from ..chern import ChernCharacter, as_ch, euler, fmt
from ..gaeta import InternalInconsistency
from .field import rank
from .matrix import GradedMatrix, NotAComplex, NotGenericMatrix, induced_h0, induced_h2, twist_character
from .poly import dim


def line_cohomology(a: int) -> tuple[int, int, int]:
    """(h^0, h^1, h^2) of O(a) on the plane."""
    return (comb(a + 2, 2) if a >= 0 else 0, 0, comb(-a - 1, 2) if a <= -3 else 0)


def _h0(twists, t: int) -> int:
    return sum(dim(a + t) for a in twists)


def _h2(twists, t: int) -> int:
    return sum(dim(-3 - a - t) for a in twists)


@dataclass(frozen=True)
class CohomologyReport:
    h0: int
    h1: int
    h2: int
    chi_expected: Fraction
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if min(self.h0, self.h1, self.h2) < 0:
            raise InternalInconsistency(f"negative cohomology {self.dims}")
        if self.h0 - self.h1 + self.h2 != self.chi_expected:
            raise InternalInconsistency(
                f"h0 - h1 + h2 = {self.h0 - self.h1 + self.h2} but chi = {fmt(self.chi_expected)}"
            )

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.h0, self.h1, self.h2

    @property
    def vanishes(self) -> bool:
        return self.dims == (0, 0, 0)

    def to_json(self) -> dict:
        return {"h0": self.h0, "h1": self.h1, "h2": self.h2, "chi": fmt(self.chi_expected)}


@dataclass
class LineComplex:
    """C^start -> C^(start+1) -> ... given by consecutive GradedMatrix differentials."""

    maps: list
    start: int

    def __post_init__(self):
        for a, b in zip(self.maps, self.maps[1:]):
            if a.row_twists != b.col_twists:
                raise ValueError("consecutive differentials do not share a term")

    @property
    def terms(self) -> list[tuple[int, ...]]:
        return [self.maps[0].col_twists] + [m.row_twists for m in self.maps]

    @property
    def positions(self) -> range:
        return range(self.start, self.start + len(self.maps) + 1)

    def euler_character(self, position: int) -> ChernCharacter:
        """Alternating character sum, signed so the term at ``position`` counts positively."""
        total = ChernCharacter(0, 0, 0)
        for p, twists in zip(self.positions, self.terms):
            ch = twist_character(twists)
            total = total + (ch if (p - position) % 2 == 0 else -ch)
        return total

    def check_composites(self):
        for a, b in zip(self.maps, self.maps[1:]):
            if not (b @ a).is_zero():
                raise NotAComplex("consecutive differentials do not compose to zero")


def tensor_complex(a: GradedMatrix, b: GradedMatrix, start: int) -> LineComplex:
    """Total complex of two two-term complexes A0 -a-> A1 and B0 -b-> B1.

    Terms A0B0 -> A1B0 + A0B1 -> A1B1, with d = (a x 1, 1 x b) then (1 x b, -(a x 1)).
    """
    p = a.p
    ia0, ia1 = GradedMatrix.identity(a.col_twists, p), GradedMatrix.identity(a.row_twists, p)
    ib0, ib1 = GradedMatrix.identity(b.col_twists, p), GradedMatrix.identity(b.row_twists, p)
    first = GradedMatrix.blocks([[a.kron(ib0)], [ia0.kron(b)]])
    second = GradedMatrix.blocks([[ia1.kron(b), a.kron(ib1).scale(-1)]])
    return LineComplex([first, second], start)


def hypercohomology(cx: LineComplex, t: int = 0) -> dict[int, int]:
    """dim HH^k of the complex twisted by t, for complexes of length at most three."""
    if len(cx.maps) > 2:
        raise ValueError("the two-row degeneration needs at most three terms")
    terms = cx.terms
    h0 = [_h0(tw, t) for tw in terms]
    h2 = [_h2(tw, t) for tw in terms]
    r0 = [rank(induced_h0(m, t), cx.maps[0].p) for m in cx.maps]
    r2 = [rank(induced_h2(m, t), cx.maps[0].p) for m in cx.maps]
    out: dict[int, int] = {}
    for idx, pos in enumerate(cx.positions):
        into0 = r0[idx - 1] if idx > 0 else 0
        out0 = r0[idx] if idx < len(r0) else 0
        into2 = r2[idx - 1] if idx > 0 else 0
        out2 = r2[idx] if idx < len(r2) else 0
        e0 = h0[idx] - out0 - into0
        e2 = h2[idx] - out2 - into2
        out[pos] = out.get(pos, 0) + e0
        out[pos + 2] = out.get(pos + 2, 0) + e2
    return out


def sheaf_cohomology(cx: LineComplex, position: int, t: int = 0,
                     expected: ChernCharacter | None = None, details: dict | None = None) -> CohomologyReport:
    """Cohomology of the single homology sheaf of ``cx`` (sitting at ``position``), twisted by t.

    ``expected`` is the sheaf's character computed independently; it must agree
    with the complex, and its Euler characteristic audits the result.
    """
    own = cx.euler_character(position)
    if expected is not None and as_ch(expected) != own:
        raise InternalInconsistency(f"complex resolves {own}, expected {as_ch(expected)}")
    hh = hypercohomology(cx, t)
    hs = [hh.get(i + position, 0) for i in range(3)]
    stray = {k: v for k, v in hh.items() if v and not 0 <= k - position <= 2}
    if stray:
        raise NotGenericMatrix(f"hypercohomology outside the sheaf range: {stray}")
    return CohomologyReport(*hs, euler(own.twist(t)), details or {})


def _injective(m: GradedMatrix, rng: np.random.Generator) -> bool:
    return m.generic_rank(rng) == m.ncols


def _surjective(m: GradedMatrix, max_extra: int = 24) -> bool:
    """Sheaf surjectivity, certified by H^0 surjectivity at a globally generated twist."""
    if not m.row_twists:
        return True
    base = max(0, -min(m.row_twists))
    for t in range(base, base + max_extra + 1):
        if rank(induced_h0(m, t), m.p) == _h0(m.row_twists, t):
            return True
    return False


def cohomology_of_presentation(kind: str, m: GradedMatrix, t: int = 0,
                               rng: np.random.Generator | None = None,
                               expected: ChernCharacter | None = None) -> CohomologyReport:
    """h^i of coker(m)(t) (m injective) or ker(m)(t) (m surjective)."""
    rng = np.random.default_rng(0) if rng is None else rng
    if kind == "cokernel":
        if not _injective(m, rng):
            raise NotGenericMatrix("the presentation is not injective as a sheaf map")
        cx = LineComplex([m], -1)
    elif kind == "kernel":
        if not _surjective(m):
            raise NotGenericMatrix("the map is not surjective as a sheaf map")
        cx = LineComplex([m], 0)
    else:
        raise ValueError(f"kind must be 'cokernel' or 'kernel', not {kind!r}")
    return sheaf_cohomology(cx, 0, t, expected)


def cohomology_of_length2(t2_to_t1: GradedMatrix, t1_to_t0: GradedMatrix, t: int = 0,
                          rng: np.random.Generator | None = None,
                          expected: ChernCharacter | None = None) -> CohomologyReport:
    """h^i of the homology sheaf at T0 of 0 -> T2 -> T1 -> T0, exact elsewhere."""
    rng = np.random.default_rng(0) if rng is None else rng
    cx = LineComplex([t2_to_t1, t1_to_t0], -2)
    cx.check_composites()
    return _ladder(cx, rng, t, expected)


def _ladder(cx: LineComplex, rng: np.random.Generator, t: int, expected) -> CohomologyReport:
    first, second = cx.maps
    # exact away from the right end: first map injective, ranks add up generically
    pt = rng.integers(0, first.p, 3)
    r1 = rank(first.fiber(pt), first.p)
    r2 = rank(second.fiber(pt), first.p)
    if r1 != first.ncols or r1 + r2 != first.nrows:
        raise NotGenericMatrix(f"generic ranks {r1}, {r2} do not make the complex exact at T2, T1")
    position = cx.start + 2
    return sheaf_cohomology(cx, position, t, expected)


def tensor_cohomology(pres_a: GradedMatrix, pres_b: GradedMatrix, t: int = 0,
                      rng: np.random.Generator | None = None,
                      expected: ChernCharacter | None = None, b_kind: str = "cokernel") -> CohomologyReport:
    """h^i of coker(pres_a) (x) coker(pres_b), or coker(pres_a) (x) ker(pres_b).

    coker(pres_a) must be locally free, so the tensor complex has one homology sheaf.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if not _injective(pres_a, rng):
        raise NotGenericMatrix("first presentation is not injective")
    if b_kind == "cokernel":
        if not _injective(pres_b, rng):
            raise NotGenericMatrix("second presentation is not injective")
        cx = tensor_complex(pres_a, pres_b, -2)
        cx.check_composites()
        return _ladder(cx, rng, t, expected)
    if b_kind == "kernel":
        if not _surjective(pres_b):
            raise NotGenericMatrix("second map is not surjective")
        cx = tensor_complex(pres_a, pres_b, -1)
        cx.check_composites()
        return sheaf_cohomology(cx, 0, t, expected)
    raise ValueError(f"b_kind must be 'cokernel' or 'kernel', not {b_kind!r}")
