"""Gaeta resolutions, Gaeta triangles and the Betti-sum decomposition.

A general sheaf U of character xi above the DLP curve has a minimal free
resolution with at most three twists, all exponents being Euler
characteristics.  The controlling exceptional bundle E_gamma = E*(d) splits U
into a triangle whose factors X (the B-block) and Y (the A-block) satisfy
``ch U = ch X - ch Y``; the Betti numbers of U are those of X plus the
right-hand Betti numbers of Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .chern import (
    ChernCharacter,
    LogChern,
    QuadraticExt,
    as_ch,
    euler,
    fmt,
    line_bundle,
    rel_euler,
    serre_dual,
    tangent,
)
from .exceptional import (
    ControllingData,
    ExceptionalSlope,
    UnsupportedRank,
    controlling,
    dot,
    endpoints,
)


class NotGeneric(ValueError):
    pass


class NotPure(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class InternalInconsistency(AssertionError):
    pass


def _int(q: Fraction, what: str) -> int:
    if q.denominator != 1:
        raise NotGeneric(f"{what} = {fmt(q)} is not an integer")
    return int(q)


@dataclass(frozen=True)
class BettiTable:
    """Multiplicities keyed by (position, twist); position 1 = generators, 2 = syzygies."""

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (pos, twist), mult in self.entries.items():
            if pos not in (1, 2):
                raise ValueError(f"position must be 1 or 2, got {pos}")
            if mult < 0:
                raise ValueError(f"negative multiplicity at {(pos, twist)}")
            if mult:
                clean[(pos, int(twist))] = clean.get((pos, int(twist)), 0) + int(mult)
        object.__setattr__(self, "entries", clean)

    def __add__(self, other: BettiTable) -> BettiTable:
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return BettiTable(out)

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def beta(self, i: int, j: int) -> int:
        """Graded Betti number: beta_{1,j} counts O(-j) generators, beta_{2,j} counts O(-j-1) syzygies."""
        twist = -j if i == 1 else -j - 1
        return self.entries.get((i, twist), 0)

    def render(self) -> str:
        """Plain-text Betti diagram, rows indexed by j, columns by homological position."""
        if not self.entries:
            return "(zero)"
        js = {-t if p == 1 else -t - 1 for p, t in self.entries}
        rows = [("", "1", "2")]
        for j in range(min(js), max(js) + 1):
            b1, b2 = self.beta(1, j), self.beta(2, j)
            rows.append((str(j), str(b1) if b1 else "-", str(b2) if b2 else "-"))
        w = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [f"{r[0]:>{w[0]}} | {r[1]:>{w[1]}} {r[2]:>{w[2]}}" for r in rows]
        lines.insert(1, "-" * (w[0] + 1) + "+" + "-" * (w[1] + w[2] + 2))
        return "\n".join(lines)


def _line_sum(terms) -> ChernCharacter:
    total = ChernCharacter(0, 0, 0)
    for twist, mult in terms:
        total = total + line_bundle(twist) * mult
    return total


def _collect(terms) -> tuple[tuple[int, int], ...]:
    acc: dict[int, int] = {}
    for twist, mult in terms:
        if mult < 0:
            raise NotGeneric(f"negative exponent {mult} at twist {twist}")
        if mult:
            acc[int(twist)] = acc.get(int(twist), 0) + int(mult)
    return tuple(sorted(acc.items(), reverse=True))


@dataclass(frozen=True)
class ResolutionShape:
    """0 -> (+) O(a)^m -> (+) O(b)^n -> U -> 0 as twist lists, with the character it resolves."""

    generators: tuple
    syzygies: tuple
    character: ChernCharacter
    shared: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", _collect(self.generators))
        object.__setattr__(self, "syzygies", _collect(self.syzygies))
        object.__setattr__(self, "shared", tuple(sorted(int(t) for t in self.shared)))
        if _line_sum(self.generators) - _line_sum(self.syzygies) != as_ch(self.character):
            raise InternalInconsistency("resolution does not conserve the Chern character")
        common = {t for t, _ in self.generators} & {t for t, _ in self.syzygies}
        if common != set(self.shared):
            raise InternalInconsistency(f"twists {sorted(common)} appear on both sides")

    @classmethod
    def from_terms(cls, generators, syzygies, shared=()) -> ResolutionShape:
        gens, syz = _collect(generators), _collect(syzygies)
        return cls(gens, syz, _line_sum(gens) - _line_sum(syz), shared)

    @property
    def betti(self) -> BettiTable:
        entries = {(1, t): m for t, m in self.generators}
        entries.update({(2, t): m for t, m in self.syzygies})
        return BettiTable(entries)

    def twist(self, d: int) -> ResolutionShape:
        return ResolutionShape(
            [(t + d, m) for t, m in self.generators],
            [(t + d, m) for t, m in self.syzygies],
            self.character.twist(d),
            [t + d for t in self.shared],
        )

    def dual(self) -> ResolutionShape:
        """Right-hand resolution read as the left-hand one of the dual (sheaf ranks permitting)."""
        return ResolutionShape.from_terms(
            [(-t, m) for t, m in self.syzygies], [(-t, m) for t, m in self.generators]
        )

    def to_json(self) -> dict:
        out = {
            "syzygies": [[t, m] for t, m in self.syzygies],
            "generators": [[t, m] for t, m in self.generators],
        }
        if self.shared:
            out["shared"] = list(self.shared)
        return out

    def __str__(self):
        def side(terms):
            if not terms:
                return "0"
            return " + ".join(f"O({t})^{m}" if m != 1 else f"O({t})" for t, m in terms)

        return f"{side(self.syzygies)} -> {side(self.generators)}"


# -- Gaeta numbers ---------------------------------------------------------


def gaeta_numbers(x, d: int) -> tuple[Fraction, Fraction, Fraction]:
    """(n, l, j) = (chi(O(-d), x), -chi(T(-d-1), x), -chi(O(-d+1), x)).

    n counts O(-d) generators, j counts O(-d-2) syzygies and l counts O(-d-1)
    generators when positive, syzygies when negative.  Valid for any class.
    """
    x = as_ch(x)
    return (
        rel_euler(line_bundle(-d), x),
        -rel_euler(tangent(-d - 1), x),
        -rel_euler(line_bundle(-d + 1), x),
    )


def shape_from_numbers(n, l, j, d: int) -> ResolutionShape:
    n, l, j = (_int(Fraction(v), k) for v, k in zip((n, l, j), "nlj"))
    gens = [(-d, n)]
    syz = [(-d - 2, j)]
    if l >= 0:
        gens.append((-d - 1, l))
    else:
        syz.append((-d - 1, -l))
    return ResolutionShape.from_terms(gens, syz)


def minimal_twist(xi: LogChern) -> int:
    """Least d with chi(U(d)) > 0.

    The scan starts at the least d with mu + d > -3, where h^2(U(d)) vanishes
    for a semistable U, so chi > 0 really means a section.
    """
    d = (-xi.mu - 3).numerator // (-xi.mu - 3).denominator + 1
    base = xi.ch
    while euler(base.twist(d)) <= 0:
        d += 1
    return d


def gaeta_resolution(xi) -> ResolutionShape:
    """Gaeta's resolution of a general sheaf of character xi (rank > 0)."""
    if isinstance(xi, ChernCharacter):
        xi = xi.to_log()
    d = minimal_twist(xi)
    n, l, j = gaeta_numbers(xi, d)
    shape = shape_from_numbers(n, l, j, d)
    if shape.character != xi.ch:
        raise InternalInconsistency("Gaeta exponents do not reproduce the character")
    return shape


# -- exceptional resolutions and the triangle --------------------------------


class Case(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    EXCEPTIONAL = "Exceptional"


def _neg(e: ExceptionalSlope) -> ChernCharacter:
    """Character of E_{-e}, the dual of E_e."""
    return e.ch.dual()


@dataclass(frozen=True)
class ExceptionalTerm:
    slope: Fraction
    rank: int
    character: ChernCharacter
    exponent: int

    def to_json(self) -> dict:
        return {"slope": fmt(self.slope), "rank": self.rank, "exponent": self.exponent}

    def __str__(self):
        return f"E_{{{fmt(self.slope)}}}^{self.exponent}"


def _term(ch: ChernCharacter, exponent: Fraction) -> ExceptionalTerm:
    return ExceptionalTerm(ch.c1 / ch.r, int(ch.r), ch, _int(exponent, "exponent"))


def _sum(terms) -> ChernCharacter:
    total = ChernCharacter(0, 0, 0)
    for t in terms:
        total = total + t.character * t.exponent
    return total


def _case_of(c: ControllingData, u: ChernCharacter) -> tuple[Case, Fraction]:
    s = rel_euler(_neg(c.bundle), u)
    if s > 0:
        return Case.POSITIVE, s
    if s < 0:
        return Case.NEGATIVE, s
    return Case.EXCEPTIONAL, s


def exceptional_resolution(xi: LogChern, c: ControllingData | None = None):
    """Resolution of a general U by exceptional bundles: (left, right) term lists.

    Positive:    E_{-a-3}^{-chi(E_{-a},U)} -> E_{-b}^{-chi(E_{-(a.g)},U)} + E_{-g}^{chi(E_{-g},U)}
    Negative:    E_{-g-3}^{-chi(E_{-g},U)} + E_{-a-3}^{chi(E_{-(g.b)},U)} -> E_{-b}^{chi(E_{-b},U)}
    Exceptional: E_{-a-3}^{-chi(E_{-a},U)} -> E_{-b}^{chi(E_{-b},U)}
    """
    c = c or controlling(xi)
    u = xi.ch
    g, a, b = c.bundle, c.alpha_bundle, c.beta_bundle
    case, s = _case_of(c, u)

    def chi(e: ExceptionalSlope) -> Fraction:
        return rel_euler(_neg(e), u)

    a3, g3 = _neg(a).twist(-3), _neg(g).twist(-3)
    if case is Case.POSITIVE:
        left = [_term(a3, -chi(a))]
        right = [_term(_neg(b), -chi(dot(a, g))), _term(_neg(g), s)]
    elif case is Case.NEGATIVE:
        left = [_term(g3, -s), _term(a3, chi(dot(g, b)))]
        right = [_term(_neg(b), chi(b))]
    else:
        left = [_term(a3, -chi(a))]
        right = [_term(_neg(b), chi(b))]
    for t in left + right:
        if t.exponent < 0:
            raise NotGeneric(f"exponent {t.exponent} of {t} is negative")
    left = [t for t in left if t.exponent]
    right = [t for t in right if t.exponent]
    if _sum(right) - _sum(left) != u:
        raise InternalInconsistency("exceptional resolution does not conserve the character")
    return left, right


@dataclass(frozen=True)
class GaetaTriangle:
    """F -> U -> W[1] (Positive, Exceptional) or W -> U -> F[1] (Negative).

    ``block_b`` is the B-block factor X and ``block_a`` the A-block factor Y with
    ch U = ch X - ch Y.  F is (character, exponent) of the exceptional power.
    """

    case: Case
    F: tuple
    W: ChernCharacter
    controlling: ControllingData
    block_b: ChernCharacter
    block_a: ChernCharacter
    chi_gamma: Fraction
    left: tuple
    right: tuple

    def to_json(self) -> dict:
        f_ch, f_exp = self.F
        return {
            "case": self.case.value,
            "controlling": self.controlling.to_json(),
            "chi_E_minus_gamma_U": fmt(self.chi_gamma),
            "F": {"character": f_ch.to_json(), "exponent": f_exp},
            "W": self.W.to_json(),
            "resolution": {
                "left": [t.to_json() for t in self.left],
                "right": [t.to_json() for t in self.right],
            },
        }


def gaeta_case(xi: LogChern, c: ControllingData | None = None) -> GaetaTriangle:
    c = c or controlling(xi)
    u = xi.ch
    left, right = exceptional_resolution(xi, c)
    case, s = _case_of(c, u)
    g, a, b = c.bundle, c.alpha_bundle, c.beta_bundle
    if case is Case.POSITIVE:
        m = int(s)
        f = (_neg(g), m)
        x = _neg(g) * m
        y = x - u
        w = y
    elif case is Case.NEGATIVE:
        m = int(-s)
        f = (_neg(g).twist(-3), m)
        y = _neg(g).twist(-3) * m
        x = u + y
        w = x
    else:
        ell = int(rel_euler(_neg(b), u))
        k = int(-rel_euler(_neg(a), u))
        f = (_neg(b), ell)
        x = _neg(b) * ell
        y = _neg(a).twist(-3) * k
        w = y
    if x - y != u:
        raise InternalInconsistency("triangle factors do not add up to U")
    return GaetaTriangle(case, f, w, c, x, y, s, tuple(left), tuple(right))


# -- Betti decomposition ----------------------------------------------------


@dataclass(frozen=True)
class ZetaMapModel:
    total_shape: ResolutionShape
    block_B: ResolutionShape
    block_A_shape: ResolutionShape
    numbers: dict
    d: int
    case: Case

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "d": self.d,
            "numbers": {k: int(v) for k, v in self.numbers.items()},
            "total": self.total_shape.to_json(),
            "block_B": self.block_B.to_json(),
            "block_A": self.block_A_shape.to_json(),
        }


def _right_hand_numbers(y: ChernCharacter, d: int) -> tuple[Fraction, Fraction, Fraction]:
    """(n1, l1, j1): right-hand Betti numbers of Y in the window {-d-2, -d-1, -d}."""
    ys = y.dual()
    n1 = -rel_euler(line_bundle(d + 3), ys)
    l1 = rel_euler(tangent(d + 1), ys)
    j1 = rel_euler(line_bundle(d + 2), ys)
    if (j1, -l1, n1) != gaeta_numbers(ys, -d - 2):
        raise InternalInconsistency("right-hand numbers disagree with the dual's Gaeta numbers")
    return (n1, l1, j1)


def decompose_betti(xi: LogChern) -> ZetaMapModel:
    """Split the Gaeta Betti numbers of U into the B-block and the A-block.

    U: (n, l, j) at twist d.  X: (n2, l2, j2) at the same twist.  Y: n1, l1, j1
    from its dual, so that n = n1 + n2, l = l1 + l2 and j = j1 + j2.
    """
    tri = gaeta_case(xi)
    d = minimal_twist(xi)
    n, l, j = gaeta_numbers(xi, d)
    n2, l2, j2 = gaeta_numbers(tri.block_b, d)
    n1, l1, j1 = _right_hand_numbers(tri.block_a, d)
    if (n, l, j) != (n1 + n2, l1 + l2, j1 + j2):
        raise InternalInconsistency("Betti numbers are not additive over the triangle")
    nums = {"n1": n1, "n2": n2, "l1": l1, "l2": l2, "j1": j1, "j2": j2}
    for k, v in nums.items():
        _int(v, k)
    if min(n1, n2, j1, j2) < 0 or l1 * l2 < 0:
        raise NotGeneric(f"block numbers {nums} have the wrong signs")
    total = shape_from_numbers(n, l, j, d)
    block_b = shape_from_numbers(n2, l2, j2, d)
    if tri.block_b.r > 0 and gaeta_resolution(tri.block_b) != block_b:
        raise InternalInconsistency("B-block shape differs from the Gaeta resolution of its factor")
    block_a = shape_from_numbers(n1, l1, j1, d)
    # 0 -> Y -> syzygy part -> generator part -> 0, so the shape carries -ch(Y)
    if block_a.character != -tri.block_a:
        raise InternalInconsistency("A-block shape does not resolve its factor")
    if total.betti != block_b.betti + block_a.betti:
        raise InternalInconsistency("block Betti tables do not add up")
    return ZetaMapModel(total, block_b, block_a, nums, d, tri.case)


def endpoint_inequality_holds(xi: LogChern, tri: GaetaTriangle | None = None) -> bool:
    """The endpoint inequality attached to the selected case.

    Positive: chi(G^*, U) < 0 at the left endpoint G.  Negative and
    Exceptional: chi(G^*, U) >= 0 at the right endpoint (strict for Negative).
    The sign is that of P(mu_U + mu_G) - 1/2 - Delta_U.
    """
    tri = tri or gaeta_case(xi)
    left, right = endpoints(tri.controlling)
    mu_g = left if tri.case is Case.POSITIVE else right
    x = mu_g + xi.mu
    # P(x) = ((x + 3/2)^2 - 1/4) / 2 with x = a + b sqrt(c)
    a = x.a + Fraction(3, 2)
    value_a = (a * a + x.b * x.b * x.c - Fraction(1, 4)) / 2 - Fraction(1, 2) - xi.delta
    value_b = a * x.b
    sign = QuadraticExt(value_a, value_b, x.c).sign()
    if tri.case is Case.POSITIVE:
        return sign < 0
    if tri.case is Case.NEGATIVE:
        return sign > 0
    return sign >= 0


# -- divisorial and secondary shapes ------------------------------------------


def divisorial_gaeta(xi: LogChern) -> ResolutionShape:
    """Divisorial Gaeta resolution of a pure Gaeta shape.

    With generator twist g:
      O(g-1)^s -> O(g)^t   becomes  O(g-2) + O(g-1)^(s-3) -> O(g)^(t-3) + O(g+1),  t > s >= 3
      O(g-2)^s -> O(g)^t   becomes  O(g-2)^s + O(g-1)  -> O(g-1) + O(g)^t,         t > s >= 1
    """
    shape = gaeta_resolution(xi)
    if len(shape.generators) != 1 or len(shape.syzygies) != 1:
        raise NotPure(f"Gaeta resolution {shape} is not pure")
    (g, t), (h, s) = shape.generators[0], shape.syzygies[0]
    if h == g - 1:
        if not t > s >= 3:
            raise OutOfRange(f"need t > s >= 3, got s={s}, t={t}")
        return ResolutionShape.from_terms([(g, t - 3), (g + 1, 1)], [(g - 2, 1), (g - 1, s - 3)])
    if h == g - 2:
        if not t > s >= 1:
            raise OutOfRange(f"need t > s >= 1, got s={s}, t={t}")
        return ResolutionShape.from_terms([(g - 1, 1), (g, t)], [(g - 2, s), (g - 1, 1)], shared=[g - 1])
    raise NotPure(f"unexpected gap between twists in {shape}")


def secondary_edge_resolution(xi: LogChern) -> ResolutionShape:
    """Gaeta resolution of the Serre dual U^D = U*(-3), the non-admissible locus witness."""
    if xi.r < 3:
        raise UnsupportedRank("the secondary edge needs rank at least 3")
    return gaeta_resolution(serre_dual(xi))
