"""Exact arithmetic on Chern characters of sheaves on the projective plane.

Characters are stored as ``(r, ch1, ch2)`` with :class:`fractions.Fraction`
entries.  The logarithmic form ``(r, mu, Delta)`` is a view computed on demand.
Riemann-Roch on the plane reads ``chi = r + 3/2 ch1 + ch2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, str]


class NonPositiveRank(ValueError):
    pass


class NoRealIntersection(ValueError):
    pass


def rat(x: Number) -> Fraction:
    """Coerce ints, fractions and strings such as ``"17/9"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fmt(q: Fraction) -> str:
    """Reduced fraction string, integers without a denominator."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ChernCharacter:
    r: Fraction
    c1: Fraction
    ch2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", rat(self.r))
        object.__setattr__(self, "c1", rat(self.c1))
        object.__setattr__(self, "ch2", rat(self.ch2))

    def __add__(self, other: ChernCharacter) -> ChernCharacter:
        return ChernCharacter(self.r + other.r, self.c1 + other.c1, self.ch2 + other.ch2)

    def __sub__(self, other: ChernCharacter) -> ChernCharacter:
        return ChernCharacter(self.r - other.r, self.c1 - other.c1, self.ch2 - other.ch2)

    def __neg__(self) -> ChernCharacter:
        return ChernCharacter(-self.r, -self.c1, -self.ch2)

    def __mul__(self, k) -> ChernCharacter:
        k = rat(k)
        return ChernCharacter(k * self.r, k * self.c1, k * self.ch2)

    __rmul__ = __mul__

    def tensor(self, other: ChernCharacter) -> ChernCharacter:
        return ChernCharacter(
            self.r * other.r,
            self.r * other.c1 + other.r * self.c1,
            self.r * other.ch2 + other.r * self.ch2 + self.c1 * other.c1,
        )

    def dual(self) -> ChernCharacter:
        return ChernCharacter(self.r, -self.c1, self.ch2)

    def twist(self, d: int) -> ChernCharacter:
        return self.tensor(line_bundle(d))

    def is_zero(self) -> bool:
        return self.r == 0 and self.c1 == 0 and self.ch2 == 0

    def to_log(self) -> LogChern:
        return to_log(self)

    def to_json(self) -> dict:
        return {"r": fmt(self.r), "c1": fmt(self.c1), "ch2": fmt(self.ch2)}

    @classmethod
    def from_json(cls, data: dict) -> ChernCharacter:
        return cls(rat(data["r"]), rat(data["c1"]), rat(data["ch2"]))

    def __str__(self):
        return f"(r={fmt(self.r)}, c1={fmt(self.c1)}, ch2={fmt(self.ch2)})"


@dataclass(frozen=True)
class LogChern:
    r: Fraction
    mu: Fraction
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", rat(self.r))
        object.__setattr__(self, "mu", rat(self.mu))
        object.__setattr__(self, "delta", rat(self.delta))
        if self.r <= 0:
            raise NonPositiveRank(f"log Chern character needs positive rank, got {self.r}")

    @property
    def ch(self) -> ChernCharacter:
        return from_log(self)

    def twist(self, d: int) -> LogChern:
        return twist(self, d)

    def dual(self) -> LogChern:
        return dual(self)

    def tensor(self, other: LogChern) -> LogChern:
        return LogChern(self.r * other.r, self.mu + other.mu, self.delta + other.delta)

    def __str__(self):
        return f"(r={fmt(self.r)}, mu={fmt(self.mu)}, Delta={fmt(self.delta)})"


Character = Union[ChernCharacter, LogChern]


def as_ch(x: Character) -> ChernCharacter:
    return x.ch if isinstance(x, LogChern) else x


def to_log(c: ChernCharacter) -> LogChern:
    if c.r <= 0:
        raise NonPositiveRank(f"rank must be positive, got {c.r}")
    mu = c.c1 / c.r
    return LogChern(c.r, mu, mu * mu / 2 - c.ch2 / c.r)


def from_log(x: LogChern) -> ChernCharacter:
    return ChernCharacter(x.r, x.r * x.mu, x.r * (x.mu * x.mu / 2 - x.delta))


def twist(x: LogChern, d: int) -> LogChern:
    return LogChern(x.r, x.mu + d, x.delta)


def dual(x: LogChern) -> LogChern:
    return LogChern(x.r, -x.mu, x.delta)


def serre_dual(x: LogChern) -> LogChern:
    """``U^D = U^*(-3)``: the slope goes to ``-mu - 3`` and Delta is kept."""
    return twist(dual(x), -3)


def line_bundle(d: int) -> ChernCharacter:
    d = rat(d)
    return ChernCharacter(1, d, d * d / 2)


def tangent(d: int = 0) -> ChernCharacter:
    """Character of T(d), the tangent bundle twisted by O(d)."""
    return from_log(LogChern(2, Fraction(3, 2) + d, Fraction(3, 8)))


def ideal_points(n: int) -> ChernCharacter:
    return ChernCharacter(1, 0, -rat(n))


def euler(x: Character) -> Fraction:
    c = as_ch(x)
    return c.r + Fraction(3, 2) * c.c1 + c.ch2


def rel_euler(u: Character, v: Character) -> Fraction:
    """chi(u, v) = chi(u^* (x) v); defined for every class, including rank <= 0."""
    return euler(as_ch(u).dual().tensor(as_ch(v)))


def pairing(xi: Character, zeta: Character) -> Fraction:
    """The symmetric form (xi, zeta) = chi(xi^*, zeta) = chi(xi (x) zeta)."""
    return euler(as_ch(xi).tensor(as_ch(zeta)))


# -- quadratic irrationals -------------------------------------------------


def _sign(q) -> int:
    return (q > 0) - (q < 0)


def _sign_surd(a: Fraction, b: Fraction, c) -> int:
    """Sign of a + b*sqrt(c) for c >= 0, by isolating the radical and squaring."""
    sb = _sign(b) if c else 0
    sa = _sign(a)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    diff = a * a - b * b * c
    if diff > 0:
        return sa
    if diff < 0:
        return sb
    return 0


def _sign_two_surds(a: Fraction, b: Fraction, m: int, e: Fraction, n: int) -> int:
    """Sign of a + b*sqrt(m) + e*sqrt(n)."""
    s = _sign_surd(Fraction(0), b, m) if e == 0 else None
    if s is None:
        # sign of b*sqrt(m) + e*sqrt(n)
        sb, se = _sign(b), _sign(e)
        if sb == 0 or sb == se:
            s = se if sb == 0 else sb
        else:
            t = b * b * m - e * e * n
            s = sb if t > 0 else (se if t < 0 else 0)
    sa = _sign(a)
    if s == 0:
        return sa
    if sa == 0 or sa == s:
        return s
    # opposite signs: compare a^2 with (b sqrt m + e sqrt n)^2
    t = _sign_surd(a * a - b * b * m - e * e * n, -2 * b * e, m * n)
    if t > 0:
        return sa
    if t < 0:
        return s
    return 0


_SQUAREFREE_FULL_LIMIT = 10**15


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write n = k^2 * m with m square-free (guaranteed for n below 10^15)."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    # after removing primes up to the cube root, at most two primes remain
    bound = round(n ** (1 / 3)) + 2 if n < _SQUAREFREE_FULL_LIMIT else 10**5
    k, m, rest = 1, 1, n
    p = 2
    while p <= bound and p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        m *= p ** (e % 2)
        p += 1 if p == 2 else 2
    r = math.isqrt(rest)
    if r * r == rest:
        return k * r, m
    return k, m * rest


@dataclass(frozen=True)
class QuadraticExt:
    """The real number a + b*sqrt(c) with a, b rational and c a square-free integer."""

    a: Fraction
    b: Fraction = Fraction(0)
    c: int = 1

    def __post_init__(self):
        a, b, c = rat(self.a), rat(self.b), int(self.c)
        if c <= 0:
            raise ValueError("radicand must be positive")
        if b == 0:
            c = 1
        else:
            k, c = _squarefree_split(c)
            b *= k
            if c == 1:
                a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def sqrt(cls, q: Number) -> QuadraticExt:
        q = rat(q)
        if q < 0:
            raise NoRealIntersection(f"negative radicand {q}")
        if q == 0:
            return cls(Fraction(0))
        # sqrt(p/q) = sqrt(p*q)/q
        return cls(Fraction(0), Fraction(1, q.denominator), q.numerator * q.denominator)

    def is_rational(self) -> bool:
        return self.b == 0

    def _coerce(self, other) -> QuadraticExt:
        return other if isinstance(other, QuadraticExt) else QuadraticExt(rat(other))

    def __add__(self, other) -> QuadraticExt:
        o = self._coerce(other)
        if o.b == 0:
            return QuadraticExt(self.a + o.a, self.b, self.c)
        if self.b == 0:
            return QuadraticExt(self.a + o.a, o.b, o.c)
        if self.c != o.c:
            raise ValueError("cannot add surds with different radicands")
        return QuadraticExt(self.a + o.a, self.b + o.b, self.c)

    __radd__ = __add__

    def __neg__(self) -> QuadraticExt:
        return QuadraticExt(-self.a, -self.b, self.c)

    def __sub__(self, other) -> QuadraticExt:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuadraticExt:
        return self._coerce(other) - self

    def __mul__(self, k) -> QuadraticExt:
        k = rat(k)
        return QuadraticExt(self.a * k, self.b * k, self.c)

    __rmul__ = __mul__

    def sign(self) -> int:
        return _sign_surd(self.a, self.b, self.c)

    def compare(self, other) -> int:
        """Exact sign of self - other, also across different radicands."""
        o = self._coerce(other)
        return _sign_two_surds(self.a - o.a, self.b, self.c, -o.b, o.c)

    def __eq__(self, other):
        if not isinstance(other, (QuadraticExt, int, Fraction)):
            return NotImplemented
        return self.compare(other) == 0

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.c)

    def floor(self) -> int:
        n = math.floor(float(self))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def __str__(self):
        if self.b == 0:
            return fmt(self.a)
        surd = f"sqrt({self.c})" if self.b == 1 else f"{fmt(self.b)}*sqrt({self.c})"
        if self.b == -1:
            surd = f"-sqrt({self.c})"
        if self.a == 0:
            return surd
        sep = " - " if surd.startswith("-") else " + "
        return f"{fmt(self.a)}{sep}{surd.lstrip('-')}"


def orthogonal_slope_at_half(xi: LogChern, branch: str = "larger") -> QuadraticExt:
    """Slope where the orthogonal parabola of xi meets the line Delta = 1/2.

    Solves chi(xi (x) zeta) = 0 for zeta with Delta_zeta = 1/2, which gives
    ``-mu - 3/2 +- sqrt(2 Delta + 5/4)``.
    """
    if branch not in ("larger", "smaller"):
        raise ValueError(f"unknown branch {branch!r}")
    radicand = 2 * xi.delta + Fraction(5, 4)
    if radicand < 0:
        raise NoRealIntersection(f"2*Delta + 5/4 = {radicand} is negative")
    root = QuadraticExt.sqrt(radicand)
    base = -xi.mu - Fraction(3, 2)
    return base + root if branch == "larger" else base - root
