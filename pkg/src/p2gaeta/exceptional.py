"""Exceptional bundles on the plane and the controlling-bundle search.

Exceptional slopes are indexed by dyadic rationals through the recursion
``eps(n) = n`` and ``eps((2p+1)/2^q) = eps(p/2^(q-1)) . eps((p+1)/2^(q-1))``
where ``a . b = (a+b)/2 + (D_b - D_a)/(3 + a - b)``.  Every exceptional bundle
satisfies ``chi(E, E) = 1``, hence ``Delta = (1 - 1/r^2)/2`` and ``gcd(r, c1) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .chern import ChernCharacter, LogChern, QuadraticExt, fmt, rat

DEFAULT_DEPTH_CAP = 64


class NotAnExceptionalPair(ValueError):
    pass


class ControllingNotFound(RuntimeError):
    pass


class UnsupportedRank(ValueError):
    pass


@dataclass(frozen=True)
class Dyadic:
    p: int
    q: int = 0

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q < 0:
            raise ValueError("dyadic exponent must be non-negative")
        while q > 0 and p % 2 == 0:
            p //= 2
            q -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def of(cls, x) -> Dyadic:
        x = rat(x)
        q = x.denominator.bit_length() - 1
        if x.denominator != 1 << q:
            raise ValueError(f"{x} is not dyadic")
        return cls(x.numerator, q)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, 1 << self.q)

    def parents(self) -> tuple[Dyadic, Dyadic]:
        """The adjacent pair whose midpoint is this address.

        Integers n have parents n-1 and n+1, the collection O(n-1), O(n), O(n+1).
        """
        if self.q == 0:
            return Dyadic(self.p - 1), Dyadic(self.p + 1)
        half = (self.p - 1) // 2
        return Dyadic(half, self.q - 1), Dyadic(half + 1, self.q - 1)

    def __str__(self):
        return fmt(self.value)


@dataclass(frozen=True)
class ExceptionalSlope:
    slope: Fraction
    rank: int
    discriminant: Fraction
    address: Dyadic

    @property
    def log(self) -> LogChern:
        return LogChern(self.rank, self.slope, self.discriminant)

    @property
    def ch(self) -> ChernCharacter:
        return self.log.ch

    def dual_ch(self) -> ChernCharacter:
        """Character of the dual bundle, the exceptional bundle of slope -slope."""
        return self.ch.dual()

    def twist(self, d: int) -> ExceptionalSlope:
        return epsilon(Dyadic.of(self.address.value + d))

    def to_json(self) -> dict:
        return {
            "slope": fmt(self.slope),
            "rank": self.rank,
            "discriminant": fmt(self.discriminant),
            "dyadic_address": fmt(self.address.value),
        }


def _discriminant(rank: int) -> Fraction:
    return (1 - Fraction(1, rank * rank)) / 2


def _adjacent(a: Dyadic, b: Dyadic) -> bool:
    gap = b.value - a.value
    if gap <= 0:
        return False
    if gap == 2:
        return a.q == 0 and b.q == 0
    if gap.numerator != 1 or gap.denominator & (gap.denominator - 1):
        return False
    # both ends must be multiples of the gap
    return (a.value / gap).denominator == 1


def _compose(alpha: ExceptionalSlope, beta: ExceptionalSlope, address: Dyadic) -> ExceptionalSlope:
    a, b = alpha.slope, beta.slope
    slope = (a + b) / 2 + (beta.discriminant - alpha.discriminant) / (3 + a - b)
    # chi(E,E) = r^2 - c1^2 + 2 r ch2 = 1 forces gcd(r, c1) = 1, so r is the denominator
    rank = slope.denominator
    if rank != alpha.rank * beta.rank * (3 + a - b):
        raise ArithmeticError(f"rank mismatch at address {address}")
    return ExceptionalSlope(slope, rank, _discriminant(rank), address)


@lru_cache(maxsize=None)
def _epsilon(address: Dyadic) -> ExceptionalSlope:
    if address.q == 0:
        return ExceptionalSlope(Fraction(address.p), 1, Fraction(0), address)
    left, right = address.parents()
    return _compose(_epsilon(left), _epsilon(right), address)


def epsilon(a) -> ExceptionalSlope:
    """The exceptional slope with dyadic address ``a`` (a Dyadic or a dyadic rational)."""
    address = a if isinstance(a, Dyadic) else Dyadic.of(a)
    # shift to [0, 1) so the cache stays small, then shift back
    n = address.value.numerator // address.value.denominator
    base = _epsilon(Dyadic.of(address.value - n))
    return ExceptionalSlope(base.slope + n, base.rank, base.discriminant, address)


def dot(alpha: ExceptionalSlope, beta: ExceptionalSlope) -> ExceptionalSlope:
    """The composition alpha . beta of an adjacent pair of exceptional slopes."""
    if not _adjacent(alpha.address, beta.address):
        raise NotAnExceptionalPair(f"{alpha.address} and {beta.address} are not adjacent")
    mid = Dyadic.of((alpha.address.value + beta.address.value) / 2)
    return _compose(alpha, beta, mid)


def half_width(e: ExceptionalSlope) -> QuadraticExt:
    """x_gamma = 3/2 - sqrt(2 Delta + 5/4): half the endpoint interval around gamma."""
    return Fraction(3, 2) - QuadraticExt.sqrt(2 * e.discriminant + Fraction(5, 4))


def interval(e: ExceptionalSlope) -> tuple[QuadraticExt, QuadraticExt]:
    w = half_width(e)
    return e.slope - w, e.slope + w


@dataclass(frozen=True)
class ControllingData:
    base: ExceptionalSlope
    d: int
    gamma: Fraction
    alpha: Fraction
    beta: Fraction
    bundle: ExceptionalSlope
    alpha_bundle: ExceptionalSlope
    beta_bundle: ExceptionalSlope
    on_boundary: bool = False

    def to_json(self) -> dict:
        return {
            "gamma": fmt(self.gamma),
            "alpha": fmt(self.alpha),
            "beta": fmt(self.beta),
            "d": self.d,
            "base": self.base.to_json(),
            "rank": self.bundle.rank,
            "on_boundary": self.on_boundary,
        }


def controlling_for(e: ExceptionalSlope, on_boundary: bool = False) -> ControllingData:
    """Package an exceptional slope gamma as E*(d) with mu_E in [0, 1)."""
    d = -((-e.slope.numerator) // e.slope.denominator)  # ceil
    base = epsilon(Dyadic.of(d - e.address.value))
    left, right = e.address.parents()
    return ControllingData(
        base=base,
        d=d,
        gamma=e.slope,
        alpha=epsilon(left).slope,
        beta=epsilon(right).slope,
        bundle=e,
        alpha_bundle=epsilon(left),
        beta_bundle=epsilon(right),
        on_boundary=on_boundary,
    )


def endpoints(c: ControllingData) -> tuple[QuadraticExt, QuadraticExt]:
    """Left and right endpoint slopes mu_G < gamma < mu_F on the line Delta = 1/2."""
    root = QuadraticExt.sqrt(2 * c.base.discriminant + Fraction(5, 4))
    shift = c.d - c.base.slope
    return shift - Fraction(3, 2) + root, shift + Fraction(3, 2) - root


def locate(x, depth_cap: int = DEFAULT_DEPTH_CAP) -> tuple[ExceptionalSlope, bool]:
    """Exceptional slope whose closed endpoint interval contains ``x``.

    Returns the slope and a flag telling whether ``x`` is an interval endpoint.
    """
    if not isinstance(x, QuadraticExt):
        x = QuadraticExt(rat(x))
    n = x.floor()
    lo, hi = epsilon(n), epsilon(n + 1)
    candidates = [lo, hi]
    for _ in range(depth_cap + 1):
        for e in candidates:
            left, right = interval(e)
            if left <= x <= right:
                return e, (x == left or x == right)
        mid = dot(lo, hi)
        if x < mid.slope:
            hi = mid
        else:
            lo = mid
        candidates = [mid]
    raise ControllingNotFound(f"no exceptional interval contains {x} within depth {depth_cap}")


def controlling(xi: LogChern, branch: str = "primary", depth_cap: int = DEFAULT_DEPTH_CAP) -> ControllingData:
    """The controlling exceptional bundle of xi.

    Primary: the interval containing the larger root of xi-perp on Delta = 1/2.
    Secondary: the interval containing the smaller root.
    """
    from .chern import orthogonal_slope_at_half

    if branch == "primary":
        x = orthogonal_slope_at_half(xi, "larger")
    elif branch == "secondary":
        if xi.r < 3:
            raise UnsupportedRank("the secondary controlling bundle needs rank at least 3")
        x = orthogonal_slope_at_half(xi, "smaller")
    else:
        raise ValueError(f"unknown branch {branch!r}")
    e, boundary = locate(x, depth_cap)
    return controlling_for(e, boundary)


def _p(x) -> Fraction:
    return (x * x + 3 * x + 2) / 2


def dlp_threshold(mu, depth_cap: int = DEFAULT_DEPTH_CAP) -> Fraction:
    """delta(mu) = P(-|mu - gamma|) - Delta_gamma, and 1/2 on interval endpoints."""
    mu = rat(mu)
    e, boundary = locate(mu, depth_cap)
    if boundary:
        return Fraction(1, 2)
    return _p(-abs(mu - e.slope)) - e.discriminant


def is_above_dlp(xi: LogChern, depth_cap: int = DEFAULT_DEPTH_CAP) -> bool:
    return xi.delta > dlp_threshold(xi.mu, depth_cap)


def enumerate_exceptionals(max_rank: int, window=(0, 1)) -> list[ExceptionalSlope]:
    """Exceptional slopes of rank below ``max_rank`` inside the closed window.

    Line bundles are always listed, so ``max_rank = 1`` gives the integers.
    Pruning is exhaustive because composition strictly increases the rank.
    """
    if max_rank < 1:
        raise ValueError("max_rank must be at least 1")
    lo, hi = rat(window[0]), rat(window[1])
    out: list[ExceptionalSlope] = []
    first = lo.numerator // lo.denominator - 1
    last = -((-hi.numerator) // hi.denominator) + 1

    def inside(e: ExceptionalSlope) -> bool:
        return lo <= e.slope <= hi

    def descend(a: ExceptionalSlope, b: ExceptionalSlope):
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            c = dot(a, b)
            if c.rank >= max_rank:
                continue
            if inside(c):
                out.append(c)
            if c.slope >= lo:
                stack.append((a, c))
            if c.slope <= hi:
                stack.append((c, b))

    for n in range(first, last + 1):
        e = epsilon(n)
        if inside(e):
            out.append(e)
        if n < last:
            descend(e, epsilon(n + 1))
    return sorted(out, key=lambda e: e.slope)
