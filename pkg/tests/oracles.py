"""Independent reference computations used to freeze derived values.

Nothing here imports the package's numerics: Riemann-Roch is written out in
log coordinates, ranks are computed by plain Python elimination, and
exceptional ranks are checked against Markov numbers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb


def rr_chi(r, mu, delta) -> Fraction:
    """Riemann-Roch on the plane in log coordinates: r(P(mu) - Delta)."""
    r, mu, delta = Fraction(r), Fraction(mu), Fraction(delta)
    return r * ((mu + 1) * (mu + 2) / 2 - delta)


def rr_rel(u, v) -> Fraction:
    """chi(u, v) for log characters u = (r, mu, Delta), v likewise."""
    (ru, mu_u, du), (rv, mu_v, dv) = u, v
    m = Fraction(mu_v) - Fraction(mu_u)
    return Fraction(ru) * Fraction(rv) * ((m + 1) * (m + 2) / 2 - Fraction(du) - Fraction(dv))


def h0_line(a: int) -> int:
    return comb(a + 2, 2) if a >= 0 else 0


def h2_line(a: int) -> int:
    return comb(-a - 1, 2) if a <= -3 else 0


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    """Row rank over F_p by textbook elimination on Python integers."""
    m = [[x % p for x in row] for row in rows]
    if not m:
        return 0
    rank, ncols = 0, len(m[0])
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def monomial_exponents(d: int) -> list[tuple[int, int, int]]:
    return [(a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a, -1, -1)]


def hilbert_function_of_points(points, t: int, p: int) -> int:
    """Number of conditions the points impose on degree-t forms."""
    rows = [[pow(x, a, p) * pow(y, b, p) * pow(z, c, p) % p for (a, b, c) in monomial_exponents(t)]
            for (x, y, z) in points]
    return rank_mod_p(rows, p)


def markov_numbers(limit: int) -> set[int]:
    """Markov numbers below ``limit``, from the Markov tree rooted at (1, 1, 1)."""
    seen, out = set(), set()
    stack = [(1, 1, 1)]
    while stack:
        t = tuple(sorted(stack.pop()))
        if t in seen or max(t) >= limit:
            continue
        seen.add(t)
        out.update(t)
        x, y, z = t
        stack += [(3 * y * z - x, y, z), (x, 3 * x * z - y, z), (x, y, 3 * x * y - z)]
    return out


def exceptional_slopes_bruteforce(max_rank: int) -> list[Fraction]:
    """Slopes c/r in [0, 1] with r a Markov number, gcd(c, r) = 1, and integral chi.

    Uses Delta = (1 - 1/r^2)/2 and asks chi(E(d)) to be an integer for d = 0, 1, 2.
    This search uses no slope recursion.
    """
    out = []
    for r in sorted(markov_numbers(max_rank)):
        for c in range(0, r + 1):
            if Fraction(c, r).denominator != r and r != 1:
                continue
            delta = (1 - Fraction(1, r * r)) / 2
            mu = Fraction(c, r)
            if all(rr_chi(r, mu + d, delta).denominator == 1 for d in range(3)):
                out.append(mu)
    return sorted(set(out))


def grid_points(k: int, m: int, p: int):
    """The k x m grid (i, j, 1), a complete intersection of degrees k and m."""
    return [(i, j, 1) for i, j in product(range(1, k + 1), range(1, m + 1))]
