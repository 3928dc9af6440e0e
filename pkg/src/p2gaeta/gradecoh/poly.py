"""Homogeneous polynomials in x, y, z over F_p.

A form of degree d is stored as a (d+1) x (d+1) array ``c`` whose entry
``c[a, b]`` is the coefficient of x^a y^b z^(d-a-b); entries with a + b > d
are zero.  Products are sums of shifted copies, so no monomial lookup is needed.
"""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

from .field import DEFAULT_PRIME, reduce


def dim(d: int) -> int:
    """Number of monomials of degree d, h^0(O(d))."""
    return (d + 1) * (d + 2) // 2 if d >= 0 else 0


@lru_cache(maxsize=None)
def _basis(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exponent arrays (a, b) of the degree-d basis and the inverse index table."""
    a = np.array([i for i in range(d, -1, -1) for _ in range(d - i, -1, -1)], dtype=np.int64)
    b = np.array([j for i in range(d, -1, -1) for j in range(d - i, -1, -1)], dtype=np.int64)
    index = -np.ones((d + 1, d + 1), dtype=np.int64)
    index[a, b] = np.arange(a.size)
    for arr in (a, b, index):
        arr.setflags(write=False)
    return a, b, index


def monomials(d: int) -> list[tuple[int, int, int]]:
    """Degree-d exponent triples, x^d first."""
    if d < 0:
        return []
    a, b, _ = _basis(d)
    return [(int(i), int(j), d - int(i) - int(j)) for i, j in zip(a, b)]


def monomial_values(points: np.ndarray, d: int, p: int) -> np.ndarray:
    """Evaluation matrix: row k holds every degree-d monomial at point k."""
    points = reduce(points, p).reshape(-1, 3)
    if d < 0:
        return np.zeros((points.shape[0], 0), dtype=np.int64)
    powers = np.ones((3, d + 1, points.shape[0]), dtype=np.int64)
    for k in range(1, d + 1):
        powers[:, k] = powers[:, k - 1] * points.T % p
    a, b, _ = _basis(d)
    out = powers[0][a] * powers[1][b] % p * powers[2][d - a - b] % p
    return out.T.copy()


class Poly:
    __slots__ = ("degree", "coef", "p")

    def __init__(self, degree: int, coef=None, p: int = DEFAULT_PRIME):
        if degree < 0:
            raise ValueError("homogeneous forms have non-negative degree")
        self.degree = int(degree)
        self.p = int(p)
        if coef is None:
            coef = np.zeros((degree + 1, degree + 1), dtype=np.int64)
        coef = reduce(coef, p)
        if coef.shape != (degree + 1, degree + 1):
            raise ValueError(f"coefficient array shape {coef.shape} does not match degree {degree}")
        a, b = np.indices(coef.shape)
        if np.any(coef[a + b > degree]):
            raise ValueError("coefficients outside the degree simplex")
        self.coef = coef

    @classmethod
    def constant(cls, c: int, p: int = DEFAULT_PRIME) -> Poly:
        return cls(0, np.array([[c]]), p)

    @classmethod
    def monomial(cls, exps: tuple[int, int, int], c: int = 1, p: int = DEFAULT_PRIME) -> Poly:
        a, b, e = exps
        out = cls(a + b + e, None, p)
        out.coef[a, b] = c % p
        return out

    @classmethod
    def variable(cls, name: str, p: int = DEFAULT_PRIME) -> Poly:
        return cls.monomial({"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[name], 1, p)

    @classmethod
    def from_vector(cls, d: int, vec, p: int = DEFAULT_PRIME) -> Poly:
        a, b, _ = _basis(d)
        coef = np.zeros((d + 1, d + 1), dtype=np.int64)
        coef[a, b] = reduce(vec, p)
        return cls(d, coef, p)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator, p: int = DEFAULT_PRIME) -> Poly:
        return cls.from_vector(d, rng.integers(0, p, dim(d)), p)

    def vector(self) -> np.ndarray:
        a, b, _ = _basis(self.degree)
        return self.coef[a, b].copy()

    def is_zero(self) -> bool:
        return not self.coef.any()

    def _same(self, other: Poly):
        if self.p != other.p:
            raise ValueError("forms over different fields")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other: Poly) -> Poly:
        self._same(other)
        return Poly(self.degree, self.coef + other.coef, self.p)

    def __sub__(self, other: Poly) -> Poly:
        self._same(other)
        return Poly(self.degree, self.coef - other.coef, self.p)

    def __neg__(self) -> Poly:
        return Poly(self.degree, -self.coef, self.p)

    def __mul__(self, other) -> Poly:
        if isinstance(other, Poly):
            if self.p != other.p:
                raise ValueError("forms over different fields")
            d1, d2 = self.degree, other.degree
            out = np.zeros((d1 + d2 + 1, d1 + d2 + 1), dtype=np.int64)
            for i, j in zip(*np.nonzero(self.coef)):
                out[i:i + d2 + 1, j:j + d2 + 1] += self.coef[i, j] * other.coef
                out %= self.p
            return Poly(d1 + d2, out, self.p)
        return Poly(self.degree, self.coef * (int(other) % self.p), self.p)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.p == other.p
            and self.degree == other.degree
            and np.array_equal(self.coef, other.coef)
        )

    def __hash__(self):
        return hash((self.degree, self.p, self.coef.tobytes()))

    def evaluate(self, points) -> np.ndarray:
        """Values at each row of ``points`` (an N x 3 array)."""
        return monomial_values(points, self.degree, self.p) @ self.vector() % self.p

    def mult_matrix(self, t: int) -> np.ndarray:
        """Matrix of multiplication by this form from degree t to degree t + deg."""
        e = self.degree
        if t < 0:
            return np.zeros((dim(t + e), 0), dtype=np.int64)
        a, b, _ = _basis(t)
        _, _, target = _basis(t + e)
        out = np.zeros((dim(t + e), dim(t)), dtype=np.int64)
        ii, jj = np.nonzero(self.coef)
        if ii.size == 0:
            return out
        rows = target[a[None, :] + ii[:, None], b[None, :] + jj[:, None]]
        cols = np.broadcast_to(np.arange(a.size), rows.shape)
        vals = np.broadcast_to(self.coef[ii, jj][:, None], rows.shape)
        np.add.at(out, (rows.ravel(), cols.ravel()), vals.ravel())
        return out % self.p

    def terms(self) -> list[tuple[int, tuple[int, int, int]]]:
        return [(int(c), m) for c, m in zip(self.vector(), monomials(self.degree)) if c]

    def __str__(self):
        parts = []
        for c, (a, b, e) in self.terms():
            parts.append(f"{c}*x^{a}*y^{b}*z^{e}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


_TERM = re.compile(r"^\s*(\d+)\*x\^(\d+)\*y\^(\d+)\*z\^(\d+)\s*$")


def parse_poly(text: str, degree: int, p: int = DEFAULT_PRIME) -> Poly:
    """Inverse of ``str(Poly)``; ``degree`` is needed for the zero form."""
    out = Poly(degree, None, p)
    text = text.strip()
    if text == "0":
        return out
    for chunk in text.split("+"):
        m = _TERM.match(chunk)
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        c, a, b, e = (int(g) for g in m.groups())
        if a + b + e != degree:
            raise ValueError(f"term {chunk.strip()!r} is not of degree {degree}")
        out.coef[a, b] = (out.coef[a, b] + c) % p
    return out
