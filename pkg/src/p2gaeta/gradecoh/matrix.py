"""Matrices of forms representing maps between sums of line bundles.

A GradedMatrix with column twists (s_j) and row twists (t_i) is a map
(+) O(s_j) -> (+) O(t_i); entry (i, j) is a form of degree t_i - s_j, and is
forced to zero when that degree is negative.
"""

from __future__ import annotations

import numpy as np

from ..chern import ChernCharacter, line_bundle
from .field import DEFAULT_PRIME, rank, reduce
from .poly import Poly, dim, monomial_values, parse_poly


class NotGenericMatrix(ValueError):
    pass


class NotAComplex(ValueError):
    pass


def twist_character(twists) -> ChernCharacter:
    total = ChernCharacter(0, 0, 0)
    for t in twists:
        total = total + line_bundle(t)
    return total


class GradedMatrix:
    def __init__(self, row_twists, col_twists, entries=None, p: int = DEFAULT_PRIME):
        self.row_twists = tuple(int(t) for t in row_twists)
        self.col_twists = tuple(int(t) for t in col_twists)
        self.p = int(p)
        self.entries: dict[tuple[int, int], Poly] = {}
        for (i, j), f in (entries or {}).items():
            if not (0 <= i < self.nrows and 0 <= j < self.ncols):
                raise IndexError(f"entry {(i, j)} outside a {self.nrows} x {self.ncols} matrix")
            if f.p != self.p:
                raise ValueError("entry over a different field")
            if f.is_zero():
                continue
            if f.degree != self.degree(i, j):
                raise ValueError(f"entry {(i, j)} has degree {f.degree}, expected {self.degree(i, j)}")
            self.entries[(i, j)] = f

    @property
    def nrows(self) -> int:
        return len(self.row_twists)

    @property
    def ncols(self) -> int:
        return len(self.col_twists)

    def degree(self, i: int, j: int) -> int:
        return self.row_twists[i] - self.col_twists[j]

    def __getitem__(self, ij) -> Poly | None:
        return self.entries.get(ij)

    # -- constructors ------------------------------------------------------

    @classmethod
    def random(cls, row_twists, col_twists, rng: np.random.Generator, p: int = DEFAULT_PRIME,
               minimal: bool = True) -> GradedMatrix:
        """Every admissible entry random; constant entries dropped when ``minimal``."""
        entries = {}
        for i, t in enumerate(row_twists):
            for j, s in enumerate(col_twists):
                d = t - s
                if d < 0 or (minimal and d == 0):
                    continue
                entries[(i, j)] = Poly.random(d, rng, p)
        return cls(row_twists, col_twists, entries, p)

    @classmethod
    def identity(cls, twists, p: int = DEFAULT_PRIME) -> GradedMatrix:
        return cls(twists, twists, {(i, i): Poly.constant(1, p) for i in range(len(twists))}, p)

    @classmethod
    def zero(cls, row_twists, col_twists, p: int = DEFAULT_PRIME) -> GradedMatrix:
        return cls(row_twists, col_twists, {}, p)

    @classmethod
    def blocks(cls, grid: list[list[GradedMatrix]]) -> GradedMatrix:
        """Assemble a block matrix; blocks in a row share row twists, in a column column twists."""
        rows = [row[0] for row in grid]
        cols = grid[0]
        p = grid[0][0].p
        row_twists = [t for b in rows for t in b.row_twists]
        col_twists = [t for b in cols for t in b.col_twists]
        entries = {}
        r0 = 0
        for row in grid:
            c0 = 0
            for k, b in enumerate(row):
                if b.row_twists != row[0].row_twists or b.col_twists != grid[0][k].col_twists:
                    raise ValueError("block twists do not line up")
                for (i, j), f in b.entries.items():
                    entries[(r0 + i, c0 + j)] = f
                c0 += b.ncols
            r0 += row[0].nrows
        return cls(row_twists, col_twists, entries, p)

    # -- algebra -------------------------------------------------------------

    def transpose(self) -> GradedMatrix:
        """The dual map (+) O(-t_i) -> (+) O(-s_j)."""
        return GradedMatrix(
            [-s for s in self.col_twists],
            [-t for t in self.row_twists],
            {(j, i): f for (i, j), f in self.entries.items()},
            self.p,
        )

    def twist(self, d: int) -> GradedMatrix:
        return GradedMatrix([t + d for t in self.row_twists], [s + d for s in self.col_twists],
                            self.entries, self.p)

    def scale(self, c: int) -> GradedMatrix:
        return GradedMatrix(self.row_twists, self.col_twists,
                            {k: f * c for k, f in self.entries.items()}, self.p)

    def __matmul__(self, other: GradedMatrix) -> GradedMatrix:
        """Composite self o other."""
        if self.col_twists != other.row_twists:
            raise ValueError("twists of the composite do not match")
        by_row: dict[int, list] = {}
        for (k, j), g in other.entries.items():
            by_row.setdefault(k, []).append((j, g))
        acc: dict[tuple[int, int], Poly] = {}
        for (i, k), f in self.entries.items():
            for j, g in by_row.get(k, []):
                h = f * g
                acc[(i, j)] = acc[(i, j)] + h if (i, j) in acc else h
        return GradedMatrix(self.row_twists, other.col_twists, acc, self.p)

    def kron(self, other: GradedMatrix) -> GradedMatrix:
        """Tensor product of maps; index (i, k) is i * other.nrows + k."""
        rows = [t + u for t in self.row_twists for u in other.row_twists]
        cols = [s + v for s in self.col_twists for v in other.col_twists]
        entries = {}
        for (i, j), f in self.entries.items():
            for (k, l), g in other.entries.items():
                entries[(i * other.nrows + k, j * other.ncols + l)] = f * g
        return GradedMatrix(rows, cols, entries, self.p)

    def is_zero(self) -> bool:
        return not self.entries

    def is_minimal(self) -> bool:
        """No nonzero constant entries."""
        return all(f.degree > 0 for f in self.entries.values())

    def minimalized(self) -> GradedMatrix:
        """Drop the constant entries, i.e. subtract the value at x = y = z = 0."""
        return GradedMatrix(self.row_twists, self.col_twists,
                            {k: f for k, f in self.entries.items() if f.degree > 0}, self.p)

    def __eq__(self, other):
        return (
            isinstance(other, GradedMatrix)
            and (self.row_twists, self.col_twists, self.p) == (other.row_twists, other.col_twists, other.p)
            and self.entries == other.entries
        )

    # -- numerics -----------------------------------------------------------

    def fiber(self, point) -> np.ndarray:
        """The numeric matrix at a point of P^2."""
        out = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        pt = reduce(point, self.p).reshape(1, 3)
        for (i, j), f in self.entries.items():
            out[i, j] = int(f.evaluate(pt)[0])
        return out

    def fibers(self, points) -> np.ndarray:
        """Fibers at N points as an N x rows x cols array."""
        points = reduce(points, self.p).reshape(-1, 3)
        out = np.zeros((points.shape[0], self.nrows, self.ncols), dtype=np.int64)
        cache: dict[int, np.ndarray] = {}
        for (i, j), f in self.entries.items():
            if f.degree not in cache:
                cache[f.degree] = monomial_values(points, f.degree, self.p)
            out[:, i, j] = cache[f.degree] @ f.vector() % self.p
        return out

    def generic_rank(self, rng: np.random.Generator) -> int:
        """Rank at a random point; equals the generic rank with probability >= 1 - deg/p."""
        pt = rng.integers(0, self.p, 3)
        return rank(self.fiber(pt), self.p)

    def source_character(self) -> ChernCharacter:
        return twist_character(self.col_twists)

    def target_character(self) -> ChernCharacter:
        return twist_character(self.row_twists)

    # -- text format ------------------------------------------------------------

    def to_text(self) -> str:
        lines = [
            f"prime: {self.p}",
            "rows: " + " ".join(map(str, self.row_twists)),
            "cols: " + " ".join(map(str, self.col_twists)),
        ]
        for (i, j) in sorted(self.entries):
            lines.append(f"{i} {j} : {self.entries[(i, j)]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, p: int | None = None) -> GradedMatrix:
        rows = cols = None
        body = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(":")
            key = key.strip()
            if key == "prime":
                p = int(rest) if p is None else p
            elif key == "rows":
                rows = [int(t) for t in rest.split()]
            elif key == "cols":
                cols = [int(t) for t in rest.split()]
            else:
                body.append((key, rest))
        if rows is None or cols is None:
            raise ValueError("missing rows: or cols: header")
        p = DEFAULT_PRIME if p is None else p
        entries = {}
        for key, rest in body:
            i, j = (int(v) for v in key.split())
            entries[(i, j)] = parse_poly(rest, rows[i] - cols[j], p)
        return cls(rows, cols, entries, p)

    def __repr__(self):
        return f"GradedMatrix(rows={list(self.row_twists)}, cols={list(self.col_twists)}, nonzero={len(self.entries)})"


def induced_h0(m: GradedMatrix, t: int = 0) -> np.ndarray:
    """H^0 of the map twisted by t, block multiplication-by-entry on monomial bases."""
    row_dims = [dim(a + t) for a in m.row_twists]
    col_dims = [dim(b + t) for b in m.col_twists]
    row_off = np.concatenate([[0], np.cumsum(row_dims)]).astype(int)
    col_off = np.concatenate([[0], np.cumsum(col_dims)]).astype(int)
    out = np.zeros((row_off[-1], col_off[-1]), dtype=np.int64)
    for (i, j), f in m.entries.items():
        if col_dims[j] == 0:
            continue
        out[row_off[i]:row_off[i + 1], col_off[j]:col_off[j + 1]] = f.mult_matrix(m.col_twists[j] + t)
    return out


def induced_h2(m: GradedMatrix, t: int = 0) -> np.ndarray:
    """H^2 of the map twisted by t, as the Serre-dual transpose.

    H^2(O(a)) is dual to H^0(O(-3-a)); the map on H^2 is the transpose of the
    H^0 map of the dual matrix twisted by -3 - t.
    """
    return induced_h0(m.transpose(), -3 - t).T.copy()
