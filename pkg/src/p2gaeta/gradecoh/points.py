"""Seeded point configurations and the Betti diagrams of their ideals.

Minimal generator counts come from ``dim I_t - dim S_1 I_(t-1)``; the
syzygies follow from the Hilbert function, since a length-one free
resolution is determined by the Hilbert functions of its two terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..chern import ideal_points
from ..gaeta import BettiTable, ResolutionShape
from .field import DEFAULT_PRIME, nullspace, rank, reduce, rref
from .poly import Poly, dim, monomial_values


class Infeasible(ValueError):
    pass


class RetryWithNewSeed(RuntimeError):
    pass


_STRATUM = re.compile(r"^(general|L_\{3,3\}|(?P<kind>[LQC])_(?P<k>\d+)|on_curve\((?P<e>\d+)\))$")


def normalize(point, p: int) -> tuple[int, int, int]:
    """Canonical representative: the last nonzero coordinate is 1."""
    pt = [int(v) % p for v in point]
    last = max(i for i in range(3) if pt[i])
    inv = pow(pt[last], p - 2, p)
    return tuple(v * inv % p for v in pt)


@dataclass(frozen=True, eq=False)
class PointConfig:
    points: np.ndarray
    stratum: str
    seed: int
    p: int = DEFAULT_PRIME
    witnesses: tuple = field(default=(), compare=False)

    def __post_init__(self):
        pts = reduce(self.points, self.p).reshape(-1, 3)
        if np.any(~pts.any(axis=1)):
            raise ValueError("(0, 0, 0) is not a point")
        canon = [normalize(q, self.p) for q in pts]
        if len(set(canon)) != len(canon):
            raise ValueError("points are not pairwise distinct")
        object.__setattr__(self, "points", np.array(canon, dtype=np.int64).reshape(-1, 3))
        for curve, on, exact in self.witnesses:
            vals = curve.evaluate(self.points)
            if np.any(vals[list(on)] != 0):
                raise ValueError(f"stratum {self.stratum}: a designated point is off its curve")
            off = [i for i in range(len(canon)) if i not in set(on)]
            if exact and off and np.any(vals[off] == 0):
                raise ValueError(f"stratum {self.stratum}: an extra point lies on the curve")

    def __eq__(self, other):
        return (
            isinstance(other, PointConfig)
            and (self.stratum, self.seed, self.p) == (other.stratum, other.seed, other.p)
            and np.array_equal(self.points, other.points)
        )

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_text(self) -> str:
        lines = [f"prime: {self.p}", f"stratum: {self.stratum}", f"seed: {self.seed}"]
        lines += [" ".join(str(int(v)) for v in q) for q in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> PointConfig:
        head, pts = {}, []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if ":" in line:
                k, _, v = line.partition(":")
                head[k.strip()] = v.strip()
            else:
                pts.append([int(v) for v in line.split()])
        return cls(np.array(pts, dtype=np.int64).reshape(-1, 3), head.get("stratum", "general"),
                   int(head.get("seed", 0)), int(head.get("prime", DEFAULT_PRIME)))


def random_point(rng: np.random.Generator, p: int) -> np.ndarray:
    while True:
        q = rng.integers(0, p, 3)
        if q.any():
            return q


def line_through(a, b, p: int) -> Poly:
    a, b = [int(v) for v in a], [int(v) for v in b]
    c = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    out = Poly(1, None, p)
    out.coef[1, 0], out.coef[0, 1], out.coef[0, 0] = (v % p for v in c)
    if out.is_zero():
        raise RetryWithNewSeed("coincident points do not span a line")
    return out


def curve_through(points: np.ndarray, e: int, rng: np.random.Generator, p: int) -> Poly:
    """A random member of the degree-e curves through ``points`` (unique when the count matches)."""
    kernel = nullspace(monomial_values(points, e, p), p)
    if kernel.shape[0] == 0:
        raise Infeasible(f"no curve of degree {e} through {points.shape[0]} points")
    coeffs = rng.integers(0, p, kernel.shape[0]) @ kernel % p
    return Poly.from_vector(e, coeffs, p)


def _univariate_roots(values_at: np.ndarray, deg: int, p: int) -> np.ndarray:
    """All roots in F_p of the degree <= deg polynomial with the given values at 0..deg."""
    lam = np.arange(deg + 1, dtype=np.int64)
    vander = np.ones((deg + 1, deg + 1), dtype=np.int64)
    for k in range(1, deg + 1):
        vander[:, k] = vander[:, k - 1] * lam % p
    aug = np.concatenate([vander, values_at.reshape(-1, 1)], axis=1)
    red, _ = rref(aug, p)
    coeffs = red[:, -1]
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in coeffs[::-1]:
        acc = (acc * xs + c) % p
    return xs[acc == 0]


def points_on_curve(curve: Poly, count: int, rng: np.random.Generator, avoid=(), max_lines: int = 200) -> np.ndarray:
    """Random F_p-points of a curve, found by root-finding along random lines."""
    p, e = curve.p, curve.degree
    seen = {normalize(q, p) for q in avoid}
    found: list[tuple[int, int, int]] = []
    for _ in range(max_lines):
        if len(found) == count:
            break
        a, b = random_point(rng, p), random_point(rng, p)
        samples = np.array([(a + lam * b) % p for lam in range(e + 1)])
        vals = curve.evaluate(samples)
        if not vals.any():
            continue  # the line is a component
        roots = _univariate_roots(vals, e, p)
        rng.shuffle(roots)
        for lam in roots:
            q = (a + int(lam) * b) % p
            if not q.any():
                continue
            key = normalize(q, p)
            if key not in seen:
                seen.add(key)
                found.append(key)
                break
    if len(found) < count:
        raise RetryWithNewSeed(f"found only {len(found)} of {count} points on the curve")
    return np.array(found, dtype=np.int64).reshape(-1, 3)


def _general(count: int, rng, p, avoid) -> np.ndarray:
    seen = {normalize(q, p) for q in avoid}
    out = []
    while len(out) < count:
        key = normalize(random_point(rng, p), p)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def _on_line(a, b, count: int, rng, p, avoid=()) -> np.ndarray:
    seen = {normalize(q, p) for q in avoid}
    out = []
    while len(out) < count:
        lam = int(rng.integers(0, p))
        key = normalize((np.asarray(a) + lam * np.asarray(b)) % p, p)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def sample_points(stratum: str, n: int, seed: int, p: int = DEFAULT_PRIME, attempts: int = 8) -> PointConfig:
    """n points of the given stratum, deterministic in the seed.

    Strata: general, L_k (exactly k on a line), Q_k (on a conic), C_k (on a
    cubic), L_{3,3} (five points, three on each of two lines through a common
    point) and on_curve(e) (all n points on one curve of degree e).
    """
    m = _STRATUM.match(stratum)
    if not m:
        raise Infeasible(f"unknown stratum {stratum!r}")
    last = None
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        try:
            return _sample(stratum, m, n, seed, p, rng)
        except (RetryWithNewSeed, ValueError) as exc:
            if isinstance(exc, Infeasible):
                raise
            last = exc
    raise RetryWithNewSeed(f"sampling {stratum} with seed {seed} failed: {last}")


def _sample(stratum, m, n, seed, p, rng) -> PointConfig:
    if stratum == "general":
        return PointConfig(_general(n, rng, p, ()), stratum, seed, p)
    if stratum == "L_{3,3}":
        if n != 5:
            raise Infeasible("L_{3,3} is the five-point configuration")
        o, a, b = _general(3, rng, p, ())
        first = _on_line(o, a, 2, rng, p, [o])
        second = _on_line(o, b, 2, rng, p, [o, *first])
        pts = np.vstack([o, first, second])
        wit = ((line_through(o, a, p), (0, 1, 2), True), (line_through(o, b, p), (0, 3, 4), True))
        return PointConfig(pts, stratum, seed, p, wit)
    if m.group("kind"):
        kind, k = m.group("kind"), int(m.group("k"))
        if not 1 <= k <= n:
            raise Infeasible(f"{stratum} needs 1 <= k <= n")
        if kind == "L":
            a, b = _general(2, rng, p, ())
            curve = line_through(a, b, p)
            on = _on_line(a, b, k, rng, p)
        else:
            e = 2 if kind == "Q" else 3
            curve = Poly.random(e, rng, p)
            on = points_on_curve(curve, k, rng)
        rest = _general(n - k, rng, p, on)
        pts = np.vstack([on, rest]) if n > k else on
        return PointConfig(pts, stratum, seed, p, ((curve, tuple(range(k)), True),))
    e = int(m.group("e"))
    if e < 1:
        raise Infeasible("curves have positive degree")
    base = min(n, dim(e) - 1)
    first = _general(base, rng, p, ())
    curve = curve_through(first, e, rng, p)
    more = points_on_curve(curve, n - base, rng, avoid=first) if n > base else np.zeros((0, 3), dtype=np.int64)
    pts = np.vstack([first, more])
    return PointConfig(pts, stratum, seed, p, ((curve, tuple(range(n)), False),))


# -- Betti diagrams -----------------------------------------------------------


def _products_by_linear_forms(basis: np.ndarray, t: int, p: int) -> np.ndarray:
    """Rows x*f, y*f, z*f in degree t for each row f of ``basis`` in degree t - 1."""
    if basis.shape[0] == 0:
        return np.zeros((0, dim(t)), dtype=np.int64)
    out = []
    for v in "xyz":
        mult = Poly.variable(v, p).mult_matrix(t - 1)
        out.append(basis @ mult.T % p)
    return np.vstack(out)


def resolution_from_hilbert(ideal_dims: dict[int, int], gen_counts: dict[int, int], length: int,
                            top: int) -> ResolutionShape:
    """Resolve a saturated codimension-two ideal from dim I_t (t <= top) and generator counts.

    Beyond ``top`` the Hilbert function of the quotient is the constant ``length``.
    """
    def ideal_dim(t):
        return ideal_dims[t] if t in ideal_dims else max(dim(t) - length, 0)

    syz: dict[int, int] = {}
    for t in range(0, top + 3):
        free = sum(c * dim(t - j) for j, c in gen_counts.items())
        known = sum(c * dim(t - j) for j, c in syz.items())
        b = free - ideal_dim(t) - known
        if b < 0:
            raise ValueError(f"negative syzygy count in degree {t}")
        if b:
            syz[t] = b
    shared = set(gen_counts) & set(syz)
    return ResolutionShape(
        [(-j, c) for j, c in gen_counts.items()],
        [(-j, c) for j, c in syz.items()],
        ideal_points(length),
        [-j for j in shared],
    )


def ideal_resolution(cfg: PointConfig) -> ResolutionShape:
    """Minimal free resolution shape of the ideal of a reduced configuration."""
    p, n = cfg.p, cfg.n
    dims: dict[int, int] = {}
    gens: dict[int, int] = {}
    prev = np.zeros((0, 1), dtype=np.int64)
    t = 0
    stable_at = None
    while True:
        values = monomial_values(cfg.points, t, p)
        basis = nullspace(values, p) if dim(t) else np.zeros((0, 0), dtype=np.int64)
        dims[t] = basis.shape[0]
        if t > 0:
            spanned = rank(_products_by_linear_forms(prev, t, p), p)
            if dims[t] > spanned:
                gens[t] = dims[t] - spanned
        prev = basis
        if dim(t) - dims[t] == n and stable_at is None:
            stable_at = t
        # generators live in degrees <= regularity = stable_at + 1
        if stable_at is not None and t >= stable_at + 1:
            break
        t += 1
    return resolution_from_hilbert(dims, gens, n, t)


def ideal_betti(cfg: PointConfig) -> BettiTable:
    return ideal_resolution(cfg).betti


def hilbert_function(cfg: PointConfig, upto: int) -> list[int]:
    return [rank(monomial_values(cfg.points, t, cfg.p), cfg.p) for t in range(upto + 1)]
