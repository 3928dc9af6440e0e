"""Ideals from matrices: Hilbert-Burch minors, tangent-section zero loci, (qk) matrices."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..gaeta import BettiTable, ResolutionShape
from .field import DEFAULT_PRIME, rank, rref
from .matrix import GradedMatrix, NotGenericMatrix
from .points import RetryWithNewSeed, _products_by_linear_forms, resolution_from_hilbert
from .poly import Poly, dim


def maximal_minors(m: GradedMatrix) -> list[Poly | None]:
    """det of m with row i deleted, for every i, when m is (k+1) x k.

    Laplace expansion along columns over row subsets, sharing every
    sub-determinant; no division, so it works over any ring of forms.
    Zero minors come back as None.
    """
    k = m.ncols
    if m.nrows != k + 1:
        raise ValueError("maximal minors need one more row than columns")
    rows = range(k + 1)
    layer: dict[tuple[int, ...], Poly] = {(): Poly.constant(1, m.p)}
    for j in range(k):
        nxt: dict[tuple[int, ...], Poly] = {}
        for subset in combinations(rows, j + 1):
            acc = None
            for pos, r in enumerate(subset):
                f = m[(r, j)]
                rest = layer.get(subset[:pos] + subset[pos + 1:])
                if f is None or rest is None:
                    continue
                term = f * rest
                if (pos + j) % 2:
                    term = -term
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                nxt[subset] = acc
        layer = nxt
    return [layer.get(tuple(r for r in rows if r != i)) for i in rows]


def hilbert_burch(m: GradedMatrix) -> list[Poly]:
    """Signed maximal minors generating the ideal whose resolution matrix is m.

    m maps (+) O(col_j) -> (+) O(row_i) with one more row than columns and
    sum(row) = sum(col); the minor for row i has degree -row_i.
    """
    if sum(m.row_twists) != sum(m.col_twists):
        raise ValueError("twists do not present an ideal (c1 must vanish)")
    minors = maximal_minors(m)
    if all(f is None for f in minors):
        raise NotGenericMatrix("every maximal minor vanishes")
    out = []
    for i, f in enumerate(minors):
        d = -m.row_twists[i]
        if f is None:
            f = Poly(d, None, m.p)
        if f.degree != d:
            raise NotGenericMatrix(f"minor {i} has degree {f.degree}, expected {d}")
        out.append(-f if i % 2 else f)
    length = -(m.target_character() - m.source_character()).ch2
    top = max(-c for c in m.col_twists) - 1
    if ideal_dimension(out, top) != dim(top) - length:
        raise NotGenericMatrix("the minors do not cut out a scheme of the expected length")
    return out


def ideal_basis(gens: list[Poly], t: int) -> np.ndarray:
    """Rows spanning the degree-t part of the ideal generated by ``gens``."""
    if not gens:
        return np.zeros((0, dim(t)), dtype=np.int64)
    p = gens[0].p
    blocks = [g.mult_matrix(t - g.degree).T for g in gens if g.degree <= t]
    if not blocks:
        return np.zeros((0, dim(t)), dtype=np.int64)
    return np.vstack(blocks) % p


def ideal_dimension(gens: list[Poly], t: int) -> int:
    return rank(ideal_basis(gens, t), gens[0].p) if gens else 0


def resolution_of_ideal(gens: list[Poly], length: int | None = None, max_degree: int = 200) -> ResolutionShape:
    """Resolution shape of a saturated codimension-two ideal given by generators."""
    p = gens[0].p
    dims: dict[int, int] = {}
    counts: dict[int, int] = {}
    prev = np.zeros((0, 1), dtype=np.int64)
    top_gen = max(g.degree for g in gens)
    h_prev = None
    for t in range(max_degree + 1):
        basis = ideal_basis(gens, t)
        dims[t] = rank(basis, p) if basis.size else 0
        if t > 0 and dims[t]:
            spanned = rank(_products_by_linear_forms(_row_basis(prev, p), t, p), p) if prev.size else 0
            if dims[t] > spanned:
                counts[t] = dims[t] - spanned
        prev = basis
        h = dim(t) - dims[t]
        if t > top_gen and h == h_prev:
            if length is not None and h != length:
                raise RetryWithNewSeed(f"the ideal has colength {h}, expected {length}")
            return resolution_from_hilbert(dims, counts, h, t)
        h_prev = h
    raise NotGenericMatrix("Hilbert function did not stabilise; the zero locus is not finite")


def _row_basis(a: np.ndarray, p: int) -> np.ndarray:
    return rref(a, p)[0] if a.size else a


def euler_presentation(k: int, p: int = DEFAULT_PRIME) -> GradedMatrix:
    """O(k) -> O(k+1)^3 by (x, y, z); its cokernel is T(k)."""
    return GradedMatrix([k + 1] * 3, [k], {(i, 0): Poly.variable(v, p) for i, v in enumerate("xyz")}, p)


def tangent_section_zero_locus(s: int, seed: int, p: int = DEFAULT_PRIME,
                               attempts: int = 8) -> tuple[list[Poly], BettiTable]:
    """Zero locus of a random section of T(2s-2), with the Betti table of its ideal.

    The section is a triple (A, B, C) of degree 2s-1 forms modulo the Euler
    relation; the ideal is generated by the 2 x 2 minors of [[x, y, z], [A, B, C]].
    """
    if s < 2:
        raise ValueError("s must be at least 2")
    length = 4 * s * s - 2 * s + 1
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        a, b, c = (Poly.random(2 * s - 1, rng, p) for _ in range(3))
        x, y, z = (Poly.variable(v, p) for v in "xyz")
        gens = [y * c - z * b, z * a - x * c, x * b - y * a]
        if any(g.is_zero() for g in gens):
            continue
        try:
            shape = resolution_of_ideal(gens, length)
        except (RetryWithNewSeed, NotGenericMatrix):
            continue
        return gens, shape.betti
    raise RetryWithNewSeed(f"no finite zero locus after {attempts} sections")


def qk_matrix(s: int, k: int, rng: np.random.Generator, p: int = DEFAULT_PRIME,
              euler_block: bool = False) -> GradedMatrix:
    """Random minimal matrix O(-2s-2)^s + O(-2s-1)^k -> O(-2s-1)^k + O(-2s)^(s+1).

    With ``euler_block`` the O(-2s-1)^k columns are put in the reduced form
    [0; B] with B the (x, y, z) block resolving T(-2s-1)^k, which needs 3k <= s+1.
    """
    if not 0 <= k <= s:
        raise ValueError("need 0 <= k <= s")
    rows = [-2 * s - 1] * k + [-2 * s] * (s + 1)
    cols = [-2 * s - 2] * s + [-2 * s - 1] * k
    m = GradedMatrix.random(rows, cols, rng, p, minimal=True)
    if not euler_block:
        return m
    if 3 * k > s + 1:
        raise ValueError("the T(-2s-1) block needs 3k <= s + 1")
    entries = {ij: f for ij, f in m.entries.items() if ij[1] < s}
    for c in range(k):
        for v, name in enumerate("xyz"):
            entries[(k + 3 * c + v, s + c)] = Poly.variable(name, p)
    return GradedMatrix(rows, cols, entries, p)


def qk_shape(s: int, k: int) -> ResolutionShape:
    shared = [-2 * s - 1] if k else []
    return ResolutionShape.from_terms([(-2 * s - 1, k), (-2 * s, s + 1)], [(-2 * s - 2, s), (-2 * s - 1, k)], shared)
