"""Orthant queries on face coordinates.

For a simplicial cone with face normals ``N`` the map ``x -> N x`` turns every
translate of the cone into a closed orthant ``{y : y <= b}``.  All combinatorial
questions about cone translates (emptiness, pinning, Delaunay structure) are
answered here on the transformed coordinates.
"""

from __future__ import annotations

import numpy as np


class EmptyOrthantIndex:
    """Answers "is the open orthant below ``b`` free of points?" in O(log n).

    ``table[a0, a1]`` is the smallest third coordinate among points whose first
    coordinate has rank ``< a0`` and second coordinate rank ``< a1``.
    """

    def __init__(self, F: np.ndarray):
        F = np.asarray(F, float).reshape(-1, 3)
        self.F = F
        n = len(F)
        self.x0 = np.sort(F[:, 0])
        self.x1 = np.sort(F[:, 1])
        r0 = np.searchsorted(self.x0, F[:, 0], side="left")
        r1 = np.searchsorted(self.x1, F[:, 1], side="left")
        table = np.full((n + 1, n + 1), np.inf)
        table[r0 + 1, r1 + 1] = np.minimum(table[r0 + 1, r1 + 1], F[:, 2])
        table = np.minimum.accumulate(np.minimum.accumulate(table, axis=0), axis=1)
        self.table = table

    def count_below_min(self, b: np.ndarray) -> np.ndarray:
        b = np.atleast_2d(np.asarray(b, float))
        a0 = np.searchsorted(self.x0, b[:, 0], side="left")
        a1 = np.searchsorted(self.x1, b[:, 1], side="left")
        return self.table[a0, a1]

    def open_empty(self, b) -> np.ndarray:
        b = np.atleast_2d(np.asarray(b, float))
        return self.count_below_min(b) >= b[:, 2]


def strictly_dominated(F: np.ndarray) -> np.ndarray:
    """Mask of points with some other point strictly smaller in all three coordinates."""
    idx = EmptyOrthantIndex(F)
    return ~idx.open_empty(F)


def delaunay_edges(F: np.ndarray, index: EmptyOrthantIndex | None = None) -> list[tuple[int, int]]:
    """Pairs whose tight orthant ``max(p, q)`` has an empty open interior."""
    F = np.asarray(F, float)
    n = len(F)
    if n < 2:
        return []
    index = index or EmptyOrthantIndex(F)
    i, j = np.triu_indices(n, k=1)
    B = np.maximum(F[i], F[j])
    ok = index.open_empty(B)
    return [(int(a), int(b)) for a, b in zip(i[ok], j[ok])]


def pinned_triples(F: np.ndarray, index: EmptyOrthantIndex | None = None,
                   chunk: int = 200_000) -> np.ndarray:
    """Rows ``(a, b, c)``: ``a`` pins face 0, ``b`` face 1, ``c`` face 2 of an empty orthant.

    Each point must be the strict maximum of exactly its own coordinate of
    ``max(p, q, r)`` and nothing may lie strictly below that apex.
    """
    F = np.asarray(F, float)
    n = len(F)
    if n < 3:
        return np.zeros((0, 3), dtype=np.int64)
    index = index or EmptyOrthantIndex(F)
    found = []
    for c in _permutation_chunks(n, chunk):
        a, b, cc = c[:, 0], c[:, 1], c[:, 2]
        ok = (F[a, 0] > F[b, 0]) & (F[a, 0] > F[cc, 0])
        ok &= (F[b, 1] > F[a, 1]) & (F[b, 1] > F[cc, 1])
        ok &= (F[cc, 2] > F[a, 2]) & (F[cc, 2] > F[b, 2])
        if not ok.any():
            continue
        sel = c[ok]
        B = np.stack([F[sel[:, 0], 0], F[sel[:, 1], 1], F[sel[:, 2], 2]], axis=1)
        found.append(sel[index.open_empty(B)])
    return np.concatenate(found) if found else np.zeros((0, 3), dtype=np.int64)


def delaunay_triangles(F: np.ndarray, index: EmptyOrthantIndex | None = None) -> list[tuple[int, int, int]]:
    """Sorted index triples of :func:`pinned_triples`."""
    T = pinned_triples(F, index)
    return sorted({tuple(sorted(map(int, t))) for t in T})


def _permutation_chunks(n: int, chunk: int):
    step = max(1, chunk // (n * n))
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    j, k = j.ravel(), k.ravel()
    for start in range(0, n, step):
        i = np.repeat(np.arange(start, min(n, start + step)), n * n)
        jj = np.tile(j, len(i) // (n * n))
        kk = np.tile(k, len(i) // (n * n))
        keep = (i != jj) & (i != kk) & (jj != kk)
        yield np.stack([i[keep], jj[keep], kk[keep]], axis=1)


def canonical_orthants(F: np.ndarray) -> np.ndarray:
    """Every apex on the coordinate lattice; closed orthants there realize all subsets."""
    F = np.asarray(F, float)
    if len(F) == 0:
        return np.zeros((0, 3))
    xs = [np.unique(F[:, k]) for k in range(3)]
    g = np.meshgrid(*xs, indexing="ij")
    return np.stack([x.ravel() for x in g], axis=1)


def orthant_members(F: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Boolean ``(len(B), len(F))`` closed membership."""
    return (F[None, :, :] <= B[:, None, :]).all(axis=2)
