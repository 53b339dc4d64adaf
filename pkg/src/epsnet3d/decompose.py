"""Epsilon-nets for translates of a polytope given as a union of convex pieces.

Each piece gets a grid fine enough that a cell meets the boundary of a translate
in at most one vertex figure, one edge wedge, or one facet.  Inside a heavy cell
the translate therefore looks like a simplicial cone (after splitting the vertex
figure into a fan), a two-halfspace wedge, a halfspace, or the whole cell.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateVertex, EmptyInput, InvalidEpsilon
from .geometry import ConvexPolytope, Grid, Halfspace, SimplicialCone, as_points, build_grid
from .planar import cone_net

# size-bound constants per case, in units of (points in cell) / (cell threshold)
CONE_SLOPE = 690
CONE_OFFSET = 24
WEDGE_CONST = 3


@dataclass(frozen=True)
class PolytopeFamily:
    """A range shape given as the union of convex pieces, all translated together."""

    pieces: tuple[ConvexPolytope, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a polytope family needs at least one piece")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def of(cls, shape: Union["PolytopeFamily", ConvexPolytope, Sequence[ConvexPolytope]]) -> "PolytopeFamily":
        if isinstance(shape, PolytopeFamily):
            return shape
        if isinstance(shape, ConvexPolytope):
            return cls((shape,))
        return cls(tuple(shape))

    @property
    def k_pieces(self) -> int:
        return len(self.pieces)

    def contains(self, offset, points) -> np.ndarray:
        """Closed membership of ``points`` in the translate by ``offset``."""
        P = as_points(points) - np.asarray(offset, float)
        inside = np.zeros(len(P), bool)
        for T in self.pieces:
            inside |= (P @ T.A.T - T.b <= 1e-9).all(axis=1)
        return inside

    @property
    def all_vertices(self) -> np.ndarray:
        return np.vstack([T.vertices for T in self.pieces])

    def inverted(self, center) -> "PolytopeFamily":
        return PolytopeFamily(tuple(T.inverted(center) for T in self.pieces))


@dataclass(frozen=True)
class VertexCone:
    vertex: int
    cones: tuple[SimplicialCone, ...]


@dataclass(frozen=True)
class EdgeWedge:
    edge: tuple[int, int]
    halfspaces: tuple[Halfspace, Halfspace]
    direction: np.ndarray


@dataclass(frozen=True)
class FacetHalf:
    facet: int
    halfspace: Halfspace


@dataclass(frozen=True)
class FullCell:
    pass


CellCase = Union[VertexCone, EdgeWedge, FacetHalf, FullCell]


@dataclass
class NetResult:
    net: list[int]
    bound: int
    breakdown: dict = field(default_factory=dict)
    cells: list[dict] = field(default_factory=list)


def vertex_cones(T: ConvexPolytope, v: int) -> list[SimplicialCone]:
    """Fan of simplicial cones whose union is the tangent cone of ``T`` at vertex ``v``."""
    inc = T.vertex_facets[v]
    if len(inc) < 3:
        raise DegenerateVertex(f"vertex {v} has only {len(inc)} incident facets")
    apex = T.vertices[v]
    nbrs = [b if a == v else a for a, b in T.edges if v in (a, b)]
    rays = T.vertices[nbrs] - apex
    rays /= np.linalg.norm(rays, axis=1, keepdims=True)
    axis = rays.sum(axis=0)
    axis /= np.linalg.norm(axis)
    u = rays[0] - (rays[0] @ axis) * axis
    u /= np.linalg.norm(u)
    w = np.cross(axis, u)
    ang = np.arctan2(rays @ w, rays @ u)
    rays = rays[np.argsort(ang)]
    return [SimplicialCone.from_rays(apex, [rays[0], rays[i], rays[i + 1]])
            for i in range(1, len(rays) - 1)]


def cases_of(T: ConvexPolytope) -> list[CellCase]:
    out: list[CellCase] = []
    for v in range(len(T.vertices)):
        out.append(VertexCone(v, tuple(vertex_cones(T, v))))
    for e in T.edges:
        f1, f2 = T.edge_facets[e]
        d = T.vertices[e[1]] - T.vertices[e[0]]
        out.append(EdgeWedge(e, (T.facets[f1], T.facets[f2]), d / np.linalg.norm(d)))
    for j, h in enumerate(T.facets):
        out.append(FacetHalf(j, h))
    out.append(FullCell())
    return out


def fan_size(T: ConvexPolytope) -> int:
    return max(len(T.vertex_facets[v]) - 2 for v in range(len(T.vertices)))


def quadrant_net(points, n1, n2, m: int) -> list[int]:
    """Net for translates of ``{n1.x <= c1, n2.x <= c2}`` holding at least ``m`` points.

    Points are sorted by ``n1.p``; at every ``ceil(m / 2)``-th prefix the point
    with the smallest ``n2.p`` seen so far is kept.
    """
    P = as_points(points)
    n = len(P)
    if n == 0 or m > n:
        return []
    u = P @ np.asarray(n1, float)
    v = P @ np.asarray(n2, float)
    order = np.lexsort((v, u))
    step = -(-m // 2)
    out = []
    best = None
    for r, i in enumerate(order, start=1):
        if best is None or v[i] < v[best]:
            best = int(i)
        if r % step == 0:
            out.append(best)
    return sorted(set(out))


def halfspace_net(points, normal) -> int:
    """The point minimizing ``normal.p``; ties go to the lexicographically smallest point."""
    P = as_points(points)
    if len(P) == 0:
        raise EmptyInput("halfspace_net needs at least one point")
    h = P @ np.asarray(normal, float)
    lo = h.min()
    tied = np.flatnonzero(h <= lo)
    sub = P[tied]
    k = np.lexsort((sub[:, 2], sub[:, 1], sub[:, 0]))[0]
    return int(tied[k])


def net_constant(family: PolytopeFamily) -> tuple[int, int, int, int]:
    """``(C_T, k_pieces, t, f_max)`` with ``|net| <= C_T / eps`` for every input."""
    family = PolytopeFamily.of(family)
    k = family.k_pieces
    f_max = max(fan_size(T) for T in family.pieces)
    per_piece = []
    ts = []
    for T in family.pieces:
        grid = build_grid(T, (np.zeros(3), np.zeros(3)))
        ts.append(grid.cells_per_translate)
        cones = sum(len(vertex_cones(T, v)) for v in range(len(T.vertices)))
        per_piece.append((CONE_SLOPE + CONE_OFFSET) * cones + WEDGE_CONST * len(T.edges) + len(T.facets) + 1)
    t = max(ts)
    return k * t * f_max * sum(per_piece), k, t, f_max


def cell_threshold(eps: float, n: int, k: int, t: int, f_max: int) -> int:
    return max(1, math.ceil(eps * n / (k * t * f_max) - 1e-12))


def polytope_net(P, family, eps: float, seed: int = 0, verify_cones: bool = True) -> NetResult:
    """Net for translates of ``family`` that hold at least ``eps * |P|`` points."""
    if not (0 < eps <= 1):
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {eps!r}")
    family = PolytopeFamily.of(family)
    P = as_points(P)
    n = len(P)
    C_T, k, t, f_max = net_constant(family)
    if n == 0:
        return NetResult([], 0, {"C_T": C_T})
    m_cell = cell_threshold(eps, n, k, t, f_max)
    bbox = (P.min(axis=0), P.max(axis=0))
    chosen: set[int] = set()
    bound = 0
    breakdown: dict = defaultdict(int)
    cells: list[dict] = []
    for pi, T in enumerate(family.pieces):
        grid: Grid = build_grid(T, bbox)
        idx = grid.cell_index(P)
        groups: dict[tuple, list[int]] = defaultdict(list)
        for i, c in enumerate(map(tuple, idx)):
            groups[c].append(i)
        cases = cases_of(T)
        for cell in sorted(groups):
            members = np.array(groups[cell])
            if len(members) < m_cell:
                continue
            Q = P[members]
            info = {"piece": pi, "cell": list(cell), "points": len(members)}
            for case in cases:
                if isinstance(case, VertexCone):
                    for C in case.cones:
                        r = cone_net(Q, C, m_cell, seed=seed, verify=verify_cones)
                        chosen.update(int(members[j]) for j in r.net)
                        bound += r.bound
                        breakdown["cone"] += len(r.net)
                elif isinstance(case, EdgeWedge):
                    h1, h2 = case.halfspaces
                    sel = quadrant_net(Q, h1.normal, h2.normal, m_cell)
                    chosen.update(int(members[j]) for j in sel)
                    bound += -(-2 * len(members) // m_cell)
                    breakdown["wedge"] += len(sel)
                elif isinstance(case, FacetHalf):
                    chosen.add(int(members[halfspace_net(Q, case.halfspace.normal)]))
                    bound += 1
                    breakdown["halfspace"] += 1
                else:
                    chosen.add(int(members[0]))
                    bound += 1
                    breakdown["full"] += 1
            cells.append(info)
    net = sorted(chosen)
    breakdown.update({"C_T": C_T, "k_pieces": k, "t": t, "f_max": f_max, "m_cell": m_cell,
                      "heavy_cells": len(cells)})
    return NetResult(net, bound, dict(breakdown), cells)
