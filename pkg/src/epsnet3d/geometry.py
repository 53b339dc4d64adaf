"""Geometric primitives: halfspaces, convex polytopes, simplicial cones, grids.

Membership is always decided on the H-representation; distances between
features are measured on the V-representation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegeneratePolytope, PerturbationFailed

TAU_GEO = 1e-9
SEPARATION_FLOOR = 1e-12
# relative gap below which two coordinates count as tied
TIE_GAP = 1e-12


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 3))
    arr = arr.reshape(-1, 3)
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


@dataclass(frozen=True)
class Halfspace:
    """The set ``normal . x <= offset`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(3)
        norm = np.linalg.norm(n)
        if not abs(norm - 1.0) <= 1e-12:
            raise ValueError(f"halfspace normal must be a unit vector, got norm {norm}")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset) -> "Halfspace":
        n = np.asarray(normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("zero normal")
        return cls(n / norm, float(offset) / norm)

    def translated(self, t) -> "Halfspace":
        return Halfspace(self.normal, self.offset + float(self.normal @ np.asarray(t, float)))


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """Bounded convex polytope with both representations and incidences.

    ``facet_vertices[j]`` lists the vertices of facet ``j`` in cyclic order.
    """

    vertices: np.ndarray
    facets: tuple[Halfspace, ...]
    facet_vertices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", as_points(self.vertices))
        if len(self.facets) < 4 or len(self.vertices) < 4:
            raise DegeneratePolytope("a bounded polytope needs at least 4 facets and vertices")
        d = self.A @ self.vertices.T - self.b[:, None]
        if np.max(d) > 1e-9:
            raise DegeneratePolytope("a vertex violates a facet inequality")
        for j, vs in enumerate(self.facet_vertices):
            on = set(np.flatnonzero(np.abs(d[j]) <= 1e-9).tolist())
            if on != set(vs):
                raise DegeneratePolytope(f"facet {j} incidence does not match the V-representation")

    # construction -----------------------------------------------------

    @classmethod
    def from_vertices(cls, points) -> "ConvexPolytope":
        pts = as_points(points)
        try:
            hull = ConvexHull(pts)
        except (QhullError, ValueError) as exc:
            raise DegeneratePolytope(f"point set does not span a 3D polytope: {exc}") from None
        verts = pts[hull.vertices]
        scale = max(np.ptp(verts, axis=0).max(), 1.0)
        planes: list[np.ndarray] = []
        for eq in hull.equations:
            if not any(np.allclose(pl[:3], eq[:3], atol=1e-9) and abs(pl[3] - eq[3]) <= 1e-9 * scale
                       for pl in planes):
                planes.append(eq)
        facets = []
        facet_vertices = []
        for eq in planes:
            h = Halfspace.from_normal(eq[:3], -eq[3])
            on = np.flatnonzero(np.abs(verts @ h.normal - h.offset) <= 1e-9 * scale)
            facets.append(h)
            facet_vertices.append(_cyclic_order(verts, on, h.normal))
        return cls(verts, tuple(facets), tuple(facet_vertices))

    @classmethod
    def from_representations(cls, vertices, facets: Sequence[Halfspace]) -> "ConvexPolytope":
        """Both representations given; incidences are recovered from the slack."""
        verts = as_points(vertices)
        facet_vertices = []
        for h in facets:
            on = np.flatnonzero(np.abs(verts @ h.normal - h.offset) <= 1e-9)
            if len(on) < 3:
                raise DegeneratePolytope("a facet touches fewer than three vertices")
            facet_vertices.append(_cyclic_order(verts, on, h.normal))
        return cls(verts, tuple(facets), tuple(facet_vertices))

    @classmethod
    def box(cls, lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)) -> "ConvexPolytope":
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        if np.any(hi - lo <= 0):
            raise DegeneratePolytope("box must have positive extent in every axis")
        corners = np.array(list(itertools.product(*zip(lo, hi))), dtype=float)
        return cls.from_vertices(corners)

    @classmethod
    def cube(cls, side: float = 1.0) -> "ConvexPolytope":
        return cls.box((0, 0, 0), (side, side, side))

    @classmethod
    def regular_tetrahedron(cls, edge: float = 1.0) -> "ConvexPolytope":
        v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
        v *= edge / (2 * math.sqrt(2))
        return cls.from_vertices(v)

    # derived data -----------------------------------------------------

    @cached_property
    def A(self) -> np.ndarray:
        return np.array([h.normal for h in self.facets])

    @cached_property
    def b(self) -> np.ndarray:
        return np.array([h.offset for h in self.facets])

    @cached_property
    def vertex_facets(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(len(self.vertices))]
        for j, vs in enumerate(self.facet_vertices):
            for v in vs:
                inc[v].append(j)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        es = set()
        for vs in self.facet_vertices:
            for a, b in zip(vs, vs[1:] + vs[:1]):
                es.add((min(a, b), max(a, b)))
        return tuple(sorted(es))

    @cached_property
    def edge_facets(self) -> dict[tuple[int, int], tuple[int, int]]:
        out: dict[tuple[int, int], list[int]] = {e: [] for e in self.edges}
        for j, vs in enumerate(self.facet_vertices):
            for a, b in zip(vs, vs[1:] + vs[:1]):
                out[(min(a, b), max(a, b))].append(j)
        return {e: tuple(f) for e, f in out.items()}

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def lowest_vertex(self) -> np.ndarray:
        order = np.lexsort((self.vertices[:, 1], self.vertices[:, 0], self.vertices[:, 2]))
        return self.vertices[order[0]].copy()

    def translated(self, t) -> "ConvexPolytope":
        t = np.asarray(t, float)
        return ConvexPolytope(self.vertices + t, tuple(h.translated(t) for h in self.facets),
                              self.facet_vertices)

    def inverted(self, center) -> "ConvexPolytope":
        """Point reflection ``x -> 2 center - x``."""
        c = np.asarray(center, float)
        facets = tuple(Halfspace(-h.normal, h.offset - 2.0 * float(h.normal @ c)) for h in self.facets)
        return ConvexPolytope(2.0 * c - self.vertices, facets,
                              tuple(tuple(reversed(vs)) for vs in self.facet_vertices))


def _cyclic_order(verts: np.ndarray, idx: np.ndarray, normal: np.ndarray) -> tuple[int, ...]:
    pts = verts[idx]
    c = pts.mean(axis=0)
    u = pts[0] - c
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    ang = np.arctan2((pts - c) @ w, (pts - c) @ u)
    return tuple(int(i) for i in idx[np.argsort(ang)])


@dataclass(frozen=True, eq=False)
class SimplicialCone:
    """Cone ``{x : normals @ (x - apex) <= 0}`` with three independent faces."""

    apex: np.ndarray
    normals: np.ndarray
    internal_ray: np.ndarray = field(default=None)

    def __post_init__(self):
        apex = np.asarray(self.apex, float).reshape(3)
        N = np.asarray(self.normals, float).reshape(3, 3)
        N = N / np.linalg.norm(N, axis=1, keepdims=True)
        if abs(np.linalg.det(N)) < 1e-12:
            raise ValueError("cone face normals must be linearly independent")
        ray = self.internal_ray
        if ray is None:
            ray = self.extreme_rays_of(N).sum(axis=0)
        ray = np.asarray(ray, float).reshape(3)
        ray = ray / np.linalg.norm(ray)
        if not np.all(N @ ray < 0):
            raise ValueError("internal ray must lie strictly inside the cone")
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "normals", N)
        object.__setattr__(self, "internal_ray", ray)

    @staticmethod
    def extreme_rays_of(N: np.ndarray) -> np.ndarray:
        # ray i lies on the two faces other than i
        Ninv = np.linalg.inv(N)
        rays = -Ninv.T
        return rays / np.linalg.norm(rays, axis=1, keepdims=True)

    @classmethod
    def from_rays(cls, apex, rays) -> "SimplicialCone":
        R = np.asarray(rays, float).reshape(3, 3)
        normals = []
        for i in range(3):
            a, b = R[(i + 1) % 3], R[(i + 2) % 3]
            n = np.cross(a, b)
            if n @ R[i] > 0:
                n = -n
            normals.append(n)
        R_unit = R / np.linalg.norm(R, axis=1, keepdims=True)
        return cls(apex, np.array(normals), R_unit.sum(axis=0))

    @property
    def faces(self) -> tuple[Halfspace, ...]:
        return tuple(Halfspace(n, float(n @ self.apex)) for n in self.normals)

    @cached_property
    def extreme_rays(self) -> np.ndarray:
        return self.extreme_rays_of(self.normals)

    @cached_property
    def frame(self) -> np.ndarray:
        """Rotation taking the internal ray to ``-z`` (the cone opens to the bottom)."""
        down = -self.internal_ray
        helper = np.eye(3)[int(np.argmin(np.abs(down)))]
        e1 = np.cross(helper, down)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(down, e1)
        return np.array([e1, e2, down])

    def coords(self, points) -> np.ndarray:
        """Face coordinates: ``p`` lies in the translate with apex ``a`` iff coords(p) <= coords(a)."""
        return as_points(points) @ self.normals.T

    def apex_from_coords(self, b) -> np.ndarray:
        return np.linalg.solve(self.normals, np.asarray(b, float).T).T

    def tau(self, points) -> np.ndarray:
        """Planar image along the internal ray."""
        return (as_points(points) @ self.frame.T)[:, :2]

    def translated(self, t) -> "SimplicialCone":
        return SimplicialCone(self.apex + np.asarray(t, float), self.normals, self.internal_ray)


def _ineqs(shape) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(shape, Halfspace):
        return shape.normal[None, :], np.array([shape.offset])
    if isinstance(shape, SimplicialCone):
        return shape.normals, shape.normals @ shape.apex
    if isinstance(shape, ConvexPolytope):
        return shape.A, shape.b
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def classify(shape, offset, points) -> np.ndarray:
    """Three-valued membership per point: -1 inside, 0 on the boundary, +1 outside."""
    A, b = _ineqs(shape)
    P = as_points(points) - np.asarray(offset, float)
    slack = P @ A.T - b
    worst = slack.max(axis=1) if len(P) else np.zeros(0)
    out = np.where(worst > TAU_GEO, 1, np.where(worst < -TAU_GEO, -1, 0))
    return out.astype(int)


def contains(shape, translate_offset, p, closed: bool = True) -> bool:
    c = classify(shape, translate_offset, [p])[0]
    return bool(c <= 0) if closed else bool(c < 0)


def contains_many(shape, translate_offset, points, closed: bool = True) -> np.ndarray:
    c = classify(shape, translate_offset, points)
    return c <= 0 if closed else c < 0


# feature separation ---------------------------------------------------------

def point_segment_distance(p, a, b) -> float:
    ab = b - a
    t = np.clip((p - a) @ ab / (ab @ ab), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def segment_segment_distance(p0, p1, q0, q1) -> float:
    d1, d2, r = p1 - p0, q1 - q0, p0 - q0
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    c, b = d1 @ r, d1 @ d2
    denom = a * e - b * b
    s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > 1e-15 * a * e else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t, s = 0.0, np.clip(-c / a, 0.0, 1.0)
    elif t > 1.0:
        t, s = 1.0, np.clip((b - c) / a, 0.0, 1.0)
    best = float(np.linalg.norm(p0 + s * d1 - (q0 + t * d2)))
    # endpoint checks guard the clamped solution in near-parallel cases
    return min(best, point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1),
               point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1))


def point_facet_distance(p, T: ConvexPolytope, j: int) -> float:
    h = T.facets[j]
    loop = [T.vertices[i] for i in T.facet_vertices[j]]
    proj = p - (p @ h.normal - h.offset) * h.normal
    inside = True
    for a, b in zip(loop, loop[1:] + loop[:1]):
        if np.cross(b - a, proj - a) @ h.normal < -1e-12:
            inside = False
            break
    if inside:
        return float(abs(p @ h.normal - h.offset))
    return min(point_segment_distance(p, a, b) for a, b in zip(loop, loop[1:] + loop[:1]))


def min_feature_separation(T: ConvexPolytope) -> float:
    """Smallest distance between two features of ``T`` that share no vertex."""
    V = T.vertices
    best = math.inf
    for i, j in itertools.combinations(range(len(V)), 2):
        best = min(best, float(np.linalg.norm(V[i] - V[j])))
    for v in range(len(V)):
        for a, b in T.edges:
            if v not in (a, b):
                best = min(best, point_segment_distance(V[v], V[a], V[b]))
        for j, vs in enumerate(T.facet_vertices):
            if v not in vs:
                best = min(best, point_facet_distance(V[v], T, j))
    for (a, b), (c, d) in itertools.combinations(T.edges, 2):
        if len({a, b, c, d}) == 4:
            best = min(best, segment_segment_distance(V[a], V[b], V[c], V[d]))
    if best < SEPARATION_FLOOR:
        raise DegeneratePolytope(f"feature separation {best:g} is below {SEPARATION_FLOOR:g}")
    return best


# grid -----------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    origin: np.ndarray
    cell_side: float
    shape: tuple[int, int, int]
    cells_per_translate: int

    def cell_index(self, points) -> np.ndarray:
        """Integer cell of each point; boundary points go to the lexicographically smallest cell."""
        rel = (as_points(points) - self.origin) / self.cell_side
        return (np.ceil(rel) - 1).astype(np.int64)

    def cell_box(self, idx) -> tuple[np.ndarray, np.ndarray]:
        lo = self.origin + np.asarray(idx, float) * self.cell_side
        return lo, lo + self.cell_side


def build_grid(T: ConvexPolytope, points_bbox) -> Grid:
    sep = min_feature_separation(T)
    h = sep / (2.0 * math.sqrt(3.0))
    lo, hi = (np.asarray(x, float) for x in points_bbox)
    diam = T.diameter
    lo = lo - diam
    hi = hi + diam
    origin = np.floor(lo / h) * h
    shape = tuple(int(k) for k in np.ceil((hi - origin) / h).astype(int) + 1)
    per_axis = math.ceil(diam / h + 2.0 - 1e-12)
    return Grid(origin, h, shape, per_axis ** 3)


# perturbation ---------------------------------------------------------------

def is_nondegenerate(points, cones: Sequence[SimplicialCone]) -> bool:
    """True when no translate of any cone has four points on its boundary.

    Four boundary points force two of them onto one face, so it suffices to
    check that every face coordinate separates the points.
    """
    P = as_points(points)
    if len(P) < 2:
        return True
    scale = max(float(np.ptp(P, axis=0).max()), 1.0)
    for C in cones:
        F = C.coords(P)
        for k in range(3):
            col = np.sort(F[:, k])
            if np.min(np.diff(col)) <= TIE_GAP * scale:
                return False
    return True


def perturb(points, cones: Sequence[SimplicialCone], seed: int = 0, attempts: int = 32) -> np.ndarray:
    P = as_points(points)
    if len(P) == 0 or is_nondegenerate(P, cones):
        return P.copy()
    diam = float(np.linalg.norm(np.ptp(P, axis=0))) or 1.0
    radius = 0.5e-9 * diam
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        step = rng.uniform(-1.0, 1.0, size=P.shape)
        step *= radius / max(np.linalg.norm(step, axis=1).max(), 1e-300)
        Q = P + step
        if is_nondegenerate(Q, cones):
            return Q
    raise PerturbationFailed(f"no non-degenerate perturbation found in {attempts} attempts")
