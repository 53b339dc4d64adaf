"""Planar side of the cone net: Delaunay-type triangulation, coloring, corridors.

Points live on a cone envelope and are drawn in the plane by projecting along
the internal ray.  An edge ``pq`` is drawn through the apex of its tight empty
cone, which lies on the envelope as well, so the drawing is a polyline of two
chords.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import bits
from .envelope import envelope_points, lift_to_envelope
from .errors import NetVerificationFailed, NotATriangulation
from .geometry import SimplicialCone, as_points, perturb
from .orthant import EmptyOrthantIndex, canonical_orthants, delaunay_edges, delaunay_triangles

COLORLESS = -1


# planar predicates ----------------------------------------------------------

def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def proper_crossings(A0, A1, B0, B1, scale: float = 1.0) -> np.ndarray:
    """Pairwise strict crossings between segment sets ``A`` and ``B``; shape ``(len(A), len(B))``.

    Each orientation is divided by the length of the segment it is taken
    against, so the dead band is a distance (``1e-12 * scale``) and short
    segments are not swallowed by it.
    """
    tol = 1e-12 * scale
    a0, a1 = A0[:, None, :], A1[:, None, :]
    b0, b1 = B0[None, :, :], B1[None, :, :]
    la = np.maximum(np.linalg.norm(a1 - a0, axis=-1), 1e-300)
    lb = np.maximum(np.linalg.norm(b1 - b0, axis=-1), 1e-300)

    def sgn(o, length):
        d = o / length
        return np.where(d > tol, 1, np.where(d < -tol, -1, 0))

    s1, s2 = sgn(_orient(a0, a1, b0), la), sgn(_orient(a0, a1, b1), la)
    s3, s4 = sgn(_orient(b0, b1, a0), lb), sgn(_orient(b0, b1, a1), lb)
    return (s1 * s2 < 0) & (s3 * s4 < 0)


def points_in_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd test of many points against one closed polygon."""
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    xa, ya = poly[:, 0][None, :], poly[:, 1][None, :]
    xb, yb = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]
    straddle = (ya > y) != (yb > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = xa + (y - ya) * (xb - xa) / (yb - ya)
    hits = straddle & (x < xcross)
    return (hits.sum(axis=1) % 2) == 1


# triangulation --------------------------------------------------------------

@dataclass
class DDelaunay:
    """Delaunay graph of points on a cone envelope, embedded through the projection.

    ``ids`` maps local vertex numbers to the caller's indices.  Edge ``e`` is
    drawn ``tau[p] -> apex_tau[e] -> tau[q]``.
    """

    cone: SimplicialCone
    ids: np.ndarray
    points: np.ndarray
    F: np.ndarray
    tau: np.ndarray
    edges: list[tuple[int, int]]
    apex_tau: np.ndarray
    triangles: list[tuple[int, int, int]]
    edge_index: dict[tuple[int, int], int] = field(default_factory=dict)
    outer_face: list[int] = field(default_factory=list)

    @property
    def n_vertices(self) -> int:
        return len(self.ids)

    def edge_polyline(self, e: int) -> np.ndarray:
        p, q = self.edges[e]
        return np.array([self.tau[p], self.apex_tau[e], self.tau[q]])

    def triangle_polygon(self, t: int) -> np.ndarray:
        a, b, c = self.triangles[t]
        loop = []
        for p, q in ((a, b), (b, c), (c, a)):
            e = self.edge_index[(min(p, q), max(p, q))]
            loop.append(self.tau[p])
            loop.append(self.apex_tau[e])
        return np.array(loop)

    def triangle_edges(self, t: int) -> list[tuple[int, int]]:
        a, b, c = self.triangles[t]
        return [(a, b), (a, c), (b, c)]

    def segments(self):
        """Both chords of every edge as ``(start, end, start node, end node)``."""
        V = self.n_vertices
        starts, ends, s_id, e_id = [], [], [], []
        for e, (p, q) in enumerate(self.edges):
            for u, w in ((p, V + e), (V + e, q)):
                starts.append(self.tau[u] if u < V else self.apex_tau[u - V])
                ends.append(self.tau[w] if w < V else self.apex_tau[w - V])
                s_id.append(u)
                e_id.append(w)
        return (np.array(starts).reshape(-1, 2), np.array(ends).reshape(-1, 2),
                np.array(s_id, dtype=int), np.array(e_id, dtype=int))

    @property
    def scale(self) -> float:
        allpts = np.vstack([self.tau, self.apex_tau]) if len(self.apex_tau) else self.tau
        return max(float(np.ptp(allpts, axis=0).max()) if len(allpts) else 1.0, 1e-12)

    def validate(self) -> None:
        """Planarity, triangle faces, and Euler's formula on the embedding."""
        V, E, T = self.n_vertices, len(self.edges), len(self.triangles)
        if V == 0:
            return
        S0, S1, sid, eid = self.segments()
        if len(S0) > 1:
            X = proper_crossings(S0, S1, S0, S1, self.scale)
            share = (sid[:, None] == sid[None, :]) | (sid[:, None] == eid[None, :]) \
                | (eid[:, None] == sid[None, :]) | (eid[:, None] == eid[None, :])
            X &= ~share
            if X.any():
                i, j = np.argwhere(X)[0]
                raise NotATriangulation(f"embedded edges cross (segments {i} and {j})")
        if not self._connected():
            raise NotATriangulation("triangulation graph is disconnected")
        if V - E + (T + 1) != 2:
            raise NotATriangulation(f"Euler check failed: V={V} E={E} F={T + 1}")
        uses = defaultdict(int)
        for t in range(T):
            for p, q in self.triangle_edges(t):
                if (p, q) not in self.edge_index:
                    raise NotATriangulation(f"triangle {self.triangles[t]} uses a non-edge")
                uses[(p, q)] += 1
        if any(c > 2 for c in uses.values()):
            raise NotATriangulation("an edge borders more than two triangles")
        for t in range(T):
            poly = self.triangle_polygon(t)
            others = np.setdiff1d(np.arange(V), self.triangles[t])
            if len(others) and points_in_polygon(self.tau[others], poly).any():
                raise NotATriangulation(f"triangle {self.triangles[t]} is not an empty face")

    def _connected(self) -> bool:
        V = self.n_vertices
        adj = defaultdict(list)
        for p, q in self.edges:
            adj[p].append(q)
            adj[q].append(p)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == V

    def boundary_edges(self) -> list[tuple[int, int]]:
        uses = defaultdict(int)
        for t in range(len(self.triangles)):
            for e in self.triangle_edges(t):
                uses[e] += 1
        return [e for e in self.edges if uses[e] < 2]


def d_delaunay(points, cone: SimplicialCone, ids=None, validate: bool = True) -> DDelaunay:
    P = as_points(points)
    F = cone.coords(P)
    index = EmptyOrthantIndex(F) if len(P) else None
    edges = delaunay_edges(F, index) if len(P) else []
    tris = delaunay_triangles(F, index) if len(P) else []
    apex_F = np.array([np.maximum(F[p], F[q]) for p, q in edges]).reshape(-1, 3)
    apex_real = cone.apex_from_coords(apex_F) if len(edges) else np.zeros((0, 3))
    dt = DDelaunay(
        cone=cone,
        ids=np.arange(len(P)) if ids is None else np.asarray(ids, dtype=int),
        points=P,
        F=F,
        tau=cone.tau(P),
        edges=edges,
        apex_tau=cone.tau(apex_real) if len(edges) else np.zeros((0, 2)),
        triangles=tris,
        edge_index={e: k for k, e in enumerate(edges)},
    )
    if validate:
        dt.validate()
    dt.outer_face = _outer_cycle(dt)
    return dt


def _outer_cycle(dt: DDelaunay) -> list[int]:
    V = dt.n_vertices
    if V <= 2 or not dt.triangles:
        return list(range(V))
    bnd = dt.boundary_edges()
    adj = defaultdict(list)
    for p, q in bnd:
        adj[p].append(q)
        adj[q].append(p)
    if any(len(v) != 2 for v in adj.values()):
        # pinched outer boundary: fall back to angular order around the centroid
        verts = sorted(adj)
        c = dt.tau[verts].mean(axis=0)
        ang = np.arctan2(dt.tau[verts, 1] - c[1], dt.tau[verts, 0] - c[0])
        return [verts[i] for i in np.argsort(ang)]
    start = min(adj)
    cycle = [start]
    prev, cur = None, start
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    return cycle


def cone_hull(dt: DDelaunay) -> list[int]:
    """Outer-face cycle of the triangulation, as local vertex numbers."""
    return list(dt.outer_face)


# coloring -------------------------------------------------------------------

def color_threshold(m: int) -> int:
    """Largest ``m6 <= ceil(m / 6)`` with ``5 * m6 < m``; 0 when none exists."""
    m6 = -(-m // 6)
    while m6 >= 1 and 5 * m6 >= m:
        m6 -= 1
    return m6


@dataclass
class Coloring:
    """Color class bites: ``colors[i]`` is the class of point ``i`` or ``COLORLESS``."""

    colors: np.ndarray
    apexes: list[np.ndarray]
    phase: list[int]
    m6: int
    overlaps: int = 0

    @property
    def k(self) -> int:
        return len(self.apexes)

    @property
    def colored(self) -> np.ndarray:
        return np.flatnonzero(self.colors != COLORLESS)


class _LatticeBits:
    """All lattice orthants of ``F`` as packed member sets."""

    def __init__(self, F: np.ndarray):
        self.F = F
        self.n = len(F)
        self.B = canonical_orthants(F)
        cols = []
        ranks = []
        for k in range(3):
            xs = np.unique(F[:, k])
            order = np.argsort(F[:, k], kind="stable")
            cols.append(bits.prefix_masks(order, self.n)[1:])
            ranks.append(np.searchsorted(xs, self.B[:, k]))
        # lattice value of rank r contains exactly the r + 1 smallest points
        self.words = cols[0][ranks[0]] & cols[1][ranks[1]] & cols[2][ranks[2]]

    def mask(self, idx) -> np.ndarray:
        m = np.zeros(self.n, bool)
        m[list(idx)] = True
        return bits.pack(m)


def _shrink(F: np.ndarray, members: list[int], target: int, keep: int | None) -> list[int]:
    """Drop coordinate maxima until ``target`` points remain, never dropping ``keep``."""
    Q = list(members)
    while len(Q) > target:
        A = F[Q]
        for k in range(3):
            j = int(np.argmax(A[:, k]))
            if Q[j] != keep:
                Q.pop(j)
                break
    return Q


def color(S, cone: SimplicialCone, m6: int, hull: list[int] | None = None) -> Coloring:
    """Greedy bites of ``m6`` points: hull points first, then free orthants.

    A hull bite prefers a translate free of earlier colors; when none holds
    ``m6`` uncolored points it takes the one with the fewest colored points and
    counts the overlap.  Only a final bite may be smaller than ``m6``.
    """
    S = as_points(S)
    F = cone.coords(S)
    n = len(S)
    colors = np.full(n, COLORLESS, dtype=int)
    out = Coloring(colors, [], [], m6)
    if n == 0 or m6 < 1:
        return out
    lat = _LatticeBits(F)
    cnt = bits.popcount(lat.words)
    if hull is None:
        hull = cone_hull(d_delaunay(S, cone))

    def bite(members: list[int], phase: int) -> None:
        colors[members] = out.k
        out.apexes.append(F[members].max(axis=0))
        out.phase.append(phase)

    def free_rows() -> np.ndarray:
        used = lat.mask(np.flatnonzero(colors != COLORLESS))
        return ~((lat.words & used).any(axis=1))

    for h in hull:
        if colors[h] != COLORLESS:
            continue
        used = lat.mask(np.flatnonzero(colors != COLORLESS))
        has_h = (lat.words & lat.mask([h])).any(axis=1)
        fresh = lat.words & ~used
        u = bits.popcount(fresh)
        cc = bits.popcount(lat.words & used)
        big = has_h & (u >= m6)
        if big.any():
            # fewest previously colored points, then fewest uncolored
            key = np.where(big, cc * (n + 1) + u, np.iinfo(np.int64).max)
            row = int(np.argmin(key))
        else:
            row = int(np.argmax(np.where(has_h, u, -1)))
        members = list(np.flatnonzero(bits.unpack(fresh[row], n)))
        out.overlaps += int(cc[row] > 0)
        bite(_shrink(F, members, m6, h), 1)

    while True:
        ok = free_rows() & (cnt >= m6)
        if not ok.any():
            break
        row = int(np.argmin(np.where(ok, cnt, n + 1)))
        members = list(np.flatnonzero(bits.unpack(lat.words[row], n)))
        bite(_shrink(F, members, m6, None), 2)
    return out


# corridors ------------------------------------------------------------------

@dataclass
class Corridor:
    """Maximal chain of bi-colored triangles; ``cyclic`` chains close on themselves."""

    triangles: list[int]
    cyclic: bool
    edge: tuple[int, int] | None = None


@dataclass
class SubCorridor:
    triangles: list[int]
    ends: tuple[tuple[int, int], tuple[int, int]]
    corners: tuple[int, ...]
    colorless_inside: int
    overfull: bool = False


def _bicolored(e, vcol) -> bool:
    return vcol[e[0]] != vcol[e[1]]


def _edge_triangles(dt: DDelaunay) -> dict[tuple[int, int], list[int]]:
    out = defaultdict(list)
    for t in range(len(dt.triangles)):
        for e in dt.triangle_edges(t):
            out[e].append(t)
    return out


def triangle_kinds(dt: DDelaunay, vcol) -> np.ndarray:
    """Number of distinct colors on each triangle (1, 2 or 3)."""
    return np.array([len({vcol[v] for v in tri}) for tri in dt.triangles], dtype=int)


def corridors(dt: DDelaunay, vcol) -> list[Corridor]:
    """Chains of bi-colored triangles glued along bi-colored edges.

    Every bi-colored triangle has exactly two bi-colored edges, so the chains are
    paths or cycles.  Cycles start at their smallest triangle.
    """
    kinds = triangle_kinds(dt, vcol)
    et = _edge_triangles(dt)
    bi = [t for t in range(len(dt.triangles)) if kinds[t] == 2]
    nbr: dict[int, list[int]] = {t: [] for t in bi}
    for t in bi:
        for e in dt.triangle_edges(t):
            if _bicolored(e, vcol):
                nbr[t].extend(s for s in et[e] if s != t and kinds[s] == 2)
    seen: set[int] = set()
    out: list[Corridor] = []

    def walk(start: int) -> list[int]:
        chain, prev, cur = [start], None, start
        seen.add(start)
        while True:
            nxt = [s for s in nbr[cur] if s != prev and s not in seen]
            if not nxt:
                return chain
            prev, cur = cur, nxt[0]
            seen.add(cur)
            chain.append(cur)

    for t in bi:
        if t not in seen and len(nbr[t]) < 2:
            out.append(Corridor(walk(t), False))
    for t in bi:
        if t not in seen:
            out.append(Corridor(walk(t), True))
    # a bi-colored edge outside every bi-colored triangle is a corridor of length zero
    for e in dt.edges:
        if _bicolored(e, vcol) and not any(kinds[s] == 2 for s in et[e]):
            out.append(Corridor([], False, edge=e))
    return out


def _shared(dt: DDelaunay, s: int, t: int) -> tuple[int, int]:
    common = sorted(set(dt.triangles[s]) & set(dt.triangles[t]))
    return common[0], common[1]


def _slice_ends(dt, vcol, chain: Corridor, a: int, b: int):
    T = chain.triangles
    r = len(T)
    if a > 0:
        left = _shared(dt, T[a - 1], T[a])
    elif chain.cyclic and r > 1:
        left = _shared(dt, T[-1], T[0])
    else:
        inner = _shared(dt, T[0], T[1]) if r > 1 else None
        cands = [e for e in dt.triangle_edges(T[0]) if _bicolored(e, vcol) and e != inner]
        left = cands[0]
    if b < r - 1:
        right = _shared(dt, T[b], T[b + 1])
    elif chain.cyclic and r > 1:
        right = _shared(dt, T[-1], T[0])
    else:
        inner = _shared(dt, T[r - 2], T[r - 1]) if r > 1 else None
        cands = [e for e in dt.triangle_edges(T[-1]) if _bicolored(e, vcol) and e != inner]
        right = cands[-1]
    return left, right


def subdivide(dt: DDelaunay, vcol, chain: Corridor, inside: np.ndarray, m: int) -> list[SubCorridor]:
    """Greedy left-to-right split so each slice holds at most ``m`` colorless points.

    ``inside[t]`` is the number of colorless points in triangle ``t``.  A single
    triangle that alone exceeds ``m`` becomes its own over-full slice.
    """
    T = chain.triangles
    if not T:
        return [SubCorridor([], (chain.edge, chain.edge), tuple(chain.edge), 0)]
    slices: list[tuple[int, int, int]] = []
    a, acc = 0, 0
    for i, t in enumerate(T):
        c = int(inside[t])
        if i > a and acc + c > m:
            slices.append((a, i - 1, acc))
            a, acc = i, 0
        acc += c
    slices.append((a, len(T) - 1, acc))
    out = []
    for a, b, c in slices:
        left, right = _slice_ends(dt, vcol, chain, a, b)
        corners = tuple(sorted(set(left) | set(right)))
        out.append(SubCorridor(T[a:b + 1], (left, right), corners, c, overfull=c > m))
    return out


# the net --------------------------------------------------------------------

@dataclass
class ConeNetTrace:
    """Intermediate structures, kept for diagnostics and drawings."""

    lifted: np.ndarray
    coloring: Coloring | None = None
    dt_colored: DDelaunay | None = None
    subcorridors: list[SubCorridor] = field(default_factory=list)
    safeguard_triangles: list[int] = field(default_factory=list)
    outer_colorless: int = 0
    inside: np.ndarray | None = None


@dataclass
class ConeNetResult:
    net: list[int]
    bound: int
    stats: dict
    trace: ConeNetTrace | None = None


def locate_colorless(dt: DDelaunay, tau_pts: np.ndarray) -> np.ndarray:
    """Triangle holding each query point in the embedding, ``-1`` for the outer face."""
    where = np.full(len(tau_pts), -1, dtype=int)
    for t in range(len(dt.triangles)):
        todo = where < 0
        if not todo.any():
            break
        hit = points_in_polygon(tau_pts[todo], dt.triangle_polygon(t))
        idx = np.flatnonzero(todo)[hit]
        where[idx] = t
    return where


def class_components(dt: DDelaunay, vcol) -> int:
    """Connected pieces of all color classes in ``dt``; equals k when every class is connected."""
    vcol = np.asarray(vcol)
    V = dt.n_vertices
    if V == 0:
        return 0
    same = [(p, q) for p, q in dt.edges if vcol[p] == vcol[q]]
    if not same:
        return V
    r, c = np.array(same).T
    g = coo_matrix((np.ones(len(same)), (r, c)), shape=(V, V))
    return int(connected_components(g, directed=False)[0])


def lattice_violators(F: np.ndarray, m: int, net) -> np.ndarray:
    """Apexes of lattice orthants with at least ``m`` points of ``F`` and none of ``net``."""
    if len(F) == 0:
        return np.zeros((0, 3))
    lat = _LatticeBits(F)
    heavy = bits.popcount(lat.words) >= m
    hit = (lat.words & lat.mask(list(net))).any(axis=1) if len(net) else np.zeros(len(heavy), bool)
    return lat.B[heavy & ~hit]


def cone_net(Q, C: SimplicialCone, m: int, seed: int = 0, verify: bool = True,
             keep_trace: bool = False) -> ConeNetResult:
    """Net hitting every translate of ``C`` that holds at least ``m`` points of ``Q``."""
    Q = as_points(Q)
    n = len(Q)
    if m < 1:
        raise ValueError("threshold m must be at least 1")
    if n < m:
        return ConeNetResult([], 0, {"n": n, "m": m, "case": "below-threshold"})
    Qp = perturb(Q, [C], seed=seed)
    m6 = color_threshold(m)
    if m6 < 1:
        # every nonempty translate holds an envelope point
        net = list(envelope_points(Qp, C))
        stats = {"n": n, "m": m, "m6": m6, "envelope": len(net), "case": "envelope",
                 "net": len(net), "bound": n}
        return ConeNetResult(net, n, stats, ConeNetTrace(Qp) if keep_trace else None)
    data = lift_to_envelope(Qp, C)
    S = data.lifted_points(Qp)
    stats = {"n": n, "m": m, "m6": m6, "envelope": len(data.envelope)}
    trace = ConeNetTrace(S)

    dt_all = d_delaunay(S, C)
    col = color(S, C, m6, cone_hull(dt_all))
    trace.coloring = col
    colored = col.colored
    dt2 = d_delaunay(S[colored], C, ids=colored)
    vcol = col.colors[colored]
    free = np.flatnonzero(col.colors == COLORLESS)
    where = locate_colorless(dt2, C.tau(S[free])) if len(free) else np.zeros(0, int)
    inside = np.bincount(where[where >= 0], minlength=len(dt2.triangles)) if len(dt2.triangles) \
        else np.zeros(0, int)
    chains = corridors(dt2, vcol)
    subs = [s for ch in chains for s in subdivide(dt2, vcol, ch, inside, m6)]
    safeguard = sorted({t for t in range(len(dt2.triangles)) if inside[t] > m6}
                       | {t for s in subs if s.overfull for t in s.triangles})
    local = {v for s in subs for v in s.corners}
    local |= {v for t in safeguard for v in dt2.triangles[t]}
    chosen = {int(colored[v]) for v in local}
    k = col.k
    k_parts = class_components(dt2, vcol)
    n_free = len(free)
    corridor_bound = max(3 * k_parts - 6, 0) + 3
    # report a bound that holds even if the planar corridor count is exceeded
    counted = max(corridor_bound, len(chains))
    bound = 3 * (4 * (counted + 2 * (-(-n_free // m6))) + 3 * len(safeguard))
    stats.update({
        "case": "corridors", "k": k, "class_components": k_parts, "colorless": n_free,
        "corridors": len(chains), "corridor_bound": corridor_bound, "subcorridors": len(subs),
        "safeguard_triangles": len(safeguard), "outer_colorless": int((where < 0).sum()),
    })
    trace.dt_colored, trace.subcorridors = dt2, subs
    trace.safeguard_triangles, trace.inside = safeguard, inside
    trace.outer_colorless = stats["outer_colorless"]

    net = sorted(data.lift(sorted(chosen)))
    stats["net"] = len(net)
    stats["bound"] = bound
    if verify:
        bad = lattice_violators(C.coords(Qp), m, net)
        if len(bad):
            raise NetVerificationFailed(
                f"cone net misses {len(bad)} heavy translate(s), e.g. apex coords {bad[0].tolist()}")
    return ConeNetResult(net, bound, stats, trace if keep_trace else None)


# object boundaries ----------------------------------------------------------

def object_boundary(F: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Closed loop, in face coordinates, bounding the envelope patch inside the orthant below ``b``.

    On face ``k`` the patch boundary is the staircase of the 2D minima of the
    points with ``s_k <= b_k``; the three staircases meet on the orthant's edges.
    Returns an empty array when the orthant holds no point.
    """
    F = np.asarray(F, float)
    b = np.asarray(b, float)
    if not (F <= b).all(axis=1).any():
        return np.zeros((0, 3))
    loop = []
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        A = F[(F[:, k] <= b[k]) & (F[:, i] <= b[i]) & (F[:, j] <= b[j])][:, [i, j]]
        A = A[np.argsort(A[:, 0])]
        minima = [A[0]]
        for a in A[1:]:
            if a[1] < minima[-1][1]:
                minima.append(a)
        pts2 = [(minima[0][0], b[j])]
        for r, a in enumerate(minima):
            if r:
                pts2.append((a[0], minima[r - 1][1]))
            pts2.append((a[0], a[1]))
        pts2.append((b[i], minima[-1][1]))
        for u, v in pts2:
            x = np.empty(3)
            x[k], x[i], x[j] = b[k], u, v
            loop.append(x)
    return np.array(loop)


def crossing_count(F: np.ndarray, b1, b2, cone: SimplicialCone, shift: float | None = None) -> int:
    """Transversal crossings between the projected boundaries of two canonical objects.

    Both apexes are pushed up along the diagonal by distinct amounts below the
    smallest coordinate gap, which keeps every point off both boundaries without
    changing which points the objects contain.
    """
    F = np.asarray(F, float)
    b1 = np.asarray(getattr(b1, "apex_coords", b1), float)
    b2 = np.asarray(getattr(b2, "apex_coords", b2), float)
    if shift is None:
        gaps = [np.diff(np.unique(F[:, k])) for k in range(3)]
        g = min((float(x.min()) for x in gaps if len(x)), default=1.0)
        shift = 0.25 * g
    L1 = object_boundary(F, b1 + shift * 0.5)
    L2 = object_boundary(F, b2 + shift * 0.5 * (1 + np.sqrt(0.5)))
    if len(L1) == 0 or len(L2) == 0:
        return 0
    T1 = cone.tau(cone.apex_from_coords(L1))
    T2 = cone.tau(cone.apex_from_coords(L2))
    scale = max(float(np.ptp(np.vstack([T1, T2]), axis=0).max()), 1e-12)
    X = proper_crossings(T1, np.roll(T1, -1, axis=0), T2, np.roll(T2, -1, axis=0), scale)
    return int(X.sum())
