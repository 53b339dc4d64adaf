"""Lower envelopes of point sets with respect to a simplicial cone.

A point is on the lower envelope when some translate of the cone has it on the
boundary and no point in the interior.  Points above the envelope are slid down
the internal ray onto the envelope of a slightly wider ("flattened") cone; each
such projection remembers the envelope point that certifies it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FlattenFailed, ProjectionMiss
from .geometry import TAU_GEO, SimplicialCone, as_points
from .orthant import EmptyOrthantIndex, delaunay_edges, pinned_triples, strictly_dominated

DELTA_START = 1e-4
DELTA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class PinnedCone:
    """A translate of ``cone`` (apex ``offset``) with 1 to 3 points on its faces.

    ``pins`` holds ``(point index, face index)`` pairs.
    """

    cone: SimplicialCone
    offset: np.ndarray
    pins: tuple[tuple[int, int], ...]

    @property
    def apex_coords(self) -> np.ndarray:
        return self.cone.normals @ self.offset

    @property
    def pin_points(self) -> tuple[int, ...]:
        return tuple(sorted({p for p, _ in self.pins}))


@dataclass(frozen=True, eq=False)
class FlattenedCone:
    """``cone`` widens ``base``: each face normal is tilted by ``delta`` toward its neighbours."""

    base: SimplicialCone
    delta: float
    cone: SimplicialCone

    @property
    def faces(self):
        return self.cone.faces


def flattened(C: SimplicialCone, delta: float) -> FlattenedCone:
    lam = math.tan(delta)
    N = C.normals
    tilted = N + lam * (N.sum(axis=0, keepdims=True) - N)
    return FlattenedCone(C, delta, SimplicialCone(C.apex, tilted, C.internal_ray))


@dataclass
class Projection:
    point: np.ndarray
    pins: tuple[int, ...]
    s: float


@dataclass
class EnvelopeData:
    envelope: tuple[int, ...]
    projections: dict[int, Projection] = field(default_factory=dict)
    flat: FlattenedCone | None = None

    def lifted_points(self, P) -> np.ndarray:
        """The set ``L`` together with every projected point, indexed like ``P``."""
        out = as_points(P).copy()
        for i, pr in self.projections.items():
            out[i] = pr.point
        return out

    def lift(self, net_indices) -> set[int]:
        """Replace projected net points by their witness pins."""
        out: set[int] = set()
        for i in net_indices:
            if i in self.projections:
                out.update(self.projections[i].pins)
            else:
                out.add(int(i))
        return out


def _gap(values: np.ndarray) -> float:
    v = np.unique(values)
    return float(np.min(np.diff(v))) if len(v) > 1 else 1.0


def canonical_empty_cones(P, C: SimplicialCone) -> list[PinnedCone]:
    """All translates of ``C`` pinned by 1, 2 or 3 points with an empty open interior.

    One-pin cones put the point on a single face and push the other two faces
    out by less than any coordinate gap, which is the limit of such placements.
    """
    P = as_points(P)
    n = len(P)
    if n == 0:
        return []
    F = C.coords(P)
    index = EmptyOrthantIndex(F)
    eta = 0.5 * min(_gap(F[:, k]) for k in range(3))
    out: list[PinnedCone] = []

    for i in range(n):
        for k in range(3):
            b = F[i] + eta
            b[k] = F[i, k]
            if index.open_empty(b)[0]:
                out.append(PinnedCone(C, C.apex_from_coords(b), ((i, k),)))

    for i in range(n):
        for j in range(i + 1, n):
            for ki in range(3):
                for kj in range(3):
                    if ki == kj:
                        continue
                    l = 3 - ki - kj
                    b = np.empty(3)
                    b[ki], b[kj] = F[i, ki], F[j, kj]
                    b[l] = max(F[i, l], F[j, l]) + eta
                    # each pin sits on its own face only
                    if not (F[j, ki] < b[ki] and F[i, kj] < b[kj]):
                        continue
                    if index.open_empty(b)[0]:
                        out.append(PinnedCone(C, C.apex_from_coords(b), ((i, ki), (j, kj))))

    for a, b_, c in pinned_triples(F, index):
        apex = np.array([F[a, 0], F[b_, 1], F[c, 2]])
        out.append(PinnedCone(C, C.apex_from_coords(apex), ((int(a), 0), (int(b_), 1), (int(c), 2))))
    return _dedupe(out)


def _dedupe(cones: list[PinnedCone]) -> list[PinnedCone]:
    cones = sorted(cones, key=lambda c: (tuple(np.round(c.offset, 12)), c.pins))
    out: list[PinnedCone] = []
    for c in cones:
        if out and np.max(np.abs(out[-1].offset - c.offset)) <= TAU_GEO and out[-1].pins == c.pins:
            continue
        out.append(c)
    return out


def envelope_points(P, C: SimplicialCone) -> tuple[int, ...]:
    """Indices of lower-envelope points: nothing lies strictly inside the cone below them."""
    P = as_points(P)
    if len(P) == 0:
        return ()
    return tuple(int(i) for i in np.flatnonzero(~strictly_dominated(C.coords(P))))


def _same_ranks(F: np.ndarray, G: np.ndarray) -> bool:
    return all(np.array_equal(np.argsort(F[:, k], kind="stable"), np.argsort(G[:, k], kind="stable"))
               for k in range(3))


def flatten(C: SimplicialCone, P, delta: float = DELTA_START) -> FlattenedCone:
    """Widest tilt (from ``delta`` down by halving) that keeps the combinatorics of ``P``.

    Accepted when the face-coordinate orders agree with the base cone and the
    Delaunay edge set is the same at ``delta`` and ``delta / 2``.
    """
    P = as_points(P)
    F = C.coords(P)
    while delta >= DELTA_FLOOR:
        A, B = flattened(C, delta), flattened(C, delta / 2)
        FA, FB = A.cone.coords(P), B.cone.coords(P)
        if _same_ranks(F, FA) and _same_ranks(F, FB) and delaunay_edges(FA) == delaunay_edges(FB):
            return A
        delta /= 2
    raise FlattenFailed("flattened cone never stabilised; input is (near-)degenerate")


def project_nonenvelope(P, C: SimplicialCone, flat: FlattenedCone,
                        envelope: tuple[int, ...] | None = None) -> EnvelopeData:
    """Slide every non-envelope point down the internal ray onto the flattened envelope.

    The exit parameter is ``max_q min_k (f'(p) - f'(q))_k / -f'(u)_k`` over envelope
    points ``q`` in flattened face coordinates ``f'``; the maximiser is the witness.
    """
    P = as_points(P)
    L = tuple(envelope) if envelope is not None else envelope_points(P, C)
    data = EnvelopeData(L, flat=flat)
    rest = np.setdiff1d(np.arange(len(P)), np.asarray(L, dtype=int))
    if len(rest) == 0:
        return data
    if not L:
        raise ProjectionMiss("no envelope points to project onto")
    u = C.internal_ray
    Fp = flat.cone.coords(P[rest])
    Fl = flat.cone.coords(P[list(L)])
    du = flat.cone.normals @ u
    g = ((Fp[:, None, :] - Fl[None, :, :]) / -du).min(axis=2)
    best = g.argmax(axis=1)
    s = g[np.arange(len(rest)), best]
    for i, si, qi in zip(rest, s, best):
        if not si >= 0:
            raise ProjectionMiss(f"ray from point {int(i)} never meets the flattened envelope")
        data.projections[int(i)] = Projection(P[i] + si * u, (int(L[qi]),), float(si))
    return data


def witness_sound(P, C: SimplicialCone, data: EnvelopeData) -> bool:
    """Every lattice orthant of ``P`` containing a projected point also contains its pin."""
    P = as_points(P)
    F = C.coords(P)
    for pr in data.projections.values():
        fp = C.coords(pr.point)[0]
        for q in pr.pins:
            for k in range(3):
                lo, hi = fp[k], F[q, k]
                if lo < hi and np.any((F[:, k] >= lo) & (F[:, k] < hi)):
                    return False
    return True


def lift_to_envelope(P, C: SimplicialCone) -> EnvelopeData:
    """Envelope, flattened cone, and projections, with the tilt shrunk until witnesses are sound."""
    P = as_points(P)
    L = envelope_points(P, C)
    delta = DELTA_START
    while True:
        flat = flatten(C, P[list(L)], delta) if L else flattened(C, delta)
        data = project_nonenvelope(P, C, flat, L)
        lifted = C.coords(data.lifted_points(P))
        if witness_sound(P, C, data) and not strictly_dominated(lifted).any():
            return data
        delta = flat.delta / 2
        if delta < DELTA_FLOOR:
            raise FlattenFailed("could not find a tilt with sound projection witnesses")
