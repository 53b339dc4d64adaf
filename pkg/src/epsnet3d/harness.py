"""Ground truth: instance generation, canonical translate enumeration, exact optima.

Nothing here trusts the net construction.  Ranges are enumerated from the
arrangement of facet planes in translation space, and membership is always
recomputed from the halfspace description.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from . import bits
from .errors import CapExceeded, InputError
from .geometry import ConvexPolytope, SimplicialCone, as_points

Shape = Union[ConvexPolytope, SimplicialCone]


# exact membership -----------------------------------------------------------

def inequalities(shape: Shape) -> tuple[np.ndarray, np.ndarray]:
    """``(A, c)`` with ``x`` in the shape iff ``A x <= c``."""
    if isinstance(shape, SimplicialCone):
        return shape.normals, shape.normals @ shape.apex
    return shape.A, shape.b


def members(shape: Shape, P, offsets) -> np.ndarray:
    """Closed membership ``(len(offsets), len(P))`` of points in translates, no tolerance."""
    A, c = inequalities(shape)
    P = as_points(P)
    T = np.asarray(offsets, float).reshape(-1, 3)
    lhs = P @ A.T - c                  # (n, F)
    rhs = T @ A.T                      # (R, F)
    return (lhs[None, :, :] <= rhs[:, None, :]).all(axis=2)


def family_members(family, P, offsets) -> np.ndarray:
    out = None
    for T in family.pieces:
        m = members(T, P, offsets)
        out = m if out is None else out | m
    return out


# canonical translates -------------------------------------------------------

@dataclass
class CanonicalRanges:
    """One representative offset per distinct nonempty point subset."""

    offsets: np.ndarray
    words: np.ndarray
    n: int

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def masks(self) -> np.ndarray:
        return bits.unpack(self.words, self.n)

    @property
    def sizes(self) -> np.ndarray:
        return bits.popcount(self.words)


class _PrefixEval:
    """Membership bitsets for many offsets through per-facet sorted prefixes."""

    def __init__(self, A: np.ndarray, c: np.ndarray, P: np.ndarray):
        self.A = A
        self.lhs = P @ A.T - c
        self.n = len(P)
        self.sorted = []
        self.prefix = []
        for j in range(len(A)):
            order = np.argsort(self.lhs[:, j], kind="stable")
            self.sorted.append(self.lhs[order, j])
            self.prefix.append(bits.prefix_masks(order, self.n))

    def words(self, T: np.ndarray) -> np.ndarray:
        rhs = T @ self.A.T
        out = None
        for j in range(len(self.A)):
            cnt = np.searchsorted(self.sorted[j], rhs[:, j], side="right")
            w = self.prefix[j][cnt]
            out = w if out is None else out & w
        return out


def canonical_translates(P, shape: Shape, eta: float | None = None,
                         min_size: int = 1) -> CanonicalRanges:
    """Every distinct subset ``P ∩ (shape + t)`` of size at least ``min_size``.

    Offsets are arrangement vertices where three facet planes of (possibly
    repeated) points meet, each nudged into the eight neighbouring open cells.
    Any realizable subset of points in general position is realized in one of
    those cells; every returned offset realizes exactly its reported subset.
    """
    P = as_points(P)
    n = len(P)
    W = bits.n_words(n)
    if n == 0:
        return CanonicalRanges(np.zeros((0, 3)), np.zeros((0, W), np.uint64), 0)
    A, c = inequalities(shape)
    ev = _PrefixEval(A, c, P)
    lhs = ev.lhs
    if eta is None:
        eta = 1e-7 * max(float(np.ptp(P, axis=0).max()), 1.0)
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
    seen: dict[bytes, np.ndarray] = {}
    pins = np.arange(n)
    for js in itertools.combinations(range(len(A)), 3):
        N = A[list(js)]
        if abs(np.linalg.det(N)) < 1e-9:
            continue
        Ninv = np.linalg.inv(N)
        nudges = (signs * eta) @ Ninv.T          # (8, 3)
        r2 = np.stack(np.meshgrid(lhs[:, js[1]], lhs[:, js[2]], indexing="ij"), axis=-1).reshape(-1, 2)
        for a in pins:
            R = np.column_stack([np.full(len(r2), lhs[a, js[0]]), r2])
            V = R @ Ninv.T                        # vertices, (n*n, 3)
            # pins must lie in the closed translate up to rounding
            pi = np.column_stack([np.full(len(r2), a), np.repeat(pins, n), np.tile(pins, n)])
            slack = lhs[pi] - (V @ A.T)[:, None, :]
            ok = (slack <= 1e-9 * max(1.0, float(np.abs(V).max()))).all(axis=(1, 2))
            if not ok.any():
                continue
            T = (V[ok][:, None, :] + nudges[None, :, :]).reshape(-1, 3)
            w = ev.words(T)
            keep = bits.popcount(w) >= min_size
            if not keep.any():
                continue
            w, T = w[keep], T[keep]
            uniq, first = np.unique(w, axis=0, return_index=True)
            for row, i in zip(uniq, first):
                key = row.tobytes()
                if key not in seen:
                    seen[key] = T[i]
    if not seen:
        return CanonicalRanges(np.zeros((0, 3)), np.zeros((0, W), np.uint64), n)
    keys = sorted(seen)
    words = np.array([np.frombuffer(k, dtype=np.uint64) for k in keys]).reshape(-1, W)
    offsets = np.array([seen[k] for k in keys])
    return CanonicalRanges(offsets, words, n)


# verification ---------------------------------------------------------------

@dataclass
class OracleResult:
    ok: bool
    violator: list[float] | None = None
    count: int = 0
    piece: int | None = None
    opt_value: int | None = None
    witness: list[int] | None = None

    def as_record(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _pieces(shape) -> list[Shape]:
    if isinstance(shape, (ConvexPolytope, SimplicialCone)):
        return [shape]
    return list(shape.pieces)


def verify_net(P, shape, eps: float | None, net, threshold: int | None = None) -> OracleResult:
    """First canonical translate (of any piece) with enough points and no net point.

    The threshold is ``eps * |P|`` points unless an absolute ``threshold`` is given.
    """
    P = as_points(P)
    n = len(P)
    if n == 0:
        return OracleResult(True)
    need = threshold if threshold is not None else math.ceil(eps * n - 1e-9)
    need = max(int(need), 1)
    net_mask = np.zeros(n, bool)
    net_mask[list(net)] = True
    net_words = bits.pack(net_mask)
    for pi, piece in enumerate(_pieces(shape)):
        cr = canonical_translates(P, piece, min_size=need)
        if len(cr) == 0:
            continue
        bad = np.flatnonzero(~(cr.words & net_words).any(axis=1))
        if len(bad):
            i = int(bad[0])
            t = cr.offsets[i]
            count = int(members(piece, P, t[None, :])[0].sum())
            return OracleResult(False, t.tolist(), count, pi)
    return OracleResult(True)


# instances ------------------------------------------------------------------

PRESETS = ("cube", "tetrahedron", "random-convex", "L-shape")
DISTRIBUTIONS = ("uniform-box", "clustered", "on-envelope")


@dataclass(frozen=True)
class InstanceSpec:
    seed: int = 0
    n: int = 60
    distribution: str = "uniform-box"
    preset: str = "cube"
    vertices: int = 6
    n_ranges: int = 0
    spread: float = 1.3

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise InputError(f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}")
        if self.distribution not in DISTRIBUTIONS:
            raise InputError(f"unknown distribution {self.distribution!r}")
        if self.n < 0 or self.n_ranges < 0:
            raise InputError("counts must be nonnegative")


def preset_family(name: str, rng: np.random.Generator | None = None, vertices: int = 6):
    from .decompose import PolytopeFamily
    if name == "cube":
        return PolytopeFamily((ConvexPolytope.cube(),))
    if name == "tetrahedron":
        return PolytopeFamily((ConvexPolytope.regular_tetrahedron(1.5),))
    if name == "random-convex":
        rng = rng or np.random.default_rng(0)
        while True:
            X = rng.normal(size=(vertices, 3))
            X = 0.6 * X / np.linalg.norm(X, axis=1, keepdims=True) + 0.6
            T = ConvexPolytope.from_vertices(X)
            if len(T.vertices) >= 4:
                return PolytopeFamily((T,))
    if name == "L-shape":
        return PolytopeFamily((ConvexPolytope.box((0, 0, 0), (1.0, 0.5, 0.5)),
                               ConvexPolytope.box((0, 0.5, 0), (0.5, 1.0, 0.5))))
    raise InputError(f"unknown preset {name!r}")


def _sample_in(T: ConvexPolytope, rng: np.random.Generator, k: int) -> np.ndarray:
    lam = rng.dirichlet(np.ones(len(T.vertices)), size=k)
    return lam @ T.vertices


def generate(spec: InstanceSpec):
    """Deterministic instance; ranges are translates that each contain a chosen point."""
    from .approx import HittingInstance
    rng = np.random.default_rng(spec.seed)
    fam = preset_family(spec.preset, rng, spec.vertices)
    V = fam.all_vertices
    lo, hi = V.min(axis=0), V.max(axis=0)
    c = (lo + hi) / 2
    half = spec.spread * (hi - lo) / 2
    n = spec.n
    if spec.distribution == "uniform-box":
        P = rng.uniform(c - half, c + half, size=(n, 3))
    elif spec.distribution == "clustered":
        k = max(1, min(4, n))
        centers = rng.uniform(c - half, c + half, size=(k, 3))
        lab = rng.integers(0, k, size=n)
        P = centers[lab] + rng.normal(scale=0.12 * float(half.max()), size=(n, 3))
    else:
        # the plane x + y + z = 1 inside the positive octant: no point dominates another
        X = rng.dirichlet(np.ones(3), size=n)
        P = X * float((hi - lo).max())
    P = P.reshape(-1, 3)
    R = []
    for _ in range(spec.n_ranges if n else 0):
        p = P[rng.integers(0, n)]
        piece = fam.pieces[rng.integers(0, fam.k_pieces)]
        R.append(p - _sample_in(piece, rng, 1)[0])
    return HittingInstance(P, fam, np.array(R).reshape(-1, 3))


def on_envelope_cone():
    """Tangent cone of the unit cube at its lowest vertex."""
    from .decompose import vertex_cones
    return vertex_cones(ConvexPolytope.cube(), 0)[0]


# exact optima and baselines -------------------------------------------------

def _system(inst, mode: str) -> np.ndarray:
    """Rows are constraints, columns candidate elements."""
    M = inst.membership
    if mode == "hitting":
        return M
    if mode == "cover":
        return M.T
    raise ValueError(f"mode must be 'hitting' or 'cover', not {mode!r}")


def exact_opt(inst, mode: str = "hitting", cap: int = 4) -> OracleResult:
    """Smallest feasible selection by increasing cardinality, up to ``cap`` elements."""
    S = _system(inst, mode)
    rows, cols = S.shape
    if rows == 0:
        return OracleResult(True, opt_value=0, witness=[])
    if not S.any(axis=1).all():
        raise InputError("instance is infeasible: some constraint has no candidate")
    cw = bits.pack(S.T)                      # element -> constraints it satisfies
    full = bits.pack(np.ones(rows, bool))
    for k in range(1, cap + 1):
        for combo in _combos(cols, k):
            acc = np.bitwise_or.reduce(cw[combo], axis=1)
            good = np.flatnonzero((acc == full).all(axis=1))
            if len(good):
                sel = [int(x) for x in combo[good[0]]]
                return OracleResult(True, opt_value=k, witness=sel)
    raise CapExceeded(f"optimum exceeds {cap}")


def _combos(n: int, k: int, chunk: int = 200_000):
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def greedy_baseline(inst, mode: str = "hitting"):
    from .approx import Solution
    S = _system(inst, mode)
    if not S.any(axis=1).all():
        raise InputError("instance is infeasible: some constraint has no candidate")
    open_rows = np.ones(len(S), bool)
    chosen = []
    while open_rows.any():
        gain = S[open_rows].sum(axis=0)
        j = int(np.argmax(gain))
        chosen.append(j)
        open_rows &= ~S[:, j]
    cert = {int(r): int(next(j for j in chosen if S[r, j])) for r in range(len(S))}
    return Solution(sorted(chosen), cert, {"mode": mode})


def lp_oracle(M: np.ndarray, method: str = "highs") -> float:
    """Exact ``max eps`` with ``M w >= eps``, ``sum w = 1``, ``w >= 0``."""
    M = np.asarray(M, float)
    R, n = M.shape
    if method == "vertex":
        return _lp_vertices(M)
    from scipy.optimize import linprog
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M, np.ones((R, 1))])
    A_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(R), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP oracle failed: {res.message}")
    return float(-res.fun)


def _lp_vertices(M: np.ndarray) -> float:
    """Brute force over basic solutions; only for a handful of points."""
    R, n = M.shape
    # variables (w, eps); constraints: eps - M w <= 0, -w <= 0, plus sum w = 1
    G = np.vstack([np.hstack([-M, np.ones((R, 1))]), np.hstack([-np.eye(n), np.zeros((n, 1))])])
    h = np.zeros(R + n)
    eq = np.hstack([np.ones(n), [0.0]])
    best = -math.inf
    for act in itertools.combinations(range(R + n), n):
        A = np.vstack([G[list(act)], eq])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, np.concatenate([h[list(act)], [1.0]]))
        if (G @ x <= 1e-9).all():
            best = max(best, x[-1])
    return float(best)


# records --------------------------------------------------------------------

def record(kind: str, **fields) -> str:
    """One JSON line with sorted keys."""
    return json.dumps({"kind": kind, **fields}, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")
