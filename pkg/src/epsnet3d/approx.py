"""Hitting sets and set covers for translates, driven by an epsilon-net builder.

The doubling scheme keeps integer weights, turns them into a multiset, asks the
net builder for a net, and doubles the weight of any range the net misses.  The
LP route instead computes near-optimal fractional weights directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .decompose import PolytopeFamily, net_constant, polytope_net
from .errors import NetVerificationFailed, NonTermination, UncoverablePoint, UnhittableRange
from .geometry import as_points

NetBuilder = Callable[[np.ndarray, float], list]


@dataclass
class Weights:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, float)
        if (w < 0).any() or not (w > 0).any():
            raise ValueError("weights must be nonnegative with at least one positive entry")
        self.w = w

    @property
    def total(self) -> float:
        return float(self.w.sum())

    def normalized(self) -> "Weights":
        return Weights(self.w / self.w.sum())


@dataclass
class HittingInstance:
    """Points and translates (given by offsets) of one polytope family."""

    points: np.ndarray
    family: PolytopeFamily
    ranges: np.ndarray

    def __post_init__(self):
        self.points = as_points(self.points)
        self.family = PolytopeFamily.of(self.family)
        self.ranges = np.asarray(self.ranges, float).reshape(-1, 3)
        self._M: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def membership(self) -> np.ndarray:
        """``(ranges, points)`` closed membership, computed once."""
        if self._M is None:
            from .harness import family_members
            self._M = family_members(self.family, self.points, self.ranges)
        return self._M

    def check_hittable(self) -> None:
        empty = np.flatnonzero(~self.membership.any(axis=1))
        if len(empty):
            raise UnhittableRange(f"range {int(empty[0])} (offset {self.ranges[empty[0]].tolist()}) holds no point")


@dataclass
class Solution:
    chosen: list[int]
    certificate: dict[int, int]
    stats: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.chosen)


@dataclass
class DualInstance:
    """Ranges become points (their lowest vertex) and points become translates of the inverted shape."""

    dual_points: np.ndarray
    dual_family: PolytopeFamily
    dual_ranges: np.ndarray
    center: np.ndarray

    def as_hitting(self) -> HittingInstance:
        return HittingInstance(self.dual_points, self.dual_family, self.dual_ranges)


def weights_to_multiset(w, n: Optional[int] = None) -> np.ndarray:
    """Point indices repeated ``ceil(w_p * n / sum w)`` times; at most ``2n`` entries.

    A range with weight fraction ``f`` receives at least ``f / 2`` of the copies.
    """
    w = np.asarray(getattr(w, "w", w), float)
    n = len(w) if n is None else n
    W = w.sum()
    if not W > 0:
        raise ValueError("weights must have positive total")
    copies = np.where(w > 0, np.ceil(w * n / W - 1e-12), 0).astype(int)
    copies = np.maximum(copies, (w > 0).astype(int))
    return np.repeat(np.arange(len(w)), copies)


def default_builder(family: PolytopeFamily, seed: int = 0) -> NetBuilder:
    def build(Q: np.ndarray, eps: float) -> list:
        return polytope_net(Q, family, min(1.0, eps), seed=seed).net
    return build


def _certificate(M: np.ndarray, chosen) -> dict[int, int]:
    cert = {}
    chosen = list(chosen)
    for r in range(len(M)):
        hit = [p for p in chosen if M[r, p]]
        if hit:
            cert[r] = int(hit[0])
    return cert


def prune(M: np.ndarray, chosen) -> list[int]:
    """Drop chosen columns, last first, while every row stays covered."""
    keep = sorted(int(j) for j in chosen)
    cover = M[:, keep].sum(axis=1) if keep else np.zeros(len(M), int)
    for j in reversed(list(keep)):
        rows = M[:, j]
        if (cover[rows] >= 2).all():
            cover[rows] -= 1
            keep.remove(j)
    return keep


def bg_hitting_set(inst: HittingInstance, builder: Optional[NetBuilder] = None, seed: int = 0,
                   reduce: bool = True) -> Solution:
    """Weight doubling over guesses ``c = 1, 2, 4, ...`` with nets at ``eps = 1 / (2c)``.

    With ``reduce`` the successful net is pruned of points whose ranges are all
    hit twice; ``stats["net_size"]`` keeps the size before pruning.
    """
    inst.check_hittable()
    M = inst.membership
    n = inst.n
    builder = builder or default_builder(inst.family, seed)
    C_T = net_constant(inst.family)[0]
    total_doublings = 0
    iterations = 0
    c = 1
    while c <= n:
        eps = 1.0 / (2 * c)
        cap = math.ceil(4 * c * math.log2(n + 1))
        w = np.ones(n)
        doublings = 0
        while doublings <= cap:
            iterations += 1
            multi = weights_to_multiset(w)
            net_copies = builder(inst.points[multi], eps / 2)
            H = sorted({int(multi[i]) for i in net_copies})
            hit = M[:, H].any(axis=1) if H else np.zeros(len(M), bool)
            miss = np.flatnonzero(~hit)
            if len(miss) == 0:
                net_size = len(H)
                if reduce:
                    H = prune(M, H)
                return Solution(H, _certificate(M, H), {
                    "c": c, "epsilon": eps, "iterations": iterations, "net_size": net_size,
                    "doublings": total_doublings, "bound_constant": C_T,
                })
            r = int(miss[0])
            if w[M[r]].sum() >= eps * w.sum():
                raise NetVerificationFailed(f"net at eps={eps / 2:g} misses heavy range {r}")
            w[M[r]] *= 2
            doublings += 1
            total_doublings += 1
        c *= 2
    raise NonTermination(f"doubling did not converge with c up to {n}")


def lp_weights(inst: HittingInstance, gamma: float = 0.1, max_iter: int = 200_000):
    """Weights with ``min_T w(T) >= (1 - gamma) * eps_opt`` and their value ``eps*``.

    Garg-Koenemann on the packing dual; the covering iterate with the best ratio
    is kept and the run stops once the packing lower bound certifies it.
    """
    if not (0 < gamma < 1):
        raise ValueError("gamma must lie in (0, 1)")
    inst.check_hittable()
    M = inst.membership.astype(float)
    R, n = M.shape
    eta = gamma / 3.0
    length = np.ones(n)
    y = np.zeros(R)
    best_U, best_x = math.inf, None
    LB = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        col = M @ length
        r = int(np.argmin(col))
        U = length.sum() / col[r]
        if U < best_U:
            best_U, best_x = U, length / col[r]
        y[r] += 1.0
        length = length * np.where(M[r] > 0, 1.0 + eta, 1.0)
        length /= length.max()
        load = (M.T @ y).max()
        LB = max(LB, y.sum() / load)
        if LB >= (1.0 - gamma) * best_U:
            break
    w = best_x / best_x.sum()
    eps_star = float((M @ w).min())
    return Weights(w), eps_star, {"iterations": it, "upper": best_U, "lower": LB}


def lp_hitting_set(inst: HittingInstance, gamma: float = 0.1, builder: Optional[NetBuilder] = None,
                   seed: int = 0, reduce: bool = True) -> Solution:
    """Net of the LP weights at ``eps*``; every range then has weight at least ``eps*``."""
    w, eps_star, info = lp_weights(inst, gamma)
    M = inst.membership
    builder = builder or default_builder(inst.family, seed)
    multi = weights_to_multiset(w)
    H = sorted({int(multi[i]) for i in builder(inst.points[multi], eps_star / 2)})
    if not M[:, H].any(axis=1).all():
        raise NetVerificationFailed("LP-weighted net misses a range")
    net_size = len(H)
    if reduce:
        H = prune(M, H)
    return Solution(H, _certificate(M, H), {"epsilon": eps_star, "net_size": net_size, **info})


def dualize(inst: HittingInstance, center=None) -> DualInstance:
    """Point ``p`` lies in translate ``t`` iff the translate's lowest vertex lies in the dual translate of ``p``."""
    fam = inst.family
    V = fam.all_vertices
    c = V.mean(axis=0) if center is None else np.asarray(center, float)
    order = np.lexsort((V[:, 1], V[:, 0], V[:, 2]))
    low = V[order[0]]
    return DualInstance(
        dual_points=inst.ranges + low,
        dual_family=fam.inverted(c),
        dual_ranges=inst.points - 2.0 * c + low,
        center=c,
    )


def set_cover(inst: HittingInstance, builder: Optional[NetBuilder] = None, seed: int = 0,
              solver: str = "bg", gamma: float = 0.1, reduce: bool = True) -> Solution:
    """Cover the points with few of the given translates, by hitting the dual."""
    M = inst.membership
    bare = np.flatnonzero(~M.any(axis=0))
    if len(bare):
        raise UncoverablePoint(f"point {int(bare[0])} lies in no range")
    dual = dualize(inst).as_hitting()
    if builder is None:
        builder = default_builder(dual.family, seed)
    if solver == "lp":
        sol = lp_hitting_set(dual, gamma, builder, seed, reduce)
    else:
        sol = bg_hitting_set(dual, builder, seed, reduce)
    chosen = sol.chosen
    cert = {}
    for p in range(inst.n):
        cov = [r for r in chosen if M[r, p]]
        if not cov:
            raise NetVerificationFailed(f"dual hitting set leaves point {p} uncovered")
        cert[p] = int(cov[0])
    return Solution(chosen, cert, dict(sol.stats))
