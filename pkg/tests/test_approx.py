import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epsnet3d.approx import (HittingInstance, Weights, bg_hitting_set, dualize, lp_hitting_set,
                             lp_weights, set_cover, weights_to_multiset)
from epsnet3d.decompose import PolytopeFamily
from epsnet3d.errors import CapExceeded, UncoverablePoint, UnhittableRange
from epsnet3d.geometry import ConvexPolytope
from epsnet3d.harness import (InstanceSpec, exact_opt, family_members,
                              generate, lp_oracle)

CUBE = PolytopeFamily.of(ConvexPolytope.cube())


def _check_hitting(inst, sol):
    M = inst.membership
    assert set(sol.certificate) == set(range(len(M)))
    for r, p in sol.certificate.items():
        assert p in sol.chosen and M[r, p]


def _private(k):
    P = np.array([[3.0 * i + 0.5] * 3 for i in range(k)])
    R = np.array([[3.0 * i] * 3 for i in range(k)])
    return HittingInstance(P, CUBE, R)


# multiset -------------------------------------------------------------------

def test_uniform_weights_one_copy_each():
    assert weights_to_multiset(np.ones(7)).tolist() == list(range(7))


def test_point_mass():
    m = weights_to_multiset(np.array([0, 0, 1.0, 0]))
    assert set(m.tolist()) == {2} and len(m) <= 8


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        Weights(np.array([1.0, -1.0]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=40).filter(lambda w: sum(w) > 0))
def test_multiset_total_and_one_sided_distortion(w):
    w = np.array(w)
    m = weights_to_multiset(w)
    n = len(w)
    assert len(m) <= 2 * n
    copies = np.bincount(m, minlength=n)
    # every point subset keeps at least half its weight fraction
    frac_w = w / w.sum()
    frac_c = copies / copies.sum()
    assert (frac_c >= frac_w / 2 - 1e-12).all()


# hitting set ----------------------------------------------------------------

def test_single_range():
    inst = HittingInstance([[0.5] * 3, [4.0] * 3], CUBE, [[0, 0, 0]])
    sol = bg_hitting_set(inst)
    assert sol.chosen == [0]
    _check_hitting(inst, sol)


def test_disjoint_private_ranges_need_everything():
    inst = _private(5)
    sol = bg_hitting_set(inst)
    assert sol.chosen == list(range(5))
    _check_hitting(inst, sol)


def test_empty_range_rejected():
    inst = HittingInstance([[0.5] * 3], CUBE, [[5, 5, 5]])
    with pytest.raises(UnhittableRange):
        bg_hitting_set(inst)


def _opt_instance(start, n=20, ranges=15, spread=1.3, preset="cube"):
    """First seeded instance from ``start`` on whose optimum is at most 4."""
    for seed in range(start, start + 200):
        inst = generate(InstanceSpec(seed=seed, n=n, preset=preset, n_ranges=ranges, spread=spread))
        try:
            exact_opt(inst, cap=4)
            return inst
        except CapExceeded:
            continue
    raise AssertionError("no instance with a small optimum")


@pytest.mark.parametrize("seed", range(3))
def test_random_instance_against_opt(seed):
    inst = _opt_instance(10 * seed)
    sol = bg_hitting_set(inst, seed=seed)
    _check_hitting(inst, sol)
    opt = exact_opt(inst, cap=4).opt_value
    assert sol.size <= 4 * sol.stats["bound_constant"] * opt


def _range_net_builder(inst):
    """Greedy net for the instance's own ranges that are heavy in the multiset."""
    def build(Q, eps):
        M = family_members(inst.family, Q, inst.ranges)
        todo = M.sum(axis=1) >= eps * len(Q)
        out = []
        while todo.any():
            j = int(np.argmax(M[todo].sum(axis=0)))
            out.append(j)
            todo &= ~M[:, j]
        return out
    return build


def test_small_nets_drive_the_doubling():
    inst = _opt_instance(4)
    sol = bg_hitting_set(inst, builder=_range_net_builder(inst), reduce=False)
    _check_hitting(inst, sol)
    assert sol.stats["doublings"] > 0
    # once the guess reaches OPT the doubling loop must succeed
    assert sol.stats["c"] <= 2 * exact_opt(inst).opt_value


# LP -------------------------------------------------------------------------

def test_one_range_holding_everything():
    inst = HittingInstance(np.random.default_rng(0).random((6, 3)) * 0.9, CUBE, [[0, 0, 0]])
    w, eps, _ = lp_weights(inst)
    assert eps == pytest.approx(1.0)
    assert w.w.sum() == pytest.approx(1.0)


def test_two_halves():
    P = np.vstack([np.full((4, 3), 0.5), np.full((4, 3), 5.5)])
    P += np.random.default_rng(1).random(P.shape) * 0.1
    inst = HittingInstance(P, CUBE, [[0, 0, 0], [5, 5, 5]])
    _, eps, _ = lp_weights(inst, gamma=0.1)
    assert eps >= 0.9 * 0.5


@pytest.mark.parametrize("seed", range(4))
def test_lp_against_exact_oracle(seed):
    inst = generate(InstanceSpec(seed=seed, n=12, preset="tetrahedron", n_ranges=10))
    w, eps, _ = lp_weights(inst, gamma=0.1)
    exact = lp_oracle(inst.membership)
    assert eps >= 0.9 * exact - 1e-12
    assert eps == pytest.approx(float((inst.membership @ w.w).min()))
    assert eps <= exact + 1e-9


def test_lp_hitting_set_valid():
    inst = generate(InstanceSpec(seed=5, n=20, preset="L-shape", n_ranges=15))
    sol = lp_hitting_set(inst, 0.1)
    _check_hitting(inst, sol)


def test_gamma_range():
    with pytest.raises(ValueError):
        lp_weights(_private(2), gamma=1.0)


# duality --------------------------------------------------------------------

def test_dual_cube_at_origin():
    inst = HittingInstance([[0.5] * 3], CUBE, [[0, 0, 0]])
    d = dualize(inst, center=[0, 0, 0])
    V = d.dual_family.pieces[0].vertices
    assert np.allclose(V.min(axis=0), -1) and np.allclose(V.max(axis=0), 0)


def test_dual_single_pair():
    inst = HittingInstance([[0.5] * 3], CUBE, [[0, 0, 0]])
    assert dualize(inst).as_hitting().membership.tolist() == [[True]]


@pytest.mark.parametrize("preset", ["cube", "tetrahedron", "random-convex", "L-shape"])
def test_duality_equivalence_random_pairs(preset):
    inst = generate(InstanceSpec(seed=9, n=100, preset=preset, n_ranges=100, spread=2.0))
    d = dualize(inst)
    primal = inst.membership                       # (range, point)
    dual = family_members(d.dual_family, d.dual_points, d.dual_ranges)  # (point, range)
    assert np.array_equal(primal, dual.T)
    assert primal.any() and not primal.all()


# set cover ------------------------------------------------------------------

def test_one_range_covers_all():
    P = np.random.default_rng(2).random((5, 3)) * 0.9
    inst = HittingInstance(P, CUBE, [[5, 5, 5], [0, 0, 0]])
    sol = set_cover(inst)
    assert sol.chosen == [1]


def test_private_ranges_all_chosen():
    sol = set_cover(_private(4))
    assert sol.chosen == [0, 1, 2, 3]


def test_uncoverable_point():
    inst = HittingInstance([[0.5] * 3, [9.0] * 3], CUBE, [[0, 0, 0]])
    with pytest.raises(UncoverablePoint):
        set_cover(inst)


@pytest.mark.parametrize("solver", ["bg", "lp"])
def test_random_cover(solver):
    inst = generate(InstanceSpec(seed=6, n=15, preset="cube", n_ranges=20, spread=0.8))
    if not inst.membership.any(axis=0).all():
        pytest.skip("generated instance leaves a point uncovered")
    sol = set_cover(inst, solver=solver)
    M = inst.membership
    for p, r in sol.certificate.items():
        assert r in sol.chosen and M[r, p]
    assert len(sol.certificate) == inst.n
