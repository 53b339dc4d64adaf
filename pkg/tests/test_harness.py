import json

import numpy as np
import pytest

from epsnet3d import bits
from epsnet3d.approx import HittingInstance
from epsnet3d.decompose import PolytopeFamily
from epsnet3d.envelope import envelope_points
from epsnet3d.errors import CapExceeded, InputError
from epsnet3d.geometry import ConvexPolytope
from epsnet3d.harness import (InstanceSpec, canonical_translates, exact_opt, generate, greedy_baseline,
                              lp_oracle, members, on_envelope_cone, record, verify_net)

CUBE = ConvexPolytope.cube()


def _random_subsets(P, shape, count, seed, lo=-1.0, hi=1.0):
    rng = np.random.default_rng(seed)
    T = rng.uniform(lo, hi, size=(count, 3)) + P.mean(axis=0) - 0.5
    M = members(shape, P, T)
    M = M[M.any(axis=1)]
    return {r.tobytes() for r in bits.pack(M)}


def test_empty_point_set():
    assert len(canonical_translates(np.zeros((0, 3)), CUBE)) == 0


def test_single_point_gives_one_subset():
    cr = canonical_translates(np.array([[0.3, 0.4, 0.5]]), CUBE)
    assert len(cr) == 1
    assert cr.masks.tolist() == [[True]]


@pytest.mark.parametrize("shape", ["cube", "tetrahedron", "cone"])
def test_randomized_completeness(shape):
    S = {"cube": CUBE, "tetrahedron": ConvexPolytope.regular_tetrahedron(1.0),
         "cone": on_envelope_cone()}[shape]
    P = np.random.default_rng(1).random((20, 3))
    cr = canonical_translates(P, S)
    produced = {r.tobytes() for r in cr.words}
    sampled = _random_subsets(P, S, 100_000, seed=2)
    assert sampled <= produced


def test_every_offset_realizes_its_subset():
    P = np.random.default_rng(3).random((15, 3))
    cr = canonical_translates(P, CUBE)
    assert np.array_equal(members(CUBE, P, cr.offsets), cr.masks)
    assert len({r.tobytes() for r in cr.words}) == len(cr)


def test_min_size_filter():
    P = np.random.default_rng(4).random((12, 3))
    cr = canonical_translates(P, CUBE, min_size=5)
    assert (cr.sizes >= 5).all()
    full = canonical_translates(P, CUBE)
    assert int((full.sizes >= 5).sum()) == len(cr)


def test_verify_full_net_always_ok():
    P = np.random.default_rng(5).random((20, 3))
    assert verify_net(P, CUBE, 0.1, range(20)).ok


def test_verify_empty_net_reports_genuine_violator():
    P = np.random.default_rng(6).random((20, 3)) * 0.8
    res = verify_net(P, PolytopeFamily.of(CUBE), 0.5, [])
    assert not res.ok
    recount = members(CUBE, P, np.array([res.violator]))[0].sum()
    assert recount == res.count >= 10


def _instance(P, ranges):
    return HittingInstance(np.asarray(P, float), PolytopeFamily.of(CUBE), np.asarray(ranges, float))


def test_exact_opt_single_range():
    inst = _instance([[0.5, 0.5, 0.5], [3, 3, 3]], [[0, 0, 0]])
    assert exact_opt(inst).opt_value == 1
    assert greedy_baseline(inst).size == 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_opt_private_ranges(k):
    P = [[3.0 * i + 0.5] * 3 for i in range(k)]
    R = [[3.0 * i] * 3 for i in range(k)]
    inst = _instance(P, R)
    assert exact_opt(inst).opt_value == k
    assert greedy_baseline(inst).size == k


def test_exact_opt_cap():
    P = [[3.0 * i + 0.5] * 3 for i in range(5)]
    R = [[3.0 * i] * 3 for i in range(5)]
    with pytest.raises(CapExceeded):
        exact_opt(_instance(P, R), cap=4)


def test_exact_opt_cover_mode():
    inst = _instance([[0.5, 0.5, 0.5], [0.9, 0.9, 0.9]], [[0, 0, 0], [0.5, 0.5, 0.5], [5, 5, 5]])
    res = exact_opt(inst, "cover")
    assert res.opt_value == 1
    assert inst.membership[res.witness[0]].all()


def test_infeasible_instance_rejected():
    inst = _instance([[0.5, 0.5, 0.5]], [[7, 7, 7]])
    with pytest.raises(InputError):
        exact_opt(inst)


def test_generate_is_deterministic():
    spec = InstanceSpec(seed=11, n=30, preset="random-convex", n_ranges=5)
    a, b = generate(spec), generate(spec)
    assert a.points.tobytes() == b.points.tobytes()
    assert a.ranges.tobytes() == b.ranges.tobytes()


def test_generate_empty():
    assert generate(InstanceSpec(n=0)).points.shape == (0, 3)


def test_generated_ranges_are_hittable():
    inst = generate(InstanceSpec(seed=3, n=25, preset="L-shape", n_ranges=20))
    assert inst.membership.any(axis=1).all()


def test_on_envelope_instance():
    inst = generate(InstanceSpec(seed=0, n=20, distribution="on-envelope"))
    assert len(envelope_points(inst.points, on_envelope_cone())) == 20


def test_bad_spec_rejected():
    with pytest.raises(InputError):
        InstanceSpec(preset="dodecahedron")


def test_lp_oracle_routes_agree():
    rng = np.random.default_rng(8)
    M = rng.random((6, 5)) < 0.5
    M[np.arange(6), rng.integers(0, 5, 6)] = True
    assert lp_oracle(M) == pytest.approx(lp_oracle(M, method="vertex"), abs=1e-8)


def test_record_is_one_sorted_line():
    line = record("net", size=np.int64(3), eps=np.float64(0.5), net=np.array([1, 2]))
    assert "\n" not in line
    assert json.loads(line) == {"kind": "net", "size": 3, "eps": 0.5, "net": [1, 2]}
    assert list(json.loads(line)) == sorted(json.loads(line))
