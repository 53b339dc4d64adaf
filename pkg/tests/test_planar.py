import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epsnet3d.errors import NotATriangulation
from epsnet3d.geometry import SimplicialCone
from epsnet3d.harness import verify_net
from epsnet3d.orthant import canonical_orthants, orthant_members
from epsnet3d.planar import (COLORLESS, Corridor, class_components, color, color_threshold, cone_hull, cone_net,
                             corridors, crossing_count, d_delaunay, lattice_violators, subdivide,
                             triangle_kinds)

CONE = SimplicialCone([0, 0, 0], np.eye(3))


def on_plane(n, seed):
    """Points with coordinate sum 1: an antichain, hence all on the envelope."""
    return np.random.default_rng(seed).dirichlet(np.ones(3), size=n)


def _segments_cross(a, b, c, d):
    def o(p, q, r):
        return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    return o(a, b, c) * o(a, b, d) < 0 and o(c, d, a) * o(c, d, b) < 0


# d_delaunay -----------------------------------------------------------------

def test_single_point():
    dt = d_delaunay(on_plane(1, 0), CONE)
    assert dt.n_vertices == 1 and dt.edges == [] and dt.triangles == []


def test_three_points():
    P = np.array([[0.6, 0.2, 0.2], [0.2, 0.6, 0.2], [0.2, 0.2, 0.6]])
    dt = d_delaunay(P, CONE)
    assert len(dt.edges) == 3
    assert len(dt.triangles) == 1
    assert sorted(cone_hull(dt)) == [0, 1, 2]


def test_three_points_in_a_path():
    # the third point lies below the tight cone of the first two: no edge, no triangle
    P = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.33, 0.33, 0.34]])
    dt = d_delaunay(P, CONE)
    assert dt.edges == [(0, 2), (1, 2)]
    assert dt.triangles == []


@pytest.mark.parametrize("seed", range(4))
def test_twelve_points_planar_triangulation(seed):
    dt = d_delaunay(on_plane(12, seed), CONE)
    V, E, T = dt.n_vertices, len(dt.edges), len(dt.triangles)
    assert V - E + (T + 1) == 2
    segs = [(dt.edges[e], s) for e in range(E)
            for s in zip(dt.edge_polyline(e)[:-1], dt.edge_polyline(e)[1:])]
    for (e1, (a, b)), (e2, (c, d)) in itertools.combinations(segs, 2):
        if set(e1) & set(e2):
            continue
        assert not _segments_cross(a, b, c, d)


def test_edge_witness_holds_only_its_endpoints():
    P = on_plane(15, 5)
    dt = d_delaunay(P, CONE)
    for p, q in dt.edges:
        inside = (dt.F <= np.maximum(dt.F[p], dt.F[q])).all(axis=1)
        assert set(np.flatnonzero(inside)) == {p, q}


def test_hull_excludes_interior_point():
    # three far points and one in the middle whose 3-pin cone is nonempty
    P = np.array([[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9], [0.34, 0.33, 0.33]])
    dt = d_delaunay(P, CONE)
    assert sorted(cone_hull(dt)) == [0, 1, 2]


def test_validation_rejects_crossing_edges():
    dt = d_delaunay(on_plane(8, 2), CONE)
    dt.apex_tau = dt.apex_tau[::-1].copy()
    with pytest.raises(NotATriangulation):
        dt.validate()


# coloring -------------------------------------------------------------------

def test_threshold_values():
    assert [color_threshold(m) for m in (1, 5, 6, 10, 12, 15, 16, 60)] == [0, 0, 1, 1, 2, 2, 3, 10]
    for m in range(1, 200):
        assert 5 * color_threshold(m) < m


def test_color_whole_set():
    P = on_plane(10, 3)
    c = color(P, CONE, 10)
    assert c.k == 1 and (c.colors == 0).all()


def test_color_singletons():
    P = on_plane(10, 3)
    c = color(P, CONE, 1)
    assert c.k == 10
    assert sorted(c.colors.tolist()) == list(range(10))


@pytest.mark.parametrize("seed", range(5))
def test_color_thirty_points(seed):
    P = on_plane(30, seed)
    c = color(P, CONE, 5)
    assert c.k <= 7
    assert np.bincount(c.colors[c.colors >= 0]).max() <= 5
    # afterwards no canonical translate holds 5 uncolored points and no colored one
    F = CONE.coords(P)
    M = orthant_members(F, canonical_orthants(F))
    colored = c.colors != COLORLESS
    free = ~(M & colored).any(axis=1)
    assert not (free & ((M & ~colored).sum(axis=1) >= 5)).any()


def test_every_hull_point_is_colored():
    P = on_plane(25, 9)
    dt = d_delaunay(P, CONE)
    c = color(P, CONE, 3, cone_hull(dt))
    assert all(c.colors[h] != COLORLESS for h in cone_hull(dt))


# corridors ------------------------------------------------------------------

def test_single_color_has_no_corridors():
    dt = d_delaunay(on_plane(12, 4), CONE)
    assert corridors(dt, np.zeros(12, int)) == []


def test_two_classes_side_by_side_give_one_corridor():
    P = on_plane(20, 6)
    dt = d_delaunay(P, CONE)
    x = dt.tau[:, 0]
    vcol = (x > np.median(x)).astype(int)
    ch = corridors(dt, vcol)
    assert len(ch) == 1
    kinds = triangle_kinds(dt, vcol)
    assert sorted(ch[0].triangles) == sorted(np.flatnonzero(kinds == 2).tolist())


@pytest.mark.parametrize("seed", range(5))
def test_corridor_count_for_five_classes(seed):
    P = on_plane(40, seed)
    c = color(P, CONE, 8)
    dt = d_delaunay(P[c.colored], CONE)
    vcol = c.colors[c.colored]
    chains = corridors(dt, vcol)
    # an overlapping bite can split a class; each piece then counts as a class
    assert len(chains) <= max(3 * class_components(dt, vcol) - 6, 0) + 3
    if class_components(dt, vcol) == c.k:
        assert len(chains) <= max(3 * c.k - 6, 0) + 3


def _chain_instance():
    P = on_plane(20, 6)
    dt = d_delaunay(P, CONE)
    x = dt.tau[:, 0]
    vcol = (x > np.median(x)).astype(int)
    return dt, vcol, corridors(dt, vcol)[0]


def test_subdivide_empty_corridor_whole():
    dt, vcol, ch = _chain_instance()
    subs = subdivide(dt, vcol, ch, np.zeros(len(dt.triangles), int), 2)
    assert len(subs) == 1 and subs[0].triangles == ch.triangles
    assert len(subs[0].corners) <= 4


def test_subdivide_uniform_load():
    dt, vcol, ch = _chain_instance()
    m = 2
    assert len(ch.triangles) >= 2 * m + 1
    inside = np.zeros(len(dt.triangles), int)
    inside[ch.triangles[:2 * m + 1]] = 1
    subs = subdivide(dt, vcol, ch, inside, m)
    assert len(subs) == 3
    assert all(s.colorless_inside <= m and len(s.corners) <= 4 for s in subs)


def test_subdivide_flags_overfull_triangle():
    dt, vcol, ch = _chain_instance()
    one = Corridor(ch.triangles[:1], False)
    inside = np.zeros(len(dt.triangles), int)
    inside[one.triangles[0]] = 5
    subs = subdivide(dt, vcol, one, inside, 2)
    assert len(subs) == 1 and subs[0].overfull


def test_safeguard_vertices_enter_the_net():
    rng = np.random.default_rng(12)
    Q = rng.random((60, 3))
    r = cone_net(Q, CONE, 15, keep_trace=True)
    tr = r.trace
    dt = tr.dt_colored
    pre = {int(dt.ids[v]) for s in tr.subcorridors for v in s.corners}
    pre |= {int(dt.ids[v]) for t in tr.safeguard_triangles for v in dt.triangles[t]}
    for t in range(len(dt.triangles)):
        if tr.inside[t] > r.stats["m6"]:
            assert t in tr.safeguard_triangles
    assert len(r.net) <= 3 * len(pre)


# cone_net -------------------------------------------------------------------

def test_below_threshold_gives_empty_net():
    assert cone_net(np.random.default_rng(0).random((4, 3)), CONE, 5).net == []


def test_unit_threshold_hits_every_nonempty_translate():
    Q = np.random.default_rng(1).random((20, 3))
    r = cone_net(Q, CONE, 1)
    assert verify_net(Q, CONE, None, r.net, threshold=1).ok


@pytest.mark.parametrize("seed", range(3))
def test_sixty_points_quarter(seed):
    Q = np.random.default_rng(seed).random((60, 3))
    r = cone_net(Q, CONE, 15)
    assert verify_net(Q, CONE, None, r.net, threshold=15).ok
    assert len(r.net) <= r.bound
    assert r.stats["k"] <= 60 / r.stats["m6"] + 1


def test_skewed_cone_net():
    from conftest import skew_cone
    C = skew_cone()
    Q = np.random.default_rng(3).normal(size=(50, 3))
    r = cone_net(Q, C, 12)
    assert verify_net(Q, C, None, r.net, threshold=12).ok


def test_lattice_verifier_finds_a_miss():
    F = CONE.coords(np.random.default_rng(4).random((10, 3)))
    assert len(lattice_violators(F, 3, [])) > 0
    assert len(lattice_violators(F, 1, range(10))) == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(6, 30))
def test_cone_net_always_verifies(seed, m):
    Q = np.random.default_rng(seed).random((40, 3))
    r = cone_net(Q, CONE, m)
    assert verify_net(Q, CONE, None, r.net, threshold=m).ok


# crossing_count -------------------------------------------------------------

def _objects(seed, n=12):
    """Canonical objects: one tight apex per distinct nonempty subset."""
    F = on_plane(n, seed)
    M = orthant_members(F, canonical_orthants(F))
    M = np.unique(M[M.any(axis=1)], axis=0)
    B = np.array([F[m].max(axis=0) for m in M])
    return F, B, M


def test_nested_objects_do_not_cross():
    F, B, M = _objects(0)
    for i, j in itertools.product(range(0, len(B), 7), repeat=2):
        if (M[i] <= M[j]).all():
            assert crossing_count(F, B[i], B[j], CONE) == 0


def test_far_apart_objects_do_not_cross():
    F = on_plane(12, 1)
    a, b = np.argmin(F[:, 0]), np.argmin(F[:, 1])
    assert crossing_count(F, F[a], F[b], CONE) == 0


def test_overlapping_objects_cross_twice():
    F, B, M = _objects(2)
    found = 0
    for i, j in itertools.combinations(range(0, len(B), 5), 2):
        both = (M[i] & M[j]).any()
        if both and (M[i] & ~M[j]).any() and (M[j] & ~M[i]).any():
            assert crossing_count(F, B[i], B[j], CONE) == 2
            found += 1
    assert found > 5
