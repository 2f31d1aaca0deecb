import networkx as nx
import numpy as np
import pytest

from cxc.gen import generate_periodic
from cxc.metric import bfs
from cxc.periodic import (GrowthCapExceeded, InvalidPeriodicData, build_periodic, certified_distance,
                          certified_interval, materialize_window, periodic_walls, window_for,
                          window_halfspaces)

LINE, _ = generate_periodic("periodic-line")
LADDER, _ = generate_periodic("periodic-ladder")
PENDANT = build_periodic(["a", "b"], [((0, 0), (0, 1)), ((0, 0), (1, 0))])
A, B = 0, 1


def window_graph(p, radius):
    """Independent window builder: shift every cube orbit, keep edges inside the band."""
    g = nx.Graph()
    g.add_nodes_from((o, z) for o in range(p.orbit_count) for z in range(-radius, radius + 1))
    for c in p.cube_orbits:
        for s in range(-radius - 1, radius + 1):
            pts = [(o, z + s) for o, z in c]
            if all(abs(z) <= radius for _, z in pts):
                for i, u in enumerate(pts):
                    for j, v in enumerate(pts):
                        if bin(i ^ j).count("1") == 1:
                            g.add_edge(u, v)
    return g


def oracle_distance(p, u, v, radius=40):
    return nx.shortest_path_length(window_graph(p, radius), u, v)


def test_window_shapes():
    assert materialize_window(LINE, 2).complex.f_vector() == [5, 4]
    assert materialize_window(LADDER, 1).complex.f_vector() == [6, 7, 2]
    assert materialize_window(PENDANT, 0).complex.f_vector() == [2, 1]


def test_window_is_full_in_the_next():
    for r in range(4):
        small = materialize_window(LADDER, r)
        big = materialize_window(LADDER, r + 1)
        lift = {tuple(sorted(big.id_of(small.vertex_of(v)) for v in c)) for c in small.complex.cubes}
        inside = {tuple(sorted(c)) for c in big.complex.cubes
                  if all(abs(big.vertex_of(v)[1]) <= r for v in c)}
        assert lift == inside


@pytest.mark.parametrize("p,u,v,d", [
    (LINE, (A, 0), (A, 5), 5),
    (PENDANT, (B, 0), (B, 1), 3),
    (LADDER, (A, 0), (B, 3), 4),
])
def test_certified_distance_examples(p, u, v, d):
    cert = certified_distance(p, u, v)
    assert cert.value == d == oracle_distance(p, u, v)
    assert cert.holds


def test_shift_invariance():
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = (int(rng.integers(2)), int(rng.integers(-4, 5)))
        v = (int(rng.integers(2)), int(rng.integers(-4, 5)))
        s = int(rng.integers(-3, 4))
        d = certified_distance(LADDER, u, v).value
        assert certified_distance(LADDER, (u[0], u[1] + s), (v[0], v[1] + s)).value == d


def test_stabilization():
    cert = certified_distance(PENDANT, (B, -2), (B, 3))
    for extra in (1, 5):
        w = materialize_window(PENDANT, cert.radius + extra)
        assert bfs(w.complex, w.id_of((B, -2)))[w.id_of((B, 3))] == cert.value


def test_certified_intervals():
    iv, _ = certified_interval(LADDER, (A, 2), (A, 2))
    assert iv.members == {(A, 2)}
    iv, _ = certified_interval(LADDER, (A, 0), (B, 1))
    assert iv.members == {(A, 0), (A, 1), (B, 0), (B, 1)}
    iv, _ = certified_interval(PENDANT, (B, 0), (B, 1))
    assert iv.members == {(B, 0), (A, 0), (A, 1), (B, 1)}


def test_line_walls():
    cat = periodic_walls(LINE)
    assert [w.kind for w in cat.walls] == ["FINITE"]
    assert all(len(w.edges) == 1 for w in cat.walls)


def test_ladder_walls():
    cat = periodic_walls(LADDER)
    kinds = sorted((w.kind, w.period) for w in cat.walls)
    assert kinds == [("FINITE", None), ("SHIFT-PERIODIC", 1)]
    rails = next(w for w in cat.walls if w.kind == "FINITE")
    (e1, e2) = sorted(rails.edges)
    assert {e1[0][0], e2[0][0]} == {A, B} and e1[0][1] == e2[0][1]
    assert not cat.unresolved


def test_pendant_walls():
    cat = periodic_walls(PENDANT)
    assert len(cat.walls) == 2 and all(w.kind == "FINITE" and len(w.edges) == 1 for w in cat.walls)


def test_finite_wall_halfspaces_are_stable():
    cat = periodic_walls(LADDER)
    w = next(w for w in cat.walls if w.kind == "FINITE")
    r = 4
    h1 = window_halfspaces(LADDER, w, r)
    h2 = window_halfspaces(LADDER, w, r + 2)
    assert h1.side_a <= h2.side_a and h1.side_b <= h2.side_b


def test_invalid_data():
    with pytest.raises(InvalidPeriodicData):
        build_periodic(["a"], [((0, 0), (0, 2))])
    with pytest.raises(InvalidPeriodicData):
        build_periodic(["a"], [((0, 0), (1, 0))])
    with pytest.raises(InvalidPeriodicData):
        build_periodic(["a", "a"], [])
    with pytest.raises(InvalidPeriodicData):
        build_periodic(["a"], [((0, 0), (0, 1)), ((0, 1), (0, 0))])


def test_growth_cap(monkeypatch):
    monkeypatch.setenv("CXC_GROWTH_CAP", "10")
    with pytest.raises(GrowthCapExceeded):
        certified_distance(LINE, (A, 0), (A, 30))
    with pytest.raises(GrowthCapExceeded):
        window_for(LADDER, 10, cap=5)
