import pytest

from cxc.complex import build_complex
from cxc.gen import flipped_strip, grid
from cxc.metric import all_pairs
from cxc.walls import (NotTwoSided, compute_walls, distance_by_walls, halfspaces, is_self_intersecting,
                       is_self_parallel, separates, separating_walls)


def naive_walls(x):
    """Fixpoint closure of elementary parallelism, without union-find."""
    label = {e: i for i, e in enumerate(x.edges)}
    changed = True
    while changed:
        changed = False
        for a, b, c, d in x.squares:
            for e, f in (((a, b), (c, d)), ((a, c), (b, d))):
                e, f = tuple(sorted(e)), tuple(sorted(f))
                lo = min(label[e], label[f])
                if label[e] != lo or label[f] != lo:
                    old = {label[e], label[f]}
                    for k in label:
                        if label[k] in old:
                            label[k] = lo
                    changed = True
    classes = {}
    for e, lab in label.items():
        classes.setdefault(lab, set()).add(e)
    return sorted(map(frozenset, classes.values()), key=lambda s: min(s))


def wall_sets(x):
    return sorted((frozenset(w.edge_list(x)) for w in compute_walls(x)), key=lambda s: min(s))


def test_single_edge():
    x = build_complex([(0, 1)])
    (w,) = compute_walls(x)
    assert w.edge_list(x) == [(0, 1)]
    h = halfspaces(x, w)
    assert (h.side_a, h.side_b) == ({0}, {1})
    assert not is_self_parallel(x, w)[0]


def test_square_has_two_walls():
    walls = compute_walls(build_complex([(0, 1, 2, 3)]))
    assert sorted(len(w.edges) for w in walls) == [2, 2]


def test_grid_walls():
    x = grid(2, 2)
    walls = compute_walls(x)
    assert len(walls) == 4 and all(len(w.edges) == 3 for w in walls)
    for w in walls:
        assert not is_self_intersecting(x, w)[0]
        assert not is_self_parallel(x, w)[0]


def test_walls_match_naive_closure(corpus):
    for _, x in corpus[::5]:
        assert wall_sets(x) == naive_walls(x)


def test_partition(corpus):
    for _, x in corpus[::7]:
        ids = sorted(e for w in compute_walls(x) for e in w.edges)
        assert ids == list(range(len(x.edges)))


def test_strip_halfspace_sizes():
    x = grid(1, 2)
    w = next(w for w in compute_walls(x) if set(w.edge_list(x)) == {(0, 1), (3, 4)})
    h = halfspaces(x, w)
    assert sorted((len(h.side_a), len(h.side_b))) == [2, 4]


def test_flipped_strip_self_intersects():
    x = flipped_strip(closed=True)
    hits = [w for w in compute_walls(x) if is_self_intersecting(x, w)[0]]
    assert len(hits) == 1
    ok, sq = is_self_intersecting(x, hits[0])
    assert sq == (0, 1, 2, 3)
    with pytest.raises(NotTwoSided):
        halfspaces(x, hits[0])


def test_open_strip_self_parallel():
    x = flipped_strip(closed=False)
    hits = [(w, is_self_parallel(x, w)) for w in compute_walls(x)]
    bad = [(w, r) for w, r in hits if r[0]]
    assert len(bad) == 1
    w, (_, v) = bad[0]
    assert v == 0
    assert set(w.edge_list(x)) == {(0, 1), (4, 5), (6, 7), (0, 2)}
    assert not any(is_self_intersecting(x, w)[0] for w in compute_walls(x))


def test_separation_examples():
    sq = build_complex([(0, 1, 2, 3)])
    for w in compute_walls(sq):
        h = halfspaces(sq, w)
        assert separates(h, 0, 3) and separates(h, 3, 0)
        assert not separates(h, 1, 1)
        for i in w.edges:
            assert separates(h, *sq.edges[i])
    assert separating_walls(sq, 2, 2) == set()
    assert len(separating_walls(sq, 0, 3)) == 2
    x = grid(2, 2)
    # grid point (row 1, column 2) is vertex 5
    assert distance_by_walls(x, 0, 5) == 3 == all_pairs(x)[0, 5]
    assert distance_by_walls(x, 4, 4) == 0
    assert distance_by_walls(x, 0, 1) == 1


def test_halfspace_invariants(corpus):
    for _, x in corpus[::9]:
        for w in compute_walls(x):
            h = halfspaces(x, w)
            assert h.side_a | h.side_b == set(x.vertices) and not h.side_a & h.side_b
            for i, (u, v) in enumerate(x.edges):
                assert separates(h, u, v) == (i in w.edges)


def test_distance_by_walls_on_corpus(corpus):
    for _, x in corpus[::4]:
        d = all_pairs(x)
        for u in x.vertices:
            for v in x.vertices:
                if d[u, v] >= 0:
                    assert distance_by_walls(x, u, v) == d[u, v]
