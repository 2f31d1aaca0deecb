import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from cxc.complex import (BadArity, BadDimension, BadGluing, CubeComplex, DuplicateCube, SelfGluedCube,
                         build_complex, canonical, cube_dim, faces, full_subcomplex, is_face_set,
                         num_faces, skeleton, standard_cube, validate)
from cxc.gen import grid


def brute_canonical(c):
    """Lex-min over all 2^n * n! symmetries of the n-cube."""
    n = cube_dim(c)
    best = None
    for flip in range(1 << n):
        for perm in itertools.permutations(range(n)):
            img = []
            for m in range(1 << n):
                src = 0
                for i, p in enumerate(perm):
                    if (m >> i) & 1:
                        src |= 1 << p
                img.append(c[src ^ flip])
            t = tuple(img)
            best = t if best is None or t < best else best
    return best


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 3).flatmap(lambda n: st.permutations(range(1 << n))))
def test_canonical_matches_brute_force(corners):
    c = tuple(corners)
    assert canonical(c) == brute_canonical(c)


def test_square_counts():
    x = build_complex([(0, 1, 2, 3)])
    assert x.f_vector() == [4, 4, 1]
    assert x.dim == 2


def test_grid_counts():
    assert grid(2, 2).f_vector() == [9, 12, 4]


@pytest.mark.parametrize("n", range(5))
def test_standard_cube_faces(n):
    x = build_complex([standard_cube(n)])
    # a cube of dimension n has C(n, k) 2^(n-k) faces of dimension k
    assert x.f_vector() == [comb(n, k) * 2 ** (n - k) for k in range(n + 1)]
    assert all(num_faces(n, k) == comb(n, k) * 2 ** (n - k) for k in range(n + 1))


def test_faces_of_square():
    assert faces((0, 1, 2, 3), 1) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert faces((0, 1, 2, 3), 0) == [(0,), (1,), (2,), (3,)]


def test_is_face_set():
    sq = (0, 1, 2, 3)
    assert is_face_set(sq, frozenset((0, 1)))
    assert not is_face_set(sq, frozenset((0, 3)))
    assert is_face_set(sq, frozenset(sq))


def test_bad_arity():
    with pytest.raises(BadArity):
        build_complex([(0, 1, 2)])
    with pytest.raises(BadDimension):
        faces((0, 1, 2, 3), 3)


def test_self_glued():
    with pytest.raises(SelfGluedCube):
        build_complex([(0, 1, 1, 2)])


def test_duplicate():
    with pytest.raises(DuplicateCube):
        build_complex([(0, 1, 2, 3), (3, 2, 1, 0)])


def test_gluing_along_non_face():
    # two squares sharing the diagonal pair {0, 3}
    with pytest.raises(BadGluing):
        build_complex([(0, 1, 2, 3), (0, 3, 4, 5)])


def test_multi_edge_rejected():
    # two squares on the same four vertices with different edge sets
    with pytest.raises(BadGluing):
        build_complex([(0, 1, 2, 3), (0, 1, 3, 2)])


def test_validate_reports_rules():
    raw = CubeComplex(4, [(0,), (1,), (2,), (3,), (0, 1, 2, 3)])
    rep = validate(raw)
    assert not rep.ok and rep.rules() == {"face-closure"}
    assert validate(build_complex([(0, 1, 2, 3)])).ok


def test_validate_corpus(corpus):
    for _, x in corpus[:40]:
        assert validate(x).ok


def test_degenerate_complexes():
    assert build_complex([]).f_vector() == []
    assert build_complex([(0,)]).f_vector() == [1]
    assert validate(build_complex([])).ok


def test_skeleton_and_full_subcomplex():
    x = grid(2, 2)
    assert skeleton(x, 1).f_vector() == [9, 12]
    sub, keep = full_subcomplex(x, [0, 1, 3, 4, 8])
    assert keep == [0, 1, 3, 4, 8]
    assert sub.f_vector() == [5, 4, 1]


def test_equality_ignores_input_order():
    a = build_complex([(0, 1, 2, 3), (1, 4, 3, 5)])
    b = build_complex([(5, 4, 3, 1), (3, 2, 1, 0)])
    assert a == b and hash(a) == hash(b)
