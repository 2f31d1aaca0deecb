from itertools import combinations

import networkx as nx
import pytest

from cxc.complex import build_complex, standard_cube
from cxc.gen import generate_nonexample, grid
from cxc.link import SimplicialComplex, gromov_check, is_flag, link_of_vertex, maximal_cliques


def flag_oracle(s: SimplicialComplex) -> bool:
    """Every clique of the 1-skeleton, found by networkx, must be a simplex."""
    g = nx.Graph()
    g.add_nodes_from(s.vertex_labels)
    g.add_edges_from(tuple(e) for e in s.edges)
    for clique in nx.find_cliques(g):
        for k in range(3, len(clique) + 1):
            if any(frozenset(c) not in s.simplices for c in combinations(clique, k)):
                return False
    return True


def shape(s: SimplicialComplex):
    sizes = [len(t) for t in s.simplices]
    return [sizes.count(k) for k in range(1, max(sizes) + 1)]


def test_square_corner_link_is_an_edge():
    lk = link_of_vertex(build_complex([(0, 1, 2, 3)]), 0)
    assert shape(lk) == [2, 1]
    assert set(lk.vertex_labels) == {(0, 1), (0, 2)}


def test_grid_center_link_is_a_four_cycle():
    lk = link_of_vertex(grid(2, 2), 4)
    assert shape(lk) == [4, 4]
    g = nx.Graph([tuple(e) for e in lk.edges])
    assert nx.is_isomorphic(g, nx.cycle_graph(4))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cube_corner_link_is_a_full_simplex(n):
    lk = link_of_vertex(build_complex([standard_cube(n)]), 0)
    assert len(lk.simplices) == 2 ** n - 1
    assert lk.is_valid() and lk.is_simplicial()


def test_is_flag_examples():
    hollow = SimplicialComplex.from_facets("abc", ["ab", "bc", "ca"])
    assert is_flag(hollow) == (False, frozenset("abc"))
    assert is_flag(SimplicialComplex.from_facets("abc", ["abc"]))[0]
    assert is_flag(SimplicialComplex.from_facets("abcd", ["ab", "bc", "cd", "da"]))[0]


def test_witness_is_minimal():
    # hollow tetrahedron boundary with one triangle missing: smallest failure is that triangle
    s = SimplicialComplex.from_facets("abcd", ["abc", "abd", "acd", "bc", "bd", "cd"])
    ok, wit = is_flag(s)
    assert not ok
    assert wit == frozenset("bcd")
    for v in wit:
        assert wit - {v} in s.simplices


def test_maximal_cliques_against_networkx():
    s = SimplicialComplex.from_facets(range(6), [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (0, 3)])
    g = nx.Graph([tuple(e) for e in s.edges])
    assert sorted(map(sorted, maximal_cliques(s))) == sorted(map(sorted, nx.find_cliques(g)))


def test_gromov_examples():
    assert gromov_check(grid(2, 2)).ok
    assert len(gromov_check(grid(2, 2)).per_vertex) == 9
    assert gromov_check(build_complex([standard_cube(3)])).ok
    rep = gromov_check(generate_nonexample("non-flag-link"))
    assert not rep.ok and set(rep.failures) == set(range(8))
    assert all(len(w) == 3 for w in rep.failures.values())


def test_three_squares_at_a_corner():
    x = build_complex([(0, 1, 2, 3), (0, 1, 4, 5), (0, 2, 4, 6)])
    rep = gromov_check(x)
    assert rep.failures == {0: frozenset({(0, 1), (0, 2), (0, 4)})}


def test_flag_agrees_with_oracle_on_corpus(corpus):
    for _, x in corpus[::6]:
        for v in x.vertices:
            lk = link_of_vertex(x, v)
            assert lk.is_valid() and lk.is_simplicial()
            assert is_flag(lk)[0] == flag_oracle(lk)
