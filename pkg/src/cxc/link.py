"""Vertex links as abstract simplicial complexes, and the flag condition."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable

from .complex import CubeComplex, cube_dim


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed family of nonempty vertex sets."""

    vertex_labels: tuple
    simplices: frozenset = field(default_factory=frozenset)
    # number of cubes that produced each simplex; >1 means a non-simplicial link
    multiplicity: tuple = ()

    @classmethod
    def from_facets(cls, labels: Iterable[Hashable], facets: Iterable[Iterable[Hashable]]):
        out = set()
        for f in facets:
            f = frozenset(f)
            for k in range(1, len(f) + 1):
                out.update(frozenset(s) for s in combinations(sorted(f, key=repr), k))
        labels = tuple(labels)
        out.update(frozenset([v]) for v in labels)
        return cls(labels, frozenset(out))

    def is_valid(self) -> bool:
        verts = set(self.vertex_labels)
        for s in self.simplices:
            if not s or not s <= verts:
                return False
            for v in s:
                if len(s) > 1 and s - {v} not in self.simplices:
                    return False
        return all(frozenset([v]) in self.simplices for v in verts)

    @property
    def edges(self) -> list[frozenset]:
        return [s for s in self.simplices if len(s) == 2]

    def neighbours(self) -> dict:
        nb = {v: set() for v in self.vertex_labels}
        for s in self.edges:
            a, b = tuple(s)
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def full_subcomplex(self, verts: Iterable[Hashable]) -> SimplicialComplex:
        keep = frozenset(verts)
        return SimplicialComplex(
            tuple(v for v in self.vertex_labels if v in keep),
            frozenset(s for s in self.simplices if s <= keep),
        )

    def is_simplicial(self) -> bool:
        return all(m <= 1 for _, m in self.multiplicity)


def link_of_vertex(x: CubeComplex, v: int) -> SimplicialComplex:
    """Link of ``v``: one vertex per edge at ``v``, one k-simplex per (k+1)-cube.

    Link vertices are labelled by the edge ``(min, max)`` they represent.
    """
    if not 0 <= v < x.vertex_count:
        raise IndexError(f"vertex {v} not in complex")
    labels = []
    simplices = set()
    mult: dict[frozenset, int] = {}
    for c in x.cubes_at[v]:
        n = cube_dim(c)
        if n == 0:
            continue
        m = c.index(v)
        s = frozenset(tuple(sorted((v, c[m ^ (1 << i)]))) for i in range(n))
        if n == 1:
            labels.append(tuple(sorted(c)))
        simplices.add(s)
        mult[s] = mult.get(s, 0) + 1
    labels.sort()
    bad = tuple(sorted(((tuple(sorted(s)), k) for s, k in mult.items()), key=repr))
    return SimplicialComplex(tuple(labels), frozenset(simplices), bad)


def _bron_kerbosch(nb: dict, r: set, p: set, x: set, out: list):
    if not p and not x:
        out.append(frozenset(r))
        return
    pivot = max(p | x, key=lambda u: len(nb[u] & p))
    for v in sorted(p - nb[pivot], key=repr):
        _bron_kerbosch(nb, r | {v}, p & nb[v], x & nb[v], out)
        p = p - {v}
        x = x | {v}


def maximal_cliques(s: SimplicialComplex) -> list[frozenset]:
    nb = s.neighbours()
    out: list[frozenset] = []
    _bron_kerbosch(nb, set(), set(s.vertex_labels), set(), out)
    return out


def is_flag(s: SimplicialComplex) -> tuple[bool, frozenset | None]:
    """Whether every clique of the 1-skeleton spans a simplex.

    On failure the witness is a smallest non-spanning clique, so all of its
    proper subsets are simplices.
    """
    worst = None
    for clique in maximal_cliques(s):
        if clique in s.simplices:
            continue
        for k in range(3, len(clique) + 1):
            hit = next((frozenset(c) for c in combinations(sorted(clique, key=repr), k)
                        if frozenset(c) not in s.simplices), None)
            if hit is not None:
                if worst is None or (len(hit), sorted(hit, key=repr)) < (len(worst), sorted(worst, key=repr)):
                    worst = hit
                break
    return worst is None, worst


@dataclass
class GromovReport:
    per_vertex: dict[int, tuple[bool, frozenset | None]]

    @property
    def ok(self) -> bool:
        return all(flag for flag, _ in self.per_vertex.values())

    @property
    def failures(self) -> dict[int, frozenset]:
        return {v: w for v, (flag, w) in self.per_vertex.items() if not flag}


def gromov_check(x: CubeComplex) -> GromovReport:
    return GromovReport({v: is_flag(link_of_vertex(x, v)) for v in x.vertices})
