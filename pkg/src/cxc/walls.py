"""Walls (parallelism classes of edges), halfspaces and separation."""
from __future__ import annotations

from dataclasses import dataclass
from weakref import WeakKeyDictionary

from scipy.cluster.hierarchy import DisjointSet

from .complex import CubeComplex


class NotTwoSided(ValueError):
    def __init__(self, wall: int, components: list[frozenset]):
        super().__init__(f"wall {wall} does not cut the 1-skeleton into two sides "
                         f"({len(components)} component(s))")
        self.wall = wall
        self.components = components


@dataclass(frozen=True)
class Wall:
    id: int
    edges: frozenset  # edge ids into x.edges

    def edge_list(self, x: CubeComplex) -> list[tuple[int, int]]:
        return [x.edges[i] for i in sorted(self.edges)]


@dataclass(frozen=True)
class HalfspacePair:
    wall: int
    side_a: frozenset
    side_b: frozenset

    def side_of(self, v: int) -> int:
        return 0 if v in self.side_a else 1


def parallel_pairs(square):
    a, b, c, d = square
    # mask order: bit 0 pairs (a,b),(c,d); bit 1 pairs (a,c),(b,d)
    e = lambda u, v: (min(u, v), max(u, v))
    return [(e(a, b), e(c, d)), (e(a, c), e(b, d))]


_walls_cache: WeakKeyDictionary = WeakKeyDictionary()


def compute_walls(x: CubeComplex) -> list[Wall]:
    """Partition the edges into walls, ordered by smallest edge id."""
    if x in _walls_cache:
        return _walls_cache[x]
    ds = DisjointSet(range(len(x.edges)))
    idx = x.edge_index
    for sq in x.squares:
        for e, f in parallel_pairs(sq):
            ds.merge(idx[e], idx[f])
    classes = sorted((sorted(s) for s in ds.subsets()), key=lambda s: s[0])
    walls = [Wall(i, frozenset(s)) for i, s in enumerate(classes)]
    _walls_cache[x] = walls
    return walls


def wall_of_edge(x: CubeComplex) -> list[int]:
    out = [0] * len(x.edges)
    for w in compute_walls(x):
        for e in w.edges:
            out[e] = w.id
    return out


def is_self_intersecting(x: CubeComplex, w: Wall) -> tuple[bool, tuple | None]:
    """True iff some square holds two non-opposite edges of ``w``."""
    idx = x.edge_index
    for sq in x.squares:
        a, b, c, d = sq
        e = lambda u, v: idx[(min(u, v), max(u, v))]
        bit0 = [e(a, b), e(c, d)]
        bit1 = [e(a, c), e(b, d)]
        if any(i in w.edges for i in bit0) and any(i in w.edges for i in bit1):
            return True, sq
    return False, None


def is_self_parallel(x: CubeComplex, w: Wall) -> tuple[bool, int | None]:
    """True iff two distinct edges of ``w`` share a vertex."""
    seen: dict[int, int] = {}
    for i in sorted(w.edges):
        for v in x.edges[i]:
            if v in seen:
                return True, v
            seen[v] = i
    return False, None


def _components(x: CubeComplex, removed: frozenset) -> list[frozenset]:
    seen = [False] * x.vertex_count
    comps = []
    idx = x.edge_index
    for s in x.vertices:
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], [s]
        while stack:
            u = stack.pop()
            for v in x.adjacency[u]:
                if not seen[v] and idx[(min(u, v), max(u, v))] not in removed:
                    seen[v] = True
                    stack.append(v)
                    comp.append(v)
        comps.append(frozenset(comp))
    return comps


def halfspaces(x: CubeComplex, w: Wall) -> HalfspacePair:
    """The two sides of ``w``; ``side_a`` holds the smallest vertex id."""
    cached = _sides_cache.get(x, {})
    if w.id in cached and cached[w.id][0] == w.edges:
        return cached[w.id][1]
    comps = _components(x, w.edges)
    if len(comps) != 2:
        raise NotTwoSided(w.id, comps)
    a, b = sorted(comps, key=min)
    # two components are not enough: every wall edge must cross between them
    if any((x.edges[i][0] in a) == (x.edges[i][1] in a) for i in w.edges):
        raise NotTwoSided(w.id, comps)
    h = HalfspacePair(w.id, a, b)
    _sides_cache.setdefault(x, {})[w.id] = (w.edges, h)
    return h


_sides_cache: WeakKeyDictionary = WeakKeyDictionary()


def separates(h: HalfspacePair, u: int, v: int) -> bool:
    return (u in h.side_a) != (v in h.side_a)


def separating_walls(x: CubeComplex, u: int, v: int) -> set[int]:
    return {w.id for w in compute_walls(x) if separates(halfspaces(x, w), u, v)}


def distance_by_walls(x: CubeComplex, u: int, v: int) -> int:
    return len(separating_walls(x, u, v))
