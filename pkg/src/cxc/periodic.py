"""Z-periodic cubical complexes, evaluated exactly on finite windows.

Vertices are pairs ``(orbit, z)``.  Each cube orbit is listed once with all
z-offsets in ``{0, 1}``; the complex is the union of its shifts by the
generator ``T: (o, z) -> (o, z + 1)``.  Because an edge changes ``z`` by at
most one, a path of length ``d`` from ``u`` never leaves the band
``|z| <= |z_u| + d``, which is what makes windowed answers exact.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .complex import ComplexError, CubeComplex, all_faces, build_complex, canonical, cube_dim
from .metric import Interval, bfs
from .walls import HalfspacePair, NotTwoSided, _components, parallel_pairs

Vertex = tuple  # (orbit index, z)


class InvalidPeriodicData(ValueError):
    def __init__(self, message: str, orbit_cubes: Sequence = ()):
        super().__init__(message)
        self.orbit_cubes = tuple(orbit_cubes)


class GrowthCapExceeded(RuntimeError):
    def __init__(self, cap: int, radius: int):
        super().__init__(f"window radius {radius} would exceed the growth cap of {cap} vertices")
        self.cap = cap
        self.radius = radius


class Unresolved(RuntimeError):
    def __init__(self, edge, radius: int):
        super().__init__(f"wall through {edge} did not stabilize by radius {radius}")
        self.edge = edge
        self.radius = radius


def default_growth_cap() -> int:
    return int(os.environ.get("CXC_GROWTH_CAP", 10**5))


def shift_cube(c: Sequence[Vertex], s: int) -> tuple:
    return tuple((o, z + s) for o, z in c)


def normalize(c: Sequence[Vertex]) -> tuple[tuple, int]:
    """Shift a cube so its lowest z is 0; return (orbit representative, shift)."""
    low = min(z for _, z in c)
    return canonical(shift_cube(c, -low)), low


@dataclass(frozen=True)
class PeriodicComplex:
    orbits: tuple[str, ...]
    cube_orbits: tuple[tuple[Vertex, ...], ...]  # face-closed, normalized, canonical

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    @cached_property
    def z_extent(self) -> int:
        return max((max(z for _, z in c) for c in self.cube_orbits if len(c) >= 4), default=0)

    @cached_property
    def edge_orbits(self) -> tuple[tuple[Vertex, Vertex], ...]:
        return tuple(c for c in self.cube_orbits if len(c) == 2)

    @cached_property
    def square_orbits(self) -> tuple[tuple, ...]:
        return tuple(c for c in self.cube_orbits if len(c) == 4)

    def orbit_index(self, name: str) -> int:
        return self.orbits.index(name)

    def vertex_name(self, v: Vertex) -> str:
        return f"{self.orbits[v[0]]}@{v[1]}"

    def shift(self, v: Vertex, s: int = 1) -> Vertex:
        return (v[0], v[1] + s)


def build_periodic(orbits: Sequence[str], cube_orbits: Iterable[Sequence[Vertex]]) -> PeriodicComplex:
    """Validate the fundamental data and close it under faces."""
    orbits = tuple(orbits)
    if len(set(orbits)) != len(orbits):
        raise InvalidPeriodicData("orbit names must be distinct")
    n = len(orbits)
    seen = {}
    for c in cube_orbits:
        c = tuple((int(o), int(z)) for o, z in c)
        try:
            cube_dim(c)
        except ComplexError as exc:
            raise InvalidPeriodicData(str(exc), [c]) from exc
        if any(not 0 <= o < n for o, _ in c):
            raise InvalidPeriodicData(f"cube {c} uses an unknown orbit", [c])
        if any(z not in (0, 1) for _, z in c):
            raise InvalidPeriodicData(f"cube {c} has an offset outside {{0, 1}}", [c])
        if len(set(c)) != len(c):
            raise InvalidPeriodicData(f"cube {c} repeats a corner", [c])
        rep, _ = normalize(c)
        if rep in seen:
            raise InvalidPeriodicData(f"cube {c} duplicates {seen[rep]} up to shift", [seen[rep], c])
        seen[rep] = c
    closed = set()
    for rep in seen:
        for f in all_faces(rep):
            closed.add(normalize(f)[0])
    closed |= {((o, 0),) for o in range(n)}
    p = PeriodicComplex(orbits, tuple(sorted(closed, key=lambda c: (len(c), c))))
    # validity is local: any two cubes that meet fit in three consecutive levels
    try:
        _materialize(p, 2, check=True)
    except ComplexError as exc:
        culprits = sorted({seen.get(normalize(_unwindow(c, n, 2))[0], normalize(_unwindow(c, n, 2))[0])
                           for c in exc.cubes})
        raise InvalidPeriodicData(f"fundamental data does not glue: {exc}", culprits) from exc
    return p


def _unwindow(c, n, radius):
    return tuple((v % n, v // n - radius) for v in c)


@dataclass(frozen=True)
class WindowComplex:
    radius: int
    complex: CubeComplex
    orbit_count: int

    def id_of(self, v: Vertex) -> int:
        o, z = v
        if abs(z) > self.radius:
            raise KeyError(f"{v} lies outside the window of radius {self.radius}")
        return (z + self.radius) * self.orbit_count + o

    def vertex_of(self, i: int) -> Vertex:
        return (i % self.orbit_count, i // self.orbit_count - self.radius)

    def __contains__(self, v: Vertex) -> bool:
        return abs(v[1]) <= self.radius


def _materialize(p: PeriodicComplex, radius: int, check: bool = False) -> WindowComplex:
    n = p.orbit_count
    cubes = []
    for rep in p.cube_orbits:
        top = max(z for _, z in rep)
        for s in range(-radius, radius - top + 1):
            cubes.append(tuple((z + s + radius) * n + o for o, z in rep))
    count = (2 * radius + 1) * n
    x = build_complex(cubes, count) if check else CubeComplex(count, cubes)
    return WindowComplex(radius, x, n)


@lru_cache(maxsize=128)
def materialize_window(p: PeriodicComplex, radius: int) -> WindowComplex:
    """All shifted cubes with every corner in ``|z| <= radius``."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    return _materialize(p, radius)


def window_for(p: PeriodicComplex, radius: int, cap: int | None = None) -> WindowComplex:
    cap = default_growth_cap() if cap is None else cap
    if (2 * radius + 1) * p.orbit_count > cap:
        raise GrowthCapExceeded(cap, radius)
    return materialize_window(p, radius)


@dataclass(frozen=True)
class DistanceCertificate:
    value: int
    radius: int
    u: Vertex
    v: Vertex

    @property
    def holds(self) -> bool:
        return self.radius >= max(abs(self.u[1]), abs(self.v[1])) + self.value


def certified_distance(p: PeriodicComplex, u: Vertex, v: Vertex, cap: int | None = None) -> DistanceCertificate:
    """Exact distance in the infinite complex.

    Grow the window until ``u`` and ``v`` connect, giving an upper bound
    ``U``; then recompute on the window of radius ``max|z| + U``, which holds
    every path of length at most ``U`` from ``u``.
    """
    band = max(abs(u[1]), abs(v[1]))
    radius = band + max(p.orbit_count, 1)
    while True:
        w = window_for(p, radius, cap)
        d = bfs(w.complex, w.id_of(u))[w.id_of(v)]
        if d >= 0:
            break
        radius *= 2
    exact = band + d
    w = window_for(p, exact, cap)
    d = bfs(w.complex, w.id_of(u))[w.id_of(v)]
    cert = DistanceCertificate(d, exact, u, v)
    assert cert.holds
    return cert


def certified_interval(p: PeriodicComplex, u: Vertex, v: Vertex, cap: int | None = None) -> tuple[Interval, DistanceCertificate]:
    cert = certified_distance(p, u, v, cap)
    w = window_for(p, cert.radius, cap)
    du = bfs(w.complex, w.id_of(u))
    dv = bfs(w.complex, w.id_of(v))
    members = frozenset(w.vertex_of(i) for i in w.complex.vertices
                        if du[i] >= 0 and dv[i] >= 0 and du[i] + dv[i] == cert.value)
    return Interval(u, v, members), cert


# ---------------------------------------------------------------- walls


def edge_key(e: tuple[Vertex, Vertex]) -> tuple[tuple, int]:
    """(edge orbit representative, shift) of a concrete edge."""
    return normalize(e)


@dataclass(frozen=True)
class PeriodicWall:
    id: int
    kind: str  # "FINITE" or "SHIFT-PERIODIC"
    edges: frozenset  # FINITE: every edge; periodic: the edges of one period
    period: int | None = None
    classes: frozenset = frozenset()  # periodic: {(edge orbit rep, shift mod period)}

    def contains(self, e: tuple[Vertex, Vertex]) -> bool:
        e = tuple(sorted(e))
        if self.kind == "FINITE":
            return e in self.edges
        rep, s = edge_key(e)
        return (rep, s % self.period) in self.classes

    def shifted(self, s: int) -> PeriodicWall:
        if self.kind == "FINITE":
            return PeriodicWall(self.id, self.kind, frozenset(tuple(sorted(shift_cube(e, s))) for e in self.edges))
        return PeriodicWall(self.id, self.kind, frozenset(tuple(sorted(shift_cube(e, s))) for e in self.edges),
                            self.period, frozenset((r, (k + s) % self.period) for r, k in self.classes))


@dataclass
class WallCatalogue:
    walls: list[PeriodicWall]
    # T-action: wall id -> smallest q >= 1 with T^q(W) = W, None if none
    t_period: dict[int, int | None]
    unresolved: list[tuple] = field(default_factory=list)
    radius: int = 0

    def wall_through(self, e) -> tuple[PeriodicWall, int] | None:
        """The catalogued wall W and shift s with e in T^s(W)."""
        rep, se = edge_key(tuple(sorted(e)))
        for w in self.walls:
            if w.kind == "FINITE":
                # an edge orbit meets a finite wall at most once
                for f in w.edges:
                    r, sf = edge_key(f)
                    if r == rep:
                        return w, se - sf
            else:
                for r, k in w.classes:
                    if r == rep:
                        return w, (se - k) % w.period
        return None


def _window_components(p: PeriodicComplex, radius: int):
    w = materialize_window(p, radius)
    x = w.complex
    ds = DisjointSet(range(len(x.edges)))
    idx = x.edge_index
    for sq in x.squares:
        for a, b in parallel_pairs(sq):
            ds.merge(idx[a], idx[b])
    return w, ds


def periodic_walls(p: PeriodicComplex, r_max: int = 32, r_start: int | None = None) -> WallCatalogue:
    """Catalogue wall orbits by union-find on growing windows.

    A component is FINITE when all its edges stay ``z_extent`` away from the
    window boundary (then every square touching it lies inside the window,
    so the component is the whole wall).  It is SHIFT-PERIODIC when it holds
    an edge together with a translate of it; the period and the edge classes
    must agree on two successive windows.
    """
    ext = max(p.z_extent, 1)
    radius = r_start if r_start is not None else max(3, 2 * ext + 1)
    todo = list(p.edge_orbits)
    walls: list[PeriodicWall] = []
    pending_periodic: dict = {}
    unresolved = []
    while todo:
        if radius > r_max:
            unresolved.extend(todo)
            break
        w, ds = _window_components(p, radius)
        x = w.complex
        retry = []
        for rep in todo:
            if any(_covers(wall, rep) for wall in walls):
                continue
            e = tuple(sorted(w.id_of(v) for v in rep))
            comp = ds.subset(x.edge_index[e])
            edges = [tuple(sorted(w.vertex_of(v) for v in x.edges[i])) for i in comp]
            keys = [edge_key(f) for f in edges]
            shifts = sorted({s for r, s in keys if r == rep and s > 0})
            if shifts:
                q = shifts[0]
                found = (q, frozenset((r, s % q) for r, s in keys))
                if pending_periodic.get(rep) == found:
                    one = frozenset(f for f, (_, s) in zip(edges, keys) if 0 <= s < q)
                    walls.append(PeriodicWall(len(walls), "SHIFT-PERIODIC", one, q, found[1]))
                else:
                    pending_periodic[rep] = found
                    retry.append(rep)
            elif max(abs(z) for f in edges for _, z in f) <= radius - ext:
                walls.append(PeriodicWall(len(walls), "FINITE", frozenset(edges)))
            else:
                retry.append(rep)
        todo = retry
        if todo:
            radius *= 2
    t_period = {wl.id: wl.period for wl in walls}
    return WallCatalogue(walls, t_period, unresolved, radius)


def _covers(wall: PeriodicWall, rep) -> bool:
    if wall.kind == "FINITE":
        return any(edge_key(e)[0] == rep for e in wall.edges)
    return any(r == rep for r, _ in wall.classes)


def window_halfspaces(p: PeriodicComplex, wall: PeriodicWall, radius: int) -> HalfspacePair:
    """Sides of ``wall`` inside the window of the given radius.

    The window minus the wall's edges must fall into exactly two components.
    """
    w = materialize_window(p, radius)
    x = w.complex
    removed = set()
    for i, e in enumerate(x.edges):
        if wall.contains(tuple(w.vertex_of(v) for v in e)):
            removed.add(i)
    comps = _components(x, frozenset(removed))
    if len(comps) != 2:
        raise NotTwoSided(wall.id, comps)
    a, b = sorted(comps, key=min)
    if any((x.edges[k][0] in a) == (x.edges[k][1] in a) for k in removed):
        raise NotTwoSided(wall.id, comps)
    name = w.vertex_of
    a, b = sorted((frozenset(map(name, a)), frozenset(map(name, b))), key=min)
    return HalfspacePair(wall.id, a, b)
