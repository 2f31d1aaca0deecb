"""Deterministic generators for test complexes and non-examples."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .complex import CubeComplex, build_complex, canonical
from .isometry import ShiftAutomorphism
from .periodic import PeriodicComplex, build_periodic

MAX_VERTICES = 64
MAX_ORBITS = 8

FINITE_FAMILIES = ("tree", "expansion", "grid-subcomplex", "product")
PERIODIC_FAMILIES = ("periodic-line", "periodic-ladder", "periodic-pendant", "periodic-glide")
NONEXAMPLES = ("non-flag-link", "self-intersecting-wall", "non-simply-connected")


@dataclass(frozen=True)
class GenSpec:
    family: str
    seed: int = 0
    params: tuple = field(default_factory=tuple)  # sorted (key, value) pairs

    @classmethod
    def of(cls, family: str, seed: int = 0, **params) -> GenSpec:
        return cls(family, seed, tuple(sorted(params.items())))

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


def _distances(adj: list[set]) -> np.ndarray:
    n = len(adj)
    out = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        out[s, s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if out[s, v] < 0:
                    out[s, v] = out[s, u] + 1
                    q.append(v)
    return out


def _expand(adj: list[set], part: list[int]) -> None:
    """Attach a copy of the vertex set ``part`` by a perfect matching."""
    base = len(adj)
    copy = {c: base + i for i, c in enumerate(part)}
    for c in part:
        adj.append(set())
    for c in part:
        adj[c].add(copy[c])
        adj[copy[c]].add(c)
        for d in adj[c]:
            if d in copy:
                adj[copy[c]].add(copy[d])
                adj[copy[d]].add(copy[c])


def median_graph(seed: int, steps: int, max_vertices: int = MAX_VERTICES) -> list[set]:
    """Adjacency of a median graph grown by convex expansions.

    Each step picks an interval ``I(u, v)`` (convex in a median graph) and
    expands along the cover ``(G, I(u, v))``.  Steps that would pass
    ``max_vertices`` fall back to a single vertex or are skipped.
    """
    rng = np.random.default_rng(seed)
    adj: list[set] = [set()]
    for _ in range(steps):
        n = len(adj)
        d = _distances(adj)
        u, v = (int(t) for t in rng.integers(n, size=2))
        part = [z for z in range(n) if d[u, z] + d[z, v] == d[u, v]]
        if n + len(part) > max_vertices:
            part = [u]
        if n + len(part) > max_vertices:
            break
        _expand(adj, part)
    return adj


def hypercubes(adj: list[set]) -> list[tuple]:
    """Every hypercube subgraph, as canonical corner sequences (dim >= 1)."""
    edges = {canonical((u, v)) for u in range(len(adj)) for v in adj[u] if u < v}
    found = set(edges)
    layer = set(edges)
    while layer:
        nxt = set()
        for q in layer:
            inside = set(q)
            for w in adj[q[0]]:
                if w in inside:
                    continue
                other = [w]
                for m in range(1, len(q)):
                    low = m & -m
                    prev_q, prev_o = q[m ^ low], other[m ^ low]
                    cands = (adj[q[m]] & adj[prev_o]) - {prev_q}
                    if len(cands) != 1:
                        break
                    other.append(cands.pop())
                if len(other) != len(q) or inside & set(other) or len(set(other)) != len(other):
                    continue
                ok = all(other[m ^ (1 << b)] in adj[other[m]]
                         for m in range(len(q)) for b in range(len(q).bit_length() - 1))
                if ok:
                    nxt.add(canonical(q + tuple(other)))
        nxt -= found
        found |= nxt
        layer = nxt
    return sorted(found, key=lambda c: (len(c), c))


def fill_cubes(adj: list[set]) -> CubeComplex:
    return build_complex([(v,) for v in range(len(adj))] + hypercubes(adj), len(adj))


def generate_median(seed: int, steps: int) -> CubeComplex:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    return fill_cubes(median_graph(seed, steps))


def tree(seed: int, n: int) -> CubeComplex:
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(i)), i) for i in range(1, n)]
    return build_complex([(0,)] + edges, n)


def path(n: int) -> CubeComplex:
    return build_complex([(0,)] + [(i, i + 1) for i in range(n - 1)], n)


def grid(rows: int, cols: int) -> CubeComplex:
    """Grid of ``rows x cols`` unit squares."""
    w = cols + 1
    return build_complex([(r * w + c, r * w + c + 1, (r + 1) * w + c, (r + 1) * w + c + 1)
                          for r in range(rows) for c in range(cols)])


def grid_subcomplex(seed: int, rows: int = 4, cols: int = 4) -> CubeComplex:
    """Staircase (Young diagram) of unit squares, renumbered compactly."""
    rng = np.random.default_rng(seed)
    lengths = sorted((int(t) for t in rng.integers(1, cols + 1, size=rows)), reverse=True)
    w = cols + 1
    cells = [(r * w + c, r * w + c + 1, (r + 1) * w + c, (r + 1) * w + c + 1)
             for r, k in enumerate(lengths) for c in range(k)]
    used = sorted({v for c in cells for v in c})
    new = {v: i for i, v in enumerate(used)}
    return build_complex([tuple(new[v] for v in c) for c in cells])


def product(a: CubeComplex, b: CubeComplex) -> CubeComplex:
    """Cartesian product; vertex (i, j) gets id ``i * b.vertex_count + j``."""
    nb = b.vertex_count
    cubes = []
    for ca in a.cubes:
        da = len(ca).bit_length() - 1
        for cb in b.cubes:
            cubes.append(tuple(ca[m & ((1 << da) - 1)] * nb + cb[m >> da]
                               for m in range(len(ca) * len(cb))))
    return build_complex(cubes, a.vertex_count * nb)


def generate_nonexample(kind: str) -> CubeComplex:
    if kind == "non-flag-link":
        # boundary of the 3-cube: six squares, no 3-cell
        return build_complex([(0, 1, 2, 3), (4, 5, 6, 7), (0, 1, 4, 5),
                              (2, 3, 6, 7), (0, 2, 4, 6), (1, 3, 5, 7)])
    if kind == "non-simply-connected":
        return build_complex([(i, (i + 1) % 6) for i in range(6)])
    if kind == "self-intersecting-wall":
        return flipped_strip(closed=True)
    raise ValueError(f"unknown non-example {kind!r}")


def flipped_strip(closed: bool = True) -> CubeComplex:
    """A strip of three squares from edge 0-1 back to edge 0-2.

    With ``closed`` the square (0, 1, 2, 3) is added, so one wall crosses it
    in both directions; without it the wall only touches itself at vertex 0.
    """
    strip = [(0, 1, 4, 5), (4, 5, 6, 7), (6, 7, 2, 0)]
    if closed:
        strip.append((0, 1, 2, 3))
    return build_complex(strip)


def generate(spec: GenSpec) -> CubeComplex:
    fam, s = spec.family, spec.seed
    if fam == "tree":
        return tree(s, spec.param("n", 12))
    if fam == "expansion":
        return generate_median(s, spec.param("steps", 8))
    if fam == "grid-subcomplex":
        return grid_subcomplex(s, spec.param("rows", 4), spec.param("cols", 4))
    if fam == "product":
        rng = np.random.default_rng(s)
        a = generate_median(int(rng.integers(1 << 30)), int(rng.integers(1, 5)))
        b = generate_median(int(rng.integers(1 << 30)), int(rng.integers(1, 5)))
        while a.vertex_count * b.vertex_count > MAX_VERTICES:
            b = path(max(1, MAX_VERTICES // a.vertex_count))
        return product(a, b)
    if fam == "flipped-strip":
        return flipped_strip(spec.param("closed", True))
    if fam in NONEXAMPLES:
        return generate_nonexample(fam)
    raise ValueError(f"unknown family {fam!r}")


def finite_corpus(size: int = 240, seed: int = 0) -> list[tuple[GenSpec, CubeComplex]]:
    """Certified CAT(0) complexes, mixed over the finite families."""
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(size):
        fam = FINITE_FAMILIES[i % len(FINITE_FAMILIES)]
        s = int(rng.integers(1 << 31))
        if fam == "tree":
            specs.append(GenSpec.of(fam, s, n=int(rng.integers(1, 40))))
        elif fam == "expansion":
            specs.append(GenSpec.of(fam, s, steps=int(rng.integers(0, 14))))
        elif fam == "grid-subcomplex":
            specs.append(GenSpec.of(fam, s, rows=int(rng.integers(1, 6)), cols=int(rng.integers(1, 6))))
        else:
            specs.append(GenSpec.of(fam, s))
    return [(sp, generate(sp)) for sp in specs]


# ---------------------------------------------------------------- periodic


def generate_periodic(family: str, seed: int = 0, **params) -> tuple[PeriodicComplex, ShiftAutomorphism]:
    """A periodic complex together with its canonical shift-type automorphism."""
    if family == "periodic-line":
        p = build_periodic(["a"], [((0, 0), (0, 1))])
        return p, ShiftAutomorphism((0,), 1)
    if family in ("periodic-ladder", "periodic-glide"):
        p = build_periodic(["a", "b"], [((0, 0), (0, 1), (1, 0), (1, 1))])
        if family == "periodic-glide":
            return p, ShiftAutomorphism((1, 0), 1)
        return p, ShiftAutomorphism((0, 1), 1)
    if family == "periodic-pendant":
        rng = np.random.default_rng(seed)
        size = int(rng.integers(1, params.get("tree_size", 3) + 1))
        if size + 1 > MAX_ORBITS:
            raise ValueError("too many orbits")
        names = ["a"] + [chr(ord("b") + i) for i in range(size)]
        cubes = [((0, 0), (0, 1))]
        for i in range(1, size + 1):
            parent = int(rng.integers(i))
            cubes.append(((parent, 0), (i, 0)))
        p = build_periodic(names, cubes)
        return p, ShiftAutomorphism(tuple(range(len(names))), 1)
    raise ValueError(f"unknown periodic family {family!r}")


def periodic_corpus(pendants: int = 20, seed: int = 0) -> list[tuple[str, PeriodicComplex, ShiftAutomorphism]]:
    """The hyperbolic testbeds: line, ladder, decorated lines, squared glide."""
    out = [("periodic-line", *generate_periodic("periodic-line")),
           ("periodic-ladder", *generate_periodic("periodic-ladder"))]
    rng = np.random.default_rng(seed)
    for _ in range(pendants):
        s = int(rng.integers(1 << 31))
        out.append((f"periodic-pendant:{s}", *generate_periodic("periodic-pendant", s)))
    p, g = generate_periodic("periodic-glide")
    out.append(("periodic-glide^2", p, g.power(2)))
    return out
