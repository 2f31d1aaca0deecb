"""Finite cubical complexes given by explicit corner sequences.

A cube of dimension ``n`` is a tuple of ``2**n`` vertex ids indexed by n-bit
masks: bit ``i`` of the mask flips coordinate ``i``.  Every stored cube is in
canonical form, the lexicographically smallest corner sequence among the
``2**n * n!`` relabelings induced by hypercube symmetries.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, NamedTuple, Sequence

Cube = tuple  # tuple[int, ...] of length 2**dim


class ComplexError(ValueError):
    """Raised by :func:`build_complex` when the input cannot be glued."""

    def __init__(self, message: str, cubes: Sequence[Cube] = ()):
        super().__init__(message)
        self.cubes = tuple(cubes)


class BadArity(ComplexError):
    pass


class SelfGluedCube(ComplexError):
    pass


class DuplicateCube(ComplexError):
    pass


class BadGluing(ComplexError):
    pass


class BadDimension(ValueError):
    pass


def cube_dim(c: Sequence[int]) -> int:
    n = len(c)
    if n == 0 or n & (n - 1):
        raise BadArity(f"cube has {n} corners, not a power of two", [tuple(c)])
    return n.bit_length() - 1


def canonical(c: Sequence) -> Cube:
    """Canonical corner sequence of a cube.

    The minimal corner goes to mask 0; then the neighbours of that corner are
    assigned to the axis masks in increasing order.  Positions ``2**k`` are the
    only free choices and each is compared before any corner that depends on
    a later axis, so this greedy choice is the lexicographic minimum.
    """
    c = tuple(c)
    n = cube_dim(c)
    if n == 0:
        return c
    flip = min(range(len(c)), key=c.__getitem__)
    axes = sorted(range(n), key=lambda i: c[flip ^ (1 << i)])
    out = []
    for m in range(len(c)):
        src = flip
        for j, ax in enumerate(axes):
            if m >> j & 1:
                src ^= 1 << ax
        out.append(c[src])
    return tuple(out)


def face_masks(n: int, k: int):
    """Yield ``(free_axes, base_mask)`` for every k-face of an n-cube."""
    for free in combinations(range(n), k):
        fixed = [i for i in range(n) if i not in free]
        for bits in range(1 << len(fixed)):
            base = 0
            for j, ax in enumerate(fixed):
                if bits >> j & 1:
                    base |= 1 << ax
            yield free, base


def faces(c: Sequence[int], k: int) -> list[Cube]:
    """All k-faces of ``c`` in canonical form."""
    n = cube_dim(c)
    if not 0 <= k <= n:
        raise BadDimension(f"k={k} out of range for a {n}-cube")
    out = []
    for free, base in face_masks(n, k):
        corners = []
        for m in range(1 << k):
            mask = base
            for j, ax in enumerate(free):
                if m >> j & 1:
                    mask |= 1 << ax
            corners.append(c[mask])
        out.append(canonical(corners))
    return sorted(set(out))


@lru_cache(maxsize=1 << 16)
def all_faces(c: Cube) -> frozenset[Cube]:
    n = cube_dim(c)
    out: set[Cube] = set()
    for k in range(n + 1):
        out.update(faces(c, k))
    return frozenset(out)


def is_face_set(c: Cube, s: frozenset) -> bool:
    """True iff the vertex set ``s`` is the corner set of a face of ``c``."""
    masks = [m for m, v in enumerate(c) if v in s]
    if len(masks) != len(s) or not masks:
        return False
    lo = hi = masks[0]
    for m in masks[1:]:
        lo &= m
        hi |= m
    return len(masks) == 1 << bin(lo ^ hi).count("1")


class Violation(NamedTuple):
    rule: str
    cubes: tuple
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


class CubeComplex:
    """A finite cubical complex on vertices ``0 .. vertex_count - 1``.

    The constructor stores what it is given (after canonicalizing each cube)
    and does not validate; use :func:`build_complex` for checked input.  A
    complex is treated as immutable once built.
    """

    def __init__(self, vertex_count: int, cubes: Iterable[Sequence[int]]):
        self.vertex_count = int(vertex_count)
        self.cubes: tuple[Cube, ...] = tuple(
            sorted({canonical(c) for c in cubes}, key=lambda c: (len(c), c))
        )

    def __repr__(self):
        counts = [len(self.cubes_of_dim(k)) for k in range(self.dim + 1)]
        return f"CubeComplex(vertex_count={self.vertex_count}, f_vector={counts})"

    def __eq__(self, other):
        if not isinstance(other, CubeComplex):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.cubes == other.cubes

    def __hash__(self):
        return hash((self.vertex_count, self.cubes))

    @cached_property
    def _by_dim(self) -> dict[int, tuple[Cube, ...]]:
        out = defaultdict(list)
        for c in self.cubes:
            out[len(c).bit_length() - 1].append(c)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    def cubes_of_dim(self, k: int) -> tuple[Cube, ...]:
        return self._by_dim.get(k, ())

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    @property
    def edges(self) -> tuple[Cube, ...]:
        return self.cubes_of_dim(1)

    @property
    def squares(self) -> tuple[Cube, ...]:
        return self.cubes_of_dim(2)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour lists; sorting fixes BFS tie-breaking."""
        nbrs = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            if u != v:
                nbrs[u].add(v)
                nbrs[v].add(u)
        return tuple(tuple(sorted(s)) for s in nbrs)

    @cached_property
    def by_vertex_set(self) -> dict[frozenset, Cube]:
        return {frozenset(c): c for c in self.cubes}

    @cached_property
    def cubes_at(self) -> tuple[tuple[Cube, ...], ...]:
        out = [[] for _ in range(self.vertex_count)]
        for c in self.cubes:
            for v in set(c):
                if 0 <= v < self.vertex_count:
                    out[v].append(c)
        return tuple(tuple(x) for x in out)

    @cached_property
    def maximal_cubes(self) -> tuple[Cube, ...]:
        covered: set[Cube] = set()
        for c in self.cubes:
            if len(c) > 1:
                for k in range(cube_dim(c)):
                    covered.update(faces(c, k))
        return tuple(c for c in self.cubes if c not in covered)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    def square_with(self, a: int, b: int, c: int) -> Cube | None:
        """The stored square containing the path a-b-c as two of its sides."""
        for d in self.adjacency[a]:
            if d != b and d in self.adjacency[c] and d != a:
                sq = self.by_vertex_set.get(frozenset((a, b, c, d)))
                if sq is not None and len(sq) == 4:
                    return sq
        return None

    def f_vector(self) -> list[int]:
        return [len(self.cubes_of_dim(k)) for k in range(self.dim + 1)]


def _intersection_ok(c1: Cube, c2: Cube, by_set: dict) -> bool:
    common = frozenset(c1) & frozenset(c2)
    if not common:
        return True
    if not (is_face_set(c1, common) and is_face_set(c2, common)):
        return False
    face = by_set.get(common)
    if face is None:
        return False
    return face in all_faces(c1) and face in all_faces(c2)


def build_complex(cube_list: Iterable[Sequence[int]], vertex_count: int | None = None) -> CubeComplex:
    """Glue the listed cubes, close under faces and validate the result.

    Vertex ids not used by any cube but below ``vertex_count`` become isolated
    vertices; by default ``vertex_count`` is one more than the largest id.
    """
    raw = [tuple(int(v) for v in c) for c in cube_list]
    seen: dict[Cube, Cube] = {}
    for c in raw:
        cube_dim(c)
        if any(v < 0 for v in c):
            raise ComplexError(f"negative vertex id in {c}", [c])
        if len(set(c)) != len(c):
            raise SelfGluedCube(f"cube {c} repeats a corner", [c])
        can = canonical(c)
        if can in seen:
            raise DuplicateCube(f"cube {c} listed twice (as {seen[can]})", [seen[can], c])
        seen[can] = c
    top = max((max(c) for c in raw), default=-1)
    n = top + 1 if vertex_count is None else int(vertex_count)
    if n <= top:
        raise ComplexError(f"vertex id {top} exceeds vertex_count {n}")

    closed: set[Cube] = {(v,) for v in range(n)}
    for c in seen:
        closed |= all_faces(canonical(c))
    by_set: dict[frozenset, Cube] = {}
    for c in sorted(closed):
        other = by_set.setdefault(frozenset(c), c)
        if other != c:
            raise BadGluing(f"cubes {other} and {c} share a vertex set", [other, c])

    x = CubeComplex(n, closed)
    _check_gluing(x.maximal_cubes, x.by_vertex_set, raise_first=True)
    return x


def _check_gluing(cubes: Sequence[Cube], by_set: dict, raise_first: bool = False) -> list[Violation]:
    at = defaultdict(list)
    for i, c in enumerate(cubes):
        for v in c:
            at[v].append(i)
    out = []
    done = set()
    for idx in at.values():
        for i, j in combinations(idx, 2):
            if (i, j) in done:
                continue
            done.add((i, j))
            c1, c2 = cubes[i], cubes[j]
            if frozenset(c1) <= frozenset(c2) or frozenset(c2) <= frozenset(c1):
                continue
            if not _intersection_ok(c1, c2, by_set):
                common = sorted(frozenset(c1) & frozenset(c2))
                msg = f"cubes {c1} and {c2} meet in {common}, which is not a common face"
                if raise_first:
                    raise BadGluing(msg, [c1, c2])
                out.append(Violation("gluing", (c1, c2), msg))
    return out


def validate(x: CubeComplex) -> ValidationReport:
    """Check every CubeComplex invariant and report all violations."""
    report = ValidationReport()
    add = report.violations.append
    stored = set(x.cubes)
    for c in x.cubes:
        n = len(c)
        if n & (n - 1):
            add(Violation("arity", (c,), f"cube {c} has {n} corners"))
            continue
        if any(not 0 <= v < x.vertex_count for v in c):
            add(Violation("vertex-range", (c,), f"cube {c} uses an unknown vertex"))
        if len(set(c)) != n:
            rule = "simple-graph" if n == 2 else "self-glued"
            add(Violation(rule, (c,), f"cube {c} repeats a corner"))
            continue
        missing = [f for f in all_faces(c) if f not in stored]
        if missing:
            add(Violation("face-closure", (c,) + tuple(missing[:1]),
                          f"cube {c} is missing {len(missing)} face(s), e.g. {missing[0]}"))
    for v in x.vertices:
        if (v,) not in stored:
            add(Violation("face-closure", ((v,),), f"vertex {v} is not stored as a 0-cube"))
    by_set: dict[frozenset, Cube] = {}
    for c in x.cubes:
        other = by_set.setdefault(frozenset(c), c)
        if other != c:
            add(Violation("embedding", (other, c), f"distinct cubes {other} and {c} share a vertex set"))
    good = [c for c in x.cubes if len(set(c)) == len(c) and not len(c) & (len(c) - 1)]
    report.violations.extend(_check_gluing(good, by_set))
    return report


def skeleton(x: CubeComplex, k: int) -> CubeComplex:
    return CubeComplex(x.vertex_count, [c for c in x.cubes if len(c) <= 1 << k])


def full_subcomplex(x: CubeComplex, vertices: Iterable[int]) -> tuple[CubeComplex, list[int]]:
    """Subcomplex spanned by ``vertices``, renumbered in increasing order.

    Returns the subcomplex and the list mapping new ids to old ids.
    """
    keep = sorted(set(vertices))
    new = {v: i for i, v in enumerate(keep)}
    cubes = [tuple(new[v] for v in c) for c in x.cubes if all(v in new for v in c)]
    return CubeComplex(len(keep), cubes), keep


def num_faces(n: int, k: int) -> int:
    return comb(n, k) * 2 ** (n - k)


def standard_cube(n: int, offset: int = 0) -> Cube:
    return tuple(range(offset, offset + (1 << n)))
