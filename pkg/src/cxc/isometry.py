"""Automorphisms: displacement, minimal displacement sets, inversions, axes.

Functions take either a finite :class:`CubeComplex` with a
:class:`FiniteAutomorphism`, or a :class:`PeriodicComplex` with a
:class:`ShiftAutomorphism` acting by ``(o, z) -> (sigma[o], z + shift)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Union

import numpy as np

from .complex import CubeComplex, canonical, full_subcomplex
from .link import is_flag, link_of_vertex
from .metric import (ContractionCertificate, Inconclusive, bfs, bfs_distance, contract_loop,
                     enumerate_geodesics, is_convex_subcomplex, median_counts, random_loop, all_pairs)
from .periodic import (PeriodicComplex, PeriodicWall, certified_distance, certified_interval,
                       materialize_window, normalize, periodic_walls, window_for,
                       window_halfspaces)
from .walls import NotTwoSided, compute_walls, halfspaces

Space = Union[CubeComplex, PeriodicComplex]


class NotAutomorphism(ValueError):
    def __init__(self, message: str, cube=None):
        super().__init__(message)
        self.cube = cube


class NotHyperbolic(ValueError):
    pass


class NotInMin(ValueError):
    pass


class NotGeodesic(ValueError):
    pass


def _compose_perm(p: tuple, q: tuple) -> tuple:
    """p after q."""
    return tuple(p[i] for i in q)


def _perm_power(p: tuple, k: int) -> tuple:
    if k < 0:
        inv = [0] * len(p)
        for i, j in enumerate(p):
            inv[j] = i
        p, k = tuple(inv), -k
    out = tuple(range(len(p)))
    base = p
    while k:
        if k & 1:
            out = _compose_perm(base, out)
        base = _compose_perm(base, base)
        k >>= 1
    return out


@dataclass(frozen=True)
class FiniteAutomorphism:
    images: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.images[v]

    def power(self, k: int) -> FiniteAutomorphism:
        return FiniteAutomorphism(_perm_power(self.images, k))

    def inverse(self) -> FiniteAutomorphism:
        return self.power(-1)

    @classmethod
    def identity(cls, n: int) -> FiniteAutomorphism:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Iterable[int]]) -> FiniteAutomorphism:
        images = list(range(n))
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        if sorted(images) != list(range(n)):
            raise ValueError("cycles do not define a permutation")
        return cls(tuple(images))


@dataclass(frozen=True)
class ShiftAutomorphism:
    sigma: tuple[int, ...]
    shift: int

    def __call__(self, v):
        o, z = v
        return (self.sigma[o], z + self.shift)

    def power(self, k: int) -> ShiftAutomorphism:
        return ShiftAutomorphism(_perm_power(self.sigma, k), self.shift * k)

    def inverse(self) -> ShiftAutomorphism:
        return self.power(-1)


Automorphism = Union[FiniteAutomorphism, ShiftAutomorphism]


def _apply_cube(g, c):
    return tuple(g(v) for v in c)


@dataclass
class AutCheck:
    ok: bool
    witness: tuple | None = None


def check_automorphism(space: Space, g: Automorphism) -> AutCheck:
    """Confirm that ``g`` carries every cube onto a stored cube.

    In the periodic case the check runs on the cube orbits directly: ``g``
    commutes with the shift, so orbit data determines the whole map.
    """
    if isinstance(space, PeriodicComplex):
        if sorted(g.sigma) != list(range(space.orbit_count)):
            return AutCheck(False, ("sigma is not a permutation",))
        stored = set(space.cube_orbits)
        for c in space.cube_orbits:
            if normalize(_apply_cube(g, c))[0] not in stored:
                return AutCheck(False, c)
        return AutCheck(True)
    if sorted(g.images) != list(space.vertices):
        return AutCheck(False, ("not a bijection of the vertex set",))
    stored = set(space.cubes)
    for c in space.cubes:
        if canonical(_apply_cube(g, c)) not in stored:
            return AutCheck(False, c)
    return AutCheck(True)


def distance(space: Space, u, v) -> int:
    if isinstance(space, PeriodicComplex):
        return certified_distance(space, u, v).value
    return bfs_distance(space, u, v)


def displacement(space: Space, g: Automorphism, v) -> int:
    return distance(space, v, g(v))


def _fundamental_vertices(space: Space):
    if isinstance(space, PeriodicComplex):
        return [(o, 0) for o in range(space.orbit_count)]
    return list(space.vertices)


def displacement_profile(space: Space, g: Automorphism) -> dict:
    return {v: displacement(space, g, v) for v in _fundamental_vertices(space)}


def translation_length(space: Space, g: Automorphism) -> tuple[int, list]:
    """``(|g|, argmin)``; in the periodic case the argmin lists orbit indices."""
    prof = displacement_profile(space, g)
    best = min(prof.values())
    arg = [v for v, d in prof.items() if d == best]
    if isinstance(space, PeriodicComplex):
        arg = [o for o, _ in arg]
    return best, arg


@dataclass
class MinSet:
    space: Space
    g: Automorphism
    translation_length: int
    members: frozenset  # orbit indices (periodic) or vertex ids (finite)
    flags: dict = field(default_factory=dict)

    def contains(self, v) -> bool:
        if isinstance(self.space, PeriodicComplex):
            return v[0] in self.members
        return v in self.members

    def subcomplex(self, radius: int | None = None) -> tuple[CubeComplex, list]:
        """Full subcomplex spanned by Min, with labels for its vertices.

        Periodic sets are cut to the window of the given radius; labels are
        ``(orbit, z)`` pairs there and vertex ids in the finite case.
        """
        if isinstance(self.space, PeriodicComplex):
            w = materialize_window(self.space, radius)
            ids = [i for i in w.complex.vertices if w.vertex_of(i)[0] in self.members]
            sub, keep = full_subcomplex(w.complex, ids)
            return sub, [w.vertex_of(i) for i in keep]
        return full_subcomplex(self.space, self.members)

    @cached_property
    def is_g_invariant(self) -> bool:
        if isinstance(self.space, PeriodicComplex):
            return {self.g.sigma[o] for o in self.members} == set(self.members)
        return {self.g(v) for v in self.members} == set(self.members)


def min_set(space: Space, g: Automorphism) -> MinSet:
    length, arg = translation_length(space, g)
    if length == 0:
        raise NotHyperbolic("g fixes a vertex (|g| = 0)")
    m = MinSet(space, g, length, frozenset(arg))
    assert m.is_g_invariant
    return m


# ---------------------------------------------------------------- inversions


@dataclass
class InversionCheck:
    inverted: bool
    preserved: bool
    witness: tuple | None = None  # (x, g(x)) on opposite sides


def detect_inversion(space: Space, g: Automorphism, wall) -> InversionCheck:
    """Whether ``g`` maps ``wall`` to itself and swaps its two sides."""
    if isinstance(space, PeriodicComplex):
        return _detect_periodic(space, g, wall)
    x = space
    idx = x.edge_index
    image = set()
    for e in wall.edges:
        a, b = (g(v) for v in x.edges[e])
        image.add(idx[(min(a, b), max(a, b))])
    if image != set(wall.edges):
        return InversionCheck(False, False)
    h = halfspaces(x, wall)
    v = min(h.side_a)
    if g(v) in h.side_b:
        assert {g(u) for u in h.side_a} == set(h.side_b)
        return InversionCheck(True, True, (v, g(v)))
    return InversionCheck(False, True)


def _detect_periodic(p: PeriodicComplex, g: ShiftAutomorphism, wall: PeriodicWall) -> InversionCheck:
    images = [tuple(sorted(_apply_cube(g, e))) for e in wall.edges]
    if wall.kind == "FINITE":
        preserved = set(images) == set(wall.edges)
    else:
        preserved = all(wall.contains(e) for e in images)
    if not preserved:
        return InversionCheck(False, False)
    e0 = min(wall.edges)
    v = e0[0]
    gv = g(v)
    zs = [abs(z) for e in wall.edges for _, z in e] + [abs(v[1]), abs(gv[1])]
    radius = max(zs) + 2 * max(p.z_extent, 1) + 2
    h = window_halfspaces(p, wall, radius)
    if (v in h.side_a) != (gv in h.side_a):
        return InversionCheck(True, True, (v, gv))
    return InversionCheck(False, True)


# ---------------------------------------------------------------- axes


@dataclass(frozen=True)
class Axis:
    g: Automorphism
    alpha: tuple  # gamma(0..L), L = |g|; gamma(i + L) = g(gamma(i))

    @property
    def period(self) -> int:
        return len(self.alpha) - 1

    def at(self, i: int):
        L = self.period
        if 0 <= i <= L:
            return self.alpha[i]
        q, r = divmod(i, L)
        return self.g.power(q)(self.alpha[r])


def build_axis(p: Space, g: Automorphism, v=None, alpha=None, m: MinSet | None = None) -> Axis:
    """Concatenate the translates ``g^n(alpha)`` of a geodesic from v to g(v)."""
    m = m if m is not None else min_set(p, g)
    if v is None:
        v = (min(m.members), 0) if isinstance(p, PeriodicComplex) else min(m.members)
    if not m.contains(v):
        raise NotInMin(f"{v} is not in Min(g)")
    if alpha is None:
        if isinstance(p, PeriodicComplex):
            cert = certified_distance(p, v, g(v))
            w = window_for(p, cert.radius)
            geo = enumerate_geodesics(w.complex, w.id_of(v), w.id_of(g(v)), cap=1)
            alpha = tuple(w.vertex_of(i) for i in geo.paths[0])
        else:
            alpha = enumerate_geodesics(p, v, g(v), cap=1).paths[0]
    alpha = tuple(alpha)
    if alpha[0] != v or alpha[-1] != g(v):
        raise NotGeodesic("alpha must run from v to g(v)")
    if len(alpha) - 1 != m.translation_length:
        raise NotGeodesic(f"alpha has length {len(alpha) - 1}, |g| = {m.translation_length}")
    for a, b in zip(alpha, alpha[1:]):
        if distance(p, a, b) != 1:
            raise NotGeodesic(f"{a} and {b} are not adjacent")
    return Axis(g, alpha)


@dataclass
class AxisReport:
    ok: bool
    checked_pairs: int
    failures: list = field(default_factory=list)  # (a, b, distance, expected)
    outside_min: list = field(default_factory=list)
    consistent: bool = True


def verify_axis(p: Space, g: Automorphism, axis: Axis, m: MinSet | None = None) -> AxisReport:
    """Check ``d(gamma(a), gamma(b)) = b - a`` for ``0 <= b - a <= |g|`` over one period."""
    m = m if m is not None else min_set(p, g)
    L = axis.period
    rep = AxisReport(True, 0)
    rep.consistent = axis.alpha[-1] == g(axis.alpha[0])
    for a in range(L):
        for b in range(a, a + L + 1):
            d = distance(p, axis.at(a), axis.at(b))
            rep.checked_pairs += 1
            if d != b - a:
                rep.failures.append((a, b, d, b - a))
    for i in range(L + 1):
        if not m.contains(axis.at(i)):
            rep.outside_min.append((i, axis.at(i)))
    rep.ok = rep.consistent and not rep.failures and not rep.outside_min
    return rep


# ---------------------------------------------------------------- classify


@dataclass
class Classification:
    kind: str  # "Elliptic" | "Hyperbolic" | "InversionDetected" | "Undecided"
    fixed_vertex: object = None
    translation_length: int | None = None
    axis: Axis | None = None
    power: int | None = None
    wall: object = None
    witness: tuple | None = None
    diagnostics: dict = field(default_factory=dict)


def fixed_vertices(space: Space, g: Automorphism) -> list:
    if isinstance(space, PeriodicComplex):
        if g.shift != 0:
            return []
        return [(o, 0) for o in range(space.orbit_count) if g.sigma[o] == o]
    return [v for v in space.vertices if g(v) == v]


def fixed_cubes(space: Space, g: Automorphism) -> list:
    if isinstance(space, PeriodicComplex):
        if g.shift != 0:
            return []
        return [c for c in space.cube_orbits if set(_apply_cube(g, c)) == set(c)]
    return [c for c in space.cubes if len(c) > 1 and set(_apply_cube(g, c)) == set(c)]


def _wall_catalogue(space: Space):
    if isinstance(space, PeriodicComplex):
        cat = periodic_walls(space)
        return cat.walls, [list(map(tuple, e)) for e in cat.unresolved]
    return compute_walls(space), []


def classify(space: Space, g: Automorphism, power_bound: int = 8) -> Classification:
    """Inversions of g^k (k <= power_bound) first, then a fixed vertex, then an axis."""
    if power_bound < 1:
        raise ValueError("power bound must be at least 1")
    walls, unresolved = _wall_catalogue(space)
    diag: dict = {"power_bound": power_bound, "unresolved_walls": unresolved, "one_sided_walls": []}
    for k in range(1, power_bound + 1):
        gk = g.power(k)
        for w in walls:
            try:
                chk = detect_inversion(space, gk, w)
            except NotTwoSided as exc:
                if k == 1:
                    diag["one_sided_walls"].append(exc.wall)
                continue
            if chk.inverted:
                return Classification("InversionDetected", power=k, wall=w, witness=chk.witness,
                                      diagnostics=diag)
    fixed = fixed_vertices(space, g)
    diag["fixed_cubes"] = fixed_cubes(space, g)
    if fixed:
        return Classification("Elliptic", fixed_vertex=fixed[0], translation_length=0, diagnostics=diag)
    length, arg = translation_length(space, g)
    diag["translation_length"] = length
    if length > 0 and isinstance(space, PeriodicComplex) and g.shift != 0:
        m = min_set(space, g)
        axis = build_axis(space, g, m=m)
        rep = verify_axis(space, g, axis, m)
        if rep.ok:
            return Classification("Hyperbolic", translation_length=length, axis=axis, diagnostics=diag)
        diag["axis_failures"] = rep.failures
    elif length > 0:
        diag["reason"] = "g has finite order, so no bi-infinite axis exists"
    return Classification("Undecided", translation_length=length, diagnostics=diag)


# ---------------------------------------------------------------- Min checks


def default_spread(length: int) -> int:
    return 3 * length + 4


@dataclass
class ConvexReport:
    ok: bool
    checked_pairs: int
    witness: tuple | None = None  # (u, v, z) with z on a u-v geodesic but outside the set
    isometry_failures: list = field(default_factory=list)  # (u, v, ambient, internal)


def verify_min_convex(p: Space, g: Automorphism, spread: int | None = None,
                      members: Callable | None = None, m: MinSet | None = None) -> ConvexReport:
    """Interval containment for pairs of Min vertices at z-spread at most ``spread``.

    Pairs are checked closest first.  ``members`` replaces the Min predicate
    (used to exercise the check on sets that are not convex); the scan then
    covers every member with ``|z| <= spread`` instead of using shift
    invariance.
    """
    if isinstance(p, CubeComplex):
        m = m if m is not None else min_set(p, g)
        verts = [v for v in p.vertices if (members(v) if members else m.contains(v))]
        chk = is_convex_subcomplex(p, verts)
        sub, keep = full_subcomplex(p, verts)
        d = all_pairs(p)
        ds = all_pairs(sub)
        bad = [(keep[i], keep[j], int(d[keep[i], keep[j]]), int(ds[i, j]))
               for i in range(len(keep)) for j in range(i + 1, len(keep))
               if ds[i, j] != d[keep[i], keep[j]]]
        n = len(verts)
        return ConvexReport(chk.ok and not bad, n * (n - 1) // 2, chk.witness, bad)

    if members is None:
        m = m if m is not None else min_set(p, g)
        spread = default_spread(m.translation_length) if spread is None else spread
        inside = m.contains
        orbits = sorted(m.members)
        pairs = [((o1, 0), (o2, dz)) for o1 in orbits for o2 in orbits for dz in range(spread + 1)
                 if (o1, 0) != (o2, dz)]
    else:
        if spread is None:
            raise ValueError("spread is required with an explicit member predicate")
        inside = members
        pts = [(o, z) for z in range(-spread, spread + 1) for o in range(p.orbit_count) if members((o, z))]
        pairs = [(u, v) for i, u in enumerate(pts) for v in pts[i + 1:] if abs(u[1] - v[1]) <= spread]

    queries = []
    for u, v in pairs:
        iv, cert = certified_interval(p, u, v)
        queries.append((cert.value, u, v, iv, cert))
    queries.sort(key=lambda q: (q[0], q[1][1], q[1][0], q[2][1], q[2][0]))
    rep = ConvexReport(True, 0)
    for d, u, v, iv, cert in queries:
        rep.checked_pairs += 1
        out = sorted((z for z in iv.members if not inside(z)), key=lambda t: (t[1], t[0]))
        if out:
            rep.ok = False
            rep.witness = (u, v, out[0])
            return rep
        internal = _internal_distance(p, inside, u, v, cert.radius)
        if internal != d:
            rep.isometry_failures.append((u, v, d, internal))
            rep.ok = False
    return rep


def _internal_distance(p: PeriodicComplex, inside, u, v, radius: int) -> int:
    w = materialize_window(p, radius)
    ids = [i for i in w.complex.vertices if inside(w.vertex_of(i))]
    sub, keep = full_subcomplex(w.complex, ids)
    pos = {w.vertex_of(i): j for j, i in enumerate(keep)}
    return bfs(sub, pos[u])[pos[v]]


@dataclass
class Cat0Report:
    ok: bool
    links: dict = field(default_factory=dict)  # vertex -> {"flag", "contained", "full", "witness"}
    loops_checked: int = 0
    loops_failed: list = field(default_factory=list)
    loops_inconclusive_first_pass: int = 0
    median_ok: bool = True
    median_witness: tuple | None = None
    triples_checked: int = 0


def verify_min_cat0(p: Space, g: Automorphism, loop_samples: int = 100, spread: int | None = None,
                    seed: int = 0, max_loop: int = 12, m: MinSet | None = None) -> Cat0Report:
    """Link, loop and median evidence that Min(g) is CAT(0)."""
    m = m if m is not None else min_set(p, g)
    spread = default_spread(m.translation_length) if spread is None else spread
    rep = Cat0Report(True)
    periodic = isinstance(p, PeriodicComplex)

    # links at orbit representatives
    if periodic:
        radius = 2 * max(p.z_extent, 1) + 1
        w = materialize_window(p, radius)
        x = w.complex
        reps = [w.id_of((o, 0)) for o in sorted(m.members)]
        name = w.vertex_of
        sub_ids = [i for i in x.vertices if m.contains(w.vertex_of(i))]
    else:
        x = p
        reps = sorted(m.members)
        name = lambda i: i
        sub_ids = reps
    sub, keep = full_subcomplex(x, sub_ids)
    pos = {old: new for new, old in enumerate(keep)}
    for v in reps:
        lx = link_of_vertex(x, v)
        lm_raw = link_of_vertex(sub, pos[v])
        relabel = lambda e: tuple(sorted(keep[i] for i in e))
        lm_labels = {relabel(e) for e in lm_raw.vertex_labels}
        lm_simplices = {frozenset(relabel(e) for e in s) for s in lm_raw.simplices}
        contained = lm_labels <= set(lx.vertex_labels)
        full = lm_simplices == set(lx.full_subcomplex(lm_labels).simplices)
        flag, wit = is_flag(lm_raw)
        entry = {"flag": flag, "contained": contained, "full": full,
                 "simplicial": lm_raw.is_simplicial(), "witness": wit}
        rep.links[name(v)] = entry
        if not (flag and contained and full and entry["simplicial"]):
            rep.ok = False

    # loops
    rng = np.random.default_rng(seed)
    if periodic:
        loop_sub, labels = m.subcomplex(max_loop + 2)
        starts = [j for j, lab in enumerate(labels) if lab[1] == 0]
    else:
        loop_sub, labels = m.subcomplex()
        starts = list(loop_sub.vertices)
    for _ in range(loop_samples):
        loop = random_loop(loop_sub, rng, max_loop, starts)
        budget = 10 * len(loop) ** 2
        res = contract_loop(loop_sub, loop, budget)
        if isinstance(res, Inconclusive):
            rep.loops_inconclusive_first_pass += 1
            res = contract_loop(loop_sub, loop, 2 * budget)
        rep.loops_checked += 1
        if not isinstance(res, ContractionCertificate):
            rep.loops_failed.append(tuple(labels[i] for i in loop))
    if rep.loops_failed:
        rep.ok = False

    # medians of Min triples inside the spread band, computed in Min itself
    if periodic:
        radius = 2 * spread + 4
        while True:
            msub, labels = m.subcomplex(radius)
            rows = [j for j, lab in enumerate(labels) if 0 <= lab[1] <= spread]
            dist = np.array([bfs(msub, r) for r in rows], dtype=np.int64)
            dmax = int(dist[:, rows].max()) if rows else 0
            if (dist[:, rows] >= 0).all() and radius >= spread + dmax:
                break
            radius *= 2
            if (2 * radius + 1) * p.orbit_count > 20000:
                rep.median_ok = False
                rep.ok = False
                return rep
    else:
        msub, labels = m.subcomplex()
        rows = list(msub.vertices)
        dist = np.array([bfs(msub, r) for r in rows], dtype=np.int64).reshape(len(rows), msub.vertex_count)
    if rows:
        counts = median_counts(dist, rows)
        rep.triples_checked = len(rows) ** 3
        bad = np.argwhere(counts != 1)
        if len(bad):
            i, j, k = min(tuple(sorted(map(int, t))) for t in bad)
            rep.median_ok = False
            rep.median_witness = (labels[rows[i]], labels[rows[j]], labels[rows[k]])
            rep.ok = False
    return rep
