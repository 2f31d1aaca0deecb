"""Combinatorial distance, intervals, medians, convexity and loop contraction."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from weakref import WeakKeyDictionary

import numpy as np

from .complex import CubeComplex


class Disconnected(ValueError):
    pass


class NotClosed(ValueError):
    pass


def bfs(x: CubeComplex, source: int) -> list[int]:
    """Distances from ``source``; -1 marks unreachable vertices."""
    dist = [-1] * x.vertex_count
    dist[source] = 0
    queue = deque([source])
    adj = x.adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


_apsp_cache: WeakKeyDictionary = WeakKeyDictionary()


def all_pairs(x: CubeComplex) -> np.ndarray:
    """Distance matrix, -1 for disconnected pairs."""
    if x not in _apsp_cache:
        _apsp_cache[x] = np.array([bfs(x, s) for s in x.vertices], dtype=np.int64).reshape(
            x.vertex_count, x.vertex_count)
    return _apsp_cache[x]


def bfs_distance(x: CubeComplex, u: int, v: int) -> int:
    d = bfs(x, u)[v]
    if d < 0:
        raise Disconnected(f"{u} and {v} lie in different components")
    return d


def is_connected(x: CubeComplex) -> bool:
    return x.vertex_count == 0 or min(bfs(x, 0)) >= 0


@dataclass(frozen=True)
class Interval:
    u: object
    v: object
    members: frozenset


def interval(x: CubeComplex, u: int, v: int) -> Interval:
    du, dv = bfs(x, u), bfs(x, v)
    d = du[v]
    if d < 0:
        raise Disconnected(f"{u} and {v} lie in different components")
    return Interval(u, v, frozenset(z for z in x.vertices if du[z] >= 0 and du[z] + dv[z] == d))


@dataclass
class Geodesics:
    paths: list[tuple[int, ...]]
    overflow: bool


def enumerate_geodesics(x: CubeComplex, u: int, v: int, cap: int = 1000) -> Geodesics:
    """All geodesics from u to v in lexicographic order, at most ``cap``."""
    dv = bfs(x, v)
    if dv[u] < 0:
        raise Disconnected(f"{u} and {v} lie in different components")
    out: list[tuple[int, ...]] = []
    overflow = False

    def walk(path):
        nonlocal overflow
        if overflow:
            return
        w = path[-1]
        if w == v:
            if len(out) >= cap:
                overflow = True
            else:
                out.append(tuple(path))
            return
        for n in x.adjacency[w]:
            if dv[n] == dv[w] - 1:
                path.append(n)
                walk(path)
                path.pop()

    walk([u])
    return Geodesics(out, overflow)


@dataclass(frozen=True)
class MedianResult:
    median: int | None
    candidates: tuple[int, ...]

    @property
    def unique(self) -> bool:
        return len(self.candidates) == 1


def median(x: CubeComplex, u: int, v: int, w: int) -> MedianResult:
    common = interval(x, u, v).members & interval(x, v, w).members & interval(x, u, w).members
    cands = tuple(sorted(common))
    return MedianResult(cands[0] if len(cands) == 1 else None, cands)


def median_counts(dist: np.ndarray, rows: Sequence[int] | None = None) -> np.ndarray:
    """counts[i, j, k] = number of medians of rows[i], rows[j], rows[k].

    ``dist`` has shape (len(rows), N): distances from each row vertex to every
    vertex, with the row vertices themselves among the N columns.
    """
    k = dist.shape[0]
    idx = np.arange(k) if rows is None else np.asarray(rows)
    pair = dist[:, idx]  # d(r_i, r_j)
    # on[i, j, z]: z lies on a geodesic between row i and row j
    on = (dist[:, None, :] + dist[None, :, :]) == pair[:, :, None]
    on &= (dist[:, None, :] >= 0) & (dist[None, :, :] >= 0)
    on_i = on.astype(np.int32)
    counts = np.empty((k, k, k), dtype=np.int32)
    for i in range(k):
        counts[i] = (on_i[i][:, None, :] * on_i[i][None, :, :] * on_i).sum(axis=2)
    return counts


@dataclass
class MedianCheck:
    ok: bool
    witness: tuple[int, int, int] | None = None
    count: int | None = None


def is_median_graph(x: CubeComplex) -> MedianCheck:
    """True iff every vertex triple has exactly one median."""
    n = x.vertex_count
    if n == 0:
        return MedianCheck(True)
    d = all_pairs(x)
    if (d < 0).any():
        u, v = map(int, np.argwhere(d < 0)[0])
        return MedianCheck(False, (u, u, v), 0)
    counts = median_counts(d)
    bad = np.argwhere(counts != 1)
    if len(bad) == 0:
        return MedianCheck(True)
    # smallest sorted triple
    trip = min(tuple(sorted(map(int, t))) for t in bad)
    return MedianCheck(False, trip, int(counts[trip]))


@dataclass
class ConvexityCheck:
    ok: bool
    witness: tuple | None = None
    reason: str = ""


def is_convex_subcomplex(x: CubeComplex, s: Iterable[int]) -> ConvexityCheck:
    """Interval-closed and connected; witness is ``(u, v, z)`` with z outside."""
    s = frozenset(s)
    if not s:
        raise ValueError("empty vertex set")
    d = all_pairs(x)
    members = sorted(s)
    inside = np.zeros(x.vertex_count, dtype=bool)
    inside[members] = True
    # closest pairs first so the witness is as local as possible
    pairs = sorted(((int(d[u, v]), u, v) for i, u in enumerate(members) for v in members[i + 1:]))
    for duv, u, v in pairs:
        if duv < 0:
            return ConvexityCheck(False, (u, v, None), "disconnected")
        on = (d[u] + d[v] == duv) & (d[u] >= 0)
        out = np.flatnonzero(on & ~inside)
        if len(out):
            return ConvexityCheck(False, (u, v, int(out[0])), "interval leaves the set")
    # interval closure already forces connectivity; checked directly anyway
    seen = {members[0]}
    stack = [members[0]]
    while stack:
        u = stack.pop()
        for w in x.adjacency[u]:
            if w in s and w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(s):
        z = min(s - seen)
        return ConvexityCheck(False, (members[0], z, None), "disconnected")
    return ConvexityCheck(True)


# ---------------------------------------------------------------- loops


@dataclass(frozen=True)
class Move:
    kind: str  # "stutter" | "backtrack" | "exchange"
    index: int
    replacement: int | None = None


def apply_move(word: list[int], move: Move) -> list[int]:
    """Apply one move to a cyclic word (the loop without its repeated endpoint)."""
    n = len(word)
    i = move.index % n
    w = list(word)
    if move.kind == "stutter":
        if w[i] != w[(i + 1) % n]:
            raise ValueError(f"no stutter at {i}")
        del w[(i + 1) % n]
    elif move.kind == "backtrack":
        if n == 2:
            if w[0] == w[1]:
                raise ValueError("not a backtrack")
            return [w[(i - 1) % n]]
        if n < 2 or w[(i - 1) % n] != w[(i + 1) % n]:
            raise ValueError(f"no backtrack at {i}")
        for j in sorted([i, (i + 1) % n], reverse=True):
            del w[j]
    elif move.kind == "exchange":
        w[i] = move.replacement
    else:
        raise ValueError(move.kind)
    return w


@dataclass
class ContractionCertificate:
    loop: tuple[int, ...]
    moves: list[Move]

    def replay(self, x: CubeComplex | None = None) -> list[list[int]]:
        """Replay the moves; every intermediate word is a closed path.

        With ``x`` given, exchanges are also checked against stored squares.
        """
        word = list(self.loop[:-1]) or [self.loop[0]]
        states = [word]
        for m in self.moves:
            if m.kind == "exchange" and x is not None:
                n = len(word)
                a, b, c = word[(m.index - 1) % n], word[m.index % n], word[(m.index + 1) % n]
                sq = x.by_vertex_set.get(frozenset((a, b, c, m.replacement)))
                if sq is None or len(sq) != 4 or not (x.has_edge(a, m.replacement) and x.has_edge(c, m.replacement)):
                    raise ValueError(f"exchange {m} is not across a square")
            word = apply_move(word, m)
            if x is not None and len(word) > 1:
                for i in range(len(word)):
                    a, b = word[i], word[(i + 1) % len(word)]
                    if a != b and not x.has_edge(a, b):
                        raise ValueError(f"move {m} breaks the path at {a}-{b}")
            states.append(word)
        if len(word) != 1:
            raise ValueError(f"replay ends at a loop of length {len(word)}")
        return states


@dataclass
class Inconclusive:
    loop: tuple[int, ...]
    shortest: tuple[int, ...]
    explored: int
    exhausted: bool = False


def _free_reduce(word: list[int], moves: list[Move]) -> list[int]:
    changed = True
    while changed and len(word) > 1:
        changed = False
        n = len(word)
        for i in range(n):
            if word[i] == word[(i + 1) % n]:
                m = Move("stutter", i)
            elif n >= 2 and word[(i - 1) % n] == word[(i + 1) % n]:
                m = Move("backtrack", i)
            else:
                continue
            word = apply_move(word, m)
            moves.append(m)
            changed = True
            break
    return word


def _greedy(x: CubeComplex, word: list[int], moves: list[Move]) -> list[int]:
    """Push the farthest vertex toward the base point across squares."""
    base = word[0]
    dist = bfs(x, base)
    word = _free_reduce(word, moves)
    while len(word) > 1:
        n = len(word)
        i = max(range(n), key=lambda j: (dist[word[j]], -j))
        a, b, c = word[(i - 1) % n], word[i], word[(i + 1) % n]
        if not (dist[a] == dist[c] == dist[b] - 1):
            return word
        repl = None
        for d in x.adjacency[a]:
            if d != b and dist[d] == dist[b] - 2 and x.has_edge(d, c):
                sq = x.by_vertex_set.get(frozenset((a, b, c, d)))
                if sq is not None and len(sq) == 4:
                    repl = d
                    break
        if repl is None:
            return word
        m = Move("exchange", i, repl)
        word = apply_move(word, m)
        moves.append(m)
        word = _free_reduce(word, moves)
    return word


def _rot_key(word: list[int]) -> tuple:
    n = len(word)
    return min(tuple(word[i:] + word[:i]) for i in range(n)) if n else ()


def contract_loop(x: CubeComplex, loop: Sequence[int], budget: int = 1000) -> ContractionCertificate | Inconclusive:
    """Reduce a closed path to a point by backtracks and square exchanges.

    A greedy descent toward the base point is tried first; if it gets stuck,
    a best-first search over exchanges runs until ``budget`` states have been
    expanded.
    """
    loop = tuple(loop)
    if not loop or loop[0] != loop[-1]:
        raise NotClosed("loop must start and end at the same vertex")
    for a, b in zip(loop, loop[1:]):
        if a != b and not x.has_edge(a, b):
            raise ValueError(f"{a}-{b} is not an edge")
    word = list(loop[:-1]) or [loop[0]]
    moves: list[Move] = []
    rest = _greedy(x, word, moves)
    if len(rest) <= 1:
        return ContractionCertificate(loop, moves)

    prefix: list[Move] = []
    start = _free_reduce(word, prefix)
    best = start
    frontier = [(len(start), 0, start, prefix)]
    seen = {_rot_key(start)}
    counter = 1
    explored = 0
    while frontier and explored < budget:
        _, _, w, path = heapq.heappop(frontier)
        explored += 1
        n = len(w)
        for i in range(n):
            a, b, c = w[(i - 1) % n], w[i], w[(i + 1) % n]
            if a == c:
                continue
            for d in x.adjacency[a]:
                if d == b or not x.has_edge(d, c):
                    continue
                sq = x.by_vertex_set.get(frozenset((a, b, c, d)))
                if sq is None or len(sq) != 4:
                    continue
                m = Move("exchange", i, d)
                mv = path + [m]
                nw = _free_reduce(apply_move(w, m), mv)
                if len(nw) <= 1:
                    return ContractionCertificate(loop, mv)
                key = _rot_key(nw)
                if key in seen:
                    continue
                seen.add(key)
                if len(nw) < len(best):
                    best = nw
                heapq.heappush(frontier, (len(nw), counter, nw, mv))
                counter += 1
    return Inconclusive(loop, tuple(best) + (best[0],), explored, exhausted=not frontier)


def loop_contractible(x: CubeComplex, loop: Sequence[int], budget: int | None = None) -> bool:
    if budget is None:
        budget = 10 * len(loop) ** 2
    return isinstance(contract_loop(x, loop, budget), ContractionCertificate)


def fundamental_cycles(x: CubeComplex, root: int = 0) -> list[tuple[int, ...]]:
    """Closed paths, one per non-tree edge of the BFS tree at ``root``.

    They generate the fundamental group of the component of ``root``.
    """
    parent = {root: None}
    order = deque([root])
    while order:
        u = order.popleft()
        for v in x.adjacency[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)

    def up(v):
        out = [v]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    cycles = []
    for u, v in x.edges:
        if u not in parent or parent.get(v) == u or parent.get(u) == v:
            continue
        pu, pv = up(u), up(v)
        cycles.append(tuple(reversed(pu)) + tuple(pv))
    return cycles


def random_loop(x: CubeComplex, rng, max_len: int = 12, vertices: Sequence[int] | None = None) -> tuple[int, ...]:
    """A random walk closed up by a geodesic; total length at most ``max_len``."""
    pool = list(vertices) if vertices is not None else list(x.vertices)
    start = pool[int(rng.integers(len(pool)))]
    walk = [start]
    for _ in range(int(rng.integers(0, max_len // 2 + 1))):
        nb = x.adjacency[walk[-1]]
        if not nb:
            break
        walk.append(nb[int(rng.integers(len(nb)))])
    dist = bfs(x, start)
    back = [walk[-1]]
    while back[-1] != start:
        u = back[-1]
        back.append(next(v for v in x.adjacency[u] if dist[v] == dist[u] - 1))
    return tuple(walk) + tuple(back[1:])


@dataclass
class SimpleConnectivity:
    ok: bool
    checked: int
    failures: list[Inconclusive] = field(default_factory=list)


def simply_connected_evidence(x: CubeComplex, samples: int = 0, max_len: int = 12, rng=None) -> SimpleConnectivity:
    """Contract the fundamental cycles of each component, plus random short loops."""
    loops = []
    seen = set()
    for v in x.vertices:
        if v in seen:
            continue
        comp = {u for u, d in enumerate(bfs(x, v)) if d >= 0}
        seen |= comp
        loops.extend(fundamental_cycles(x, v))
    if samples:
        rng = rng if rng is not None else np.random.default_rng(0)
        loops.extend(random_loop(x, rng, max_len) for _ in range(samples))
    fails = []
    for lp in loops:
        r = contract_loop(x, lp, 10 * len(lp) ** 2)
        if isinstance(r, Inconclusive):
            fails.append(r)
    return SimpleConnectivity(not fails, len(loops), fails)
