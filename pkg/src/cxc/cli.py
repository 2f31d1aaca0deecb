"""Command line front end: ``cxc <command> FILE ...``.

Exit codes: 0 pass, 1 property violated (witness in the report), 2 input
error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gen, io
from .complex import ComplexError, CubeComplex, all_faces, build_complex, validate
from .isometry import (NotAutomorphism, NotHyperbolic, build_axis, check_automorphism, classify,
                       default_spread, displacement_profile, fixed_vertices, min_set, translation_length, verify_axis,
                       verify_min_cat0, verify_min_convex)
from .link import gromov_check, is_flag, link_of_vertex
from .metric import (ContractionCertificate, Disconnected, NotClosed, bfs, contract_loop,
                     is_median_graph, simply_connected_evidence)
from .periodic import (GrowthCapExceeded, InvalidPeriodicData, PeriodicComplex, Unresolved,
                       certified_distance, default_growth_cap, materialize_window,
                       periodic_walls)
from .walls import NotTwoSided, compute_walls, distance_by_walls, halfspaces, is_self_intersecting, is_self_parallel

PASS, VIOLATED, INPUT_ERROR, INCONCLUSIVE = 0, 1, 2, 3
VERDICTS = {PASS: "pass", VIOLATED: "violated", INPUT_ERROR: "input-error", INCONCLUSIVE: "inconclusive"}
SCHEMA_PATH = Path(__file__).with_name("report.schema.json")


class InputError(Exception):
    pass


@dataclass
class Report:
    command: str
    input: str | None
    result: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    code: int = PASS
    text: list = field(default_factory=list)

    def as_json(self) -> dict:
        result = {"verdict": VERDICTS[self.code], "exit_code": self.code, **self.result}
        return jsonable({"command": self.command, "input": self.input, "result": result,
                         "witnesses": self.witnesses, "certificates": self.certificates,
                         "timings": self.timings})


class _Names:
    """Renders vertices: ints stay ints, periodic (orbit, z) becomes ``name@z``."""

    def __init__(self, space):
        self.space = space

    def __call__(self, v):
        if isinstance(self.space, PeriodicComplex) and isinstance(v, tuple) and len(v) == 2:
            return self.space.vertex_name(v)
        return v


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(v) for v in obj), key=repr)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)


# ---------------------------------------------------------------- loading


def _read(path: str) -> io.Document:
    try:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return io.parse(data)
    except io.FormatError as e:
        raise InputError(f"{path}:{e}") from None


def _load(path: str, need_aut: bool = False):
    doc = _read(path)
    try:
        space = io.to_space(doc)
        g = io.to_automorphism(doc, space)
    except (ComplexError, InvalidPeriodicData, io.FormatError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None
    if need_aut:
        if g is None:
            raise InputError(f"{path}: no 'aut' declaration")
        chk = check_automorphism(space, g)
        if not chk.ok:
            raise InputError(f"{path}: aut is not an automorphism (cube {chk.witness})")
    return doc, space, g


def _vertex(space, token: str):
    if isinstance(space, PeriodicComplex):
        name, sep, z = token.replace(",", "@").partition("@")
        if not sep or name not in space.orbits:
            raise InputError(f"bad periodic vertex {token!r} (expected name@z)")
        try:
            return (space.orbit_index(name), int(z))
        except ValueError:
            raise InputError(f"bad periodic vertex {token!r} (expected name@z)") from None
    try:
        v = int(token)
    except ValueError:
        raise InputError(f"bad vertex {token!r}") from None
    if not 0 <= v < space.vertex_count:
        raise InputError(f"vertex {v} is not in the complex")
    return v


# ---------------------------------------------------------------- commands


def cmd_validate(a, rep: Report):
    doc = _read(a.file)
    if doc.kind == "periodic":
        try:
            p = io.to_periodic(doc)
        except InvalidPeriodicData as e:
            rep.code = VIOLATED
            rep.witnesses["violation"] = {"message": str(e), "cubes": e.orbit_cubes}
            rep.text.append(f"invalid: {e}")
            return
        rep.result.update(orbits=list(p.orbits), cube_orbits=len(p.cube_orbits))
        rep.text.append(f"valid periodic complex: {p.orbit_count} orbit(s), {len(p.cube_orbits)} cube orbit(s)")
        return
    corners = [c.corners for c in doc.cubes]
    n = max((v for c in corners for v in c), default=-1) + 1
    raw = CubeComplex(n, [(v,) for v in range(n)] + _closure(corners))
    report = validate(raw)
    rep.result.update(rules_violated=sorted(report.rules()), violations=len(report.violations))
    if report.ok:
        x = build_complex(corners)
        rep.result["f_vector"] = x.f_vector()
        rep.text.append(f"valid: f-vector {x.f_vector()}")
    else:
        rep.code = VIOLATED
        rep.witnesses["violations"] = [v._asdict() for v in report.violations]
        rep.text.extend(f"{v.rule}: {v.message}" for v in report.violations)


def _closure(corners):
    out = set()
    for c in corners:
        n = len(c)
        if n and not n & (n - 1) and len(set(c)) == n:
            out |= all_faces(tuple(c))
        else:
            out.add(tuple(c))
    return list(out)


def _periodic_links(p: PeriodicComplex):
    w = materialize_window(p, max(p.z_extent, 1) + 1)
    out = {}
    for o in range(p.orbit_count):
        flag, wit = is_flag(link_of_vertex(w.complex, w.id_of((o, 0))))
        if wit is not None:
            wit = sorted(tuple(p.vertex_name(w.vertex_of(i)) for i in e) for e in wit)
        out[p.orbits[o]] = (flag, wit)
    return out, w


def cmd_links(a, rep: Report):
    _, space, _ = _load(a.file)
    name = _Names(space)
    if isinstance(space, PeriodicComplex):
        per, _ = _periodic_links(space)
    else:
        per = {v: is_flag(link_of_vertex(space, v)) for v in space.vertices}
    bad = {v: w for v, (ok, w) in per.items() if not ok}
    rep.result.update(vertices=len(per), flag=not bad)
    for v, (ok, _) in per.items():
        rep.text.append(f"vertex {name(v)}: {'flag' if ok else 'NOT flag'}")
    if bad:
        rep.code = VIOLATED
        rep.witnesses["non_flag"] = {str(name(v)): w for v, w in bad.items()}


def cmd_is_cat0(a, rep: Report):
    _, space, _ = _load(a.file)
    rng = np.random.default_rng(a.seed)
    if isinstance(space, PeriodicComplex):
        per, w = _periodic_links(space)
        bad = {v: wit for v, (ok, wit) in per.items() if not ok}
        sc = simply_connected_evidence(materialize_window(space, space.z_extent + 6).complex,
                                       samples=a.loop_samples, rng=rng)
        rep.result.update(links_flag=not bad, loops_checked=sc.checked, loops_inconclusive=len(sc.failures))
        if bad:
            rep.code = VIOLATED
            rep.witnesses["non_flag"] = bad
        elif not sc.ok:
            rep.code = INCONCLUSIVE
            rep.witnesses["uncontracted_loops"] = [f.loop for f in sc.failures[:5]]
        rep.text.append(f"links flag: {not bad}; loops contracted: {sc.checked - len(sc.failures)}/{sc.checked}")
        return
    med = is_median_graph(space)
    gro = gromov_check(space)
    sc = simply_connected_evidence(space, samples=a.loop_samples, rng=rng)
    rep.result.update(median=med.ok, links_flag=gro.ok, loops_checked=sc.checked,
                      loops_inconclusive=len(sc.failures), cat0=med.ok and gro.ok)
    rep.certificates["loops_contracted"] = sc.checked - len(sc.failures)
    if not med.ok:
        rep.witnesses["median_triple"] = med.witness
        rep.witnesses["median_count"] = med.count
    if not gro.ok:
        rep.witnesses["non_flag"] = gro.failures
    if sc.failures:
        rep.witnesses["uncontracted_loops"] = [f.loop for f in sc.failures[:5]]
    rep.code = PASS if med.ok and gro.ok else VIOLATED
    rep.text.append(f"CAT(0): {'yes' if rep.code == PASS else 'no'}")
    rep.text.append(f"  median graph: {med.ok}" + ("" if med.ok else f" (triple {med.witness})"))
    rep.text.append(f"  flag links: {gro.ok}")
    rep.text.append(f"  loops contracted: {sc.checked - len(sc.failures)}/{sc.checked}")


def cmd_walls(a, rep: Report):
    _, space, _ = _load(a.file)
    if isinstance(space, PeriodicComplex):
        cat = periodic_walls(space)
        name = _Names(space)
        rep.result.update(walls=len(cat.walls), unresolved=len(cat.unresolved), radius=cat.radius)
        rep.result["catalogue"] = [{"id": w.id, "kind": w.kind, "period": w.period,
                                    "edges": [[name(u), name(v)] for u, v in sorted(w.edges)]}
                                   for w in cat.walls]
        for w in cat.walls:
            rep.text.append(f"wall {w.id}: {w.kind}" + (f" period {w.period}" if w.period else "")
                            + f", {len(w.edges)} edge(s)")
        if cat.unresolved:
            rep.code = INCONCLUSIVE
            rep.witnesses["unresolved_edges"] = cat.unresolved
        return
    walls = compute_walls(space)
    entries = []
    for w in walls:
        si, sq = is_self_intersecting(space, w)
        sp, v = is_self_parallel(space, w)
        try:
            halfspaces(space, w)
            two = True
        except NotTwoSided:
            two = False
        entries.append({"id": w.id, "edges": w.edge_list(space), "self_intersecting": si,
                        "self_parallel": sp, "two_sided": two})
        if si:
            rep.witnesses.setdefault("self_intersecting", []).append({"wall": w.id, "square": sq})
        if sp:
            rep.witnesses.setdefault("self_parallel", []).append({"wall": w.id, "vertex": v})
        if not two:
            rep.witnesses.setdefault("one_sided", []).append(w.id)
        flags = [t for t, b in (("self-intersecting", si), ("self-parallel", sp), ("not two-sided", not two)) if b]
        rep.text.append(f"wall {w.id}: {len(w.edges)} edge(s)" + (f" [{', '.join(flags)}]" if flags else ""))
    rep.result.update(walls=len(walls), catalogue=entries)
    if rep.witnesses:
        rep.code = VIOLATED


def cmd_distance(a, rep: Report):
    _, space, _ = _load(a.file)
    u, v = _vertex(space, a.u), _vertex(space, a.v)
    if isinstance(space, PeriodicComplex):
        cert = certified_distance(space, u, v, cap=a.growth_cap)
        rep.result["distance"] = cert.value
        rep.certificates["window_radius"] = cert.radius
        rep.text.append(f"d({a.u}, {a.v}) = {cert.value} (certified at window radius {cert.radius})")
        return
    d = bfs(space, u)[v]
    if d < 0:
        rep.code = VIOLATED
        rep.result["distance"] = None
        rep.witnesses["disconnected"] = [u, v]
        rep.text.append(f"{u} and {v} lie in different components")
        return
    rep.result["distance"] = d
    try:
        by_walls = distance_by_walls(space, u, v)
    except NotTwoSided as e:
        rep.result["walls_cross_check"] = None
        rep.witnesses["one_sided_wall"] = e.wall
        rep.text.append(f"d({u}, {v}) = {d}; wall count unavailable (wall {e.wall} is not two-sided)")
        return
    rep.result["walls_cross_check"] = by_walls
    rep.certificates["separating_walls"] = by_walls
    rep.text.append(f"d({u}, {v}) = {d}; separating walls: {by_walls}")
    if by_walls != d:
        rep.code = VIOLATED
        rep.witnesses["mismatch"] = {"bfs": d, "walls": by_walls}


def cmd_classify(a, rep: Report):
    _, space, g = _load(a.file, need_aut=True)
    name = _Names(space)
    c = classify(space, g, a.power_bound)
    rep.result.update(kind=c.kind, translation_length=c.translation_length, power=c.power)
    if c.kind == "Elliptic":
        rep.certificates["fixed_vertex"] = name(c.fixed_vertex)
        rep.text.append(f"Elliptic: fixes vertex {name(c.fixed_vertex)}")
    elif c.kind == "Hyperbolic":
        rep.certificates["axis"] = [name(v) for v in c.axis.alpha]
        rep.text.append(f"Hyperbolic: |g| = {c.translation_length}, axis segment "
                        + " ".join(str(name(v)) for v in c.axis.alpha))
    elif c.kind == "InversionDetected":
        rep.code = VIOLATED
        rep.witnesses["inversion"] = {"power": c.power, "wall": getattr(c.wall, "id", None),
                                      "swapped": [name(v) for v in c.witness]}
        rep.text.append(f"InversionDetected: g^{c.power} inverts wall {c.wall.id}, "
                        f"sending {name(c.witness[0])} to {name(c.witness[1])}")
    else:
        rep.code = INCONCLUSIVE
        rep.witnesses["diagnostics"] = c.diagnostics
        rep.text.append(f"Undecided: {c.diagnostics.get('reason', 'see diagnostics')}")


def cmd_minset(a, rep: Report):
    _, space, g = _load(a.file, need_aut=True)
    name = _Names(space)
    periodic = isinstance(space, PeriodicComplex)
    length, arg = translation_length(space, g)
    rep.result["translation_length"] = length
    if length == 0:
        fixed = fixed_vertices(space, g)
        members = [space.orbits[o] for o, _ in fixed] if periodic else fixed
        rep.result["fixed_set"] = members
        rep.text.append(f"|g| = 0; Min(g) is the fixed set: {members}")
        return
    m = min_set(space, g)
    if periodic:
        rep.result["min_orbits"] = [space.orbits[o] for o in sorted(m.members)]
        rep.text.append(f"|g| = {length}; Min(g) orbits: {' '.join(rep.result['min_orbits'])}")
    else:
        rep.result["min_vertices"] = sorted(m.members)
        rep.text.append(f"|g| = {length}; Min(g) vertices: {sorted(m.members)}")
    rep.certificates["displacement"] = {str(name(v)): d for v, d in displacement_profile(space, g).items()}


def cmd_verify_min(a, rep: Report):
    _, space, g = _load(a.file, need_aut=True)
    name = _Names(space)
    try:
        m = min_set(space, g)
    except NotHyperbolic as e:
        raise InputError(f"verify-min needs |g| > 0: {e}") from None
    spread = a.spread if a.spread is not None else default_spread(m.translation_length)
    conv = verify_min_convex(space, g, spread=spread, m=m)
    cat = verify_min_cat0(space, g, loop_samples=a.loop_samples, spread=spread, seed=a.seed, m=m)
    rep.result.update(translation_length=m.translation_length, spread=spread, convex=conv.ok,
                      convex_pairs=conv.checked_pairs, cat0=cat.ok, loops_checked=cat.loops_checked,
                      loops_inconclusive_first_pass=cat.loops_inconclusive_first_pass,
                      median=cat.median_ok)
    rep.certificates["links"] = {str(name(v)): {k: e[k] for k in ("flag", "contained", "full", "simplicial")}
                                 for v, e in cat.links.items()}
    if conv.witness:
        rep.witnesses["non_convex"] = [name(t) for t in conv.witness]
    if conv.isometry_failures:
        rep.witnesses["isometry_failures"] = conv.isometry_failures
    if cat.median_witness:
        rep.witnesses["median_triple"] = [name(t) for t in cat.median_witness]
    if cat.loops_failed:
        rep.witnesses["uncontracted_loops"] = [[name(t) for t in lp] for lp in cat.loops_failed[:5]]
    bad_links = {k: v for k, v in cat.links.items()
                 if not (v["flag"] and v["contained"] and v["full"] and v["simplicial"])}
    if bad_links:
        rep.witnesses["links"] = {str(name(k)): v for k, v in bad_links.items()}
    if not conv.ok or bad_links or not cat.median_ok:
        rep.code = VIOLATED
    elif cat.loops_failed:
        rep.code = INCONCLUSIVE
    rep.text.append(f"Min(g) convex at spread {spread}: {conv.ok} ({conv.checked_pairs} pairs)")
    rep.text.append(f"Min(g) CAT(0) evidence: {cat.ok} (links {len(cat.links)}, "
                    f"loops {cat.loops_checked - len(cat.loops_failed)}/{cat.loops_checked}, medians {cat.median_ok})")


def cmd_axis(a, rep: Report):
    _, space, g = _load(a.file, need_aut=True)
    name = _Names(space)
    try:
        m = min_set(space, g)
    except NotHyperbolic:
        rep.code = VIOLATED
        rep.witnesses["fixed_vertex"] = name(fixed_vertices(space, g)[0])
        rep.text.append("no axis: g fixes a vertex")
        return
    axis = build_axis(space, g, m=m)
    r = verify_axis(space, g, axis, m)
    rep.result.update(translation_length=m.translation_length, segment=[name(v) for v in axis.alpha],
                      checked_pairs=r.checked_pairs, verified=r.ok)
    rep.text.append("axis segment: " + " ".join(str(name(v)) for v in axis.alpha))
    rep.text.append(f"verified {r.checked_pairs} pair(s): {r.ok}")
    if not r.ok:
        rep.code = VIOLATED
        rep.witnesses.update(failures=r.failures, outside_min=r.outside_min)


def cmd_contract_loop(a, rep: Report):
    _, space, _ = _load(a.file)
    if isinstance(space, PeriodicComplex):
        verts = [_vertex(space, t) for t in a.loop]
        radius = max(abs(z) for _, z in verts) + len(verts) + 1
        w = materialize_window(space, radius)
        x, ids, label = w.complex, [w.id_of(v) for v in verts], lambda i: space.vertex_name(w.vertex_of(i))
    else:
        x, ids, label = space, [_vertex(space, t) for t in a.loop], lambda i: i
    if len(ids) < 2 or ids[0] != ids[-1]:
        ids = ids + ids[:1]
    for s, t in zip(ids, ids[1:]):
        if s != t and not x.has_edge(s, t):
            raise InputError(f"{label(s)} and {label(t)} are not adjacent")
    budget = a.budget if a.budget is not None else 10 * len(ids) ** 2
    res = contract_loop(x, ids, budget)
    if isinstance(res, ContractionCertificate):
        moves = [{"kind": mv.kind, "index": mv.index,
                  "replacement": None if mv.replacement is None else label(mv.replacement)}
                 for mv in res.moves]
        rep.result.update(contractible=True, moves=len(moves))
        rep.certificates["moves"] = moves
        rep.text.append(f"contracted in {len(moves)} move(s)")
        for mv in moves:
            rep.text.append(f"  {mv['kind']} at {mv['index']}" +
                            (f" -> {mv['replacement']}" if mv["replacement"] is not None else ""))
    else:
        rep.code = INCONCLUSIVE
        rep.result.update(contractible=None, explored=res.explored, exhausted=res.exhausted)
        rep.witnesses["shortest"] = [label(i) for i in res.shortest]
        rep.text.append(f"inconclusive after {res.explored} state(s); shortest word "
                        + " ".join(str(label(i)) for i in res.shortest))


def cmd_gen(a, rep: Report):
    params = {}
    for kv in a.param:
        k, sep, v = kv.partition("=")
        if not sep:
            raise InputError(f"bad --param {kv!r} (expected key=value)")
        params[k] = v.lower() == "true" if v.lower() in ("true", "false") else int(v) if v.lstrip("-").isdigit() else v
    try:
        if a.family in gen.PERIODIC_FAMILIES:
            p, g = gen.generate_periodic(a.family, a.seed, **params)
            if a.family == "periodic-glide" and params.get("power"):
                g = g.power(int(params["power"]))
            doc = io.from_periodic(p, g)
        else:
            doc = io.from_complex(gen.generate(gen.GenSpec.of(a.family, a.seed, **params)))
    except (ValueError, TypeError) as e:
        raise InputError(str(e)) from None
    text = io.serialize(doc)
    if a.output:
        Path(a.output).write_text(text)
    rep.result.update(family=a.family, seed=a.seed, params=params, document=text)
    rep.text.append(text.rstrip("\n") if not a.output else f"wrote {a.output}")


COMMANDS = {
    "validate": (cmd_validate, "check the gluing rules of a complex"),
    "links": (cmd_links, "vertex links and the flag condition"),
    "is-cat0": (cmd_is_cat0, "median, link and loop checks"),
    "walls": (cmd_walls, "walls and their pathologies"),
    "distance": (cmd_distance, "combinatorial distance between two vertices"),
    "classify": (cmd_classify, "elliptic / hyperbolic / inversion"),
    "minset": (cmd_minset, "minimal displacement set of the declared automorphism"),
    "verify-min": (cmd_verify_min, "convexity and CAT(0) evidence for Min(g)"),
    "axis": (cmd_axis, "combinatorial axis of a hyperbolic automorphism"),
    "contract-loop": (cmd_contract_loop, "null-homotopy certificate for a closed path"),
    "gen": (cmd_gen, "generate a test complex"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON report")
    common.add_argument("--power-bound", type=int, default=8, metavar="K")
    common.add_argument("--spread", type=int, default=None, metavar="B", help="default 3|g|+4")
    common.add_argument("--loop-samples", type=int, default=100, metavar="N")
    common.add_argument("--growth-cap", type=int, default=None, help="window vertex cap (default 10^5)")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="cxc", description="CAT(0) cube complex toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name == "gen":
            sp.add_argument("family", choices=sorted(gen.FINITE_FAMILIES + gen.PERIODIC_FAMILIES
                                                     + gen.NONEXAMPLES + ("flipped-strip",)))
            sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
            sp.add_argument("-o", "--output")
            continue
        sp.add_argument("file", help="a .cxc file, or - for standard input")
        if name == "distance":
            sp.add_argument("u")
            sp.add_argument("v")
        elif name == "contract-loop":
            sp.add_argument("loop", nargs="+", help="vertices of the closed path")
            sp.add_argument("--budget", type=int, default=None)
    return ap


def run_cli(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else PASS
    if a.growth_cap is None:
        a.growth_cap = default_growth_cap()
    rep = Report(a.command, getattr(a, "file", None))
    t0 = time.perf_counter()
    try:
        COMMANDS[a.command][0](a, rep)
    except InputError as e:
        rep.code = INPUT_ERROR
        rep.result["error"] = str(e)
        rep.text = [f"error: {e}"]
    except (NotAutomorphism, NotHyperbolic, NotClosed, Disconnected) as e:
        rep.code = INPUT_ERROR
        rep.result["error"] = str(e)
        rep.text = [f"error: {e}"]
    except (GrowthCapExceeded, Unresolved) as e:
        rep.code = INCONCLUSIVE
        rep.result["error"] = str(e)
        rep.text = [f"inconclusive: {e}"]
    rep.timings["total_s"] = round(time.perf_counter() - t0, 6)
    if a.json:
        json.dump(rep.as_json(), stdout, indent=2, sort_keys=True)
        stdout.write("\n")
    else:
        stdout.write("\n".join(rep.text) + "\n")
    return rep.code


def main() -> None:
    sys.exit(run_cli())
