"""The ``.cxc`` text format: parser, canonical serializer and conversions.

Grammar, one declaration per line::

    cxc 1 finite | cxc 1 periodic
    cube <id> : v0 v1 ... v_{2^n-1}          (finite, binary-mask corner order)
    orbit <name>                              (periodic)
    pcube <id> : (<orbit>,<0|1>) ...          (periodic)
    aut perm <cycles>                         (finite)
    aut shift <t> perm <orbit-cycles>         (periodic)
    # comment

Cycles are written ``(0 1 2)(3 4)``; the identity is ``()``.  The canonical
form drops comments and blank lines, sorts declarations (orbits, cubes by
natural id order, then the automorphism), uses single spaces and ends with a
newline.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .complex import CubeComplex, all_faces, build_complex
from .isometry import FiniteAutomorphism, ShiftAutomorphism
from .periodic import PeriodicComplex, build_periodic, normalize

VERSION = 1
KINDS = ("finite", "periodic")


class FormatError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class FormatSyntaxError(FormatError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        found = found or "end of line"
        super().__init__(line, col, f"expected {expected}, found {found!r}")
        self.expected = expected
        self.found = found


class UnknownOrbit(FormatError):
    def __init__(self, line: int, col: int, name: str):
        super().__init__(line, col, f"unknown orbit {name!r}")
        self.name = name


class ArityError(FormatError):
    def __init__(self, line: int, col: int, count: int):
        super().__init__(line, col, f"{count} corners is not a power of two")
        self.count = count


class DuplicateDeclaration(FormatError):
    def __init__(self, line: int, col: int, name: str):
        super().__init__(line, col, f"duplicate declaration {name!r}")
        self.name = name


@dataclass(frozen=True)
class OrbitDecl:
    name: str
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class CubeDecl:
    id: str
    corners: tuple  # ints (finite) or (orbit name, 0|1) pairs (periodic)
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class AutDecl:
    cycles: tuple  # tuple of tuples of ints or orbit names
    shift: int | None = None  # None for a finite permutation
    pos: tuple = field(default=(0, 0), compare=False)


def _natural(s: str) -> tuple:
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.split(r"(\d+)", s) if t)


def _canon_cycles(cycles, key) -> tuple:
    out = []
    for c in cycles:
        if len(c) < 2:
            continue
        i = min(range(len(c)), key=lambda j: key(c[j]))
        out.append(tuple(c[i:]) + tuple(c[:i]))
    return tuple(sorted(out, key=lambda c: key(c[0])))


@dataclass(eq=False)
class Document:
    kind: str = "finite"
    version: int = VERSION
    orbits: list = field(default_factory=list)
    cubes: list = field(default_factory=list)
    aut: AutDecl | None = None

    def _key(self):
        ck = _natural if self.kind == "periodic" else (lambda v: v)
        aut = None
        if self.aut is not None:
            aut = (self.aut.shift, _canon_cycles(self.aut.cycles, ck))
        return (self.kind, self.version,
                tuple(sorted(o.name for o in self.orbits)),
                tuple(sorted(((c.id, c.corners) for c in self.cubes), key=lambda t: _natural(t[0]))),
                aut)

    def __eq__(self, other):
        return isinstance(other, Document) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"[ \t]*(?:(?P<word>-?[A-Za-z0-9_]+)|(?P<punct>[:(),])|(?P<bad>[^ \t]))")
_IDENT = re.compile(r"[A-Za-z0-9_]+")
_UINT = re.compile(r"[0-9]{1,18}")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"-?[0-9]{1,18}")


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[tuple[str, int]] = []  # (text, 1-based column)
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:  # only trailing blanks left
                break
            tok = m.group(m.lastgroup)
            if m.lastgroup == "bad" and tok == "#":
                break
            self.toks.append((tok, m.start(m.lastgroup) + 1))
            pos = m.end()
        self.end_col = len(text.rstrip(" \t")) + 1
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0] if self.i < len(self.toks) else ""

    def col(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end_col

    def fail(self, expected: str):
        raise FormatSyntaxError(self.lineno, self.col(), expected, self.peek())

    def take(self, pattern: re.Pattern | str, expected: str) -> tuple[str, int]:
        tok = self.peek()
        ok = tok == pattern if isinstance(pattern, str) else bool(tok) and pattern.fullmatch(tok)
        if not ok:
            self.fail(expected)
        col = self.col()
        self.i += 1
        return tok, col

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def finish(self):
        if not self.done():
            self.fail("end of line")


def _cycles(ln: _Line, item: re.Pattern, what: str) -> list[tuple]:
    cycles = []
    seen = set()
    ln.take("(", "'('")
    while True:
        cyc = []
        while ln.peek() != ")":
            tok, col = ln.take(item, what + " or ')'")
            if tok in seen:
                raise FormatSyntaxError(ln.lineno, col, "distinct cycle entries", tok)
            seen.add(tok)
            cyc.append((tok, col))
        ln.take(")", "')'")
        cycles.append(cyc)
        if ln.done():
            return cycles
        ln.take("(", "'(' or end of line")


def _parse_lines(text: str) -> Document:
    lines = text.split("\n")
    header = None
    doc = Document()
    ids: set[str] = set()
    pending_orbits: list[tuple[str, int, int]] = []  # (name, line, col) to resolve at the end
    for lineno, raw in enumerate(lines, 1):
        ln = _Line(raw.rstrip("\r"), lineno)
        if ln.done():
            continue
        if header is None:
            ln.take("cxc", "'cxc' header")
            ver, col = ln.take(_INT, "format version")
            if ver != str(VERSION):
                raise FormatSyntaxError(lineno, col, f"version {VERSION}", ver)
            kind, _ = ln.take(re.compile("finite|periodic"), "'finite' or 'periodic'")
            ln.finish()
            header = kind
            doc.kind = kind
            continue
        kw, kcol = ln.peek(), ln.col()
        periodic = header == "periodic"
        if kw == "cube" and not periodic:
            ln.take("cube", "'cube'")
            cid, col = ln.take(_IDENT, "cube id")
            ln.take(":", "':'")
            corners = []
            while not ln.done():
                v, _ = ln.take(_UINT, "vertex id")
                corners.append(int(v))
            if not corners:
                ln.fail("vertex id")
            if len(corners) & (len(corners) - 1):
                raise ArityError(lineno, kcol, len(corners))
            if cid in ids:
                raise DuplicateDeclaration(lineno, col, cid)
            ids.add(cid)
            doc.cubes.append(CubeDecl(cid, tuple(corners), (lineno, kcol)))
        elif kw == "orbit" and periodic:
            ln.take("orbit", "'orbit'")
            name, col = ln.take(_NAME, "orbit name")
            ln.finish()
            if any(o.name == name for o in doc.orbits):
                raise DuplicateDeclaration(lineno, col, name)
            doc.orbits.append(OrbitDecl(name, (lineno, kcol)))
        elif kw == "pcube" and periodic:
            ln.take("pcube", "'pcube'")
            cid, col = ln.take(_IDENT, "cube id")
            ln.take(":", "':'")
            corners = []
            while not ln.done():
                ln.take("(", "'('")
                name, ncol = ln.take(_NAME, "orbit name")
                ln.take(",", "','")
                z, _ = ln.take(re.compile("[01]"), "offset 0 or 1")
                ln.take(")", "')'")
                pending_orbits.append((name, lineno, ncol))
                corners.append((name, int(z)))
            if not corners:
                ln.fail("'('")
            if len(corners) & (len(corners) - 1):
                raise ArityError(lineno, kcol, len(corners))
            if cid in ids:
                raise DuplicateDeclaration(lineno, col, cid)
            ids.add(cid)
            doc.cubes.append(CubeDecl(cid, tuple(corners), (lineno, kcol)))
        elif kw == "aut":
            ln.take("aut", "'aut'")
            if doc.aut is not None:
                raise DuplicateDeclaration(lineno, kcol, "aut")
            shift = None
            if periodic:
                ln.take("shift", "'shift'")
                shift = int(ln.take(_INT, "integer shift")[0])
            ln.take("perm", "'perm'")
            if periodic:
                raw_cycles = _cycles(ln, _NAME, "orbit name")
                for cyc in raw_cycles:
                    pending_orbits.extend((t, lineno, c) for t, c in cyc)
                cycles = tuple(tuple(t for t, _ in cyc) for cyc in raw_cycles)
            else:
                raw_cycles = _cycles(ln, _UINT, "vertex id")
                cycles = tuple(tuple(int(t) for t, _ in cyc) for cyc in raw_cycles)
            doc.aut = AutDecl(tuple(c for c in cycles if c), shift, (lineno, kcol))
        else:
            ln.fail("'orbit', 'pcube' or 'aut'" if periodic else "'cube' or 'aut'")
    if header is None:
        raise FormatSyntaxError(len(lines), 1, "'cxc' header", "end of input")
    declared = {o.name for o in doc.orbits}
    for name, lineno, col in pending_orbits:
        if name not in declared:
            raise UnknownOrbit(lineno, col, name)
    return doc


def parse(text: str | bytes) -> Document:
    """Parse ``.cxc`` text (or UTF-8 bytes); raises a positioned FormatError."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            before = bytes(text[: e.start])
            line = before.count(b"\n") + 1
            col = e.start - (before.rfind(b"\n") + 1) + 1
            raise FormatSyntaxError(line, col, "UTF-8 text", repr(bytes(text[e.start:e.start + 1]))) from None
    return _parse_lines(text)


# ---------------------------------------------------------------- serializing


def _fmt_cycles(cycles) -> str:
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(t) for t in c) + ")" for c in cycles)


def serialize(doc: Document) -> str:
    kind, _, orbits, cubes, aut = doc._key()
    out = [f"cxc {doc.version} {kind}"]
    out += [f"orbit {name}" for name in orbits]
    for cid, corners in cubes:
        if kind == "periodic":
            out.append(f"pcube {cid} : " + " ".join(f"({o},{z})" for o, z in corners))
        else:
            out.append(f"cube {cid} : " + " ".join(map(str, corners)))
    if aut is not None:
        shift, cycles = aut
        prefix = "aut perm" if shift is None else f"aut shift {shift} perm"
        out.append(f"{prefix} {_fmt_cycles(cycles)}")
    return "\n".join(out) + "\n"


def canonicalize(text: str | bytes) -> str:
    return serialize(parse(text))


# ---------------------------------------------------------------- conversions


def to_complex(doc: Document) -> CubeComplex:
    if doc.kind != "finite":
        raise ValueError("not a finite document")
    return build_complex([c.corners for c in doc.cubes])


def to_periodic(doc: Document) -> PeriodicComplex:
    """Orbit indices follow the canonical (sorted) orbit order."""
    if doc.kind != "periodic":
        raise ValueError("not a periodic document")
    names = sorted((o.name for o in doc.orbits), key=_natural)
    index = {n: i for i, n in enumerate(names)}
    return build_periodic(names, [tuple((index[o], z) for o, z in c.corners) for c in doc.cubes])


def to_space(doc: Document):
    return to_periodic(doc) if doc.kind == "periodic" else to_complex(doc)


def to_automorphism(doc: Document, space):
    """The declared automorphism of ``space``, or None when absent."""
    if doc.aut is None:
        return None
    if doc.kind == "periodic":
        index = {n: i for i, n in enumerate(space.orbits)}
        sigma = list(range(len(space.orbits)))
        for cyc in doc.aut.cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                sigma[index[a]] = index[b]
        return ShiftAutomorphism(tuple(sigma), doc.aut.shift)
    n = space.vertex_count
    for cyc in doc.aut.cycles:
        for v in cyc:
            if v >= n:
                raise FormatError(*doc.aut.pos, f"vertex {v} is not in the complex")
    return FiniteAutomorphism.from_cycles(n, doc.aut.cycles)


def _perm_cycles(images) -> list[list[int]]:
    seen = set()
    cycles = []
    for s in range(len(images)):
        if s in seen or images[s] == s:
            continue
        cyc, v = [], s
        while v not in seen:
            seen.add(v)
            cyc.append(v)
            v = images[v]
        cycles.append(cyc)
    return cycles


def from_complex(x: CubeComplex, g: FiniteAutomorphism | None = None) -> Document:
    """Document listing the maximal cubes of ``x`` (ids ``c0, c1, ...``)."""
    cubes = [CubeDecl(f"c{i}", c) for i, c in enumerate(x.maximal_cubes)]
    aut = None if g is None else AutDecl(tuple(map(tuple, _perm_cycles(g.images))))
    return Document("finite", VERSION, [], cubes, aut)


def from_periodic(p: PeriodicComplex, g: ShiftAutomorphism | None = None) -> Document:
    # only maximal orbit cubes are written; faces are recovered by closure
    faces = {normalize(f)[0] for c in p.cube_orbits for f in all_faces(c) if f != c}
    maximal = [c for c in p.cube_orbits if c not in faces]
    names = p.orbits
    cubes = [CubeDecl(f"c{i}", tuple((names[o], z) for o, z in c)) for i, c in enumerate(maximal)]
    orbits = [OrbitDecl(n) for n in names]
    aut = None
    if g is not None:
        cycles = tuple(tuple(names[i] for i in cyc) for cyc in _perm_cycles(g.sigma))
        aut = AutDecl(cycles, g.shift)
    return Document("periodic", VERSION, orbits, cubes, aut)

