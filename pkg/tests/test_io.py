import pytest
from hypothesis import given, settings, strategies as st

from cxc import io
from cxc.gen import GenSpec, generate, generate_periodic
from cxc.isometry import FiniteAutomorphism, ShiftAutomorphism

from conftest import GOLDEN

GOLDEN_FILES = sorted(GOLDEN.glob("*.cxc"))


def test_one_square():
    doc = io.parse("cxc 1 finite\ncube q : 0 1 2 3")
    assert doc.kind == "finite" and len(doc.cubes) == 1
    assert doc.cubes[0].corners == (0, 1, 2, 3)
    assert doc.cubes[0].pos == (2, 1)
    assert io.to_complex(doc).f_vector() == [4, 4, 1]


def test_periodic_line():
    doc = io.parse("cxc 1 periodic\norbit a\npcube e : (a,0) (a,1)\naut shift 1 perm ()")
    p = io.to_periodic(doc)
    assert p.orbits == ("a",)
    assert io.to_automorphism(doc, p) == ShiftAutomorphism((0,), 1)


def test_arity_error():
    with pytest.raises(io.ArityError) as e:
        io.parse("cxc 1 finite\ncube q : 0 1 2")
    assert (e.value.line, e.value.col) == (2, 1)


@pytest.mark.parametrize("text,exc,line,col", [
    ("", io.FormatSyntaxError, 1, 1),
    ("cxc 2 finite", io.FormatSyntaxError, 1, 5),
    ("cxc 1 finite\ncube q 0 1", io.FormatSyntaxError, 2, 8),
    ("cxc 1 finite\norbit a", io.FormatSyntaxError, 2, 1),
    ("cxc 1 periodic\npcube e : (b,0) (b,1)", io.UnknownOrbit, 2, 12),
    ("cxc 1 periodic\norbit a\npcube e : (a,2) (a,1)", io.FormatSyntaxError, 3, 14),
    ("cxc 1 finite\ncube q : 0 1\ncube q : 1 2", io.DuplicateDeclaration, 3, 6),
    ("cxc 1 finite\naut perm (0 1)(1 2)", io.FormatSyntaxError, 2, 16),
    ("cxc 1 finite\ncube q : 0 1 $", io.FormatSyntaxError, 2, 14),
])
def test_positioned_errors(text, exc, line, col):
    with pytest.raises(exc) as e:
        io.parse(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_bad_utf8_is_positioned():
    with pytest.raises(io.FormatSyntaxError) as e:
        io.parse(b"cxc 1 finite\ncube q : 0 \xff")
    assert (e.value.line, e.value.col) == (2, 12)


def test_serialize_empty_and_comments():
    assert io.serialize(io.Document()) == "cxc 1 finite\n"
    text = "# leading\ncxc 1 finite   \n\ncube b : 2 3 # trailing\ncube a :   0 1\n"
    assert io.canonicalize(text) == "cxc 1 finite\ncube a : 0 1\ncube b : 2 3\n"


def test_structural_equality_ignores_positions_and_order():
    a = io.parse("cxc 1 finite\ncube b : 2 3\ncube a : 0 1\naut perm (1 0)")
    b = io.parse("cxc 1 finite\n\n\ncube a : 0 1\ncube b : 2 3\naut perm (0 1)")
    assert a == b
    assert io.parse(io.serialize(a)) == a


def test_natural_id_order():
    text = "cxc 1 finite\ncube c10 : 0 1\ncube c2 : 1 2\n"
    assert io.canonicalize(text) == "cxc 1 finite\ncube c2 : 1 2\ncube c10 : 0 1\n"


@pytest.mark.parametrize("path", GOLDEN_FILES, ids=lambda p: p.name)
def test_golden_round_trip(path):
    raw = path.read_bytes()
    once = io.canonicalize(raw)
    assert io.canonicalize(once) == once
    assert io.parse(once) == io.parse(raw)


def test_complex_round_trip(corpus):
    for _, x in corpus[::5]:
        text = io.serialize(io.from_complex(x))
        assert io.to_complex(io.parse(text)) == x


def test_automorphism_round_trip():
    p, g = generate_periodic("periodic-glide")
    doc = io.parse(io.serialize(io.from_periodic(p, g)))
    assert io.to_automorphism(doc, io.to_periodic(doc)) == g
    x = generate(GenSpec.of("grid-subcomplex", 3))
    rot = FiniteAutomorphism.identity(x.vertex_count)
    doc = io.parse(io.serialize(io.from_complex(x, rot)))
    assert io.to_automorphism(doc, io.to_complex(doc)) == rot


def test_unknown_vertex_in_aut():
    doc = io.parse("cxc 1 finite\ncube q : 0 1\naut perm (0 5)")
    with pytest.raises(io.FormatError):
        io.to_automorphism(doc, io.to_complex(doc))


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_parser_is_total(data):
    try:
        doc = io.parse(data)
    except io.FormatError as e:
        assert e.line >= 1 and e.col >= 1
    else:
        text = io.serialize(doc)
        assert io.serialize(io.parse(text)) == text


LINE_PIECES = st.sampled_from(["cube", "pcube", "orbit", "aut", "perm", "shift", ":", "(", ")", ",",
                               "a", "b", "0", "1", "2", "3", "-1", "q", "#", " ", "\t"])


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(["cxc 1 finite\n", "cxc 1 periodic\n"]),
       st.lists(st.lists(LINE_PIECES, max_size=10).map(" ".join), max_size=6))
def test_fixed_point_on_token_soup(header, lines):
    try:
        doc = io.parse(header + "\n".join(lines))
    except io.FormatError:
        return
    text = io.serialize(doc)
    assert io.serialize(io.parse(text)) == text
