import io

import pytest

from ciinfer.exceptions import ParseError
from ciinfer.io import format_instance, parse_instance, parse_instance_file

from conftest import DATA


def test_golden_fixture():
    universe, ants, queries = parse_instance_file(DATA / "example410.ci")
    assert universe.names == ("a", "b", "c", "d")
    assert len(ants) == 4 and len(queries) == 1
    assert str(queries[0]) == "c ; d |"


def test_stream_and_roundtrip():
    inst = parse_instance_file(io.StringIO((DATA / "example43.ci").read_text()))
    text = inst.dumps("note")
    assert text.startswith("# note\nvars a b c d\n")
    assert parse_instance(text) == inst
    assert format_instance(*inst) == inst.dumps()


def test_comments_and_blank_lines():
    inst = parse_instance("\n# hi\n  vars x y z   # names\n\nassume x ; y | z\nquery x;z|\n")
    assert inst.universe.names == ("x", "y", "z")
    assert str(inst.queries[0]) == "x ; z |"


@pytest.mark.parametrize("text,message,line,column", [
    ("# only a comment\n", "no vars declaration", None, None),
    ("vars a b\nvars a b\nquery a ; b |\n", "duplicate vars line", 2, 1),
    ("vars a b\nassume a ; b |\n", "no query statements", None, None),
    ("vars a b c d\nquery a ; e |\n", "unknown variable 'e'", 2, 11),
    ("query a ; b |\nvars a b\n", "before the vars declaration", 1, 1),
    ("vars a b\nsuppose a ; b |\n", "unknown keyword", 2, 1),
    ("vars a\nquery a ; a |\n", "at least 2 variables", 1, 1),
    ("vars a b-c\n", "invalid variable name", 1, 8),
    ("vars a b\n  query a b |\n", "unexpected '|'", 2, 13),
])
def test_errors(text, message, line, column):
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert message in str(err.value)
    assert (err.value.line, err.value.column) == (line, column)
