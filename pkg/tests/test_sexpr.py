import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynsem.checks import MALFORMED, random_sexpr
from dynsem.errors import ParseError
from dynsem.lang.sexpr import SAtom, SList, format, format_all, format_atom, parse, parse_all


def test_positions():
    (form,) = parse_all("; header\n(run\n   CBA)")
    assert form.position == (2, 1)
    assert form[0].position == (2, 2)
    assert form[1].position == (3, 4)
    assert form.head == "run"


def test_positions_do_not_affect_equality():
    assert parse("(a b)") == SList((SAtom("a"), SAtom("b")))
    assert parse("  (a\n b)") == parse("(a b)")


def test_strings_and_escapes():
    atom = parse(r'"say \"hi\" \\ ok"')
    assert atom.text == 'say "hi" \\ ok'
    assert parse(format(atom)) == atom


def test_format_quotes_reserved_text():
    assert format_atom("plain") == "plain"
    assert format_atom("two words") == '"two words"'
    assert format_atom("") == '""'
    assert format_atom("a(b") == '"a(b"'


def test_parse_requires_single_form():
    with pytest.raises(ParseError) as exc:
        parse("(a) (b)")
    assert exc.value.position == (1, 5)
    with pytest.raises(ParseError):
        parse("   ")


def test_empty_input():
    assert parse_all("") == []
    assert parse_all("; nothing\n") == []


@pytest.mark.parametrize("text,line,col", MALFORMED)
def test_malformed_positions(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse_all(text)
    assert exc.value.position == (line, col)
    assert "^" in exc.value.excerpt
    assert str(exc.value).startswith(f"{line}:{col}:")


def test_unclosed_assert_reports_end_of_input():
    with pytest.raises(ParseError) as exc:
        parse("(assert")
    assert exc.value.position == (1, 8)


def test_unknown_escape():
    with pytest.raises(ParseError) as exc:
        parse(r'"a\n"')
    assert exc.value.position == (1, 4)


atoms = st.text(st.characters(blacklist_categories=("Cs",)), max_size=6).map(SAtom)
sexprs = st.recursive(atoms, lambda sub: st.lists(sub, max_size=4).map(lambda c: SList(tuple(c))),
                      max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(st.lists(sexprs, min_size=1, max_size=4))
def test_roundtrip(forms):
    text = format_all(forms)
    assert parse_all(text) == forms
    assert format_all(parse_all(text)) == text


def test_roundtrip_generator_from_checks():
    rng = random.Random(3)
    for _ in range(200):
        form = random_sexpr(rng)
        assert parse(format(form)) == form
