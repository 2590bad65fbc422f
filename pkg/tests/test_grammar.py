import pytest
from hypothesis import given
from hypothesis import strategies as st

from extkoszul.grammar import ParseError, format_element, parse, parse_label
from extkoszul.koszul import Element, KoszulIndex, apply_dh


def test_basic_forms():
    assert parse("e[1,2]", 2) == Element.e(2, 1, 2)
    assert parse("-1*e[1,3]*x[0,4,0]", 3) == Element.basis(KoszulIndex((1, 3), (0, 4, 0)), -1)
    assert parse("e[2,1]", 2) == Element.e(2, 1, 2).scale(-1)
    assert parse("e[1]*e[1]", 2).is_zero()
    assert parse("0", 2).is_zero()
    assert parse(" 3 ", 2) == Element.unit(2).scale(3)
    assert parse("x[2]", 3) == Element.x((0, 1, 0))


def test_whitespace_is_insignificant():
    assert parse(" - 2 * e [ 1 , 2 ] * x[ 1,0 ] + e[1]", 2) == parse("-2*e[1,2]*x[1,0]+e[1]", 2)


def test_generators():
    assert parse("a[1,2]", 2, generators=True) == apply_dh(Element.e(2, 1, 2))
    with pytest.raises(ParseError):
        parse("a[1,2]", 2)
    with pytest.raises(ParseError):
        parse("a[1]", 2, generators=True)


@pytest.mark.parametrize(
    "text,pos",
    [("e[1,2", 5), ("e[1,,2]", 4), ("2*", 2), ("e[1]+?", 5), ("e[5]", 2), ("x[1,2]", 0), ("", 0), ("e[1] e[2]", 5)],
)
def test_error_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse(text, 3)
    assert info.value.position == pos
    assert info.value.caret().splitlines()[-1] == " " * pos + "^"


def test_parse_label():
    assert parse_label("e[1,3]*x[0,4,0]", 3) == (1, KoszulIndex((1, 3), (0, 4, 0)))
    with pytest.raises(ParseError):
        parse_label("e[1]+e[2]", 2)


labels = st.builds(
    KoszulIndex,
    st.sets(st.integers(1, 3)).map(lambda s: tuple(sorted(s))),
    st.tuples(*[st.integers(0, 4)] * 3),
)
elements = st.dictionaries(labels, st.integers(-9, 9), max_size=5).map(lambda d: Element(3, d))


@given(elements)
def test_round_trip(xi):
    assert parse(format_element(xi), 3) == xi
    assert format_element(parse(format_element(xi), 3)) == format_element(xi)
