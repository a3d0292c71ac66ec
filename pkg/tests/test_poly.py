import pytest
from hypothesis import given
from hypothesis import strategies as st

from tilekit.poly import (
    LaurentPoly,
    PolySyntaxError,
    TilePair,
    corners_supported,
    degree_box,
    format_poly,
    infer_D,
    mul,
    parse_poly,
    reverse,
    tile_problems,
)


def polys(nvars=2, lo=-3, hi=3, max_terms=6):
    mono = st.tuples(*[st.integers(lo, hi)] * nvars)
    return st.lists(mono, max_size=max_terms).map(lambda ts: LaurentPoly.from_terms(ts, nvars))


def test_parse_running_pair():
    f = parse_poly("1+x^2*y+x^2*y^2", 2)
    assert f.support == {(0, 0), (2, 1), (2, 2)}
    assert parse_poly("x+x^2+y^2", 2).support == {(1, 0), (2, 0), (0, 2)}


def test_repeated_terms_cancel():
    assert not parse_poly("x+x", 2)
    assert parse_poly("x*x", 2).support == {(2, 0)}


def test_negative_exponents_and_zero():
    assert parse_poly("x^-1*y^2", 2).support == {(-1, 2)}
    assert parse_poly("0", 2) == LaurentPoly.zero(2)


@pytest.mark.parametrize("text", ["", "x+", "2*x", "x^", "q", "x**y", "x y", "z"])
def test_syntax_errors(text):
    with pytest.raises(PolySyntaxError):
        parse_poly(text, 2)


def test_error_carries_position():
    with pytest.raises(PolySyntaxError) as info:
        parse_poly("1+x+$", 2)
    assert info.value.pos == 4


@given(polys())
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), 2) == p


@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b + c) == mul(a, b) + mul(a, c)
    assert a + a == LaurentPoly.zero(2)


@given(polys(lo=0, hi=3), st.sampled_from([(0,), (1,), (0, 1)]))
def test_reverse_is_involution(p, axes):
    assert reverse(reverse(p, 3, axes), 3, axes) == p


def test_reverse_by_name():
    p = parse_poly("x^2*y", 2)
    assert reverse(p, 2, ["x"]).support == {(0, 1)}
    assert reverse(p, 2, "xy").support == {(0, 1)}


def test_degree_box():
    assert degree_box(parse_poly("x^-1+x^2*y^3", 2)) == [(-1, 2), (0, 3)]
    with pytest.raises(ValueError):
        degree_box(LaurentPoly.zero(2))


def test_tile_pair_validation():
    tp = TilePair.parse("1+x^2*y+x^2*y^2", "x+x^2+y^2")
    assert tp.D == 2
    rg, rf = tp.z_tile()
    assert rf.support == {(2, 2), (0, 1), (0, 0)}
    assert rg.support == {(1, 2), (0, 2), (2, 0)}
    with pytest.raises(ValueError):
        TilePair.parse("1+x^3", "y", 2)
    with pytest.raises(ValueError):
        TilePair.parse("1+x", "x", 1)  # no y-degree 1
    assert tile_problems(parse_poly("1", 2), parse_poly("1", 2), 0) == ["D must be positive"]


def test_infer_and_corners():
    f, g = parse_poly("1+y+x*y", 2), parse_poly("1+x+x*y", 2)
    assert infer_D([f, g]) == 1
    assert corners_supported(f, g, 1) == {"sw": True, "se": True, "nw": True, "ne": True}
    assert corners_supported(parse_poly("1", 2), parse_poly("x*y", 2), 1)["se"] is False
