import numpy as np
import pytest
from helpers import laurent_dim, random_pair, resultant_factors, tile_pairs, try_build
from hypothesis import given, settings
from hypothesis import strategies as st

from tilekit.builder import code_params
from tilekit.linalg import char_poly, factor, is_identity, mat_pow, matrix_order
from tilekit.poly import LaurentPoly, TilePair, parse_poly
from tilekit.quotient import (
    QuotientAtInfinity,
    QuotientNotFinite,
    bivariate_gcd,
    check_algebraic_to,
    check_combinatorial_to,
    power_relation,
    quotient_ring,
    window_codim,
)


def P(text):
    return parse_poly(text, 2)


def test_running_dimension_and_basis(running_q):
    assert running_q.dim == 8
    assert running_q.basis == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0), (2, 1), (3, 1)]
    assert running_q.window == 12


def test_generators_reduce_to_zero(running_q, running_tiles):
    assert not running_q.reduce(running_tiles.f).any()
    assert not running_q.reduce(running_tiles.g).any()
    assert running_q.one().any()


def test_evaluate_generators(running_q, running_tiles):
    assert running_q.evaluate(running_tiles.f).is_zero()
    assert running_q.evaluate(running_tiles.g).is_zero()
    assert running_q.Mx @ running_q.My == running_q.My @ running_q.Mx


def test_char_poly_against_resultant(running_q, running_tiles):
    # an independent route: the x-eigenvalues are the roots of Res_y(f, g)
    ours = sorted(p.exponents() for p in factor(char_poly(running_q.Mx)))
    assert ours == resultant_factors(running_tiles.f, running_tiles.g, "y")
    assert ours == [[0, 2, 3], [0, 2, 3, 4, 5]]
    theirs_y = sorted(p.exponents() for p in factor(char_poly(running_q.My)))
    assert theirs_y == resultant_factors(running_tiles.f, running_tiles.g, "x")


def test_orders_and_power_relation(running_q):
    assert matrix_order(running_q.Mx) == 217
    assert matrix_order(running_q.My) == 217
    t = power_relation(running_q, running_q.reduce(P("y")), axis=0)
    assert t == 150
    assert np.array_equal(mat_pow(running_q.Mx, t).dot_vec(running_q.one()), running_q.reduce(P("y")))
    # 149 is not a solution in this ring
    assert not np.array_equal(mat_pow(running_q.Mx, 149).dot_vec(running_q.one()), running_q.reduce(P("y")))


def test_laurent_reduction(running_q):
    inv_x = running_q.reduce(LaurentPoly.monomial((-1, 0)))
    assert np.array_equal(running_q.Mx.dot_vec(inv_x), running_q.one())
    assert np.array_equal(running_q.reduce(LaurentPoly.monomial((-1, 0))),
                          running_q.inverse_mult(0).dot_vec(running_q.one()))


@given(st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), min_size=1, max_size=6))
def test_two_reduction_routes_agree(running_q, terms):
    p = LaurentPoly.from_terms(terms, 2)
    window = running_q.reduce_window(p)
    via_ops = np.zeros(running_q.dim, np.uint8)
    for m in p.support:
        via_ops ^= running_q.monomial_class(m)
    assert np.array_equal(window, via_ops)


@given(st.lists(st.tuples(st.integers(-4, 14), st.integers(-4, 14)), max_size=5))
def test_multiplication_operator(running_q, terms):
    p = LaurentPoly.from_terms(terms, 2)
    xp = p * LaurentPoly.monomial((1, 0))
    assert np.array_equal(running_q.Mx.dot_vec(running_q.reduce(p)), running_q.reduce(xp))


def test_unit_ideal():
    q = quotient_ring(P("1"), P("x^2+y^2"), 2)
    assert q.dim == 0


def test_toy_dimension(toy_tiles, toy_code):
    q = quotient_ring(toy_tiles.f, toy_tiles.g, 1)
    assert q.dim == code_params(toy_code).k == 2


def test_shared_factor_rejected():
    with pytest.raises(QuotientNotFinite, match="share"):
        quotient_ring(P("1+x+x*y"), P("1+x+x*y"), 1)


def test_points_at_infinity_flagged():
    # x = 1 forces 1 = 0 on the torus, but the window sees the boundary points
    with pytest.raises(QuotientAtInfinity):
        quotient_ring(P("x*y+1"), P("x*y+x+1"), 1)


def test_window_codim_is_bezout_count(running_tiles):
    for N in (6, 8, 12):
        assert window_codim([running_tiles.f, running_tiles.g], N) == 8


def test_bivariate_gcd():
    a, b, c = P("1+x*y"), P("1+x+y^2"), P("x+y")
    assert bivariate_gcd(a * c, b * c) == c
    assert bivariate_gcd(a, b) == P("1")
    assert bivariate_gcd(P("x*y+x"), P("x^2+x")) in (P("x"), P("x") * P("1"))


def test_algebraic_to_running(running_tiles):
    rep = check_algebraic_to(running_tiles.f, running_tiles.g, 2)
    assert rep.passed and rep.dim == 8 and rep.mx_invertible and rep.my_invertible
    assert set(rep.orientation_dims.values()) == {8}


@pytest.mark.parametrize(
    "f,g,D",
    [
        ("1+x+x*y", "1+x+x*y", 1),       # f = g
        ("x+x*y", "x+x^2", 2),           # shared factor x in the polynomial ring
        ("1+x", "1+y", 1),               # a single torus point: dim 1, not 2
    ],
)
def test_algebraic_to_failures(f, g, D):
    assert not check_algebraic_to(P(f), P(g), D).passed


def test_combinatorial_to(running_tiles, toy_tiles):
    assert all(check_combinatorial_to(running_tiles, 16).values())
    assert all(check_combinatorial_to(toy_tiles, 12).values())
    same = TilePair.parse("1+x+x*y", "1+x+x*y")
    assert not all(check_combinatorial_to(same, 8).values())
    with pytest.raises(ValueError):
        check_combinatorial_to(running_tiles, 11)


def test_to_verdicts_agree_on_random_pairs():
    # the two TO tests are independent routes; report any divergence
    import random

    rng = random.Random(5)
    for _ in range(30):
        tp = random_pair(rng, rng.choice([1, 2]))
        alg = check_algebraic_to(tp.f, tp.g, tp.D).passed
        comb = all(check_combinatorial_to(tp, 4 * (tp.D + 1) + 4).values())
        assert alg == comb, (str(tp.f), str(tp.g))


@settings(max_examples=30)
@given(tile_pairs())
def test_dimension_matches_code_rank(tiles):
    try:
        q = quotient_ring(tiles.f, tiles.g, tiles.D)
    except QuotientNotFinite:
        return
    code = try_build(tiles, 4 * tiles.D + 3, 4 * tiles.D + 3)
    assert code_params(code).k == q.dim


@settings(max_examples=15)
@given(tile_pairs())
def test_to_pairs_match_laurent_oracle(tiles):
    rep = check_algebraic_to(tiles.f, tiles.g, tiles.D)
    if rep.passed:
        assert laurent_dim(tiles.f, tiles.g) == rep.dim == 2 * tiles.D**2
