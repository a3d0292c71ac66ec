import math

import numpy as np
import pytest
from helpers import brute_distance

from tilekit.builder import CssCode, build_tile_code
from tilekit.distance import (
    BudgetExceeded,
    exact_distance,
    is_logical,
    logical_space,
    stochastic_upper,
)
from tilekit.linalg import BitMatrix
from tilekit.poly import TilePair


def test_toy_exact(toy_code):
    rep = exact_distance(toy_code)
    assert rep.d_exact == 3 and rep.per_kind == {"X": 3, "Z": 3}
    v = np.zeros(toy_code.n, np.uint8)
    v[rep.witness] = 1
    assert is_logical(toy_code, rep.kind, v)


def test_toy_matches_brute_force(toy_code):
    assert brute_distance(toy_code.hx, toy_code.hz, 4) == {"X": 3, "Z": 3}


def test_exact_on_other_small_codes():
    for f, g in (("1+x*y", "x+y"), ("1+x+y", "x*y+x+y")):
        code = build_tile_code(TilePair.parse(f, g), 3, 3)
        rep = exact_distance(code)
        brute = brute_distance(code.hx, code.hz, 6)
        assert rep.per_kind == brute


def test_budget(running_code):
    with pytest.raises(BudgetExceeded):
        exact_distance(running_code)


def test_no_logicals_is_infinite():
    hx = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    hz = BitMatrix.zeros(0, 3)
    code = CssCode(hx, hz, [(0, (i, 0)) for i in range(3)], [(0, (0, 0)), (0, (1, 0))], [], {})
    # k = 1 here: Z-logical Z1Z2Z3 and X-logical X1
    assert exact_distance(code).d_exact == 1
    full = BitMatrix.from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    code0 = CssCode(full, hz, [(0, (i, 0)) for i in range(3)], [(0, (i, 0)) for i in range(3)], [], {})
    rep = exact_distance(code0)
    assert rep.d_exact == math.inf and rep.as_dict()["d_exact"] == "inf"
    with pytest.raises(ValueError):
        stochastic_upper(code0, 10)


def test_stochastic_matches_exact_on_toy(toy_code):
    rep = stochastic_upper(toy_code, 10_000, seed=1)
    assert rep.d_upper == exact_distance(toy_code).d_exact


def test_reproducible(running_code):
    a = stochastic_upper(running_code, 2048, seed=7)
    b = stochastic_upper(running_code, 2048, seed=7)
    assert a.as_dict() == b.as_dict()


def test_monotone_in_trials(running_code):
    prev = math.inf
    for trials in (1, 64, 1024, 4096):
        rep = stochastic_upper(running_code, trials, seed=3)
        assert rep.d_upper <= prev
        prev = rep.d_upper
    assert prev == 12


def test_bounded_by_basis_weights(running_code, running_basis):
    lightest = min(min(running_basis.x(i).weight, running_basis.z(i).weight) for i in range(8))
    assert stochastic_upper(running_code, 256, seed=0).d_upper <= lightest


def test_witness_is_verified(running_code):
    rep = stochastic_upper(running_code, 512, seed=2)
    v = np.zeros(running_code.n, np.uint8)
    v[rep.witness] = 1
    assert is_logical(running_code, rep.kind, v)
    assert len(rep.witness) == rep.d_upper


def test_target_stops_early(running_code):
    rep = stochastic_upper(running_code, 10**6, seed=0, target=20)
    assert rep.trials < 10**6 and rep.d_upper <= 20


def test_logical_space_dimension(running_code):
    assert logical_space(running_code.hx, running_code.hz).rows == 8
    assert logical_space(running_code.hz, running_code.hx).rows == 8
