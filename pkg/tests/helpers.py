"""Shared strategies and independent oracles for the test suite."""

import itertools

import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from tilekit.builder import BuildError, build_tile_code
from tilekit.linalg import BitMatrix, rank
from tilekit.poly import LaurentPoly, TilePair, corners_supported, tile_problems


def random_pair(rng, D):
    """Random valid tile pair with support in the [0, D]^2 box."""
    box = [(a, b) for a in range(D + 1) for b in range(D + 1)]
    while True:
        f = LaurentPoly.from_terms([m for m in box if rng.random() < 0.4], 2)
        g = LaurentPoly.from_terms([m for m in box if rng.random() < 0.4], 2)
        if not tile_problems(f, g, D):
            return TilePair(f, g, D)


@st.composite
def tile_pairs(draw, max_D=2):
    """Valid pairs with both tiles nonzero and every box corner occupied."""
    D = draw(st.integers(1, max_D))
    box = [(a, b) for a in range(D + 1) for b in range(D + 1)]
    f = set(draw(st.sets(st.sampled_from(box))))
    g = set(draw(st.sets(st.sampled_from(box))))
    for corner in ((0, 0), (D, 0), (0, D), (D, D)):
        if corner not in f | g:
            (f if draw(st.booleans()) else g).add(corner)
    assume(f and g)
    fp, gp = LaurentPoly(frozenset(f), 2), LaurentPoly(frozenset(g), 2)
    assert not tile_problems(fp, gp, D) and all(corners_supported(fp, gp, D).values())
    return TilePair(fp, gp, D)


def try_build(tiles, L, M):
    """Build, discarding the example if the construction check rejects it."""
    try:
        return build_tile_code(tiles, L, M)
    except BuildError:
        assume(False)


def brute_distance(hx, hz, max_w):
    """Least weight of an X- or Z-logical found by trying supports in weight order."""
    n = hx.cols
    out = {}
    for kind, stabs, checks in (("X", hx, hz), ("Z", hz, hx)):
        base = rank(stabs)
        dense = checks.to_dense()
        out[kind] = None
        for w in range(1, max_w + 1):
            for supp in itertools.combinations(range(n), w):
                if dense[:, list(supp)].sum(axis=1).astype(int).__mod__(2).any():
                    continue
                v = np.zeros((1, n), np.uint8)
                v[0, list(supp)] = 1
                if rank(BitMatrix.vstack([stabs, BitMatrix.from_dense(v)])) > base:
                    out[kind] = w
                    break
            if out[kind] is not None:
                break
    return out


def _sym(p, names="x y"):
    import sympy

    from tilekit.poly import format_poly

    return sympy.sympify(format_poly(p).replace("^", "**"))


def laurent_dim(f, g):
    """dim F2[x^±1, y^±1]/(f, g) from a Groebner basis of (f, g, xu-1, yv-1); None if infinite."""
    import sympy

    x, y, u, v = sympy.symbols("x y u v")
    G = sympy.groebner([_sym(f), _sym(g), x * u - 1, y * v - 1], x, y, u, v, modulus=2, order="grevlex")
    if list(G.exprs) == [1]:
        return 0
    lms = [sympy.Poly(p, x, y, u, v).monoms(order="grevlex")[0] for p in G.exprs]
    pure = []
    for i in range(4):
        cands = [m[i] for m in lms if all(m[j] == 0 for j in range(4) if j != i)]
        if not cands:
            return None
        pure.append(min(cands))
    return sum(
        1
        for mono in itertools.product(*[range(p) for p in pure])
        if not any(all(mono[i] >= m[i] for i in range(4)) for m in lms)
    )


def resultant_factors(f, g, var="y"):
    """Irreducible factors (as exponent lists) of Res_var(f, g) over GF(2)."""
    import sympy

    x, y = sympy.symbols("x y")
    other = x if var == "y" else y
    r = sympy.resultant(_sym(f), _sym(g), y if var == "y" else x)
    _, facs = sympy.factor_list(sympy.Poly(r, other, modulus=2))
    return sorted(sorted(m[0] for m in p.monoms()) for p, _ in facs)
