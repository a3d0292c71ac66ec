"""The quotient ring R/(f, g) and topological-order checks.

The ring is modelled on a box window of monomials ``[0, N)^nvars``: the
window modulo every shift of the generators that fits inside it.  Columns are
ordered with large monomials first so the surviving (standard) monomials sit
near the origin.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .builder import css_from_nodes
from .linalg import (
    BitMatrix,
    inverse,
    is_invertible,
    mat_pow,
    matrix_order,
    poly_divmod,
    poly_gcd,
    clmul,
    rank,
    rref,
)
from .poly import LaurentPoly, TilePair, VARIABLES, format_poly, reverse

N_MAX = 64


class QuotientNotFinite(ValueError):
    """The generators share a factor, so the quotient is infinite dimensional."""


class QuotientAtInfinity(QuotientNotFinite):
    """Window standard monomials are not closed under x, y: the curves meet off the torus."""


@dataclass
class QuotientRing:
    polys: tuple[LaurentPoly, ...]
    D: int
    window: int
    basis: list[tuple[int, ...]]
    mult: list[BitMatrix]
    _cols: dict = field(repr=False)
    _rref: np.ndarray = field(repr=False)
    _pivots: np.ndarray = field(repr=False)
    _inv: dict = field(default_factory=dict, repr=False)

    @property
    def nvars(self) -> int:
        return self.polys[0].nvars

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def Mx(self) -> BitMatrix:
        return self.mult[0]

    @property
    def My(self) -> BitMatrix:
        return self.mult[1]

    def inverse_mult(self, axis: int) -> BitMatrix:
        if axis not in self._inv:
            self._inv[axis] = inverse(self.mult[axis])
        return self._inv[axis]

    def one(self) -> np.ndarray:
        return self.reduce(LaurentPoly.one(self.nvars))

    def reduce_window(self, p: LaurentPoly) -> np.ndarray:
        """Reduce by row elimination; every monomial must lie in the window."""
        v = np.zeros(len(self._cols), dtype=np.uint8)
        for m in p.support:
            c = self._cols.get(m)
            if c is None:
                raise ValueError(f"monomial {m} outside the window")
            v[c] ^= 1
        if len(self._pivots):
            hits = v[self._pivots]
            if hits.any():
                v ^= (hits.astype(np.int64) @ self._rref.astype(np.int64) & 1).astype(np.uint8)
        return v[[self._cols[b] for b in self.basis]]

    def monomial_class(self, m: Sequence[int]) -> np.ndarray:
        """Class of a Laurent monomial via powers of the multiplication matrices."""
        v = np.zeros(self.dim, dtype=np.uint8)
        if self.dim == 0:
            return v
        v[:] = self.reduce_window(LaurentPoly.one(self.nvars))
        op = BitMatrix.identity(self.dim)
        for axis, e in enumerate(m):
            if e > 0:
                op = mat_pow(self.mult[axis], e) @ op
            elif e < 0:
                op = mat_pow(self.inverse_mult(axis), -e) @ op
        return op.dot_vec(v)

    def reduce(self, p: LaurentPoly) -> np.ndarray:
        """Coordinates of the class of ``p`` in ``basis``.

        Monomials inside the window are reduced directly; the rest go through
        the multiplication operators (negative exponents need them invertible).
        """
        if p.nvars != self.nvars:
            raise ValueError("nvars mismatch")
        inside = [m for m in p.support if m in self._cols]
        out = self.reduce_window(LaurentPoly(frozenset(inside), self.nvars)) if self.dim else np.zeros(0, np.uint8)
        for m in p.support:
            if m not in self._cols:
                out = out ^ self.monomial_class(m)
        return out

    def evaluate(self, p: LaurentPoly) -> BitMatrix:
        """p(Mx, My, ...) as a dim x dim matrix (nonnegative exponents only)."""
        acc = BitMatrix.zeros(self.dim, self.dim)
        for m in p.support:
            term = BitMatrix.identity(self.dim)
            for axis, e in enumerate(m):
                term = mat_pow(self.mult[axis], e) @ term
            acc = acc + term
        return acc


def _window_monomials(N: int, nvars: int) -> list[tuple[int, ...]]:
    monos = list(itertools.product(range(N), repeat=nvars))
    monos.sort(key=lambda m: (sum(m), m[::-1]), reverse=True)
    return monos


def _window_rref(polys: Sequence[LaurentPoly], N: int):
    nvars = polys[0].nvars
    monos = _window_monomials(N, nvars)
    cols = {m: i for i, m in enumerate(monos)}
    rows = []
    for p in polys:
        if not p:
            continue
        hi = [max(m[a] for m in p.support) for a in range(nvars)]
        lo = [min(m[a] for m in p.support) for a in range(nvars)]
        ranges = [range(-lo[a], N - hi[a]) for a in range(nvars)]
        for s in itertools.product(*ranges):
            rows.append([cols[tuple(e + t for e, t in zip(m, s))] for m in p.support])
    mat = BitMatrix.from_supports(rows, len(monos))
    red, pivots, r = rref(mat)
    return monos, cols, red.to_dense()[:r], np.asarray(pivots, dtype=np.int64)


def window_codim(polys: Sequence[LaurentPoly], N: int) -> int:
    monos, _, _, pivots = _window_rref(polys, N)
    return len(monos) - len(pivots)


def quotient_ring(
    polys: Sequence[LaurentPoly] | LaurentPoly,
    g: LaurentPoly | int | None = None,
    D: int | None = None,
    *,
    sizes: Sequence[int] | None = None,
    n_max: int = N_MAX,
) -> QuotientRing:
    """R/(polys) on growing windows until two consecutive codimensions agree.

    Accepts ``quotient_ring(f, g, D)`` or ``quotient_ring([f, g, ...], D=D)``.
    Default sizes start at 4(D+1) and double up to ``n_max``.
    """
    if isinstance(polys, LaurentPoly):
        if not isinstance(g, LaurentPoly):
            raise TypeError("quotient_ring(f, g, D) needs two polynomials")
        polys = (polys, g)
    else:
        polys = tuple(polys)
        if isinstance(g, int) and D is None:
            D = g
    if D is None:
        D = max(max(max(m) for m in p.support) for p in polys if p)
    if not any(polys):
        raise QuotientNotFinite("all generators are zero")
    for p in polys:
        for m in p.support:
            if min(m) < 0:
                raise ValueError("generators must be polynomials (nonnegative exponents)")
    nvars = polys[0].nvars
    if nvars == 2 and len(polys) == 2:
        # fail fast instead of growing windows to n_max
        common = bivariate_gcd(polys[0], polys[1])
        if _is_nonunit(common) and len(common.support) > 1:
            raise QuotientNotFinite(
                f"quotient not finite-dimensional: tiles share the factor {format_poly(common)}"
            )
    if sizes is None:
        sizes = []
        N = 4 * (D + 1)
        while N <= n_max:
            sizes.append(N)
            N *= 2
        if len(sizes) < 2:
            sizes = [n_max // 2, n_max] if n_max >= 2 else [1, 2]
    prev = None
    chosen = None
    for N in sizes:
        data = _window_rref(polys, N)
        codim = len(data[0]) - len(data[3])
        if prev is not None and codim == prev[0]:
            chosen = prev[1]
            break
        prev = (codim, (N, data))
    if chosen is None:
        raise QuotientNotFinite(
            "quotient not finite-dimensional: window codimension did not stabilize "
            f"up to N={sizes[-1]} (tiles share a factor)"
        )
    N, (monos, cols, red, pivots) = chosen
    pivset = set(pivots.tolist())
    basis = [m for i, m in enumerate(monos) if i not in pivset]
    basis.sort(key=lambda m: (sum(m), m[::-1]))
    q = QuotientRing(tuple(polys), D, N, basis, [], cols, red, pivots)
    mult = []
    for axis in range(nvars):
        cols_out = []
        for b in basis:
            shifted = tuple(e + (1 if a == axis else 0) for a, e in enumerate(b))
            if shifted not in cols:
                # edge-bound standard monomials mark intersections at x, y in {0, inf};
                # growing the window only moves them, so stop here
                raise QuotientAtInfinity(
                    "window quotient not closed under multiplication: the tiles' curves "
                    "meet at x or y in {0, infinity}, so the window does not present R/(f,g)"
                )
            cols_out.append(q.reduce_window(LaurentPoly.monomial(shifted)))
        dense = np.array(cols_out, dtype=np.uint8).T if cols_out else np.zeros((0, 0), np.uint8)
        mult.append(BitMatrix.from_dense(dense.reshape(len(basis), len(basis))))
    q.mult = mult
    return q


def _is_nonunit(p: LaurentPoly) -> bool:
    """Nonzero polynomials other than monomials generate proper ideals in F2[x,y]."""
    return not (len(p.support) == 1 and next(iter(p.support)) == (0,) * p.nvars)


def power_relation(q: QuotientRing, target: np.ndarray, axis: int = 0, limit: int | None = None) -> int | None:
    """Least t >= 0 with x_axis^t = target in the quotient, by stepping."""
    if limit is None:
        limit = matrix_order(q.mult[axis])
    v = q.one()
    m = q.mult[axis]
    for t in range(limit + 1):
        if np.array_equal(v, target):
            return t
        v = m.dot_vec(v)
    return None


# bivariate gcd ---------------------------------------------------------------------
# F2[x][y]: a list of x-polynomials (int bitsets) indexed by y-degree.


def _to_ypoly(p: LaurentPoly) -> list[int]:
    if not p.support:
        return []
    lo = [min(m[a] for m in p.support) for a in range(2)]
    if min(lo) < 0:
        p = p.shift([-min(e, 0) for e in lo])
    dy = max(m[1] for m in p.support)
    out = [0] * (dy + 1)
    for a, b in p.support:
        out[b] ^= 1 << a
    return _strip(out)


def _strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _from_ypoly(a: list[int]) -> LaurentPoly:
    terms = []
    for b, c in enumerate(a):
        i = 0
        while c >> i:
            if (c >> i) & 1:
                terms.append((i, b))
            i += 1
    return LaurentPoly.from_terms(terms, 2)


def _content(a: list[int]) -> int:
    c = 0
    for coef in a:
        c = poly_gcd(c, coef) if c else coef
    return c


def _primitive(a: list[int]) -> list[int]:
    c = _content(a)
    return [poly_divmod(coef, c)[0] for coef in a] if c else []


def _prem(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    lb = b[-1]
    while len(a) >= len(b) and a:
        la = a[-1]
        s = len(a) - len(b)
        a = [clmul(coef, lb) for coef in a]
        for i, coef in enumerate(b):
            a[i + s] ^= clmul(coef, la)
        _strip(a)
    return a


def bivariate_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """gcd in F2[x, y] by content and primitive-part pseudo-remainder sequence."""
    a, b = _to_ypoly(f), _to_ypoly(g)
    if not a:
        return g
    if not b:
        return f
    cont = poly_gcd(_content(a), _content(b))
    a, b = _primitive(a), _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r else [])
    prim = _primitive(a)
    return _from_ypoly([clmul(cont, c) for c in prim])


# topological order ----------------------------------------------------------------

ORIENTATIONS: dict[str, tuple[str, ...]] = {
    "identity": (),
    "x-reversal": ("x",),
    "y-reversal": ("y",),
    "xy-reversal": ("x", "y"),
}


@dataclass
class ToReport:
    gcd_ok: dict[str, bool]
    gcds: dict[str, str]
    dim: int | None
    mx_invertible: bool
    my_invertible: bool
    D: int
    orientation_dims: dict[str, int | None] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            all(self.gcd_ok.values())
            and self.mx_invertible
            and self.my_invertible
            and self.dim == 2 * self.D**2
            and all(d == 2 * self.D**2 for d in self.orientation_dims.values())
        )

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "gcd_ok": self.gcd_ok,
            "gcds": self.gcds,
            "dim": self.dim,
            "orientation_dims": self.orientation_dims,
            "mx_invertible": self.mx_invertible,
            "my_invertible": self.my_invertible,
            "errors": self.errors,
        }


def check_algebraic_to(f: LaurentPoly, g: LaurentPoly, D: int) -> ToReport:
    """Coprimality in every orientation plus invertible Mx, My and dimension 2D^2.

    Multiplication operators are checked in all four orientations so that a
    common zero on a boundary divisor (x or y at 0 or infinity) is caught.
    """
    gcd_ok, gcds, dims, errors = {}, {}, {}, []
    mx_ok = my_ok = True
    dim = None
    for name, axes in ORIENTATIONS.items():
        fr, gr = reverse(f, D, axes), reverse(g, D, axes)
        h = bivariate_gcd(fr, gr)
        gcds[name] = format_poly(h)
        gcd_ok[name] = not _is_nonunit(h)
        if not gcd_ok[name]:
            dims[name] = None
            mx_ok = my_ok = False
            continue
        try:
            q = quotient_ring(fr, gr, D)
        except QuotientNotFinite as exc:
            errors.append(f"{name}: {exc}")
            dims[name] = None
            mx_ok = my_ok = False
            continue
        dims[name] = q.dim
        if name == "identity":
            dim = q.dim
        mx_ok &= is_invertible(q.Mx) if q.dim else True
        my_ok &= is_invertible(q.My) if q.dim else True
    return ToReport(gcd_ok, gcds, dim, mx_ok, my_ok, D, dims, errors)


QUADRANTS = ("++", "-+", "+-", "--")


def quadrant_code(tiles: TilePair, W: int, quadrant: str):
    """W x W tile-code corner; the real boundaries meet at the corner named by ``quadrant``.

    ``+`` on an axis puts the real boundary at the low side.  X-checks may be
    clipped only across a real boundary in y, Z-checks only in x; at the
    artificial far sides only complete tiles are kept.
    """
    D = tiles.D
    sx, sy = quadrant
    cells = [(a, b) for b in range(W) for a in range(W)]
    xa = range(0, W - D)
    xb = range(-D, W - D) if sy == "+" else range(0, W)
    za = range(-D, W - D) if sx == "+" else range(0, W)
    zb = range(0, W - D)
    x_nodes = [(a, b) for b in xb for a in xa]
    z_nodes = [(a, b) for b in zb for a in za]
    return css_from_nodes(tiles, cells, x_nodes, z_nodes, meta={"kind": "quadrant", "quadrant": quadrant})


def _region(W: int, D: int, quadrant: str) -> set[tuple[int, int]]:
    side = W - 2 * (D + 1)
    sx, sy = quadrant
    xs = range(0, side) if sx == "+" else range(W - side, W)
    ys = range(0, side) if sy == "+" else range(W - side, W)
    return {(a, b) for a in xs for b in ys}


def _local_ops_are_stabilizers(detect: BitMatrix, stabs: BitMatrix, cols: list[int]) -> bool:
    from .linalg import kernel

    sub = detect.take_cols(cols)
    ker = kernel(sub)
    if ker.rows == 0:
        return True
    lifted = np.zeros((ker.rows, detect.cols), dtype=np.uint8)
    lifted[:, cols] = ker.to_dense()
    base = rank(stabs)
    return rank(BitMatrix.vstack([stabs, BitMatrix.from_dense(lifted)])) == base


def check_combinatorial_to(tiles: TilePair, W: int) -> dict[str, bool]:
    """Per quadrant: every local commuting Pauli in the inner region is a stabilizer."""
    D = tiles.D
    if W < 4 * (D + 1):
        raise ValueError(f"window {W} smaller than 4(D+1) = {4 * (D + 1)}")
    out = {}
    for quadrant in QUADRANTS:
        code = quadrant_code(tiles, W, quadrant)
        region = _region(W, D, quadrant)
        cols = [i for i, (_, c) in enumerate(code.qubits) if c in region]
        out[quadrant] = _local_ops_are_stabilizers(code.hz, code.hx, cols) and _local_ops_are_stabilizers(
            code.hx, code.hz, cols
        )
    return out


def variable_name(axis: int) -> str:
    return VARIABLES[axis]
