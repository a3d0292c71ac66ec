"""Sparse Laurent polynomials over GF(2).

A polynomial is a finite set of exponent tuples; the coefficient of a monomial
is 1 exactly when its tuple is present.  Variables are named positionally
``x, y, z, w``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

VARIABLES = ("x", "y", "z", "w")

Monomial = tuple[int, ...]


class PolySyntaxError(ValueError):
    """Raised when polynomial text does not match the grammar."""

    def __init__(self, message: str, text: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class LaurentPoly:
    support: frozenset[Monomial]
    nvars: int

    def __post_init__(self) -> None:
        if self.nvars < 1:
            raise ValueError("nvars must be positive")
        for m in self.support:
            if len(m) != self.nvars:
                raise ValueError(f"monomial {m} does not have {self.nvars} exponents")

    @classmethod
    def from_terms(cls, terms: Iterable[Sequence[int]], nvars: int) -> LaurentPoly:
        """Build from a list of exponent tuples; repeated terms cancel."""
        support: set[Monomial] = set()
        for t in terms:
            support ^= {tuple(int(e) for e in t)}
        return cls(frozenset(support), nvars)

    @classmethod
    def zero(cls, nvars: int) -> LaurentPoly:
        return cls(frozenset(), nvars)

    @classmethod
    def one(cls, nvars: int) -> LaurentPoly:
        return cls(frozenset({(0,) * nvars}), nvars)

    @classmethod
    def monomial(cls, exponents: Sequence[int]) -> LaurentPoly:
        return cls(frozenset({tuple(exponents)}), len(exponents))

    def __bool__(self) -> bool:
        return bool(self.support)

    def __len__(self) -> int:
        return len(self.support)

    def __iter__(self):
        return iter(self.terms())

    def terms(self) -> list[Monomial]:
        """Monomials in canonical (descending lexicographic) order."""
        return sorted(self.support, reverse=True)

    def _check(self, other: LaurentPoly) -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        return LaurentPoly(self.support ^ other.support, self.nvars)

    __sub__ = __add__

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        return mul(self, other)

    def shift(self, exponents: Sequence[int]) -> LaurentPoly:
        """Multiply by the monomial with the given exponents."""
        if len(exponents) != self.nvars:
            raise ValueError("shift length does not match nvars")
        return LaurentPoly(
            frozenset(tuple(a + b for a, b in zip(m, exponents)) for m in self.support),
            self.nvars,
        )

    def reverse(self, D: int, axes: Iterable[int | str]) -> LaurentPoly:
        return reverse(self, D, axes)

    def degree_box(self) -> list[tuple[int, int]]:
        return degree_box(self)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)!r}, nvars={self.nvars})"


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """GF(2) convolution of supports."""
    a._check(b)
    out: set[Monomial] = set()
    for m in a.support:
        for t in b.support:
            out ^= {tuple(i + j for i, j in zip(m, t))}
    return LaurentPoly(frozenset(out), a.nvars)


def _axis_index(axis: int | str, nvars: int) -> int:
    if isinstance(axis, str):
        if axis not in VARIABLES[:nvars]:
            raise ValueError(f"unknown axis {axis!r}")
        return VARIABLES.index(axis)
    if not 0 <= axis < nvars:
        raise ValueError(f"axis {axis} out of range")
    return axis


def reverse(p: LaurentPoly, D: int, axes: Iterable[int | str]) -> LaurentPoly:
    """Map exponent e to D - e on each selected axis."""
    idx = {_axis_index(a, p.nvars) for a in axes}
    return LaurentPoly(
        frozenset(
            tuple(D - e if i in idx else e for i, e in enumerate(m)) for m in p.support
        ),
        p.nvars,
    )


def degree_box(p: LaurentPoly) -> list[tuple[int, int]]:
    """Per-variable (min, max) exponent over the support."""
    if not p.support:
        raise ValueError("degree_box of the zero polynomial")
    cols = list(zip(*p.support))
    return [(min(c), max(c)) for c in cols]


def format_poly(p: LaurentPoly) -> str:
    if not p.support:
        return "0"
    out = []
    for m in p.terms():
        factors = []
        for name, e in zip(VARIABLES, m):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{e}")
        out.append("*".join(factors) if factors else "1")
    return "+".join(out)


_TOKEN = re.compile(r"\s*(?:(?P<one>1)(?![0-9])|(?P<zero>0)(?![0-9])|(?P<var>[a-zA-Z])(?:\^(?P<exp>-?[0-9]+))?)")


def parse_poly(text: str, nvars: int) -> LaurentPoly:
    """Parse ``"1+x^2*y+x^-1*y^2"`` style text.

    Terms are joined by ``+``; a term is ``1`` or a ``*``-product of factors
    ``v`` / ``v^k``.  A lone ``0`` denotes the zero polynomial.
    """
    if nvars < 1 or nvars > len(VARIABLES):
        raise ValueError(f"nvars must be in 1..{len(VARIABLES)}")
    pos = 0
    n = len(text)
    terms: list[Monomial] = []
    expect_term = True
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if expect_term:
            if pos >= n:
                raise PolySyntaxError("expected a term", text, pos)
            exps = [0] * nvars
            first = True
            is_zero = False
            while True:
                m = _TOKEN.match(text, pos)
                if m is None or m.end() == pos:
                    raise PolySyntaxError("expected '1' or a variable", text, pos)
                if m.group("one") or m.group("zero"):
                    if not first:
                        raise PolySyntaxError("constant inside a product", text, m.start("one") if m.group("one") else m.start("zero"))
                    is_zero = m.group("zero") is not None
                    pos = m.end()
                    break
                name = m.group("var")
                if name not in VARIABLES:
                    raise PolySyntaxError(f"unknown variable {name!r}", text, m.start("var"))
                idx = VARIABLES.index(name)
                if idx >= nvars:
                    raise PolySyntaxError(
                        f"variable {name!r} not allowed with nvars={nvars}", text, m.start("var")
                    )
                exps[idx] += int(m.group("exp")) if m.group("exp") is not None else 1
                pos = m.end()
                first = False
                while pos < n and text[pos].isspace():
                    pos += 1
                if pos < n and text[pos] == "*":
                    pos += 1
                    continue
                break
            if not is_zero:
                terms.append(tuple(exps))
            expect_term = False
        else:
            if pos >= n:
                break
            if text[pos] != "+":
                raise PolySyntaxError("expected '+'", text, pos)
            pos += 1
            expect_term = True
    return LaurentPoly.from_terms(terms, nvars)


def as_poly(p: LaurentPoly | str, nvars: int) -> LaurentPoly:
    return parse_poly(p, nvars) if isinstance(p, str) else p


@dataclass(frozen=True)
class TilePair:
    """X-tile of a 2D tile code: ``f`` on vertical qubits, ``g`` on horizontal ones."""

    f: LaurentPoly
    g: LaurentPoly
    D: int

    def __post_init__(self) -> None:
        problems = tile_problems(self.f, self.g, self.D)
        if problems:
            raise ValueError("invalid tile pair: " + "; ".join(problems))

    @classmethod
    def parse(cls, f: str, g: str, D: int | None = None) -> TilePair:
        fp, gp = parse_poly(f, 2), parse_poly(g, 2)
        if D is None:
            D = infer_D([fp, gp])
        return cls(fp, gp, D)

    def z_tile(self) -> tuple[LaurentPoly, LaurentPoly]:
        """(vertical, horizontal) components of the matching Z-tile."""
        return reverse(self.g, self.D, (0, 1)), reverse(self.f, self.D, (0, 1))


def infer_D(polys: Sequence[LaurentPoly]) -> int:
    """Smallest box side minus one containing every polynomial."""
    hi = 0
    for p in polys:
        if p:
            hi = max(hi, max(b for _, b in degree_box(p)))
    return hi


def tile_problems(f: LaurentPoly, g: LaurentPoly, D: int) -> list[str]:
    """Reasons a pair fails to be a valid tile pair (empty list if valid)."""
    out = []
    if f.nvars != 2 or g.nvars != 2:
        return ["tiles must be bivariate"]
    if D < 1:
        return ["D must be positive"]
    if not f and not g:
        return ["both tiles are zero"]
    for name, p in (("f", f), ("g", g)):
        for m in p.support:
            if not all(0 <= e <= D for e in m):
                out.append(f"{name} has term {m} outside the [0,{D}] box")
    for axis, var in enumerate("xy"):
        hi = max((m[axis] for p in (f, g) for m in p.support), default=None)
        if hi != D:
            out.append(f"no tile attains {var}-degree {D}")
    return out


def corners_supported(f: LaurentPoly, g: LaurentPoly, D: int) -> dict[str, bool]:
    """Whether each corner cell of the tile box carries a qubit of the X-tile.

    Stronger than the degree condition: every corner monomial must appear in f or g.
    """
    both = f.support | g.support
    return {
        "sw": (0, 0) in both,
        "se": (D, 0) in both,
        "nw": (0, D) in both,
        "ne": (D, D) in both,
    }
