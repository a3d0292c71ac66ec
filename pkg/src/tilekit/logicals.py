"""Canonical boundary logicals of a 2D tile code.

X-logicals live in the left strip of width D and are grown upward one qubit
row at a time; Z-logicals live in the bottom strip of height D and are grown
rightward one column at a time.  Each growth step is a square 2D x 2D solve
whose invertibility is what topological order buys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .builder import HORIZONTAL, VERTICAL, CssCode, build_tile_code, css_from_nodes
from .linalg import BitMatrix, kernel, rank, solve
from .poly import LaurentPoly, TilePair
from .quotient import QuotientRing


class ExtensionError(RuntimeError):
    """A strip extension step was singular or left a residual syndrome."""


@dataclass(frozen=True)
class PauliVec:
    kind: str
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in ("X", "Z"):
            raise ValueError("kind must be 'X' or 'Z'")

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    @property
    def support(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()


@dataclass
class SymplecticBasis:
    xs: BitMatrix
    zs: BitMatrix
    labels: list[tuple[int, tuple[int, int]]]

    @property
    def k(self) -> int:
        return self.xs.rows

    def x(self, i: int) -> PauliVec:
        return PauliVec("X", self.xs.row(i))

    def z(self, i: int) -> PauliVec:
        return PauliVec("Z", self.zs.row(i))

    def pairing(self) -> BitMatrix:
        return self.xs @ self.zs.T

    def to_json(self) -> str:
        doc = {
            "labels": [[c, list(m)] for c, m in self.labels],
            "x": [self.xs.row_support(i) for i in range(self.k)],
            "z": [self.zs.row_support(i) for i in range(self.k)],
        }
        return json.dumps(doc, sort_keys=True)


def _geometry(code: CssCode):
    if code.meta.get("kind") != "tile":
        raise ValueError("expected a lattice tile code")
    D = code.meta["D"]
    L, M = code.meta["shape"]
    x0, y0 = code.meta.get("origin", [0, 0])
    return D, L, M, x0, y0


def box_labels(D: int, origin=(0, 0), order: str = "cba") -> list[tuple[int, tuple[int, int]]]:
    """Seed qubits of the south-west D x D box.

    ``order`` lists the sort keys, slowest first: ``c`` copy (horizontal before
    vertical), ``b`` row, ``a`` column.  The default ``"cba"`` puts all
    horizontal seeds first; ``"abc"`` interleaves copies within each cell.
    """
    if sorted(order) != ["a", "b", "c"]:
        raise ValueError("order must be a permutation of 'abc'")
    x0, y0 = origin
    cells = [(c, a, b) for c in (HORIZONTAL, VERTICAL) for b in range(D) for a in range(D)]
    cells.sort(key=lambda t: tuple(t["cab".index(ch)] for ch in order))
    return [(c, (x0 + a, y0 + b)) for c, a, b in cells]


def _grow(
    code: CssCode,
    seed: int,
    checks: BitMatrix,
    steps: list[tuple[list[int], list[int]]],
) -> np.ndarray:
    """Fix one block of unknown qubits per step so the given check rows are satisfied."""
    v = np.zeros(code.n, dtype=np.uint8)
    v[seed] = 1
    dense = checks.to_dense()
    for rows, cols in steps:
        sub = dense[rows]
        rhs = (sub.astype(np.int64) @ v.astype(np.int64) & 1).astype(np.uint8)
        a = BitMatrix.from_dense(sub[:, cols])
        if rank(a) != len(cols):
            raise ExtensionError("strip extension is not unique (topological order fails)")
        sol = solve(a, rhs)
        if sol is None:
            raise ExtensionError("strip extension has no solution (topological order fails)")
        v[cols] ^= sol
    if (checks.dot_vec(v)).any():
        raise ExtensionError("residual syndrome after strip extension")
    return v


def _x_steps(code: CssCode):
    D, L, M, x0, y0 = _geometry(code)
    rows_by_b: dict[int, list[int]] = {}
    for r, (_, (a, b)) in enumerate(code.z_labels):
        if a - x0 < D:
            rows_by_b.setdefault(b - y0, []).append(r)
    steps = []
    for b in range(M - D):
        cols = [code.index(c, (x0 + a, y0 + b + D)) for c in (HORIZONTAL, VERTICAL) for a in range(D)]
        steps.append((rows_by_b[b], cols))
    return steps


def _z_steps(code: CssCode):
    D, L, M, x0, y0 = _geometry(code)
    rows_by_a: dict[int, list[int]] = {}
    for r, (_, (a, b)) in enumerate(code.x_labels):
        if b - y0 < D:
            rows_by_a.setdefault(a - x0, []).append(r)
    steps = []
    for a in range(L - D):
        cols = [code.index(c, (x0 + a + D, y0 + b)) for c in (HORIZONTAL, VERTICAL) for b in range(D)]
        steps.append((rows_by_a[a], cols))
    return steps


def build_basis(code: CssCode, order: str = "cba") -> SymplecticBasis:
    """Canonical symplectic basis seeded by the qubits of the south-west D x D box."""
    D, L, M, x0, y0 = _geometry(code)
    labels = box_labels(D, (x0, y0), order)
    seeds = [code.index(c, m) for c, m in labels]
    xsteps, zsteps = _x_steps(code), _z_steps(code)
    xs = [_grow(code, s, code.hz, xsteps) for s in seeds]
    zs = [_grow(code, s, code.hx, zsteps) for s in seeds]
    return SymplecticBasis(BitMatrix.from_dense(np.array(xs)), BitMatrix.from_dense(np.array(zs)), labels)


def strip_columns(code: CssCode, kind: str) -> list[int]:
    """Qubit indices of the left width-D strip (X) or bottom height-D strip (Z)."""
    D, L, M, x0, y0 = _geometry(code)
    axis = 0 if kind == "X" else 1
    lo = (x0, y0)[axis]
    return [i for i, (_, m) in enumerate(code.qubits) if m[axis] - lo < D]


def global_strip_solve(code: CssCode, seed: int, kind: str) -> np.ndarray:
    """Unique strip operator through ``seed`` commuting with the opposite checks.

    One linear solve over the whole strip; used as an oracle for :func:`build_basis`.
    """
    D, L, M, x0, y0 = _geometry(code)
    checks = code.hz if kind == "X" else code.hx
    box = {code.index(c, m) for c, m in box_labels(D, (x0, y0))}
    free = [i for i in strip_columns(code, kind) if i not in box]
    dense = checks.to_dense()
    a = BitMatrix.from_dense(dense[:, free])
    if kernel(a).rows:
        raise ExtensionError("strip operator is not unique")
    sol = solve(a, dense[:, seed])
    if sol is None:
        raise ExtensionError("no strip operator through this seed")
    v = np.zeros(code.n, dtype=np.uint8)
    v[seed] = 1
    v[free] = sol
    return v


# cellular automaton rules ----------------------------------------------------------


@dataclass(frozen=True)
class CaRule:
    seed: tuple[int, tuple[int, int]]
    replacement: tuple[tuple[int, tuple[int, int]], ...]


@dataclass
class CaRuleSet:
    kind: str
    D: int
    rules: list[CaRule]

    def __len__(self) -> int:
        return len(self.rules)

    def lookup(self) -> dict:
        return {r.seed: r.replacement for r in self.rules}

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "D": self.D,
                "rules": [
                    {"seed": [r.seed[0], list(r.seed[1])], "replacement": [[c, list(m)] for c, m in r.replacement]}
                    for r in self.rules
                ],
            },
            sort_keys=True,
        )


def extract_rules(tiles: TilePair, kind: str = "X") -> CaRuleSet:
    """Replacement a(q) one block further along the strip with the same near-boundary syndrome.

    For X the block moves up by D inside the left strip; for Z it moves right by
    D inside the bottom strip.  Solved on a 4(D+1) window.
    """
    D = tiles.D
    W = 4 * (D + 1)
    code = build_tile_code(tiles, W, W)
    steps = _x_steps(code) if kind == "X" else _z_steps(code)
    checks = code.hz if kind == "X" else code.hx
    rows: list[int] = []
    for r, _ in steps[:D]:
        rows += r
    shift = (0, D) if kind == "X" else (D, 0)
    targets = [(c, (a + shift[0], b + shift[1])) for c, (a, b) in box_labels(D)]
    cols = [code.index(c, m) for c, m in targets]
    dense = checks.to_dense()[rows]
    a = BitMatrix.from_dense(dense[:, cols])
    if rank(a) != len(cols):
        raise ExtensionError("rule system is singular")
    rules = []
    for label in box_labels(D):
        seed = code.index(*label)
        sol = solve(a, dense[:, seed])
        if sol is None:
            raise ExtensionError("no replacement for seed")
        rep = tuple(targets[j] for j in np.flatnonzero(sol))
        rules.append(CaRule(label, rep))
    return CaRuleSet(kind, D, rules)


def apply_rules(rules: CaRuleSet, code: CssCode, seed: tuple[int, tuple[int, int]]) -> np.ndarray:
    """Grow a strip logical by repeatedly applying the rules blockwise."""
    D, L, M, x0, y0 = _geometry(code)
    table = rules.lookup()
    along = 1 if rules.kind == "X" else 0
    extent = M if rules.kind == "X" else L
    block = {(seed[0], (seed[1][0] - x0, seed[1][1] - y0))}
    v = np.zeros(code.n, dtype=np.uint8)
    offset = 0
    while block and offset < extent:
        for c, (a, b) in block:
            pos = (a, b)
            if pos[along] < extent:
                v[code.index(c, (x0 + a, y0 + b))] ^= 1
        nxt: set = set()
        for c, (a, b) in block:
            local = (a, b - offset) if along == 1 else (a - offset, b)
            for rc, (ra, rb) in table[(c, local)]:
                q = (rc, (ra, rb + offset) if along == 1 else (ra + offset, rb))
                nxt ^= {q}
        block = nxt
        offset += D
    return v


# boundary map ----------------------------------------------------------------------


def pauli_polys(code: CssCode, bits) -> tuple[LaurentPoly, LaurentPoly]:
    """(P_h, P_v) of an operator in lattice coordinates relative to the code origin."""
    D, L, M, x0, y0 = _geometry(code)
    h, v = [], []
    for i in np.flatnonzero(np.asarray(bits)):
        c, (a, b) = code.qubits[i]
        (h if c == HORIZONTAL else v).append((a - x0, b - y0))
    return LaurentPoly.from_terms(h, 2), LaurentPoly.from_terms(v, 2)


def excitation(tiles: TilePair, ph: LaurentPoly, pv: LaurentPoly) -> LaurentPoly:
    """Plane syndrome of an X-type operator; a term t marks the Z-check at node t - (D, D)."""
    return ph * tiles.f + pv * tiles.g


def bottom_boundary_class(code: CssCode, q: QuotientRing, bits) -> np.ndarray:
    """Class in R/(f, g) of the syndrome an X-logical leaves below the lattice."""
    D, L, M, x0, y0 = _geometry(code)
    tiles: TilePair = code.meta["tile_pair"]
    if code.hz.dot_vec(bits).any():
        raise ValueError("operator violates Z-checks of the code")
    ph, pv = pauli_polys(code, bits)
    syn = excitation(tiles, ph, pv)
    below = LaurentPoly(frozenset(t for t in syn.support if t[1] < D), 2)
    return q.reduce(below)


def bottom_boundary_matrix(code: CssCode, q: QuotientRing, basis: SymplecticBasis) -> BitMatrix:
    """Columns are the boundary classes of the basis X-logicals."""
    cols = [bottom_boundary_class(code, q, basis.xs.row(i)) for i in range(basis.k)]
    return BitMatrix.from_dense(np.array(cols, dtype=np.uint8).T)


def omitted_z_nodes(code: CssCode) -> list[tuple[int, int]]:
    """Z-tile nodes dropped at the top and bottom boundaries that still touch the lattice."""
    D, L, M, x0, y0 = _geometry(code)
    rows = list(range(-D, 0)) + list(range(M - D, M))
    return [(x0 + a, y0 + b) for b in rows for a in range(-D, L)]


def verify_omitted_product(code: CssCode, bits) -> list[tuple[int, int]] | None:
    """Omitted boundary Z-tiles (clipped) whose product is ``bits``, or None."""
    tiles: TilePair = code.meta["tile_pair"]
    bits = np.asarray(bits, dtype=np.uint8)
    if not bits.any():
        return []
    nodes = omitted_z_nodes(code)
    cells = [m for c, m in code.qubits if c == HORIZONTAL]
    tmp = css_from_nodes(tiles, cells, [], nodes)
    sol = solve(tmp.hz.T, bits)
    if sol is None:
        return None
    return [nodes[i] for i in np.flatnonzero(sol)]


def stabilizer_in_strip(code: CssCode, full_only: bool = True) -> list[str]:
    """Strips of D columns or D rows containing a nonzero product of checks of one type.

    With ``full_only`` only unclipped tiles take part; clipped boundary checks
    can legitimately fit inside a boundary strip.
    """
    D, L, M, x0, y0 = _geometry(code)
    tiles: TilePair = code.meta["tile_pair"]
    full_weight = len(tiles.f) + len(tiles.g)
    bad = []
    for name, h in (("X", code.hx), ("Z", code.hz)):
        dense = h.to_dense()
        if full_only:
            dense = dense[dense.sum(axis=1) == full_weight]
        if not len(dense):
            continue
        full = rank(BitMatrix.from_dense(dense))
        for axis, extent in ((0, L), (1, M)):
            lo = (x0, y0)[axis]
            for start in range(extent - D + 1):
                outside = [i for i, (_, m) in enumerate(code.qubits) if not start <= m[axis] - lo < start + D]
                if rank(BitMatrix.from_dense(dense[:, outside])) < full:
                    bad.append(f"{name}-checks inside {'xy'[axis]}-strip at {start}")
    return bad
