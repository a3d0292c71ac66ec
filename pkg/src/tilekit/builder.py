"""Finite CSS codes from stabilizer tiles.

Two constructions live here.  ``build_tile_code`` lays tiles on a 2D lattice of
horizontal and vertical edges.  ``build_box_code`` realises the truncated
Koszul complex of ``m`` polynomials in any number of variables, where every
chain term is a box of monomials.  In 2D with axis signs ``(+, -)`` the two
agree under ``(a, b) -> x^a y^(b-M)``.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .linalg import BitMatrix, rank
from .poly import LaurentPoly, TilePair, VARIABLES, format_poly, parse_poly, reverse

HORIZONTAL = 0
VERTICAL = 1

Label = tuple[int, tuple[int, ...]]


@dataclass
class CssCode:
    """CSS code with coordinates for every qubit and check.

    ``qubits[i]`` is ``(copy, monomial)`` for column ``i``; ``x_labels`` and
    ``z_labels`` do the same for check rows.  For tile codes the copy is
    ``HORIZONTAL`` or ``VERTICAL`` and check copies are 0.
    """

    hx: BitMatrix
    hz: BitMatrix
    qubits: list[Label]
    x_labels: list[Label] = field(default_factory=list)
    z_labels: list[Label] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.hx.cols != self.n or self.hz.cols != self.n:
            raise ValueError("check matrices do not match the qubit count")
        self._index = {q: i for i, q in enumerate(self.qubits)}

    @property
    def n(self) -> int:
        return len(self.qubits)

    def index(self, copy: int, mono: Sequence[int]) -> int | None:
        return self._index.get((copy, tuple(mono)))

    def commutes(self) -> bool:
        return (self.hx @ self.hz.T).is_zero()


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    x_checks: int
    z_checks: int
    rank_x: int
    rank_z: int

    @property
    def independent(self) -> bool:
        return self.rank_x == self.x_checks and self.rank_z == self.z_checks

    @property
    def deficiency(self) -> tuple[int, int]:
        return (self.x_checks - self.rank_x, self.z_checks - self.rank_z)


def code_params(code: CssCode) -> CodeParams:
    rx = rank(code.hx) if code.hx.rows else 0
    rz = rank(code.hz) if code.hz.rows else 0
    return CodeParams(code.n, code.n - rx - rz, code.hx.rows, code.hz.rows, rx, rz)


# 2D lattice construction -----------------------------------------------------


def css_from_nodes(
    tiles: TilePair,
    qubit_coords: Iterable[tuple[int, int]],
    x_nodes: Sequence[tuple[int, int]],
    z_nodes: Sequence[tuple[int, int]],
    meta: dict | None = None,
) -> CssCode:
    """Place X-tiles at ``x_nodes`` and Z-tiles at ``z_nodes``, clipped to the qubits.

    ``qubit_coords`` lists lattice cells; each cell carries a horizontal and a
    vertical qubit.  Horizontal qubits are indexed first, each block in the
    given cell order.
    """
    cells = list(qubit_coords)
    qubits = [(HORIZONTAL, c) for c in cells] + [(VERTICAL, c) for c in cells]
    index = {q: i for i, q in enumerate(qubits)}
    zv, zh = tiles.z_tile()
    x_parts = ((VERTICAL, tiles.f), (HORIZONTAL, tiles.g))
    z_parts = ((VERTICAL, zv), (HORIZONTAL, zh))

    def rows(nodes, parts):
        out = []
        for a, b in nodes:
            supp = []
            for copy, p in parts:
                for i, j in p.support:
                    q = index.get((copy, (a + i, b + j)))
                    if q is not None:
                        supp.append(q)
            out.append(supp)
        return out

    hx = BitMatrix.from_supports(rows(x_nodes, x_parts), len(qubits))
    hz = BitMatrix.from_supports(rows(z_nodes, z_parts), len(qubits))
    return CssCode(
        hx,
        hz,
        qubits,
        [(0, tuple(v)) for v in x_nodes],
        [(0, tuple(v)) for v in z_nodes],
        dict(meta or {}),
    )


def tile_code_nodes(D: int, L: int, M: int, origin: tuple[int, int] = (0, 0)):
    """Cells, X-check nodes and Z-check nodes of the L x M tile code, rows (b, a)."""
    x0, y0 = origin
    cells = [(x0 + a, y0 + b) for b in range(M) for a in range(L)]
    x_nodes = [(x0 + a, y0 + b) for b in range(-D, M) for a in range(L - D)]
    z_nodes = [(x0 + a, y0 + b) for b in range(M - D) for a in range(-D, L)]
    return cells, x_nodes, z_nodes


def build_tile_code(
    tiles: TilePair, L: int, M: int, origin: tuple[int, int] = (0, 0)
) -> CssCode:
    """Tile code on the L x M lattice whose south-west cell sits at ``origin``.

    X boundary layers run along the top and bottom, Z layers along the left and
    right.  Qubit ``(copy, (a, b))`` has index ``copy*L*M + (b-y0)*L + (a-x0)``.
    """
    D = tiles.D
    if L <= D or M <= D:
        raise ValueError(f"lattice {L}x{M} too small for D={D}")
    cells, x_nodes, z_nodes = tile_code_nodes(D, L, M, origin)
    code = css_from_nodes(
        tiles,
        cells,
        x_nodes,
        z_nodes,
        meta={
            "kind": "tile",
            "D": D,
            "shape": [L, M],
            "origin": list(origin),
            "tiles": {"f": format_poly(tiles.f), "g": format_poly(tiles.g)},
        },
    )
    _verify(code, 2 * L * M, (L - D) * (M + D), (L + D) * (M - D))
    code.meta["tile_pair"] = tiles
    return code


def translate_code(code: CssCode, dx: int, dy: int) -> CssCode:
    """The same code with every qubit and check label moved by (dx, dy)."""

    def move(labels):
        return [(c, (m[0] + dx, m[1] + dy)) for c, m in labels]

    meta = dict(code.meta)
    if "origin" in meta:
        meta["origin"] = [meta["origin"][0] + dx, meta["origin"][1] + dy]
    return CssCode(code.hx, code.hz, move(code.qubits), move(code.x_labels), move(code.z_labels), meta)


class BuildError(ValueError):
    """The built code breaks a construction invariant (counts, commutation, empty rows or columns)."""


def _verify(code: CssCode, n: int, nx: int, nz: int) -> None:
    if (code.n, code.hx.rows, code.hz.rows) != (n, nx, nz):
        raise BuildError(
            f"count identity violated: got {(code.n, code.hx.rows, code.hz.rows)}, want {(n, nx, nz)}"
        )
    if not code.commutes():
        raise BuildError("X and Z checks do not commute")
    if code.hx.rows and (code.hx.row_weights() == 0).any():
        raise BuildError("empty X-check")
    if code.hz.rows and (code.hz.row_weights() == 0).any():
        raise BuildError("empty Z-check")
    if n and ((code.hx.col_weights() == 0).any() or (code.hz.col_weights() == 0).any()):
        raise BuildError("unsupported qubit after construction")


# Koszul box construction -------------------------------------------------------


@dataclass(frozen=True)
class BoxSpec:
    """Per-term exponent intervals, one ``(lo, hi)`` per variable."""

    qubits: tuple[tuple[int, int], ...]
    x_checks: tuple[tuple[int, int], ...]
    z_checks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for name in ("qubits", "x_checks", "z_checks"):
            for lo, hi in getattr(self, name):
                if hi < lo:
                    raise ValueError(f"empty {name} box interval ({lo},{hi})")

    @classmethod
    def from_shape(cls, shape: Sequence[int], signs: Sequence[int], D: int) -> BoxSpec:
        """Boxes for which the qubit term has side ``shape[i]`` on axis ``i``.

        On a ``+`` axis X-checks shrink and Z-checks grow by D; on a ``-`` axis
        the roles swap and the box sits at negative exponents.
        """
        if len(shape) != len(signs):
            raise ValueError("shape and signs differ in length")
        q, x, z = [], [], []
        for ell, s in zip(shape, signs):
            if s > 0:
                q.append((0, ell - 1))
                x.append((0, ell - 1 - D))
                z.append((0, ell - 1 + D))
            elif s < 0:
                q.append((-ell, -1))
                x.append((-ell - D, -1))
                z.append((-ell + D, -1))
            else:
                raise ValueError("axis signs must be +1 or -1")
        return cls(tuple(q), tuple(x), tuple(z))


def box_monomials(box: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Monomials of a box, first axis varying fastest."""
    ranges = [range(lo, hi + 1) for lo, hi in box]
    return [tuple(reversed(m)) for m in itertools.product(*reversed(ranges))]


def koszul_differential(polys: Sequence[LaurentPoly], j: int) -> dict[tuple, LaurentPoly]:
    """Entries of the map from j-subsets to (j-1)-subsets: e_S -> sum p_i e_{S-i}.

    Keys are ``(S, S - {i})``; signs vanish over GF(2).
    """
    out = {}
    for S in itertools.combinations(range(len(polys)), j):
        for i in S:
            T = tuple(t for t in S if t != i)
            out[(S, T)] = polys[i]
    return out


@dataclass(frozen=True)
class KoszulSpec:
    """Truncated Koszul complex of ``polys`` with qubits on the middle term.

    Qubit copies are the ``m//2``-subsets of the polynomials, X-check copies
    the ``m//2+1``-subsets and Z-check copies the ``m//2-1``-subsets.
    """

    polys: tuple[LaurentPoly, ...]
    shape: tuple[int, ...]
    signs: tuple[int, ...]
    D: int

    def __post_init__(self) -> None:
        nv = {p.nvars for p in self.polys}
        if len(nv) != 1:
            raise ValueError("polynomials disagree on nvars")
        if len(self.polys) < 2:
            raise ValueError("need at least two polynomials")
        if len(self.shape) != self.nvars or len(self.signs) != self.nvars:
            raise ValueError("shape and signs must have one entry per variable")
        for p in self.polys:
            for m in p.support:
                if not all(0 <= e <= self.D for e in m):
                    raise ValueError(f"{format_poly(p)} leaves the [0,{self.D}] box")

    @classmethod
    def parse(cls, polys: Sequence[str], shape, signs, D: int | None = None) -> KoszulSpec:
        nvars = len(shape)
        ps = tuple(parse_poly(t, nvars) for t in polys)
        if D is None:
            D = max(max(max(m) for m in p.support) for p in ps if p)
        return cls(ps, tuple(shape), tuple(signs), D)

    @property
    def nvars(self) -> int:
        return self.polys[0].nvars

    @property
    def j(self) -> int:
        return len(self.polys) // 2

    @property
    def dX(self) -> dict[tuple, LaurentPoly]:
        """X-check term to qubit term."""
        return koszul_differential(self.polys, self.j + 1)

    @property
    def dZ(self) -> dict[tuple, LaurentPoly]:
        """Qubit term to Z-check term."""
        return koszul_differential(self.polys, self.j)

    def boxes(self) -> BoxSpec:
        return BoxSpec.from_shape(self.shape, self.signs, self.D)

    def composite_vanishes(self) -> bool:
        """dZ . dX = 0 as a polynomial matrix."""
        acc: dict[tuple, LaurentPoly] = {}
        zero = LaurentPoly.zero(self.nvars)
        for (S, T), p in self.dX.items():
            for (T2, U), q in self.dZ.items():
                if T2 == T:
                    acc[(S, U)] = acc.get((S, U), zero) + p * q
        return all(not v for v in acc.values())


def build_box_code(spec: KoszulSpec) -> CssCode:
    if not spec.composite_vanishes():
        raise ValueError("dZ . dX does not vanish")
    boxes = spec.boxes()
    m, j = len(spec.polys), spec.j
    q_copies = list(itertools.combinations(range(m), j))
    x_copies = list(itertools.combinations(range(m), j + 1))
    z_copies = list(itertools.combinations(range(m), j - 1)) if j >= 1 else []
    q_monos = box_monomials(boxes.qubits)
    x_monos = box_monomials(boxes.x_checks)
    z_monos = box_monomials(boxes.z_checks)
    qubits = [(c, mono) for c in range(len(q_copies)) for mono in q_monos]
    index = {(q_copies[c], mono): i for i, (c, mono) in enumerate(qubits)}

    x_rows = []
    x_labels = []
    for ci, S in enumerate(x_copies):
        for node in x_monos:
            supp = []
            for i in S:
                T = tuple(t for t in S if t != i)
                for e in spec.polys[i].support:
                    q = index.get((T, tuple(a + b for a, b in zip(node, e))))
                    if q is not None:
                        supp.append(q)
            x_rows.append(supp)
            x_labels.append((ci, node))

    # A Z-check on copy U at node t touches qubit (U+{i}, u) whenever t = u * p_i.
    z_rows = []
    z_labels = []
    for ci, U in enumerate(z_copies):
        for node in z_monos:
            supp = []
            for i in range(m):
                if i in U:
                    continue
                S = tuple(sorted(U + (i,)))
                for e in spec.polys[i].support:
                    q = index.get((S, tuple(a - b for a, b in zip(node, e))))
                    if q is not None:
                        supp.append(q)
            z_rows.append(supp)
            z_labels.append((ci, node))

    n = len(qubits)
    code = CssCode(
        BitMatrix.from_supports(x_rows, n),
        BitMatrix.from_supports(z_rows, n),
        qubits,
        x_labels,
        z_labels,
        meta={
            "kind": "box",
            "D": spec.D,
            "shape": list(spec.shape),
            "signs": list(spec.signs),
            "tiles": {
                name: format_poly(p) for name, p in zip("fghi", spec.polys)
            },
            "copies": [list(c) for c in q_copies],
        },
    )
    if not code.commutes():
        raise BuildError("X and Z checks do not commute")
    return code


def tile_spec(tiles: TilePair, L: int, M: int) -> KoszulSpec:
    """The Koszul box spec that reproduces ``build_tile_code(tiles, L, M)``."""
    return KoszulSpec((tiles.f, tiles.g), (L, M), (1, -1), tiles.D)


def lattice_to_box(code: CssCode) -> tuple[list[int], list[int], list[int]]:
    """Row/column permutations taking a tile code onto its box-code ordering.

    Returns ``(qubit_perm, x_perm, z_perm)`` where entry ``i`` is the box-code
    index of lattice qubit/check ``i``.
    """
    D = code.meta["D"]
    L, M = code.meta["shape"]
    x0, y0 = code.meta.get("origin", [0, 0])

    def q_index(copy, a, b):
        return copy * L * M + (b - y0) * L + (a - x0)

    qperm = [q_index(c, a, b) for c, (a, b) in code.qubits]
    xperm = [(b - y0 + D) * (L - D) + (a - x0) for _, (a, b) in code.x_labels]
    zperm = [(b - y0) * (L + D) + (a - x0 + D) for _, (a, b) in code.z_labels]
    return qperm, xperm, zperm


# export / import -----------------------------------------------------------------

FORMATS = ("alist", "triplets", "json")


def _alist(m: BitMatrix) -> str:
    dense = m.to_dense()
    cols = [np.flatnonzero(dense[:, c]).tolist() for c in range(m.cols)]
    rows = [np.flatnonzero(dense[r]).tolist() for r in range(m.rows)]
    cw = max((len(c) for c in cols), default=0)
    rw = max((len(r) for r in rows), default=0)

    def pad(lst, w):
        return " ".join(str(v + 1) for v in lst) if w == len(lst) else " ".join(
            [str(v + 1) for v in lst] + ["0"] * (w - len(lst))
        )

    lines = [
        f"{m.cols} {m.rows}",
        f"{cw} {rw}",
        " ".join(str(len(c)) for c in cols),
        " ".join(str(len(r)) for r in rows),
    ]
    lines += [pad(c, cw) for c in cols]
    lines += [pad(r, rw) for r in rows]
    return "\n".join(lines) + "\n"


def _triplets(m: BitMatrix) -> str:
    r, c = np.nonzero(m.to_dense())
    lines = [f"{m.rows} {m.cols} {len(r)}"]
    lines += [f"{i} {j}" for i, j in zip(r.tolist(), c.tolist())]
    return "\n".join(lines) + "\n"


def export_matrix(m: BitMatrix, fmt: str) -> bytes:
    if fmt == "alist":
        return _alist(m).encode()
    if fmt == "triplets":
        return _triplets(m).encode()
    raise ValueError(f"unknown matrix format {fmt!r}")


def _supports(m: BitMatrix) -> list[list[int]]:
    dense = m.to_dense()
    return [np.flatnonzero(row).tolist() for row in dense]


def report(code: CssCode, d_upper: int | None = None, **extra) -> dict:
    params = code_params(code)
    out = {
        "n": params.n,
        "k": params.k,
        "counts": {"x": params.x_checks, "z": params.z_checks},
        "D": code.meta.get("D"),
        "shape": code.meta.get("shape"),
        "tiles": code.meta.get("tiles"),
    }
    if d_upper is not None:
        out["d_upper"] = d_upper
    out.update(extra)
    return out


def export(code: CssCode, fmt: str) -> bytes:
    """Serialize a code.

    ``alist`` and ``triplets`` emit the hx block followed by the hz block; both
    blocks are self-delimiting.  ``json`` carries the report fields and the
    matrices as row supports.
    """
    if fmt in ("alist", "triplets"):
        return export_matrix(code.hx, fmt) + export_matrix(code.hz, fmt)
    if fmt == "json":
        doc = report(code)
        doc["matrices"] = {"hx": _supports(code.hx), "hz": _supports(code.hz)}
        return (json.dumps(doc, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _read_alist(tokens: list[int], pos: int) -> tuple[BitMatrix, int]:
    ncols, nrows, cw, rw = tokens[pos : pos + 4]
    pos += 4 + ncols + nrows
    supports: list[list[int]] = [[] for _ in range(nrows)]
    for c in range(ncols):
        for v in tokens[pos : pos + cw]:
            if v:
                supports[v - 1].append(c)
        pos += cw
    # row lists repeat the column lists
    pos += nrows * rw
    return BitMatrix.from_supports(supports, ncols), pos


def import_matrices(data: bytes, fmt: str) -> list[BitMatrix]:
    """Inverse of :func:`export` for the matrix formats."""
    tokens = [int(t) for t in data.decode().split()]
    out = []
    pos = 0
    while pos < len(tokens):
        if fmt == "alist":
            m, pos = _read_alist(tokens, pos)
        elif fmt == "triplets":
            rows, cols, nnz = tokens[pos : pos + 3]
            pairs = tokens[pos + 3 : pos + 3 + 2 * nnz]
            supports: list[list[int]] = [[] for _ in range(rows)]
            for r, c in zip(pairs[::2], pairs[1::2]):
                supports[r].append(c)
            m = BitMatrix.from_supports(supports, cols)
            pos += 3 + 2 * nnz
        else:
            raise ValueError(f"unknown matrix format {fmt!r}")
        out.append(m)
    return out


def import_json(data: bytes) -> tuple[dict, BitMatrix, BitMatrix]:
    doc = json.loads(data)
    n = doc["n"]
    hx = BitMatrix.from_supports(doc["matrices"]["hx"], n)
    hz = BitMatrix.from_supports(doc["matrices"]["hz"], n)
    return doc, hx, hz


def variable_names(nvars: int) -> tuple[str, ...]:
    return VARIABLES[:nvars]


def reversed_pair(tiles: TilePair, axes: Sequence[str]) -> tuple[LaurentPoly, LaurentPoly]:
    return reverse(tiles.f, tiles.D, axes), reverse(tiles.g, tiles.D, axes)
