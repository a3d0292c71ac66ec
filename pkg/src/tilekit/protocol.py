"""Fault-free sliding of a tile code, simulated on a CSS stabilizer tableau.

Pauli rows are Python ints over qubit positions with a separate sign bit
(1 means -1).  Qubits are named by absolute lattice labels ``(copy, (a, b))``;
positions freed by measured qubits are recycled for the next ancillas.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

import numpy as np

from .autos import LogicalAuto, derived_auto
from .builder import CssCode, build_tile_code, translate_code
from .linalg import BitMatrix, solve
from .logicals import SymplecticBasis, _geometry


class TableauError(RuntimeError):
    """Internal invariant breach (the state stopped being a valid CSS stabilizer state)."""


def _parity(x: int) -> int:
    return x.bit_count() & 1


class _Rows:
    """Signed GF(2) rows with a lazily maintained lowest-bit echelon."""

    def __init__(self) -> None:
        self.rows: list[tuple[int, int]] = []
        self._ech: dict[int, tuple[int, int]] | None = {}

    def __len__(self) -> int:
        return len(self.rows)

    def _echelon(self) -> dict[int, tuple[int, int]]:
        if self._ech is None:
            self._ech = {}
            for r in self.rows:
                self._insert(r)
        return self._ech

    def _insert(self, row: tuple[int, int]) -> bool:
        bits, sign = row
        ech = self._ech
        while bits:
            low = bits & -bits
            hit = ech.get(low)
            if hit is None:
                ech[low] = (bits, sign)
                return True
            bits ^= hit[0]
            sign ^= hit[1]
        return False

    def append(self, bits: int, sign: int) -> None:
        self.rows.append((bits, sign))
        if self._ech is not None and not self._insert((bits, sign)):
            raise TableauError("dependent generator added")

    def replace(self, i: int, bits: int, sign: int) -> None:
        self.rows[i] = (bits, sign)
        self._ech = None

    def pop(self, i: int) -> tuple[int, int]:
        self._ech = None
        return self.rows.pop(i)

    def anticommuting(self, bits: int) -> list[int]:
        return [i for i, (r, _) in enumerate(self.rows) if _parity(r & bits)]

    def sign_of(self, bits: int) -> int | None:
        """Sign of ``bits`` as a product of rows, or None if outside the span."""
        ech = self._echelon()
        sign = 0
        while bits:
            low = bits & -bits
            hit = ech.get(low)
            if hit is None:
                return None
            bits ^= hit[0]
            sign ^= hit[1]
        return sign

    def flip_signs(self, bits: int) -> None:
        """Conjugate by an opposite-type Pauli on ``bits``."""
        self.rows = [(r, s ^ _parity(r & bits)) for r, s in self.rows]
        self._ech = None


def canonical(rows: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Fully reduced signed row echelon form; equal groups give equal tuples."""
    ech: dict[int, list[int]] = {}
    for bits, sign in rows:
        while bits:
            low = bits & -bits
            hit = ech.get(low)
            if hit is None:
                ech[low] = [bits, sign]
                break
            bits ^= hit[0]
            sign ^= hit[1]
        else:
            if sign:
                raise TableauError("group contains -I")
    pivots = sorted(ech, reverse=True)
    for i, p in enumerate(pivots):
        row = ech[p]
        for q in pivots[:i]:
            if row[0] & q:
                row[0] ^= ech[q][0]
                row[1] ^= ech[q][1]
    return tuple(sorted((r[0], r[1]) for r in ech.values()))


@dataclass
class StabilizerState:
    """CSS stabilizer state: X-type rows ``gx`` and Z-type rows ``gz``."""

    gx: _Rows = field(default_factory=_Rows)
    gz: _Rows = field(default_factory=_Rows)
    registry: dict = field(default_factory=dict)
    _free: list[int] = field(default_factory=list)
    _next: int = 0

    @property
    def n(self) -> int:
        return len(self.registry)

    def add_qubit(self, label) -> int:
        if label in self.registry:
            raise TableauError(f"qubit {label} already live")
        pos = self._free.pop() if self._free else self._next
        if pos == self._next:
            self._next += 1
        self.registry[label] = pos
        return pos

    def bits_of(self, labels) -> int:
        out = 0
        for lab in labels:
            out ^= 1 << self.registry[lab]
        return out

    def vec_to_bits(self, code: CssCode, vec) -> int:
        return self.bits_of(code.qubits[i] for i in np.flatnonzero(np.asarray(vec)))

    def commuting(self) -> bool:
        zs = [r for r, _ in self.gz.rows]
        return all(not _parity(x & z) for x, _ in self.gx.rows for z in zs)

    def canonical(self) -> tuple:
        return canonical(self.gx.rows), canonical(self.gz.rows)


def prepare_logical_state(code: CssCode, basis: SymplecticBasis, z_signs) -> StabilizerState:
    """Code state with all checks +1 and logical Z_i with sign ``z_signs[i]`` (+1/-1)."""
    z_signs = list(z_signs)
    if len(z_signs) != basis.k:
        raise ValueError(f"expected {basis.k} signs, got {len(z_signs)}")
    st = StabilizerState()
    for q in code.qubits:
        st.add_qubit(q)
    for i in range(code.hx.rows):
        st.gx.append(st.vec_to_bits(code, code.hx.row(i)), 0)
    for i in range(code.hz.rows):
        st.gz.append(st.vec_to_bits(code, code.hz.row(i)), 0)
    for i, s in enumerate(z_signs):
        if s not in (1, -1):
            raise ValueError("signs must be +1 or -1")
        st.gz.append(st.vec_to_bits(code, basis.zs.row(i)), 1 if s == -1 else 0)
    if len(st.gx) + len(st.gz) != st.n:
        raise TableauError("prepared state is not pure")
    return st


def code_state_group(state: StabilizerState, code: CssCode, basis: SymplecticBasis, z_signs) -> tuple:
    """Canonical group of the code state with logical Z signs ``z_signs``, in the state's qubit positions."""
    gx = [(state.vec_to_bits(code, code.hx.row(r)), 0) for r in range(code.hx.rows)]
    gz = [(state.vec_to_bits(code, code.hz.row(r)), 0) for r in range(code.hz.rows)]
    gz += [(state.vec_to_bits(code, basis.zs.row(k)), 1 if s == -1 else 0) for k, s in enumerate(z_signs)]
    return canonical(gx), canonical(gz)


def _measure(same: _Rows, other: _Rows, bits: int, rng: random.Random) -> int:
    anti = other.anticommuting(bits)
    if anti:
        p = anti[0]
        pb, ps = other.rows[p]
        for i in anti[1:]:
            r, s = other.rows[i]
            other.replace(i, r ^ pb, s ^ ps)
        other.pop(p)
        sign = rng.getrandbits(1)
        same.append(bits, sign)
        return sign
    sign = same.sign_of(bits)
    if sign is None:
        raise TableauError("deterministic measurement outside the stabilizer group")
    return sign


def measure_x(state: StabilizerState, bits: int, rng: random.Random) -> int:
    """Measure an X-type Pauli; returns +1 or -1."""
    return -1 if _measure(state.gx, state.gz, bits, rng) else 1


def measure_z(state: StabilizerState, bits: int, rng: random.Random) -> int:
    return -1 if _measure(state.gz, state.gx, bits, rng) else 1


def measure_x_check(state: StabilizerState, code: CssCode, row: int, rng: random.Random) -> int:
    return measure_x(state, state.vec_to_bits(code, code.hx.row(row)), rng)


def measure_z_qubit(state: StabilizerState, label, rng: random.Random) -> int:
    return measure_z(state, 1 << state.registry[label], rng)


def discard_qubit(state: StabilizerState, label) -> None:
    """Drop a qubit that has just been measured in the Z basis."""
    pos = state.registry[label]
    bit = 1 << pos
    idx = [i for i, (r, _) in enumerate(state.gz.rows) if r == bit]
    if not idx or any(r & bit for r, _ in state.gx.rows):
        raise TableauError(f"qubit {label} is not in a Z eigenstate")
    _, s0 = state.gz.pop(idx[0])
    for i, (r, s) in enumerate(state.gz.rows):
        if r & bit:
            state.gz.replace(i, r ^ bit, s ^ s0)
    del state.registry[label]
    state._free.append(pos)


def apply_x(state: StabilizerState, bits: int) -> None:
    state.gz.flip_signs(bits)


def apply_z(state: StabilizerState, bits: int) -> None:
    state.gx.flip_signs(bits)


@dataclass
class ProtocolTrace:
    seed: int | None
    epsilon: int
    x_outcomes: list[int]
    z_outcomes: list[int]
    M: list
    j: list[int]

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "epsilon": self.epsilon,
                "outcomes": {"x_checks": self.x_outcomes, "z_qubits": self.z_outcomes},
                "M": [[c, list(m)] for c, m in self.M],
                "j": self.j,
            },
            sort_keys=True,
        )


class Slider:
    """Precomputed geometry for repeatedly sliding one tile code along x.

    Works for a code at any origin; ``epsilon=+1`` grows a column on the left
    and measures out the right one, ``-1`` the mirror image.
    """

    def __init__(self, code: CssCode, basis: SymplecticBasis, epsilon: int = 1) -> None:
        if epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        D, L, M, x0, y0 = _geometry(code)
        tiles = code.meta["tile_pair"]
        self.epsilon = epsilon
        self.basis = basis
        self.shape = (L, M)
        # everything below is relative to the current origin
        self.code0 = build_tile_code(tiles, L, M)
        self.ext0 = build_tile_code(tiles, L + 1, M, origin=(-1, 0) if epsilon > 0 else (0, 0))
        self.auto: LogicalAuto = derived_auto(self.code0, basis, "x", epsilon)
        self.ancilla_col = -1 if epsilon > 0 else L
        self.measured_col = L - 1 if epsilon > 0 else 0
        self.ancillas = [(c, (self.ancilla_col, b)) for b in range(M) for c in (0, 1)]
        self.measured = [(c, (self.measured_col, b)) for b in range(M) for c in (0, 1)]
        self.ext_x_rows = [[self.ext0.qubits[i] for i in self.ext0.hx.row_support(r)] for r in range(self.ext0.hx.rows)]
        self.z_supports = [[self.code0.qubits[i] for i in basis.zs.row_support(r)] for r in range(basis.k)]
        # duals of the Z images: Y_i = sum_l A[l][i] X_l (canonical X of the new code)
        self.duals = (self.auto.A.T @ basis.xs).to_dense()

    def _abs(self, labels, origin):
        ox, oy = origin
        return [(c, (a + ox, b + oy)) for c, (a, b) in labels]

    def run(self, state: StabilizerState, origin, rng: random.Random, seed=None, check=False):
        """One slide of the code whose south-west cell is ``origin``.  Returns (new origin, trace)."""
        ox, oy = origin
        eps = self.epsilon
        # P1
        for lab in self._abs(self.ancillas, origin):
            pos = state.add_qubit(lab)
            state.gz.append(1 << pos, 0)
        # P2
        x_out = []
        for row in self.ext_x_rows:
            x_out.append(measure_x(state, state.bits_of(self._abs(row, origin)), rng))
            if check and not state.commuting():
                raise TableauError("commutation lost after X measurement")
        # P3
        measured_abs = self._abs(self.measured, origin)
        z_out = []
        for lab in measured_abs:
            z_out.append(measure_z_qubit(state, lab, rng))
            if check and not state.commuting():
                raise TableauError("commutation lost after Z measurement")
        minus = {lab for lab, o in zip(measured_abs, z_out) if o == -1}
        j = [len(minus.intersection(self._abs(s, origin))) & 1 for s in self.z_supports]
        for lab in measured_abs:
            discard_qubit(state, lab)
        new_origin = (ox - eps, oy)
        # P4
        new_code = translate_code(self.code0, *new_origin)
        corr = np.zeros(new_code.n, dtype=np.uint8)
        for i, ji in enumerate(j):
            if ji:
                corr ^= self.duals[i]
        if corr.any():
            apply_x(state, state.vec_to_bits(new_code, corr))
        trace = ProtocolTrace(seed, eps, x_out, z_out, sorted(minus), j)
        return new_origin, trace

    def expected_group(self, state: StabilizerState, origin, new_origin, z_signs, x_out, z_meas) -> tuple:
        """Signed canonical group predicted for the slid state.

        X-checks carry their measured signs; a Z-check cut by the measured column
        carries the product of the outcomes it lost; logical rows are
        ``sigma_i T(Z_i)``.
        """
        new_code = translate_code(self.code0, *new_origin)
        ext = translate_code(self.ext0, *origin)
        sign_of_x = {lab: o for lab, o in zip(ext.x_labels, x_out)}
        gx = []
        for r in range(new_code.hx.rows):
            lab = new_code.x_labels[r]
            gx.append((state.vec_to_bits(new_code, new_code.hx.row(r)), 1 if sign_of_x[lab] == -1 else 0))
        gz = []
        ext_z = {lab: i for i, lab in enumerate(ext.z_labels)}
        for r in range(new_code.hz.rows):
            lab = new_code.z_labels[r]
            sign = 0
            full = ext.hz.row_support(ext_z[lab])
            for i in full:
                q = ext.qubits[i]
                if q in z_meas and z_meas[q] == -1:
                    sign ^= 1
            gz.append((state.vec_to_bits(new_code, new_code.hz.row(r)), sign))
        zi = self.auto.z_images
        for k, s in enumerate(z_signs):
            gz.append((state.vec_to_bits(new_code, zi.row(k)), 1 if s == -1 else 0))
        return canonical(gx), canonical(gz)

    def check(self, state: StabilizerState, origin, new_origin, z_signs, trace: ProtocolTrace) -> bool:
        """Whether the slid state equals the predicted signed group exactly."""
        z_meas = dict(zip(self._abs(self.measured, origin), trace.z_outcomes))
        exp = self.expected_group(state, origin, new_origin, z_signs, trace.x_outcomes, z_meas)
        return state.canonical() == exp

    def reset_frame(self, state: StabilizerState, origin) -> None:
        """Pauli frame update returning every check sign to +1 without touching the logical Z signs."""
        code = translate_code(self.code0, *origin)
        sx = np.array([_sign_in(state.gx, state.vec_to_bits(code, code.hx.row(r))) for r in range(code.hx.rows)], np.uint8)
        if sx.any():
            e = solve(code.hx, sx)
            apply_z(state, state.vec_to_bits(code, e))
        sz = np.array([_sign_in(state.gz, state.vec_to_bits(code, code.hz.row(r))) for r in range(code.hz.rows)], np.uint8)
        if sz.any():
            zl = self.basis.zs
            lhs = BitMatrix.vstack([code.hz, zl])
            e = solve(lhs, np.concatenate([sz, np.zeros(zl.rows, np.uint8)]))
            if e is None:
                raise TableauError("no X frame update fixes the Z-check signs")
            apply_x(state, state.vec_to_bits(code, e))

    def logical_signs(self, state: StabilizerState, origin) -> list[int]:
        code = translate_code(self.code0, *origin)
        out = []
        for k in range(self.basis.k):
            s = _sign_in(state.gz, state.vec_to_bits(code, self.basis.zs.row(k)))
            out.append(-1 if s else 1)
        return out


def _sign_in(rows: _Rows, bits: int) -> int:
    s = rows.sign_of(bits)
    if s is None:
        raise TableauError("operator is not in the stabilizer group")
    return s


def transformed_signs(auto: LogicalAuto, z_signs) -> list[int]:
    """Canonical logical Z signs after the slide: tau = A sigma over GF(2)."""
    sigma = np.array([1 if s == -1 else 0 for s in z_signs], dtype=np.uint8)
    tau = auto.A.dot_vec(sigma)
    return [-1 if t else 1 for t in tau]


def run_slide(code: CssCode, basis: SymplecticBasis, state: StabilizerState, epsilon: int = 1, seed: int | None = None):
    """One slide.  Returns (code on the shifted lattice, state, trace); the state is updated in place."""
    slider = Slider(code, basis, epsilon)
    D, L, M, x0, y0 = _geometry(code)
    rng = random.Random(seed)
    new_origin, trace = slider.run(state, (x0, y0), rng, seed)
    return translate_code(slider.code0, *new_origin), state, trace
