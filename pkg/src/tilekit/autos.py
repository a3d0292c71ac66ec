"""Derived automorphisms T_x, T_y acting on the canonical logical basis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .builder import HORIZONTAL, VERTICAL, CssCode
from .linalg import BitMatrix, inverse, is_identity, kernel, mat_pow, matrix_order, rank, solve
from .logicals import SymplecticBasis, _geometry, bottom_boundary_matrix
from .quotient import QuotientRing


class AutoError(RuntimeError):
    pass


@dataclass
class LogicalAuto:
    """Columns of ``A`` are images of the X-logicals, columns of ``B`` of the Z-logicals."""

    A: BitMatrix
    B: BitMatrix
    axis: str = "x"
    direction: int = 1
    x_images: BitMatrix | None = field(default=None, repr=False)
    z_images: BitMatrix | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.A.rows

    def block(self) -> BitMatrix:
        k = self.k
        dense = np.zeros((2 * k, 2 * k), dtype=np.uint8)
        dense[:k, :k] = self.A.to_dense()
        dense[k:, k:] = self.B.to_dense()
        return BitMatrix.from_dense(dense)

    def symplectic(self) -> bool:
        return is_identity(self.A.T @ self.B)

    def __matmul__(self, other: LogicalAuto) -> LogicalAuto:
        return LogicalAuto(self.A @ other.A, self.B @ other.B, self.axis, self.direction)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogicalAuto):
            return NotImplemented
        return self.A == other.A and self.B == other.B

    def order(self) -> int:
        return matrix_order(self.block())


def identity_auto(k: int) -> LogicalAuto:
    return LogicalAuto(BitMatrix.identity(k), BitMatrix.identity(k), "id", 0)


def shift_vec(code: CssCode, bits, delta: tuple[int, int]) -> tuple[np.ndarray, int]:
    """Translate an operator; returns the part that stays on the lattice and the dropped weight."""
    out = np.zeros(code.n, dtype=np.uint8)
    dropped = 0
    for i in np.flatnonzero(np.asarray(bits)):
        c, (a, b) = code.qubits[i]
        j = code.index(c, (a + delta[0], b + delta[1]))
        if j is None:
            dropped += 1
        else:
            out[j] ^= 1
    return out, dropped


def _extension_cells(code: CssCode, axis: int, direction: int) -> list[list[int]]:
    """Candidate qubit sets (tried in order) on the boundary line vacated by the shift."""
    D, L, M, x0, y0 = _geometry(code)
    if axis == 0:
        a = x0 if direction > 0 else x0 + L - 1
        line = [(a, y0 + b) for b in range(D)]
    else:
        b = y0 if direction > 0 else y0 + M - 1
        line = [(x0 + a, b) for a in range(D)]
    vert = [code.index(VERTICAL, m) for m in line]
    horiz = [code.index(HORIZONTAL, m) for m in line]
    return [vert, horiz, vert + horiz]


def extend_to_logical(code: CssCode, v: np.ndarray, checks: BitMatrix, axis: int, direction: int) -> np.ndarray:
    """Add support on the vacated boundary line so ``v`` commutes with ``checks``."""
    syn = checks.dot_vec(v)
    if not syn.any():
        return v
    dense = checks.to_dense()
    for cols in _extension_cells(code, axis, direction):
        a = BitMatrix.from_dense(dense[:, cols])
        sol = solve(a, syn)
        if sol is None:
            continue
        if kernel(a).rows:
            raise AutoError("boundary extension is not unique")
        out = v.copy()
        out[cols] ^= sol
        return out
    raise AutoError("no boundary extension cancels the residual syndrome")


def _pair(xs: BitMatrix, ops: BitMatrix) -> BitMatrix:
    """Entry [i][j] = overlap parity of xs_i with ops_j."""
    return xs @ ops.T


def _in_rowspace(stabs: BitMatrix, v: np.ndarray) -> bool:
    return rank(BitMatrix.vstack([stabs, BitMatrix.from_dense(v[None, :])])) == rank(stabs)


def image_ops(code: CssCode, basis: SymplecticBasis, axis: str = "x", direction: int = 1):
    """Operator-level images (X images, Z images) of the canonical basis.

    The logical type running along the shift axis is translated directly; the
    other type is translated, cut to the lattice and re-closed on the vacated
    boundary line.  Returns None for the translated type when the translation
    leaves the lattice (the inverse shift on the strip side).
    """
    ax = 0 if axis == "x" else 1
    delta = (direction, 0) if ax == 0 else (0, direction)
    # along x the X strip is carried and Z strip re-closed; along y the roles swap
    carried, closed = (basis.xs, basis.zs) if ax == 0 else (basis.zs, basis.xs)
    carried_checks, closed_checks = (code.hz, code.hx) if ax == 0 else (code.hx, code.hz)
    carried_img = []
    for i in range(basis.k):
        v, dropped = shift_vec(code, carried.row(i), delta)
        if dropped or carried_checks.dot_vec(v).any():
            carried_img = None
            break
        carried_img.append(v)
    closed_img = []
    for i in range(basis.k):
        v, _ = shift_vec(code, closed.row(i), delta)
        closed_img.append(extend_to_logical(code, v, closed_checks, ax, direction))
    carried_m = BitMatrix.from_dense(np.array(carried_img)) if carried_img is not None else None
    closed_m = BitMatrix.from_dense(np.array(closed_img))
    return (carried_m, closed_m) if ax == 0 else (closed_m, carried_m)


def derived_auto(code: CssCode, basis: SymplecticBasis, axis: str = "x", direction: int = 1) -> LogicalAuto:
    """Matrices of T_axis^direction on the canonical basis, from operator images."""
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    xi, zi = image_ops(code, basis, axis, direction)
    A = _pair(basis.zs, xi) if xi is not None else None
    B = _pair(basis.xs, zi) if zi is not None else None
    if A is None:
        A = inverse(B).T
    if B is None:
        B = inverse(A).T
    auto = LogicalAuto(A, B, axis, direction, xi, zi)
    _certify(code, basis, auto)
    return auto


def _certify(code: CssCode, basis: SymplecticBasis, auto: LogicalAuto) -> None:
    if not auto.symplectic():
        raise AutoError("image basis is not symplectic (A^T B != I)")
    for imgs, mat, stabs, canon, checks in (
        (auto.x_images, auto.A, code.hx, basis.xs, code.hz),
        (auto.z_images, auto.B, code.hz, basis.zs, code.hx),
    ):
        if imgs is None:
            continue
        combo = (mat.T @ canon).to_dense()
        for j in range(imgs.rows):
            v = imgs.row(j)
            if checks.dot_vec(v).any():
                raise AutoError("image does not commute with the checks")
            if not _in_rowspace(stabs, v ^ combo[j]):
                raise AutoError("image differs from its canonical form by a non-stabilizer")


def intertwiner(code: CssCode, basis: SymplecticBasis, q: QuotientRing, auto: LogicalAuto) -> BitMatrix:
    """Delta A Delta^-1, with Delta the boundary-class matrix of the X-logicals."""
    delta = bottom_boundary_matrix(code, q, basis)
    return delta @ auto.A @ inverse(delta)


def intertwiner_check(code: CssCode, basis: SymplecticBasis, q: QuotientRing, auto: LogicalAuto) -> dict:
    """Compare the boundary conjugate of A with the quotient multiplication operators."""
    delta = bottom_boundary_matrix(code, q, basis)
    if rank(delta) != basis.k:
        return {"passed": False, "reason": "boundary map is not an isomorphism"}
    conj = delta @ auto.A @ inverse(delta)
    ax = 0 if auto.axis == "x" else 1
    m = q.mult[ax] if auto.direction > 0 else q.inverse_mult(ax)
    minv = q.inverse_mult(ax) if auto.direction > 0 else q.mult[ax]
    exact = delta @ auto.A == m @ delta
    return {
        "passed": bool(exact or conj == minv),
        "matches": "M" if exact else ("M^-1" if conj == minv else None),
        "exact": bool(exact),
    }


def auto_power(auto: LogicalAuto, t: int) -> LogicalAuto:
    return LogicalAuto(mat_pow(auto.A, t), mat_pow(auto.B, t), auto.axis, auto.direction)


def discrete_log(a: LogicalAuto, b: LogicalAuto, limit: int | None = None) -> int | None:
    """Least t >= 1 with a^t = b, by stepping through the cycle of a."""
    if limit is None:
        limit = a.order()
    cur = a
    for t in range(1, limit + 1):
        if cur == b:
            return t
        cur = cur @ a
    return None


# circuit synthesis -----------------------------------------------------------------


def synthesize_circuit(auto: LogicalAuto | BitMatrix) -> list[tuple[str, int, int]]:
    """CNOT/SWAP circuit whose action on X-logicals is A.

    Gates are ``("CNOT", control, target)`` and ``("SWAP", i, j)`` in time order;
    CNOT(c, t) maps X_c to X_c X_t.
    """
    A = auto.A if isinstance(auto, LogicalAuto) else auto
    k = A.rows
    m = A.to_dense().copy()
    ops: list[tuple[str, int, int]] = []
    for col in range(k):
        piv = next((r for r in range(col, k) if m[r, col]), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular matrix cannot be synthesized")
        if piv != col:
            m[[piv, col]] = m[[col, piv]]
            ops.append(("SWAP", col, piv))
        for r in range(k):
            if r != col and m[r, col]:
                m[r] ^= m[col]
                ops.append(("CNOT", col, r))
    return list(reversed(ops))


def gate_matrix(k: int, gate: tuple[str, int, int]) -> BitMatrix:
    kind, a, b = gate
    dense = np.eye(k, dtype=np.uint8)
    if kind == "CNOT":
        dense[b, a] = 1
    elif kind == "SWAP":
        dense[[a, b]] = dense[[b, a]]
    else:
        raise ValueError(f"unknown gate {kind!r}")
    return BitMatrix.from_dense(dense)


def replay(k: int, gates: list[tuple[str, int, int]]) -> tuple[BitMatrix, BitMatrix]:
    """(X action, Z action) of a gate sequence applied in order."""
    x = BitMatrix.identity(k)
    z = BitMatrix.identity(k)
    for g in gates:
        gm = gate_matrix(k, g)
        x = gm @ x
        z = inverse(gm).T @ z
    return x, z


def circuit_text(gates: list[tuple[str, int, int]]) -> str:
    return "".join(f"{kind} {a} {b}\n" for kind, a, b in gates)
