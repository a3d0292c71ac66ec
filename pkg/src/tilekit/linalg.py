"""Bit-packed GF(2) linear algebra.

Rows are packed little-endian into ``uint64`` words: column ``c`` lives in word
``c >> 6`` at bit ``c & 63``.  Pad bits past ``cols`` are kept zero.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numba
import numpy as np

WORD = 64

LinAlgError = np.linalg.LinAlgError


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


@numba.njit(cache=True)
def _rref_inplace(data, ncols):
    nrows, nw = data.shape
    pivots = np.empty(min(nrows, ncols), np.int64)
    r = 0
    one = np.uint64(1)
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = one << np.uint64(c & 63)
        p = -1
        for i in range(r, nrows):
            if data[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                tmp = data[p, k]
                data[p, k] = data[r, k]
                data[r, k] = tmp
        for i in range(nrows):
            if i != r and (data[i, w] & bit):
                for k in range(w, nw):
                    data[i, k] ^= data[r, k]
        pivots[r] = c
        r += 1
    return pivots[:r]


def pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 2D 0/1 array into uint64 words."""
    dense = np.asarray(dense)
    rows, cols = dense.shape
    nw = _nwords(cols)
    bits = np.zeros((rows, nw * WORD), dtype=np.uint8)
    bits[:, :cols] = dense & 1
    packed = np.packbits(bits, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(rows, nw)


def unpack(data: np.ndarray, cols: int) -> np.ndarray:
    rows = data.shape[0]
    if rows == 0 or data.shape[1] == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(data).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class BitMatrix:
    """Dense GF(2) matrix with bit-packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None) -> None:
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.rows = rows
        self.cols = cols
        if data is None:
            data = np.zeros((rows, _nwords(cols)), dtype=np.uint64)
        if data.shape != (rows, _nwords(cols)) or data.dtype != np.uint64:
            raise ValueError("packed data has the wrong shape or dtype")
        self.data = data

    # construction ---------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2:
            raise ValueError("expected a 2D array")
        return cls(dense.shape[0], dense.shape[1], pack(dense))

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], cols: int) -> BitMatrix:
        """One row per iterable of column indices (repeated indices cancel)."""
        supports = list(supports)
        dense = np.zeros((len(supports), cols), dtype=np.uint8)
        for i, s in enumerate(supports):
            for c in s:
                dense[i, c] ^= 1
        return cls.from_dense(dense)

    @classmethod
    def vstack(cls, mats: Sequence[BitMatrix]) -> BitMatrix:
        cols = {m.cols for m in mats}
        if len(cols) != 1:
            raise ValueError("column counts differ")
        (c,) = cols
        data = np.concatenate([m.data for m in mats], axis=0) if mats else None
        return cls(sum(m.rows for m in mats), c, data)

    @classmethod
    def hstack(cls, mats: Sequence[BitMatrix]) -> BitMatrix:
        return cls.from_dense(np.concatenate([m.to_dense() for m in mats], axis=1))

    # views ----------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        return unpack(self.data, self.cols)

    def copy(self) -> BitMatrix:
        return BitMatrix(self.rows, self.cols, self.data.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense().T)

    def row(self, i: int) -> np.ndarray:
        return unpack(self.data[i : i + 1], self.cols)[0]

    def row_support(self, i: int) -> list[int]:
        return np.flatnonzero(self.row(i)).tolist()

    def take_rows(self, idx: Sequence[int]) -> BitMatrix:
        idx = np.asarray(idx, dtype=np.int64)
        return BitMatrix(len(idx), self.cols, self.data[idx].copy())

    def take_cols(self, idx: Sequence[int]) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense()[:, np.asarray(idx, dtype=np.int64)])

    def is_zero(self) -> bool:
        return not self.data.any()

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0)

    # arithmetic -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self.data ^ other.data)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        a = self.to_dense().astype(np.float64)
        b = other.to_dense().astype(np.float64)
        prod = (a @ b).astype(np.int64) & 1
        return BitMatrix.from_dense(prod.astype(np.uint8))

    def dot_vec(self, v) -> np.ndarray:
        """Matrix-vector product, ``v`` a 0/1 vector of length ``cols``."""
        v = np.asarray(v, dtype=np.int64)
        return ((self.to_dense().astype(np.int64) @ v) & 1).astype(np.uint8)

    def __pow__(self, t: int) -> BitMatrix:
        return mat_pow(self, t)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return "\n".join("".join(str(b) for b in r) for r in self.to_dense())


# elimination ---------------------------------------------------------------


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int], int]:
    """Reduced row echelon form with first-nonzero pivoting."""
    data = m.data.copy()
    pivots = _rref_inplace(data, m.cols)
    return BitMatrix(m.rows, m.cols, data), pivots.tolist(), len(pivots)


def rank(m: BitMatrix) -> int:
    return rref(m)[2]


def row_basis(m: BitMatrix) -> BitMatrix:
    """Nonzero rows of the rref (a canonical basis of the row space)."""
    r, _, k = rref(m)
    return r.take_rows(range(k))


def kernel(m: BitMatrix) -> BitMatrix:
    """Rows spanning ``{v : m v^T = 0}``."""
    r, pivots, k = rref(m)
    n = m.cols
    free = sorted(set(range(n)) - set(pivots))
    dense = r.to_dense()[:k]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for j, f in enumerate(free):
        out[j, f] = 1
        if k:
            out[j, pivots] = dense[:, f]
    return BitMatrix.from_dense(out)


def solve(m: BitMatrix, rhs) -> np.ndarray | None:
    """Some ``x`` with ``m x^T = rhs`` (free variables set to 0), or None."""
    rhs = np.asarray(rhs, dtype=np.uint8).reshape(-1)
    if rhs.shape[0] != m.rows:
        raise ValueError(f"rhs has length {rhs.shape[0]}, expected {m.rows}")
    aug = np.concatenate([m.to_dense(), rhs[:, None]], axis=1)
    r, pivots, k = rref(BitMatrix.from_dense(aug))
    if k and pivots[-1] == m.cols:
        return None
    dense = r.to_dense()
    x = np.zeros(m.cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = dense[i, m.cols]
    return x


def in_rowspace(m: BitMatrix, v) -> bool:
    return solve(m.T, v) is not None


def inverse(m: BitMatrix) -> BitMatrix:
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    aug = BitMatrix.from_dense(np.concatenate([m.to_dense(), np.eye(n, dtype=np.uint8)], axis=1))
    r, pivots, k = rref(aug)
    if k < n or pivots[n - 1] != n - 1:
        raise LinAlgError("singular matrix over GF(2)")
    return BitMatrix.from_dense(r.to_dense()[:, n:])


def is_invertible(m: BitMatrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def mat_pow(m: BitMatrix, t: int) -> BitMatrix:
    if m.rows != m.cols:
        raise ValueError("power of a non-square matrix")
    if t < 0:
        return mat_pow(inverse(m), -t)
    result = BitMatrix.identity(m.rows)
    base = m
    while t:
        if t & 1:
            result = result @ base
        t >>= 1
        if t:
            base = base @ base
    return result


def is_identity(m: BitMatrix) -> bool:
    return m.rows == m.cols and m == BitMatrix.identity(m.rows)


# univariate polynomials ------------------------------------------------------


@dataclass(frozen=True, order=True)
class UniPoly:
    """Univariate GF(2) polynomial; bit i of ``bits`` is the x^i coefficient."""

    bits: int

    @property
    def degree(self) -> int:
        return self.bits.bit_length() - 1

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: UniPoly) -> UniPoly:
        return UniPoly(self.bits ^ other.bits)

    def __mul__(self, other: UniPoly) -> UniPoly:
        return UniPoly(clmul(self.bits, other.bits))

    def __divmod__(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        q, r = poly_divmod(self.bits, other.bits)
        return UniPoly(q), UniPoly(r)

    def __mod__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[1]

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[0]

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> UniPoly:
        b = 0
        for e in exps:
            b ^= 1 << e
        return cls(b)

    @classmethod
    def parse(cls, text: str) -> UniPoly:
        from .poly import parse_poly

        return cls.from_exponents(m[0] for m in parse_poly(text, 1).support)

    def exponents(self) -> list[int]:
        return [i for i in range(self.bits.bit_length()) if (self.bits >> i) & 1]

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for e in reversed(self.exponents()):
            terms.append("1" if e == 0 else ("x" if e == 1 else f"x^{e}"))
        return "+".join(terms)


def clmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def char_poly(m: BitMatrix) -> UniPoly:
    """Characteristic polynomial via reduction to upper Hessenberg form."""
    if m.rows != m.cols:
        raise ValueError("char_poly of a non-square matrix")
    n = m.rows
    h = m.to_dense().copy()
    for j in range(n - 2):
        nz = np.flatnonzero(h[j + 1 :, j])
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            h[[i, j + 1], :] = h[[j + 1, i], :]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        for r in range(j + 2, n):
            if h[r, j]:
                h[r, :] ^= h[j + 1, :]
                h[:, j + 1] ^= h[:, r]
    # p_k = (x + h_kk) p_{k-1} + sum_{i<k} h_ik (prod_{i<l<=k} h_{l,l-1}) p_{i-1}
    p = [1]
    for k in range(n):
        acc = clmul(0b10 | int(h[k, k]), p[k])
        prod = 1
        for i in range(k - 1, -1, -1):
            prod &= int(h[i + 1, i])
            if not prod:
                break
            if h[i, k]:
                acc ^= p[i]
        p.append(acc)
    return UniPoly(p[n])


def factor(p: UniPoly) -> list[UniPoly]:
    """Irreducible factors with multiplicity, by trial division (small degrees)."""
    if not p:
        raise ValueError("cannot factor the zero polynomial")
    bits = p.bits
    out: list[int] = []
    d = 1
    while bits.bit_length() - 1 >= 2 * d:
        for q in range(1 << d, 1 << (d + 1)):
            while True:
                quo, rem = poly_divmod(bits, q)
                if rem:
                    break
                out.append(q)
                bits = quo
        d += 1
    if bits.bit_length() > 1:
        out.append(bits)
    return sorted(UniPoly(b) for b in out)


def _prime_factors(n: int) -> set[int]:
    out = set()
    q = 2
    while q * q <= n:
        while n % q == 0:
            out.add(q)
            n //= q
        q += 1
    if n > 1:
        out.add(n)
    return out


def matrix_order(m: BitMatrix) -> int:
    """Least t >= 1 with m^t = I, from the characteristic polynomial's factors."""
    if not is_invertible(m):
        raise LinAlgError("matrix_order of a singular matrix")
    counts: dict[int, int] = {}
    for q in factor(char_poly(m)):
        counts[q.bits] = counts.get(q.bits, 0) + 1
    bound = 1
    primes: set[int] = set()
    for q, e in counts.items():
        d = q.bit_length() - 1
        two_power = 1 << max(0, math.ceil(math.log2(e))) if e > 1 else 1
        part = ((1 << d) - 1) * two_power
        bound = math.lcm(bound, part)
        primes |= _prime_factors((1 << d) - 1)
        if two_power > 1:
            primes.add(2)
    if not is_identity(mat_pow(m, bound)):
        raise AssertionError("order bound from the characteristic polynomial failed")
    order = bound
    for q in sorted(primes):
        while order % q == 0 and is_identity(mat_pow(m, order // q)):
            order //= q
    return order


def companion(p: UniPoly) -> BitMatrix:
    """Companion matrix of a monic polynomial (multiplication by x in F2[x]/(p))."""
    n = p.degree
    dense = np.zeros((n, n), dtype=np.uint8)
    for i in range(1, n):
        dense[i, i - 1] = 1
    for i in range(n):
        dense[i, n - 1] = (p.bits >> i) & 1
    return BitMatrix.from_dense(dense)
