"""Minimum distance: exact enumeration for tiny codes, information-set upper bounds otherwise."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from .builder import CssCode
from .linalg import BitMatrix, kernel, rank, row_basis, unpack

# TBB on this platform is too old and numba warns on every import; skip it.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

EXACT_MAX_N = 28
CHUNK = 1024


class BudgetExceeded(ValueError):
    pass


@dataclass
class DistanceReport:
    d_exact: float | None = None
    d_upper: float = math.inf
    witness: list[int] | None = None
    kind: str | None = None
    trials: int = 0
    seed: int | None = None
    per_kind: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def num(v):
            return "inf" if v == math.inf else v

        return {
            "d_exact": num(self.d_exact) if self.d_exact is not None else None,
            "d_upper": num(self.d_upper),
            "witness": {"kind": self.kind, "support": self.witness} if self.witness is not None else None,
            "trials": self.trials,
            "seed": self.seed,
            "per_kind": {k: num(v) for k, v in self.per_kind.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def logical_space(stabs: BitMatrix, checks: BitMatrix) -> BitMatrix:
    """Rows of ker(checks) independent modulo rowspace(stabs)."""
    ker = kernel(checks)
    base = row_basis(stabs)
    rows = []
    cur = base
    r0 = rank(cur)
    for i in range(ker.rows):
        cand = BitMatrix.vstack([cur, ker.take_rows([i])])
        r1 = rank(cand)
        if r1 > r0:
            rows.append(i)
            cur, r0 = cand, r1
    return ker.take_rows(rows) if rows else BitMatrix.zeros(0, checks.cols)


def is_logical(code: CssCode, kind: str, bits) -> bool:
    """In ker of the opposite checks and outside the same-type stabilizer rowspace."""
    v = np.asarray(bits, dtype=np.uint8)
    stabs, checks = (code.hx, code.hz) if kind == "X" else (code.hz, code.hx)
    if checks.dot_vec(v).any():
        return False
    return rank(BitMatrix.vstack([stabs, BitMatrix.from_dense(v[None, :])])) > rank(stabs)


def _kinds(code: CssCode):
    yield "X", code.hx, code.hz
    yield "Z", code.hz, code.hx


# numba kernels ---------------------------------------------------------------------


@numba.njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True)
def _gray_min(basis, syn):
    """Minimum weight over nonzero combinations with nonzero logical syndrome."""
    dim = basis.shape[0]
    best = np.int64(1 << 30)
    best_v = np.uint64(0)
    v = np.uint64(0)
    s = np.uint64(0)
    for i in range(1, np.int64(1) << dim):
        j = 0
        t = i
        while (t & 1) == 0:
            t >>= 1
            j += 1
        v ^= basis[j]
        s ^= syn[j]
        if s != 0:
            w = np.int64(_popcount(v))
            if w < best:
                best = w
                best_v = v
    return best, best_v


@numba.njit(cache=True)
def _splitmix(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return state, z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _trial(gen, lz, n, key, out):
    """One permuted full rref of ``gen``; returns the least logical row weight (or n+1)."""
    r, nw = gen.shape
    work = gen.copy()
    perm = np.arange(n)
    st = key
    for i in range(n - 1, 0, -1):
        st, z = _splitmix(st)
        j = np.int64(z % np.uint64(i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    one = np.uint64(1)
    pr = 0
    for idx in range(n):
        if pr == r:
            break
        c = perm[idx]
        w = c >> 6
        bit = one << np.uint64(c & 63)
        p = -1
        for i in range(pr, r):
            if work[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != pr:
            for k in range(nw):
                tmp2 = work[p, k]
                work[p, k] = work[pr, k]
                work[pr, k] = tmp2
        for i in range(r):
            if i != pr and (work[i, w] & bit):
                for k in range(nw):
                    work[i, k] ^= work[pr, k]
        pr += 1
    best = n + 1
    for i in range(pr):
        wt = 0
        for k in range(nw):
            wt += np.int64(_popcount(work[i, k]))
        if wt >= best:
            continue
        logical = False
        for a in range(lz.shape[0]):
            par = np.uint64(0)
            for k in range(nw):
                par ^= work[i, k] & lz[a, k]
            if _popcount(par) & one:
                logical = True
                break
        if logical:
            best = wt
            for k in range(nw):
                out[k] = work[i, k]
    return best


@numba.njit(cache=True, parallel=True)
def _chunk(gen, lz, n, seed, start, count, weights, rows):
    for t in numba.prange(count):
        st, key = _splitmix(np.uint64(seed) * np.uint64(0x100000001B3) + np.uint64(start + t))
        weights[t] = _trial(gen, lz, n, key, rows[t])


def _threads() -> int:
    env = os.environ.get("TILEKIT_THREADS")
    cap = numba.config.NUMBA_NUM_THREADS
    if env:
        try:
            return max(1, min(int(env), cap))
        except ValueError:
            pass
    return cap


# public API ------------------------------------------------------------------------


def exact_distance(code: CssCode) -> DistanceReport:
    """Exact distance by enumerating each kernel; codes with k=0 report infinity."""
    if code.n > EXACT_MAX_N:
        raise BudgetExceeded(f"exact enumeration limited to n <= {EXACT_MAX_N}, got {code.n}")
    rep = DistanceReport(d_exact=math.inf, d_upper=math.inf)
    for kind, stabs, checks in _kinds(code):
        lz = logical_space(checks, stabs)
        ker = kernel(checks)
        if lz.rows == 0 or ker.rows == 0:
            rep.per_kind[kind] = math.inf
            continue
        weights = 1 << np.arange(code.n, dtype=np.uint64)
        kb = ker.to_dense().astype(np.uint64) @ weights
        syn_bits = (ker @ lz.T).to_dense().astype(np.uint64) @ (1 << np.arange(lz.rows, dtype=np.uint64))
        best, v = _gray_min(kb.astype(np.uint64), syn_bits.astype(np.uint64))
        rep.per_kind[kind] = int(best)
        if best < rep.d_exact:
            rep.d_exact = int(best)
            rep.d_upper = int(best)
            rep.kind = kind
            rep.witness = [i for i in range(code.n) if (int(v) >> i) & 1]
    return rep


def stochastic_upper(
    code: CssCode,
    trials: int,
    seed: int = 0,
    target: int | None = None,
    threads: int | None = None,
) -> DistanceReport:
    """Information-set upper bound on the distance.

    Each trial row-reduces [stabilizers; logicals] of one type under a random
    column order and keeps the lightest row that is a nontrivial logical.  Trial
    ``t`` of seed ``s`` always draws the same column order, so the bound is
    reproducible and nonincreasing in ``trials``.  ``target`` stops early (at a
    chunk boundary) once the bound drops to it.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    numba.set_num_threads(threads or _threads())
    prepared = []
    for kind, stabs, checks in _kinds(code):
        lx = logical_space(stabs, checks)
        if lx.rows == 0:
            continue
        lz = logical_space(checks, stabs)
        gen = row_basis(BitMatrix.vstack([stabs, lx]))
        prepared.append((kind, np.ascontiguousarray(gen.data), np.ascontiguousarray(lz.data)))
    if not prepared:
        raise ValueError("code has no logical qubits")
    rep = DistanceReport(seed=seed)
    done = 0
    best_rows: dict[str, np.ndarray] = {}
    while done < trials:
        count = min(CHUNK, trials - done)
        for ki, (kind, gen, lz) in enumerate(prepared):
            weights = np.empty(count, np.int64)
            rows = np.zeros((count, gen.shape[1]), np.uint64)
            _chunk(gen, lz, code.n, seed * 2 + ki, done, count, weights, rows)
            t = int(np.argmin(weights))
            w = int(weights[t])
            if w <= code.n and w < rep.per_kind.get(kind, math.inf):
                rep.per_kind[kind] = w
                best_rows[kind] = rows[t]
        done += count
        if target is not None and min(rep.per_kind.values(), default=math.inf) <= target:
            break
    rep.trials = done
    for kind, w in sorted(rep.per_kind.items(), key=lambda kv: (kv[1], kv[0])):
        rep.d_upper = w
        rep.kind = kind
        rep.witness = [int(i) for i in np.flatnonzero(unpack(best_rows[kind][None, :], code.n)[0])]
        break
    if rep.witness is not None:
        v = np.zeros(code.n, np.uint8)
        v[rep.witness] = 1
        if not is_logical(code, rep.kind, v) or len(rep.witness) != rep.d_upper:
            raise RuntimeError("distance witness failed verification")
    return rep
