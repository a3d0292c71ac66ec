import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tilekit.autos import (
    auto_power,
    circuit_text,
    derived_auto,
    discrete_log,
    identity_auto,
    intertwiner_check,
    replay,
    shift_vec,
    synthesize_circuit,
)
from tilekit.linalg import BitMatrix, inverse, is_identity, rank
from tilekit.logicals import build_basis

# T_x = diag(A, B) and T_y = diag(C, D) on the basis seeded cell by cell,
# horizontal before vertical within a cell
REFERENCE = {
    "A": "00001101 00001000 00001001 00000010 10001000 01000000 00100010 00010000",
    "B": "00000100 10001001 00000101 00100010 10000000 01000000 00100000 00010000",
    "C": "10010001 00100000 10000000 01000000 00001001 00010010 00001000 00000100",
    "D": "00010010 00100000 10010010 01000000 00010011 00000010 00011011 00000100",
}


def _mat(text):
    return BitMatrix.from_dense(np.array([[int(c) for c in r] for r in text.split()], np.uint8))


@pytest.fixture(scope="module")
def tx(running_code, running_basis):
    return derived_auto(running_code, running_basis, "x")


@pytest.fixture(scope="module")
def ty(running_code, running_basis):
    return derived_auto(running_code, running_basis, "y")


def test_symplectic(tx, ty):
    assert tx.symplectic() and ty.symplectic()
    assert is_identity(tx.A.T @ tx.B)


def test_orders(tx, ty):
    assert tx.order() == 217
    assert ty.order() == 217
    assert is_identity(auto_power(tx, 217).A)
    assert not is_identity(auto_power(tx, 31).A) and not is_identity(auto_power(tx, 7).A)


def test_ty_in_cyclic_group(tx, ty):
    assert discrete_log(tx, ty) == 150
    assert tx @ ty == ty @ tx


def test_reference_matrices(running_code):
    basis = build_basis(running_code, order="abc")
    tx = derived_auto(running_code, basis, "x")
    ty = derived_auto(running_code, basis, "y")
    assert tx.A == _mat(REFERENCE["A"]) and tx.B == _mat(REFERENCE["B"])
    assert ty.A == _mat(REFERENCE["C"]) and ty.B == _mat(REFERENCE["D"])


def test_inverse_directions(running_code, running_basis, tx, ty):
    for axis, fwd in (("x", tx), ("y", ty)):
        back = derived_auto(running_code, running_basis, axis, -1)
        assert (back @ fwd) == identity_auto(8)
        assert back.A == inverse(fwd.A)


def test_images_exact(tx, running_code):
    # the carried X images are plain translates of the X strip logicals
    assert tx.x_images is not None and tx.z_images is not None
    assert (running_code.hz @ tx.x_images.T).is_zero()
    assert (running_code.hx @ tx.z_images.T).is_zero()


def test_intertwiner(running_code, running_basis, running_q, tx, ty):
    for auto in (tx, ty):
        res = intertwiner_check(running_code, running_basis, running_q, auto)
        assert res == {"passed": True, "matches": "M", "exact": True}


def test_shift_vec_drops_boundary(running_code):
    v = np.zeros(running_code.n, np.uint8)
    v[running_code.index(0, (11, 0))] = 1
    out, dropped = shift_vec(running_code, v, (1, 0))
    assert dropped == 1 and not out.any()


def test_circuit_replays(tx):
    gates = synthesize_circuit(tx)
    assert len(gates) == 13
    xa, za = replay(8, gates)
    assert xa == tx.A and za == tx.B
    assert circuit_text(gates).count("\n") == 13


@given(st.integers(1, 10), st.integers(0, 2**31))
def test_circuit_synthesis_property(k, seed):
    d = np.random.default_rng(seed).integers(0, 2, (k, k)).astype(np.uint8)
    m = BitMatrix.from_dense(d)
    if rank(m) < k:
        with pytest.raises(np.linalg.LinAlgError):
            synthesize_circuit(m)
        return
    xa, za = replay(k, synthesize_circuit(m))
    assert xa == m and za == inverse(m).T


def test_bad_arguments(running_code, running_basis):
    with pytest.raises(ValueError):
        derived_auto(running_code, running_basis, "z")
    with pytest.raises(ValueError):
        derived_auto(running_code, running_basis, "x", 2)
