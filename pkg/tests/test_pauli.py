import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from kicqb.model import ChargerSpec
from kicqb.pauli import (
    LocalState,
    NonCliffordError,
    PauliString,
    commutes,
    conjugate_by_layer,
    conjugate_by_rotation,
    expectation_in_product_state,
)
from kicqb.oracle import product_state

MATS = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def dense(p: PauliString) -> np.ndarray:
    # site 1 is the most significant qubit
    mat = reduce(np.kron, [MATS[p.letter(s)] for s in range(1, p.n + 1)])
    return (1j) ** p.phase_exp * mat


strings = st.builds(
    lambda n, letters, ph: PauliString.from_sites(n, dict(enumerate(letters[:n], 1)), ph),
    st.just(3),
    st.lists(st.sampled_from("IXYZ"), min_size=3, max_size=3),
    st.integers(0, 3),
)


@given(strings, strings)
def test_product_matches_matrices(p, q):
    assert np.allclose(dense(p * q), dense(p) @ dense(q))


@given(strings, strings)
def test_commutation_matches_matrices(p, q):
    a, b = dense(p), dense(q)
    assert commutes(p, q) == np.allclose(a @ b, b @ a)


@settings(max_examples=60)
@given(strings, strings, st.integers(-3, 3))
def test_rotation_conjugation_matches_matrices(p, g, k):
    g = PauliString(g.n, g.x_mask, g.z_mask, 0)
    theta = k * math.pi / 4
    u = expm(1j * theta * dense(g))
    out = conjugate_by_rotation(p, g, theta)
    assert np.allclose(dense(out), u @ dense(p) @ u.conj().T)


def test_non_clifford_angle_rejected():
    with pytest.raises(NonCliffordError):
        conjugate_by_rotation(PauliString.single(1, 1, "X"), PauliString.single(1, 1, "Z"), 0.3)


def test_parse_and_str_round_trip():
    for text in ("-X3 Z4 Z5 X6", "iY1", "-iZ2", "I"):
        assert str(PauliString.parse(6, text)) == text


@pytest.mark.parametrize("variant", ["XX", "ZZ"])
@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
def test_layer_conjugation_matches_dense_unitaries(variant, boundary):
    n = 4
    spec = ChargerSpec.uniform(variant, n, boundary)
    a, b = ("X", "Z") if variant == "XX" else ("Z", "X")
    h_i = sum(J * dense(PauliString.from_sites(n, {i + 1: a, j + 1: a})) for i, j, J in spec.bonds())
    h_k = sum(f * dense(PauliString.single(n, i + 1, b)) for i, f in enumerate(spec.fields))
    for layer, h in (("Ising", h_i), ("Kick", h_k)):
        u = expm(-1j * h)
        for site in range(1, n + 1):
            for letter in "XYZ":
                p = PauliString.single(n, site, letter)
                out = conjugate_by_layer(p, spec, layer)
                assert np.allclose(dense(out), u.conj().T @ dense(p) @ u)
                assert conjugate_by_layer(out, spec, layer, inverse=True) == p


@pytest.mark.parametrize("local,axis", [(LocalState.KET_ONE, "Z"), (LocalState.KET_MINUS_I, "Y")])
def test_expectation_in_product_state(local, axis):
    n = 3
    psi = product_state(n, axis)
    for letters in ("ZZI", "YYY", "XIZ", "YZI", "IYI"):
        p = PauliString.from_sites(n, dict(enumerate(letters, 1)))
        assert expectation_in_product_state(p, local) == pytest.approx(psi.conj() @ dense(p) @ psi)
