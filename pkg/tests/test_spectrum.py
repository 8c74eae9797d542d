import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kicqb import spectrum
from kicqb.model import Boundary


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
def test_catalog_matches_dense_diagonalization(n, boundary):
    assert spectrum.verify_catalog(n, boundary, "XX")
    assert spectrum.verify_catalog(n, boundary, "ZZ")


@pytest.mark.parametrize("n", range(2, 8))
def test_xx_and_zz_spectra_coincide(n):
    assert spectrum.spectra_equivalent(n, "OBC") and spectrum.spectra_equivalent(n, "PBC")


@pytest.mark.parametrize("n", range(5, 11))
def test_open_catalog_equals_all_spin_sums(n):
    sums = {spectrum.spin_sum(s) % (8 * n) for s in itertools.product((1, -1), repeat=n)}
    assert set(spectrum.eigenphases_obc(n).units) == sums
    assert spectrum.attainable_residues(n) == sorted(sums)


@pytest.mark.parametrize("n,target", [(9, 37), (10, 14)])
def test_worked_residues(n, target):
    spins = spectrum.spin_string_for_residue(n, target)
    assert len(spins) == n and set(spins) <= {1, -1}
    assert spectrum.spin_sum(spins) % (8 * n) == target
    assert spectrum.eigenphase_from_spins(n, spins) == pytest.approx(2 * math.pi * target / (8 * n))
    assert target in spectrum.eigenphases_obc(n).units


@given(st.integers(2, 16), st.data())
def test_solver_reaches_every_attainable_residue(n, data):
    target = data.draw(st.sampled_from(spectrum.attainable_residues(n)))
    assert spectrum.spin_sum(spectrum.spin_string_for_residue(n, target)) % (8 * n) == target


def test_unattainable_residues_raise():
    with pytest.raises(spectrum.InfeasibleResidue, match="parity"):
        spectrum.spin_string_for_residue(9, 36)
    missing = sorted(set(range(0, 32, 2)) - set(spectrum.attainable_residues(4)))
    with pytest.raises(spectrum.InfeasibleResidue):
        spectrum.spin_string_for_residue(4, missing[0])


def test_json_shape():
    data = spectrum.eigenphases(3, Boundary.PBC).to_json()
    assert data["n"] == 3 and data["boundary"] == "PBC"
    assert all(0 <= p < 2 * math.pi for p in data["phases"])
