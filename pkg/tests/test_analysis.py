import math

import numpy as np
import pytest

from kicqb import analysis, oracle
from kicqb.model import BatterySpec, ChargerSpec, KickSchedule


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
def test_entropy_profile_matches_schmidt_entropies(n, boundary):
    spec = ChargerSpec.uniform("ZZ", n, boundary)
    cycle = analysis.entropy_cycle(n, boundary)
    states = oracle.evolve_states(spec, 2 * cycle)
    for t, psi in enumerate(states):
        ent = oracle.bond_entropies(psi, n)
        for i in range(1, n):
            assert ent[i - 1] == pytest.approx(analysis.entropy_profile(n, boundary, i, t), abs=1e-8)


def test_entropy_total_peaks():
    assert max(analysis.entropy_total(8, "OBC", t) for t in range(16)) == 16
    assert max(analysis.entropy_total(10, "OBC", t) for t in range(20)) == 25
    assert max(analysis.entropy_total(8, "PBC", t) for t in range(8)) == 16


def test_entropy_total_follows_clamped_parabola():
    for n in (8, 10):
        for t in range(2 * n):
            x = min(t - n / 2, 3 * n / 2 - 1 - t)
            assert analysis.entropy_total(n, "OBC", t) == pytest.approx(max(0.0, n * n / 4 - x * x))


def test_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        analysis.entropy_profile(7, "OBC", 2, 1)
    with pytest.raises(ValueError):
        analysis.entropy_profile(8, "OBC", 8, 1)


def test_floor_form_lags_on_rising_edge():
    assert analysis.entropy_profile(20, "OBC", 10, 10) == 10
    assert analysis.entropy_profile_floor(20, "OBC", 10, 10) == 9


def half_cycle_samples(n=8, shots=20000, seed=3):
    spec = ChargerSpec.uniform("ZZ", n, "PBC")
    psi = oracle.final_state(spec, KickSchedule.uniform(n // 2))
    return oracle.sample(psi, "Y", shots, seed=seed)


def test_half_cycle_distribution_and_checkerboard():
    s = half_cycle_samples()
    dist = analysis.distribution(s)
    ideal = dict(analysis.ideal_half_cycle_distribution(8))
    assert set(dist) == set(ideal)
    rep = analysis.covariance_matrix(s)
    assert rep.checkerboard_deviation < 0.03
    same, opposite = rep.parity_split
    assert same == pytest.approx(1.0, abs=0.03) and opposite == pytest.approx(0.0, abs=0.03)
    p0 = analysis.p0_statistics(s)
    assert p0["mean"] == pytest.approx(0.5, abs=0.02) and len(p0["per_qubit"]) == 8


def test_energy_with_variance_against_exact_value():
    spec = ChargerSpec.uniform("ZZ", 6, "OBC", J=0.4, b=-0.9)
    psi = oracle.final_state(spec, KickSchedule.uniform(3))
    exact = oracle.energy_normalized(psi, 6, "Y")
    s = oracle.sample(psi, "Y", 40000, seed=9)
    rep = analysis.energy_with_variance(s, BatterySpec.for_charger(spec))
    assert abs(rep["E_normalized"] - exact) < 5 * rep["std"] / 6 + 1e-12
    assert rep["E"] == pytest.approx(rep["E_normalized"] * 6)


def test_energy_variance_includes_covariance():
    bits = np.array([[0, 0], [1, 1]] * 50)
    s = oracle.SampleSet(bits, "Z")
    rep = analysis.energy_with_variance(s, BatterySpec())
    # perfectly correlated bits: var = (1/4) * 4 / shots
    assert rep["var"] == pytest.approx(1 / 100)
    with pytest.raises(ValueError):
        analysis.energy_with_variance(s, BatterySpec("Y"))


def test_ground_state_samples():
    spec = ChargerSpec.uniform("ZZ", 6, "PBC")
    s = oracle.sample(oracle.ground_state(spec), "Y", 1000, seed=1)
    assert analysis.p0_statistics(s)["max"] == 0.0
    assert np.allclose(analysis.covariance_matrix(s).matrix, 0.0)


def test_pooled_variance():
    mean, var = analysis.pooled_variance([1.0, 3.0], [0.5, 0.5])
    assert mean == 2.0 and var == pytest.approx(1.5)
    with pytest.raises(ValueError):
        analysis.pooled_variance([], [])
