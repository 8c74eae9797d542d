import math
from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from kicqb import oracle
from kicqb.model import BatterySpec, ChargerSpec, ConfigError, KickSchedule

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
LETTER = {"X": X, "Y": Y, "Z": Z}


def op(n, factors):
    return reduce(np.kron, [factors.get(s, np.eye(2)) for s in range(n)])


def dense_parts(spec):
    n = spec.n_sites
    a, b = ("X", "Z") if spec.variant.value == "XX" else ("Z", "X")
    h_i = sum(J * op(n, {i: LETTER[a], j: LETTER[a]}) for i, j, J in spec.bonds())
    h_k = sum(f * op(n, {i: LETTER[b]}) for i, f in enumerate(spec.fields))
    return h_i, h_k


def battery_matrix(spec):
    n = spec.n_sites
    p = LETTER[spec.battery_axis.value]
    # shifted, normalized: (1/N) sum (1 + sigma)/2
    return sum((np.eye(1 << n) + op(n, {i: p})) / 2 for i in range(n)) / n


@pytest.mark.parametrize("variant", ["XX", "ZZ"])
@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
def test_kicked_evolution_matches_dense_exponentials(variant, boundary, rng):
    n = 5
    spec = ChargerSpec(variant, n, boundary,
                       tuple(rng.uniform(-1, 1, n if boundary == "PBC" else n - 1)),
                       tuple(rng.uniform(-1, 1, n)))
    schedule = KickSchedule.random(4, 2.0, seed=5)
    h_i, h_k = dense_parts(spec)
    psi = oracle.ground_state(spec)
    expected = []
    prev = 0.0
    for t in schedule.times:
        dt = t - prev
        psi = expm(-1j * h_k * dt) @ expm(-1j * h_i * dt) @ psi
        prev = t
        expected.append(float(np.real(psi.conj() @ battery_matrix(spec) @ psi)))
    trace = oracle.evolve(spec, None, schedule)
    assert np.allclose(trace.energy[1:], expected, atol=1e-12)
    psi = expm(-1j * h_i * schedule.trailing) @ psi
    assert trace.final_energy == pytest.approx(float(np.real(psi.conj() @ battery_matrix(spec) @ psi)), abs=1e-12)


def test_ground_state_has_zero_energy_and_full_ground_population():
    for variant in ("XX", "ZZ"):
        spec = ChargerSpec.uniform(variant, 4, "OBC")
        psi = oracle.ground_state(spec)
        assert oracle.energy_normalized(psi, 4, spec.battery_axis) == pytest.approx(0.0, abs=1e-14)
        pops = oracle.level_populations(psi, 4, spec.battery_axis)
        assert pops[0] == pytest.approx(1.0) and pops.sum() == pytest.approx(1.0)


def test_energy_unshifted_offset():
    spec = ChargerSpec.uniform("XX", 4, "PBC")
    psi = oracle.ground_state(spec)
    e = oracle.battery_energy(psi, spec, BatterySpec.for_charger(spec, shift_ground_to_zero=False))
    assert e == pytest.approx(-2.0)


def test_bond_entropies_of_simple_states():
    prod = oracle.product_state(4, "Z")
    assert np.allclose(oracle.bond_entropies(prod, 4), 0.0)
    bell = np.zeros(16, dtype=complex)
    bell[0b0000] = bell[0b1111] = 1 / math.sqrt(2)
    assert np.allclose(oracle.bond_entropies(bell, 4), 1.0)


def test_continuous_state_matches_expm():
    spec = ChargerSpec.uniform("XX", 5, "PBC", J=0.7, b=-0.4)
    h_i, h_k = dense_parts(spec)
    psi0 = oracle.ground_state(spec)
    assert np.allclose(oracle.continuous_state(spec, 0.37), expm(-0.37j * (h_i + h_k)) @ psi0)
    assert np.allclose(oracle.dense_hamiltonian(spec), h_i + h_k)


def test_floquet_matrix_is_unitary_and_matches_steps():
    spec = ChargerSpec.uniform("ZZ", 4, "OBC", J=0.3, b=0.9)
    u = oracle.floquet_matrix(spec)
    assert np.allclose(u.conj().T @ u, np.eye(16))
    h_i, h_k = dense_parts(spec)
    assert np.allclose(u, expm(-1j * h_k) @ expm(-1j * h_i))


def test_zz_open_chain_prepares_ghz_one_kick_before_n():
    for n in (4, 5, 6):
        spec = ChargerSpec.uniform("ZZ", n, "OBC")
        fids = {m: (a, b) for m, a, b in oracle.scan_ghz(spec)}
        assert max(fids[n - 1]) == pytest.approx(1.0)


def test_disorder_run_is_reproducible_and_thread_invariant():
    spec = ChargerSpec.uniform("XX", 6, "PBC")
    sched = KickSchedule.uniform(6)
    a = oracle.disorder_run(spec, None, sched, 0.3, 8, seed=11, workers=1)
    b = oracle.disorder_run(spec, None, sched, 0.3, 8, seed=11, workers=4)
    c = oracle.disorder_run(spec, None, sched, 0.3, 8, seed=12, workers=1)
    assert a.energy == b.energy and a.energy_std == b.energy_std
    assert a.energy != c.energy


def test_zero_disorder_matches_clean():
    spec = ChargerSpec.uniform("ZZ", 6, "OBC")
    sched = KickSchedule.uniform(8)
    clean = oracle.evolve(spec, None, sched)
    assert oracle.disorder_run(spec, None, sched, 0.0, 3).max_deviation(clean) < 1e-12


def test_long_range_with_large_alpha_approaches_nearest_neighbour():
    spec = ChargerSpec.uniform("ZZ", 6, "OBC")
    sched = KickSchedule.uniform(10)
    clean = oracle.evolve(spec, None, sched)
    assert oracle.long_range_run(40.0, spec, None, sched).max_deviation(clean) < 1e-9
    with pytest.raises(ConfigError):
        oracle.long_range_run(0.0, spec, None, sched)


def test_blackman_pulse_has_unit_area():
    tau = np.linspace(-0.05, 0.05, 20001)
    assert np.trapezoid(oracle.blackman_pulse(tau, 0.1), tau) == pytest.approx(1.0, abs=1e-6)


def test_narrow_quasikick_approaches_delta_kick():
    spec = ChargerSpec.uniform("XX", 6, "PBC")
    clean = oracle.evolve(spec, None, KickSchedule.uniform(6))
    assert oracle.quasikick_run(0.01, spec, None, 6).max_deviation(clean) < 0.02


def test_instant_quench_is_plain_kicking():
    spec = ChargerSpec.uniform("XX", 6, "PBC")
    clean = oracle.evolve(spec, None, KickSchedule.uniform(6))
    assert oracle.slow_quench_run(0.0, spec, None, 6).max_deviation(clean) < 1e-12


def test_random_schedule_run_reproducible():
    spec = ChargerSpec.uniform("XX", 6, "PBC")
    assert oracle.random_schedule_run(spec, 5, 4, seed=2) == oracle.random_schedule_run(spec, 5, 4, seed=2, workers=3)


def test_sampling_statistics_and_round_trip(tmp_path):
    n = 3
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = psi[0b101] = 1 / math.sqrt(2)
    s = oracle.sample(psi, "Z", 4000, seed=1)
    assert set(s.bitstrings()) == {"000", "101"}
    assert abs(s.bits[:, 0].mean() - 0.5) < 0.05
    path = tmp_path / "s.txt"
    s.dump(str(path))
    back = oracle.SampleSet.load(str(path))
    assert np.array_equal(back.bits, s.bits) and back.seed == 1 and back.basis == "Z"


def test_y_basis_ground_state_reads_all_ones():
    spec = ChargerSpec.uniform("ZZ", 4, "PBC")
    s = oracle.sample(oracle.ground_state(spec), "Y", 100, seed=0)
    assert (s.bits == 1).all()


def test_bad_sample_file(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# basis=Z\n01\n0a\n")
    with pytest.raises(ValueError):
        oracle.SampleSet.load(str(path))


def test_correlator_norm_dense_light_cone():
    spec = ChargerSpec.uniform("ZZ", 6, "OBC")
    assert oracle.correlator_norm_dense(spec, 3, 6, 1) == pytest.approx(0.0, abs=1e-12)
    assert oracle.correlator_norm_dense(spec, 3, 3, 1) == pytest.approx(2.0)


def test_size_guard():
    with pytest.raises(ConfigError):
        oracle.ground_state(ChargerSpec.uniform("XX", oracle.MAX_SITES + 1, "PBC"))
