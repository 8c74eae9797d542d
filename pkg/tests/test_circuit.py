import math
import warnings

import numpy as np
import pytest

from kicqb import circuit, oracle
from kicqb.model import Boundary, ChargerSpec, ConfigError, KickSchedule


def schedules(m):
    return [KickSchedule.uniform(m), KickSchedule.random(m, 1.0, seed=m)]


@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_replay_matches_oracle(n, boundary):
    spec = ChargerSpec.uniform("ZZ", n, boundary)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", circuit.CircuitAngleWarning)
        for sched in schedules(3):
            gates = circuit.emit_circuit(spec, sched)
            assert oracle.fidelity(circuit.replay(gates), oracle.final_state(spec, sched)) > 1 - 1e-10


@pytest.mark.parametrize("boundary", ["OBC", "PBC"])
@pytest.mark.parametrize("n", range(2, 10))
@pytest.mark.parametrize("m", [1, 2, 5, 8])
def test_resource_closed_form_matches_emitted(n, m, boundary):
    if boundary == "PBC" and n == 2:
        pytest.skip("a two-site ring repeats its only bond")
    spec = ChargerSpec.uniform("ZZ", n, boundary)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", circuit.CircuitAngleWarning)
        for sched in schedules(m):
            assert circuit.emit_circuit(spec, sched).resources() == circuit.resource_count(spec, sched)


def test_table_formulas_for_even_rings():
    spec = ChargerSpec.uniform("ZZ", 8, "PBC")
    assert circuit.resource_count(spec, KickSchedule.uniform(5)) == circuit.table_resources(8, 5, "PBC", True)
    assert circuit.resource_count(spec, KickSchedule.random(5, 1.0, seed=1)) == circuit.table_resources(8, 5, "PBC", False)


def test_text_round_trip(tmp_path):
    spec = ChargerSpec.uniform("ZZ", 4, "PBC")
    gates = circuit.emit_circuit(spec, KickSchedule.uniform(2), measure="Y")
    path = tmp_path / "c.txt"
    gates.dump(str(path))
    back = circuit.GateList.load(str(path))
    assert back.gates == gates.gates and back.boundary is Boundary.PBC and back.measure == "Y"


@pytest.mark.parametrize(
    "text",
    ["qubits 2\n", "KICQB-CIRCUIT 1\nqubits 3\nmeta boundary=OBC\nrzz 0.5 1 3\n", "KICQB-CIRCUIT 1\nqubits 2\nfoo 1\n",
     "KICQB-CIRCUIT 1\nqubits 2\nrx 0.1 5\n"],
)
def test_malformed_circuits_rejected(text):
    with pytest.raises(ValueError):
        circuit.GateList.loads(text)


def test_y_measurement_maps_ground_state_to_all_ones():
    spec = ChargerSpec.uniform("ZZ", 4, "OBC")
    gates = circuit.emit_circuit(spec, KickSchedule.uniform(0), measure="Y")
    psi = circuit.replay(gates, include_measurement=True)
    assert abs(psi[-1]) == pytest.approx(1.0)


def test_angle_warning_and_variant_guard():
    spec = ChargerSpec.uniform("ZZ", 4, "OBC", J=-math.pi / 4)
    with pytest.warns(circuit.CircuitAngleWarning):
        circuit.emit_circuit(spec, KickSchedule.uniform(1))
    with pytest.raises(ConfigError):
        circuit.emit_circuit(ChargerSpec.uniform("XX", 4, "OBC"), KickSchedule.uniform(1))
