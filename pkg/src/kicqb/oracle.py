"""Dense statevector simulator for kicked-Ising chargers (N <= 14).

Basis index convention: site 0 is the most significant bit, so the bitstring
``s_1 s_2 ... s_N`` reads left to right. ``|0>`` is the +1 eigenstate of Z.
Layers are applied as products of commuting local rotations; no 2^N x 2^N
matrix is ever built except in :func:`correlator_norm_dense`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .model import (
    Axis,
    BatterySpec,
    ChargerSpec,
    ConfigError,
    KickSchedule,
    Variant,
    intervals,
    make_rng,
)

MAX_SITES = 14

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
# RX(pi/2): maps |+i> -> |0> and |-i> -> -i|1>, i.e. Y basis onto Z basis
_RX90 = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)
_RX90_DAG = _RX90.conj().T


def _check_size(n: int, limit: int = MAX_SITES) -> None:
    if n > limit:
        raise ConfigError(f"dense simulation supports N <= {limit}, got {n}")


def z_values(n: int) -> np.ndarray:
    """Array ``(n, 2**n)`` of Z eigenvalues (+1 for bit 0) of every site."""
    idx = np.arange(1 << n)
    bits = (idx[None, :] >> (n - 1 - np.arange(n))[:, None]) & 1
    return 1 - 2 * bits


def apply_1q(state: np.ndarray, n: int, site: int, gate: np.ndarray) -> np.ndarray:
    """Apply a 2x2 ``gate`` to 0-based ``site``; trailing batch axes allowed."""
    shape = state.shape
    psi = state.reshape(1 << site, 2, -1)
    out = np.einsum("ab,xbz->xaz", gate, psi)
    return out.reshape(shape)


def apply_all_1q(state: np.ndarray, n: int, gate: np.ndarray) -> np.ndarray:
    for site in range(n):
        state = apply_1q(state, n, site, gate)
    return state


def _to_basis(state: np.ndarray, n: int, axis: str) -> np.ndarray:
    """Rotate so that ``axis`` eigenstates become computational states."""
    if axis == "Z":
        return state
    return apply_all_1q(state, n, _H if axis == "X" else _RX90)


def _from_basis(state: np.ndarray, n: int, axis: str) -> np.ndarray:
    if axis == "Z":
        return state
    return apply_all_1q(state, n, _H if axis == "X" else _RX90_DAG)


def _phase(state: np.ndarray, diag: np.ndarray, scale: float) -> np.ndarray:
    ph = np.exp(-1j * scale * diag)
    if state.ndim == 2:
        ph = ph[:, None]
    return state * ph


@dataclass(frozen=True)
class Hamiltonians:
    """Diagonals of the charger pieces in their own eigenbases."""

    n: int
    ising_axis: str
    kick_axis: str
    battery_axis: str
    ising_diag: np.ndarray
    kick_diag: np.ndarray
    battery_diag: np.ndarray  # (omega0/2) * sum of Z in the battery eigenbasis

    @classmethod
    def build(cls, spec: ChargerSpec) -> "Hamiltonians":
        n = spec.n_sites
        z = z_values(n).astype(float)
        ising = np.zeros(1 << n)
        for i, j, J in spec.bonds():
            ising += J * z[i] * z[j]
        kick = np.asarray(spec.fields) @ z
        battery = 0.5 * spec.omega0 * z.sum(axis=0)
        if spec.variant is Variant.XX:
            return cls(n, "X", "Z", "Z", ising, kick, battery)
        return cls(n, "Z", "X", "Y", ising, kick, battery)

    def evolve_diag(self, state: np.ndarray, axis: str, diag: np.ndarray, scale: float) -> np.ndarray:
        if scale == 0:
            return state
        state = _to_basis(state, self.n, axis)
        state = _phase(state, diag, scale)
        return _from_basis(state, self.n, axis)

    def ising(self, state: np.ndarray, dt: float) -> np.ndarray:
        return self.evolve_diag(state, self.ising_axis, self.ising_diag, dt)

    def kick(self, state: np.ndarray, scale: float) -> np.ndarray:
        return self.evolve_diag(state, self.kick_axis, self.kick_diag, scale)

    def battery(self, state: np.ndarray, dt: float) -> np.ndarray:
        return self.evolve_diag(state, self.battery_axis, self.battery_diag, dt)


# ---------------------------------------------------------------------------
# states and observables


def ground_state(spec: ChargerSpec, battery: BatterySpec | None = None) -> np.ndarray:
    """Battery ground state: ``|1>^N`` (Z axis) or ``|-i>^N`` (Y axis)."""
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    _check_size(spec.n_sites)
    return product_state(spec.n_sites, battery.axis)


def product_state(n: int, axis: Axis | str) -> np.ndarray:
    if Axis(axis) is Axis.Z:
        local = np.array([0, 1], dtype=complex)
    else:
        local = np.array([1, -1j], dtype=complex) / math.sqrt(2)
    state = np.ones(1, dtype=complex)
    for _ in range(n):
        state = np.kron(state, local)
    return state


def battery_probabilities(state: np.ndarray, n: int, axis: Axis | str) -> np.ndarray:
    """Probabilities in the battery eigenbasis; bit 0 is the excited level."""
    return np.abs(_to_basis(state, n, Axis(axis).value)) ** 2


def _excitations(n: int) -> np.ndarray:
    return n - (z_values(n) < 0).sum(axis=0) if n else np.zeros(1, int)


def level_populations(state: np.ndarray, n: int, axis: Axis | str) -> np.ndarray:
    """``p_n`` for n excited cells, ``n = 0..N``."""
    probs = battery_probabilities(state, n, axis)
    return np.bincount(_excitations(n), weights=probs, minlength=n + 1)


def energy_normalized(state: np.ndarray, n: int, axis: Axis | str) -> float:
    """Shifted energy divided by ``N omega0``: mean fraction of excited cells."""
    probs = battery_probabilities(state, n, axis)
    return float(probs @ _excitations(n)) / n


def battery_energy(state: np.ndarray, spec: ChargerSpec, battery: BatterySpec) -> float:
    """``<H0>``, shifted so the ground state sits at zero when requested."""
    n = spec.n_sites
    e = energy_normalized(state, n, battery.axis) * n * battery.omega0
    return e if battery.shift_ground_to_zero else e - n * battery.omega0 / 2


def bond_entropies(state: np.ndarray, n: int) -> np.ndarray:
    """Von Neumann entropies (log base 2) at the cuts after sites 1..N-1."""
    out = np.empty(n - 1)
    for cut in range(1, n):
        s = np.linalg.svd(state.reshape(1 << cut, -1), compute_uv=False)
        p = s**2
        p = p[p > 1e-14]
        out[cut - 1] = float(-(p * np.log2(p)).sum())
    return out


def ghz_fidelity(state: np.ndarray) -> tuple[float, float]:
    """Overlaps with ``(|0..0> + i|1..1>)/sqrt2`` and ``(|0..0> - i|1..1>)/sqrt2``."""
    a0, a1 = state[0], state[-1]
    plus = abs(a0 - 1j * a1) ** 2 / 2
    minus = abs(a0 + 1j * a1) ** 2 / 2
    return float(plus), float(minus)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


# ---------------------------------------------------------------------------
# dynamics


def apply_cycle(
    state: np.ndarray,
    spec: ChargerSpec,
    dt_ising: float = 1.0,
    kick_scale: float = 1.0,
    ham: Hamiltonians | None = None,
) -> np.ndarray:
    """``exp(-i H_K kick_scale) exp(-i H_I dt_ising)`` applied to ``state``."""
    ham = ham or Hamiltonians.build(spec)
    return ham.kick(ham.ising(state, dt_ising), kick_scale)


@dataclass
class ChargingTrace:
    """Per-kick record of the shifted-normalized energy ``E/(N omega0)``.

    ``final_energy`` is the value at the end of the schedule window, which
    differs from the last kick when a free Ising segment follows it.
    """

    kicks: list[int]
    energy: list[float]
    times: list[float] = field(default_factory=list)
    populations: list[np.ndarray] | None = None
    bond_entropies: list[np.ndarray] | None = None
    energy_std: list[float] | None = None
    final_energy: float | None = None
    engine: str = "oracle"
    label: str = ""

    def __post_init__(self):
        if len(self.kicks) != len(self.energy):
            raise ValueError("kicks and energy lengths differ")
        if not self.times:
            self.times = [float(k) for k in self.kicks]

    def max_deviation(self, other: "ChargingTrace") -> float:
        n = min(len(self.energy), len(other.energy))
        return float(np.max(np.abs(np.subtract(self.energy[:n], other.energy[:n])))) if n else 0.0


@dataclass(frozen=True)
class EvolveOptions:
    populations: bool = False
    entropies: bool = False


class _Recorder:
    def __init__(self, n: int, axis: Axis, options: EvolveOptions):
        self.n, self.axis, self.opt = n, axis, options
        self.kicks: list[int] = []
        self.times: list[float] = []
        self.energy: list[float] = []
        self.pops: list[np.ndarray] = []
        self.ents: list[np.ndarray] = []

    def __call__(self, kick: int, time: float, state: np.ndarray) -> None:
        self.kicks.append(kick)
        self.times.append(time)
        self.energy.append(energy_normalized(state, self.n, self.axis))
        if self.opt.populations:
            self.pops.append(level_populations(state, self.n, self.axis))
        if self.opt.entropies:
            self.ents.append(bond_entropies(state, self.n))

    def trace(self, final: float, engine: str = "oracle") -> ChargingTrace:
        return ChargingTrace(
            self.kicks, self.energy, self.times,
            self.pops if self.opt.populations else None,
            self.ents if self.opt.entropies else None,
            final_energy=final, engine=engine,
        )


def run_schedule(
    spec: ChargerSpec,
    schedule: KickSchedule,
    state: np.ndarray | None = None,
    on_kick: Callable[[int, float, np.ndarray], None] | None = None,
    cycle: Callable[[np.ndarray, float], np.ndarray] | None = None,
) -> np.ndarray:
    """Evolve through every kick and the trailing Ising segment.

    ``cycle(state, dt)`` overrides the default Ising-then-kick step.
    """
    _check_size(spec.n_sites)
    ham = Hamiltonians.build(spec)
    if state is None:
        state = ground_state(spec)
    if cycle is None:
        def cycle(psi, dt):
            return ham.kick(ham.ising(psi, dt), dt)
    if on_kick:
        on_kick(0, 0.0, state)
    for k, (t, dt) in enumerate(zip(schedule.times, intervals(schedule)), start=1):
        state = cycle(state, dt)
        if on_kick:
            on_kick(k, t, state)
    if schedule.trailing > 0:
        state = ham.ising(state, schedule.trailing)
    return state


def evolve(
    spec: ChargerSpec,
    battery: BatterySpec | None = None,
    schedule: KickSchedule | None = None,
    options: EvolveOptions | None = None,
    state: np.ndarray | None = None,
) -> ChargingTrace:
    """Charge the battery kick by kick and record the energy after each kick.

    Each kick interval ``dt`` applies ``exp(-i H_I dt)`` followed by
    ``exp(-i H_K dt)``; for a unit-spaced schedule this is the plain Floquet
    step. Non-uniform schedules end with a free Ising segment to the window
    edge, reflected in ``final_energy``.
    """
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    schedule = schedule or KickSchedule.uniform(spec.n_sites)
    rec = _Recorder(spec.n_sites, battery.axis, options or EvolveOptions())
    final = run_schedule(spec, schedule, state, rec)
    return rec.trace(energy_normalized(final, spec.n_sites, battery.axis))


def final_state(spec: ChargerSpec, schedule: KickSchedule, state: np.ndarray | None = None) -> np.ndarray:
    return run_schedule(spec, schedule, state)


def evolve_states(spec: ChargerSpec, m: int) -> list[np.ndarray]:
    """States after 0..m unit kicks."""
    out: list[np.ndarray] = []
    run_schedule(spec, KickSchedule.uniform(m), on_kick=lambda k, t, s: out.append(s.copy()))
    return out


def continuous_state(spec: ChargerSpec, t: float, state: np.ndarray | None = None) -> np.ndarray:
    """``exp(-i (H_I + H_K) t) |psi>`` via the sparse action of the matrix exponential."""
    from scipy.sparse.linalg import expm_multiply

    _check_size(spec.n_sites)
    if state is None:
        state = ground_state(spec)
    if t == 0:
        return np.array(state, dtype=complex)
    return expm_multiply(-1j * t * sparse_hamiltonian(spec), np.asarray(state, dtype=complex), traceA=0.0)


def pauli_sparse(n: int, factors: dict[int, str]):
    """Sparse matrix of a Pauli string; ``factors`` maps 0-based sites to letters."""
    from scipy.sparse import csr_matrix

    idx = np.arange(1 << n)
    flip = 0
    phase = np.ones(1 << n, dtype=complex)
    for site, letter in factors.items():
        bit = 1 << (n - 1 - site)
        up = (idx & bit) == 0
        if letter in "XY":
            flip |= bit
        if letter == "Z":
            phase *= np.where(up, 1, -1)
        elif letter == "Y":
            phase *= np.where(up, 1j, -1j)  # Y|0> = i|1>, Y|1> = -i|0>
    return csr_matrix((phase, (idx ^ flip, idx)), shape=(1 << n, 1 << n))


def sparse_hamiltonian(spec: ChargerSpec):
    """``H_I + H_K`` as a sparse matrix in the computational basis."""
    n = spec.n_sites
    ham = Hamiltonians.build(spec)
    h = None
    for i, j, J in spec.bonds():
        if i == j:
            continue
        term = J * pauli_sparse(n, {i: ham.ising_axis, j: ham.ising_axis})
        h = term if h is None else h + term
    for i, b in enumerate(spec.fields):
        term = b * pauli_sparse(n, {i: ham.kick_axis})
        h = term if h is None else h + term
    return h.tocsr()


def dense_hamiltonian(spec: ChargerSpec) -> np.ndarray:
    """``H_I + H_K`` as a dense matrix (small N only)."""
    _check_size(spec.n_sites, 12)
    return sparse_hamiltonian(spec).toarray()


def floquet_matrix(spec: ChargerSpec) -> np.ndarray:
    """Dense one-period unitary ``exp(-i H_K) exp(-i H_I)``."""
    eye = np.eye(1 << spec.n_sites, dtype=complex)
    return apply_cycle(eye, spec)


def saturation_energy_dense(spec: ChargerSpec, window: float = 1.0) -> float:
    """Energy after continuous evolution under ``H_I + H_K`` for ``window``."""
    psi = continuous_state(spec, window)
    return energy_normalized(psi, spec.n_sites, spec.battery_axis)


# ---------------------------------------------------------------------------
# perturbation studies


def disorder_realization(spec: ChargerSpec, sigma_J: float, rng: np.random.Generator) -> ChargerSpec:
    """Copy of ``spec`` with ``J_ij -> J_ij (1 + delta)``, delta ~ U[-sigma, sigma]."""
    deltas = rng.uniform(-sigma_J, sigma_J, size=len(spec.couplings))
    return spec.with_couplings(np.asarray(spec.couplings) * (1 + deltas))


def _aggregate(traces: Sequence[ChargingTrace], engine: str) -> ChargingTrace:
    energies = np.array([t.energy for t in traces])
    finals = [t.final_energy for t in traces]
    first = traces[0]
    return ChargingTrace(
        list(first.kicks),
        list(energies.mean(axis=0)),
        list(first.times),
        energy_std=list(energies.std(axis=0)),
        final_energy=float(np.mean(finals)) if None not in finals else None,
        engine=engine,
    )


def _map(fn, items, workers: int | None):
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def disorder_run(
    spec: ChargerSpec,
    battery: BatterySpec | None,
    schedule: KickSchedule,
    sigma_J: float,
    n_real: int,
    seed: int = 0,
    workers: int | None = None,
) -> ChargingTrace:
    """Mean and standard deviation over ``n_real`` coupling-disorder realizations.

    Realization ``r`` draws its couplings from the stream ``(seed, r)``.
    """
    if sigma_J < 0:
        raise ConfigError("sigma_J must be non-negative")
    if n_real < 1:
        raise ConfigError("need at least one realization")

    def one(r: int) -> ChargingTrace:
        local = disorder_realization(spec, sigma_J, make_rng(seed, r))
        return evolve(local, battery, schedule)

    return _aggregate(_map(one, range(n_real), workers), "oracle-disorder")


def random_schedule_run(
    spec: ChargerSpec,
    m: int,
    n_real: int,
    window: float = 1.0,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[float, float]:
    """Mean and std of the end-of-window energy over random kick schedules."""

    def one(r: int) -> float:
        sched = KickSchedule.random(m, window, seed, r)
        psi = final_state(spec, sched)
        return energy_normalized(psi, spec.n_sites, spec.battery_axis)

    values = np.array(_map(one, range(n_real), workers))
    return float(values.mean()), float(values.std())


def long_range_run(
    alpha: float,
    spec: ChargerSpec,
    battery: BatterySpec | None = None,
    schedule: KickSchedule | None = None,
) -> ChargingTrace:
    """Kicked evolution with all-to-all couplings ``J / d**alpha``."""
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    trace = evolve(spec.with_alpha(alpha), battery, schedule)
    trace.engine = "oracle-longrange"
    return trace


def blackman_pulse(tau: np.ndarray | float, delta_t: float) -> np.ndarray | float:
    """Blackman window normalized to unit area on ``[-delta_t/2, delta_t/2]``."""
    x = 2 * np.pi * np.asarray(tau) / delta_t
    shape = 21 / 50 + 0.5 * np.cos(x) + (2 / 25) * np.cos(2 * x)
    return shape / (21 * delta_t / 50)


def _split_window(
    state: np.ndarray,
    steps: int,
    width: float,
    a_step: Callable[[np.ndarray, float, float], np.ndarray],
    b_step: Callable[[np.ndarray, float, float], np.ndarray],
) -> np.ndarray:
    """Strang splitting ``A/2 B A/2`` on ``steps`` midpoint substeps over ``[0, width]``.

    ``a_step(psi, h, tau)`` / ``b_step(psi, h, tau)`` evolve by step ``h``
    with coefficients frozen at the substep midpoint ``tau``.
    """
    h = width / steps
    for j in range(steps):
        tau = (j + 0.5) * h
        state = a_step(state, h / 2, tau)
        state = b_step(state, h, tau)
        state = a_step(state, h / 2, tau)
    return state


def _refined_window(
    state: np.ndarray,
    window: Callable[[np.ndarray, int], np.ndarray],
    energy: Callable[[np.ndarray], float],
    steps: int,
    tol: float = 1e-7,
    max_steps: int = 1 << 16,
) -> tuple[np.ndarray, int]:
    """Double the substep count until the window energy changes by < ``tol``."""
    coarse = window(state, steps)
    while True:
        fine = window(state, 2 * steps)
        steps *= 2
        if abs(energy(fine) - energy(coarse)) < tol or steps >= max_steps:
            return fine, steps
        coarse = fine


def quasikick_run(
    delta_t: float,
    spec: ChargerSpec,
    battery: BatterySpec | None = None,
    m: int | None = None,
) -> ChargingTrace:
    """Kicks smeared into normalized Blackman pulses of width ``delta_t``.

    Each period runs free Ising evolution for ``1 - delta_t`` followed by a
    window of ``H_I + phi(tau) H_K``. Energy is recorded at the end of each
    window.
    """
    if not 0 < delta_t < 1:
        raise ConfigError("quasikick width must lie in (0, 1)")
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    m = spec.n_sites if m is None else m
    ham = Hamiltonians.build(spec)
    n = spec.n_sites

    def window(psi, steps):
        return _split_window(
            psi, steps, delta_t,
            lambda s, h, tau: ham.ising(s, h),
            lambda s, h, tau: ham.kick(s, h * float(blackman_pulse(tau - delta_t / 2, delta_t))),
        )

    def energy(psi):
        return energy_normalized(psi, n, battery.axis)

    state = ground_state(spec, battery)
    rec = _Recorder(n, battery.axis, EvolveOptions())
    rec(0, 0.0, state)
    steps = max(64, math.ceil(delta_t / 1e-3))
    for k in range(1, m + 1):
        state = ham.ising(state, 1 - delta_t)
        if k == 1:
            state, steps = _refined_window(state, window, energy, steps)
        else:
            state = window(state, steps)
        rec(k, k + delta_t / 2, state)
    trace = rec.trace(rec.energy[-1], "oracle-quasikick")
    return trace


def quench_ramp(t: np.ndarray | float, delta_t: float) -> np.ndarray | float:
    """Cubic ramp from 0 at ``t = -delta_t`` to 1 at ``t = 0``."""
    x = (np.asarray(t) + delta_t) / delta_t
    return 3 * x**2 - 2 * x**3


def slow_quench_run(
    delta_t: float,
    spec: ChargerSpec,
    battery: BatterySpec | None = None,
    m: int | None = None,
) -> ChargingTrace:
    """Ramp ``H0 -> H_I`` over ``delta_t`` before the kicks start.

    The ramp Hamiltonian is ``(1 - lambda) H0 + lambda H_I``; the energy at
    kick 0 is recorded after the ramp.
    """
    if delta_t < 0:
        raise ConfigError("ramp duration must be non-negative")
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    n = spec.n_sites
    m = n if m is None else m
    ham = Hamiltonians.build(spec)
    state = ground_state(spec, battery)
    if delta_t > 0:
        def window(psi, steps):
            return _split_window(
                psi, steps, delta_t,
                lambda s, h, tau: ham.battery(s, h * (1 - float(quench_ramp(tau - delta_t, delta_t)))),
                lambda s, h, tau: ham.ising(s, h * float(quench_ramp(tau - delta_t, delta_t))),
            )

        state, _ = _refined_window(
            state, window, lambda psi: energy_normalized(psi, n, battery.axis),
            max(64, math.ceil(delta_t / 1e-3)),
        )
    rec = _Recorder(n, battery.axis, EvolveOptions())
    final = run_schedule(spec, KickSchedule.uniform(m), state, rec)
    return rec.trace(energy_normalized(final, n, battery.axis), "oracle-quench")


# ---------------------------------------------------------------------------
# correlators and sampling


def heisenberg_z(spec: ChargerSpec, site: int, schedule: KickSchedule) -> np.ndarray:
    """Dense ``U^dagger Z_site U`` for the schedule's unitary (1-based site)."""
    n = spec.n_sites
    _check_size(n, 10)
    u = run_schedule(spec, schedule, np.eye(1 << n, dtype=complex))
    zdiag = z_values(n)[site - 1].astype(complex)
    return u.conj().T @ (zdiag[:, None] * u)


def correlator_norm_dense(spec: ChargerSpec, i: int, j: int, schedule: KickSchedule | float) -> float:
    """Spectral norm of ``[Z_i(t), Z_j]``; a float ``t`` means ``t`` unit kicks."""
    if not isinstance(schedule, KickSchedule):
        schedule = KickSchedule.uniform(int(schedule))
    zi = heisenberg_z(spec, i, schedule)
    zj = z_values(spec.n_sites)[j - 1].astype(complex)
    comm = zi * zj[None, :] - zj[:, None] * zi
    return float(np.linalg.norm(comm, 2))


@dataclass
class SampleSet:
    """Measured bitstrings, one row per shot; column ``k`` is site ``k+1``."""

    bits: np.ndarray
    basis: str
    seed: int | None = None

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 2:
            raise ValueError("bits must be a 2-D array (shots x N)")
        self.basis = Axis(self.basis).value

    @property
    def shots(self) -> int:
        return self.bits.shape[0]

    @property
    def n(self) -> int:
        return self.bits.shape[1]

    def bitstrings(self) -> list[str]:
        return ["".join(map(str, row)) for row in self.bits]

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# basis={self.basis} shots={self.shots} seed={self.seed}\n")
            for s in self.bitstrings():
                fh.write(s + "\n")

    @classmethod
    def load(cls, path: str) -> "SampleSet":
        header: dict[str, str] = {}
        rows: list[list[int]] = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for tok in line[1:].split():
                        key, _, value = tok.partition("=")
                        header[key] = value
                    continue
                if set(line) - {"0", "1"}:
                    raise ValueError(f"bad bitstring {line!r}")
                rows.append([int(c) for c in line])
        if not rows:
            raise ValueError("sample file holds no bitstrings")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("bitstrings have different lengths")
        seed = header.get("seed")
        return cls(np.array(rows), header.get("basis", "Z"), None if seed in (None, "None") else int(seed))


def sample(state: np.ndarray, basis: Axis | str, shots: int, seed: int = 0, stream: int = 0) -> SampleSet:
    """Born-rule samples after rotating the measured axis onto Z.

    For the Y basis each site gets RX(pi/2) (then a diagonal RZ that does not
    change the outcome), so ``|-i>`` reads as 1 and ``|+i>`` as 0.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    n = int(round(math.log2(state.size)))
    probs = battery_probabilities(state, n, basis)
    probs = probs / probs.sum()
    rng = make_rng(seed, stream)
    idx = rng.choice(probs.size, size=shots, p=probs)
    bits = ((idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(np.uint8)
    return SampleSet(bits, Axis(basis).value, seed)


def scan_ghz(spec: ChargerSpec, m_max: int | None = None) -> list[tuple[int, float, float]]:
    """GHZ fidelities after each of ``1..m_max`` kicks (default ``4N``)."""
    m_max = 4 * spec.n_sites if m_max is None else m_max
    states = evolve_states(spec, m_max)
    return [(m, *ghz_fidelity(states[m])) for m in range(1, m_max + 1)]
