"""Gate-level circuits for the ZZ charger and their resource counts.

Gates follow the fractional-gate convention ``RZZ(t) = exp(-i t Z Z / 2)``,
``RX(t) = exp(-i t X / 2)`` and ``RZ(t) = exp(-i t Z / 2)``. Qubits start in
``|0>``; the first layer rotates them into the battery ground state.

Text format (one item per line, ``#`` starts a comment)::

    KICQB-CIRCUIT 1
    qubits <N>
    meta <key>=<value> ...
    rx <angle> <q>
    rz <angle> <q>
    rzz <angle> <q1> <q2>
    measure <Z|Y>

Qubits are 1-based and angles are written with ``repr`` so they round-trip
exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import Boundary, ChargerSpec, ConfigError, KickSchedule, Variant, intervals
from .oracle import MAX_SITES, z_values

HEADER = "KICQB-CIRCUIT 1"
GATE_KINDS = ("rx", "rz", "rzz")


class CircuitAngleWarning(UserWarning):
    """An RZZ angle falls outside the native fractional range ``(0, pi/2]``."""


@dataclass(frozen=True)
class Gate:
    kind: str
    sites: tuple[int, ...]
    angle: float

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate {self.kind!r}")
        width = 2 if self.kind == "rzz" else 1
        if len(self.sites) != width:
            raise ValueError(f"{self.kind} acts on {width} qubit(s)")
        if width == 2 and self.sites[0] == self.sites[1]:
            raise ValueError("rzz needs two distinct qubits")

    def to_line(self) -> str:
        return " ".join([self.kind, repr(float(self.angle)), *map(str, self.sites)])


@dataclass
class GateList:
    """Ordered gates plus the description of the run that produced them."""

    n: int
    gates: list[Gate] = field(default_factory=list)
    boundary: Boundary = Boundary.PBC
    meta: dict[str, str] = field(default_factory=dict)
    measure: str | None = None

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(not 1 <= s <= self.n for s in g.sites):
            raise ValueError(f"gate {g.to_line()} addresses a qubit outside 1..{self.n}")
        if g.kind == "rzz":
            a, b = sorted(g.sites)
            adjacent = b - a == 1 or (self.boundary is Boundary.PBC and (a, b) == (1, self.n))
            if not adjacent:
                raise ValueError(f"rzz on non-adjacent qubits {g.sites}")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def depth(self) -> int:
        """Circuit depth with every gate scheduled as early as possible."""
        level = [0] * (self.n + 1)
        for g in self.gates:
            top = max(level[s] for s in g.sites) + 1
            for s in g.sites:
                level[s] = top
        return max(level)

    def resources(self) -> dict[str, int]:
        return {"rx": self.count("rx"), "rzz": self.count("rzz"), "depth": self.depth()}

    # text format ------------------------------------------------------
    def dumps(self) -> str:
        lines = [HEADER, f"qubits {self.n}"]
        meta = {"boundary": self.boundary.value, **self.meta}
        lines.append("meta " + " ".join(f"{k}={v}" for k, v in meta.items()))
        lines += [g.to_line() for g in self.gates]
        if self.measure:
            lines.append(f"measure {self.measure}")
        return "\n".join(lines) + "\n"

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "GateList":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != HEADER:
            raise ValueError(f"missing header {HEADER!r}")
        if len(lines) < 2 or not lines[1].startswith("qubits "):
            raise ValueError("second line must declare 'qubits <N>'")
        n = int(lines[1].split()[1])
        meta: dict[str, str] = {}
        gates: list[Gate] = []
        measure = None
        for lineno, line in enumerate(lines[2:], start=3):
            head, *rest = line.split()
            if head == "meta":
                for tok in rest:
                    key, _, value = tok.partition("=")
                    meta[key] = value
            elif head == "measure":
                measure = rest[0]
            elif head in GATE_KINDS:
                try:
                    gates.append(Gate(head, tuple(int(q) for q in rest[1:]), float(rest[0])))
                except (ValueError, IndexError) as exc:
                    raise ValueError(f"line {lineno}: {exc}") from None
            else:
                raise ValueError(f"line {lineno}: unknown instruction {head!r}")
        boundary = Boundary(meta.pop("boundary", "PBC"))
        return cls(n, gates, boundary, meta, measure)

    @classmethod
    def load(cls, path: str) -> "GateList":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _bond_layers(spec: ChargerSpec) -> list[list[tuple[int, int, float]]]:
    """Nearest-neighbour bonds (1-based) grouped into mutually disjoint layers."""
    n = spec.n_sites
    odd, even, wrap = [], [], []
    for k, (i, j, J) in enumerate(spec.bonds()):
        bond = (i + 1, j + 1, J)
        if k == n - 1 and spec.boundary is Boundary.PBC:
            # the wrap bond clashes with both neighbours on odd rings
            (even if n % 2 == 0 else wrap).append(bond)
        elif k % 2 == 0:
            odd.append(bond)
        else:
            even.append(bond)
    return [layer for layer in (odd, even, wrap) if layer]


def _check_angle(theta: float) -> None:
    if not 0 < theta <= math.pi / 2 + 1e-12:
        warnings.warn(
            f"RZZ angle {theta:.6g} lies outside the native range (0, pi/2]",
            CircuitAngleWarning,
            stacklevel=3,
        )


def emit_circuit(spec: ChargerSpec, schedule: KickSchedule, measure: str | None = None) -> GateList:
    """Gate sequence preparing the ground state and applying every kick.

    Each interval ``dt`` becomes RZZ layers with angle ``2 J dt`` followed by
    ``RX(2 b dt)`` on every qubit. Schedules with a free segment after the
    last kick end with one more set of RZZ layers.
    """
    if spec.variant is not Variant.ZZ:
        raise ConfigError("circuits are emitted for the ZZ charger (native RZZ/RX gates)")
    if spec.long_range_alpha is not None:
        raise ConfigError("long-range couplings have no nearest-neighbour circuit")
    if spec.n_sites > 127:
        raise ConfigError("circuit emission limited to 127 qubits")
    n = spec.n_sites
    layers = _bond_layers(spec)
    out = GateList(
        n,
        boundary=spec.boundary,
        meta={"m": str(schedule.m), "schedule": schedule.kind, "window": repr(schedule.window)},
        measure=measure,
    )
    for q in range(1, n + 1):
        out.append(Gate("rx", (q,), math.pi / 2))

    def ising(dt: float) -> None:
        for layer in layers:
            for i, j, J in layer:
                theta = 2 * J * dt
                _check_angle(theta)
                out.append(Gate("rzz", (i, j), theta))

    for dt in intervals(schedule):
        ising(dt)
        for q, b in enumerate(spec.fields, start=1):
            out.append(Gate("rx", (q,), 2 * b * dt))
    if schedule.trailing > 0:
        ising(schedule.trailing)
    return out


def resource_count(spec: ChargerSpec, schedule: KickSchedule) -> dict[str, int]:
    """Gate counts and as-soon-as-possible depth in closed form.

    ``rx = (m+1) N`` and ``rzz = s B`` with ``B`` bonds and ``s = m + r``
    Ising segments, where ``r = 1`` when a free segment follows the last kick.
    With ``L`` RZZ layers per segment the depth is ``1 + (L+1) m + L r``.
    Odd rings need a third RZZ layer for the wrap bond; gates pipeline around
    it, so their depth is ``1 + 3m + 2r + ceil(s / h)`` with ``h = (N-1)/2``.
    """
    n, m = spec.n_sites, schedule.m
    pbc = spec.boundary is Boundary.PBC
    bonds = n if pbc else n - 1
    r = 1 if schedule.trailing > 0 else 0
    segments = m + r
    if pbc and n % 2 == 1:
        depth = 1 + 3 * m + 2 * r + -(-segments // ((n - 1) // 2))
    else:
        layers = len(_bond_layers(spec))
        depth = 1 + (layers + 1) * m + layers * r
    return {"rx": (m + 1) * n, "rzz": segments * bonds, "depth": depth}


def table_resources(n: int, m: int, boundary: Boundary | str, uniform: bool) -> dict[str, int]:
    """Two-layer-per-cycle resource formulas for uniform and non-uniform kicks."""
    boundary = Boundary(boundary)
    bonds = n if boundary is Boundary.PBC else n - 1
    if uniform:
        return {"rx": (m + 1) * n, "rzz": m * bonds, "depth": 3 * m + 1}
    return {"rx": (m + 1) * n, "rzz": (m + 1) * bonds, "depth": 3 * (m + 1)}



def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def replay(gates: GateList, include_measurement: bool = False) -> np.ndarray:
    """Statevector after applying ``gates`` to ``|0...0>``."""
    from .oracle import apply_1q

    n = gates.n
    if n > MAX_SITES:
        raise ConfigError(f"replay supports at most {MAX_SITES} qubits")
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    z = z_values(n)
    for g in gates.gates:
        if g.kind == "rzz":
            i, j = g.sites
            state = state * np.exp(-0.5j * g.angle * z[i - 1] * z[j - 1])
        elif g.kind == "rx":
            state = apply_1q(state, n, g.sites[0] - 1, _rx(g.angle))
        else:
            state = state * np.exp(-0.5j * g.angle * z[g.sites[0] - 1])
    if include_measurement and gates.measure == "Y":
        for q in range(n):
            state = apply_1q(state, n, q, _rx(math.pi / 2))
            state = state * np.exp(-0.25j * math.pi * z[q])
    return state
