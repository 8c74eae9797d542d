"""Domain types shared by every engine: charger, schedule and battery specs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Sequence

import numpy as np

SELF_DUAL_ANGLE = math.pi / 4
SELF_DUAL_TOL = 1e-12


class Variant(str, Enum):
    """Which Pauli pair the charger uses: Ising term axis + kick axis."""

    XX = "XX"  # Ising XX, kick along Z, battery along Z
    ZZ = "ZZ"  # Ising ZZ, kick along X, battery along Y


class Boundary(str, Enum):
    OBC = "OBC"
    PBC = "PBC"


class Axis(str, Enum):
    Z = "Z"
    Y = "Y"


class ConfigError(ValueError):
    """Raised for invalid specs, schedules or configuration files."""


def _parse_enum(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).upper())
    except ValueError:
        names = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"invalid {enum_cls.__name__} {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class ChargerSpec:
    """A kicked-Ising charger on ``n_sites`` spins.

    ``couplings`` holds one value per bond: bond ``k`` (0-based) joins sites
    ``k`` and ``k+1``; under PBC the last bond joins site ``N-1`` and site 0.
    With ``long_range_alpha`` set, every pair interacts with
    ``J / d**alpha`` where ``d`` is the chain distance (ring distance under
    PBC) and ``couplings`` must be uniform.
    """

    variant: Variant
    n_sites: int
    boundary: Boundary
    couplings: tuple[float, ...]
    fields: tuple[float, ...]
    omega0: float = 1.0
    long_range_alpha: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", _parse_enum(Variant, self.variant))
        object.__setattr__(self, "boundary", _parse_enum(Boundary, self.boundary))
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        object.__setattr__(self, "fields", tuple(float(f) for f in self.fields))
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < 2:
            raise ConfigError(f"n_sites must be an integer >= 2, got {n!r}")
        if len(self.fields) != n:
            raise ConfigError(f"expected {n} fields, got {len(self.fields)}")
        expected = n if self.boundary is Boundary.PBC else n - 1
        if self.long_range_alpha is not None:
            if self.long_range_alpha <= 0:
                raise ConfigError("long_range_alpha must be positive")
            if len(self.couplings) not in (1, expected) or len(set(self.couplings)) != 1:
                raise ConfigError("long-range couplings must be a single uniform J")
        elif len(self.couplings) != expected:
            raise ConfigError(
                f"{self.boundary.value} chain of {n} sites needs {expected} couplings, "
                f"got {len(self.couplings)}"
            )
        if not self.omega0 > 0:
            raise ConfigError("omega0 must be positive")

    @classmethod
    def uniform(
        cls,
        variant: Variant | str,
        n_sites: int,
        boundary: Boundary | str,
        J: float = SELF_DUAL_ANGLE,
        b: float = -SELF_DUAL_ANGLE,
        omega0: float = 1.0,
        long_range_alpha: float | None = None,
    ) -> "ChargerSpec":
        """Uniform couplings and fields; defaults sit at the self-dual point."""
        boundary = _parse_enum(Boundary, boundary)
        n_bonds = n_sites if boundary is Boundary.PBC else n_sites - 1
        couplings = (J,) if long_range_alpha is not None else (J,) * n_bonds
        return cls(variant, n_sites, boundary, couplings, (b,) * n_sites, omega0, long_range_alpha)

    @property
    def battery_axis(self) -> Axis:
        return Axis.Z if self.variant is Variant.XX else Axis.Y

    def bonds(self) -> list[tuple[int, int, float]]:
        """All interacting pairs ``(i, j, J_ij)`` with 0-based sites."""
        n = self.n_sites
        if self.long_range_alpha is not None:
            J = self.couplings[0]
            out = []
            for i in range(n):
                for j in range(i + 1, n):
                    d = j - i
                    if self.boundary is Boundary.PBC:
                        d = min(d, n - d)
                    out.append((i, j, J / d**self.long_range_alpha))
            return out
        return [(k, (k + 1) % n, J) for k, J in enumerate(self.couplings)]

    def with_couplings(self, couplings: Sequence[float]) -> "ChargerSpec":
        return replace(self, couplings=tuple(couplings))

    def with_alpha(self, alpha: float | None) -> "ChargerSpec":
        J = self.couplings[0]
        n_bonds = self.n_sites if self.boundary is Boundary.PBC else self.n_sites - 1
        couplings = (J,) if alpha is not None else (J,) * n_bonds
        return replace(self, couplings=couplings, long_range_alpha=alpha)


@dataclass(frozen=True)
class KickSchedule:
    """Strictly increasing kick times inside ``(0, window]``.

    ``kind`` records how the schedule was built. Uniform schedules end on a
    kick; the other kinds finish with a free Ising segment up to ``window``.
    """

    times: tuple[float, ...]
    window: float
    kind: str = "explicit"

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if not self.window > 0:
            raise ConfigError("schedule window must be positive")
        if self.kind not in ("uniform", "explicit", "random"):
            raise ConfigError(f"unknown schedule kind {self.kind!r}")
        prev = 0.0
        for t in times:
            if not t > prev:
                raise ConfigError("kick times must be positive and strictly increasing")
            prev = t
        if times and times[-1] > self.window * (1 + 1e-12):
            raise ConfigError("last kick lies beyond the window")

    @classmethod
    def uniform(cls, m: int, window: float | None = None) -> "KickSchedule":
        """``m`` equally spaced kicks; by default at integer times ``1..m``."""
        if m < 0:
            raise ConfigError("number of kicks must be non-negative")
        if window is None:
            return cls(tuple(float(k) for k in range(1, m + 1)), float(max(m, 1)), "uniform")
        step = window / m if m else window
        return cls(tuple(k * step for k in range(1, m + 1)), float(window), "uniform")

    @classmethod
    def random(cls, m: int, window: float = 1.0, seed: int = 0, stream: int = 0) -> "KickSchedule":
        """``m`` kick times drawn uniformly from ``(0, window]`` and sorted."""
        rng = make_rng(seed, stream)
        while True:
            # uniform on (0, window]: flip the half-open interval of random()
            times = np.sort(window * (1.0 - rng.random(m)))
            if m == 0 or np.all(np.diff(times) > 0):
                return cls(tuple(times), float(window), "random")

    @property
    def m(self) -> int:
        return len(self.times)

    @property
    def trailing(self) -> float:
        """Length of the free Ising segment after the last kick."""
        if self.kind == "uniform":
            return 0.0
        last = self.times[-1] if self.times else 0.0
        return max(self.window - last, 0.0)


def intervals(schedule: KickSchedule) -> list[float]:
    """Spacings between consecutive kicks, starting from ``t = 0``."""
    out, prev = [], 0.0
    for t in schedule.times:
        out.append(t - prev)
        prev = t
    return out


@dataclass(frozen=True)
class BatterySpec:
    """Battery of independent two-level cells, ``H0 = (omega0/2) sum sigma^axis``."""

    axis: Axis = Axis.Z
    omega0: float = 1.0
    shift_ground_to_zero: bool = True

    def __post_init__(self):
        object.__setattr__(self, "axis", _parse_enum(Axis, self.axis))

    @classmethod
    def for_charger(cls, spec: ChargerSpec, shift_ground_to_zero: bool = True) -> "BatterySpec":
        return cls(spec.battery_axis, spec.omega0, shift_ground_to_zero)

    def check(self, spec: ChargerSpec) -> None:
        if self.axis is not spec.battery_axis:
            raise ConfigError(
                f"{spec.variant.value} charger pairs with a {spec.battery_axis.value}-axis battery, "
                f"got {self.axis.value}"
            )


def is_self_dual(spec: ChargerSpec, tol: float = SELF_DUAL_TOL) -> bool:
    """True when every |J_ij| and |b_i| equals pi/4 within ``tol``."""
    if spec.long_range_alpha is not None:
        return False
    values = spec.couplings + spec.fields
    return all(abs(abs(v) - SELF_DUAL_ANGLE) <= tol for v in values)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    Each disorder realization or schedule draw gets its own stream so results
    do not depend on how work is split across threads.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass
class RunConfig:
    """A parsed JSON run configuration."""

    spec: ChargerSpec
    schedule: KickSchedule
    seed: int = 0
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def battery(self) -> BatterySpec:
        return BatterySpec.for_charger(self.spec)


def _broadcast(value, length: int, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * length
    if isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
        return tuple(float(v) for v in value)
    raise ConfigError(f"{name} must be a number or a list of numbers")


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Build a :class:`RunConfig` from the JSON configuration schema.

    Keys: ``variant, n, boundary, J, b, omega0, alpha?`` and
    ``schedule: {kind, m?, times?, window?, seed?}``.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        n = int(data["n"])
        variant = _parse_enum(Variant, data.get("variant", "XX"))
        boundary = _parse_enum(Boundary, data.get("boundary", "PBC"))
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    alpha = data.get("alpha")
    n_bonds = n if boundary is Boundary.PBC else n - 1
    J = data.get("J", SELF_DUAL_ANGLE)
    couplings = _broadcast(J, 1 if alpha is not None and not isinstance(J, list) else n_bonds, "J")
    fields = _broadcast(data.get("b", -SELF_DUAL_ANGLE), n, "b")
    spec = ChargerSpec(
        variant, n, boundary, couplings, fields, float(data.get("omega0", 1.0)),
        None if alpha is None else float(alpha),
    )
    sched = data.get("schedule", {"kind": "uniform", "m": n})
    if not isinstance(sched, dict):
        raise ConfigError("schedule must be an object")
    seed = int(sched.get("seed", data.get("seed", 0)))
    kind = sched.get("kind", "uniform")
    window = sched.get("window")
    if kind == "uniform":
        schedule = KickSchedule.uniform(int(sched.get("m", n)), None if window is None else float(window))
    elif kind == "explicit":
        if "times" not in sched:
            raise ConfigError("explicit schedule needs 'times'")
        times = [float(t) for t in sched["times"]]
        schedule = KickSchedule(tuple(times), float(window if window is not None else times[-1]), "explicit")
    elif kind == "random":
        schedule = KickSchedule.random(int(sched.get("m", n)), float(window or 1.0), seed)
    else:
        raise ConfigError(f"unknown schedule kind {kind!r}")
    extra = {k: v for k, v in data.items() if k not in {"variant", "n", "boundary", "J", "b", "omega0", "alpha", "schedule"}}
    return RunConfig(spec, schedule, seed, extra)


def load_config(path: str) -> RunConfig:
    """Read a JSON configuration; JSON syntax errors propagate as ``json.JSONDecodeError``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return config_from_dict(data)
