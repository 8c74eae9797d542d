"""Free-fermion engine for the XX charger on a ring.

After a Jordan-Wigner transformation each pair of pseudomomenta ``(k, -k)``
evolves under its own 2x2 unitary, so injected energies for arbitrary
``J`` and ``b`` reduce to sums over ``N`` modes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import BatterySpec, Boundary, ChargerSpec, Variant
from .oracle import ChargingTrace

UNITARY_TOL = 1e-12


class Sector(str, Enum):
    ANTIPERIODIC = "Antiperiodic"
    PERIODIC = "Periodic"
    PERIODIC_WITH_PI = "PeriodicWithPi"


class UnsupportedSpec(ValueError):
    """The momentum engine only covers the uniform XX charger on a ring."""


def pseudomomenta(n: int, sector: Sector | str) -> list[float]:
    """Allowed lattice momenta, sorted ascending, for a chain of ``n`` sites."""
    if n < 2:
        raise ValueError("need at least 2 sites")
    sector = Sector(sector)
    if sector is Sector.ANTIPERIODIC:
        ks = [(2 * j + 1 - n) * math.pi / n for j in range(n)]
    else:
        ks = [2 * math.pi * j / n for j in range(-((n - 1) // 2), n // 2 + 1)]
        ks = [k for k in ks if abs(k) < math.pi - 1e-12]
        if sector is Sector.PERIODIC_WITH_PI or n % 2 == 0:
            ks.append(math.pi)
    return sorted(ks)


def sector_for(n: int) -> Sector:
    """Momentum set that carries the all-down initial state of the XX charger."""
    return Sector.ANTIPERIODIC if n % 2 == 0 else Sector.PERIODIC


@dataclass(frozen=True)
class ModeUnitary:
    """SU(2) matrix ``[[alpha, -conj(beta)], [beta, conj(alpha)]]``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"mode matrix is not unitary: |alpha|^2+|beta|^2 = {norm}")

    @classmethod
    def identity(cls) -> "ModeUnitary":
        return cls(1 + 0j, 0j)

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, -b.conjugate()], [b, a.conjugate()]])

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        a1, b1, a2, b2 = self.alpha, self.beta, other.alpha, other.beta
        return ModeUnitary(a1 * a2 - b1.conjugate() * b2, b1 * a2 + a1.conjugate() * b2)

    @property
    def unitarity_error(self) -> float:
        return abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1)

    def apply(self, state: "ModeState") -> "ModeState":
        a, b = self.alpha, self.beta
        return ModeState(a * state.u - b.conjugate() * state.v, b * state.u + a.conjugate() * state.v)


@dataclass(frozen=True)
class ModeState:
    """Bogoliubov amplitudes of one ``(k, -k)`` pair."""

    u: complex
    v: complex

    def __post_init__(self):
        if abs(abs(self.u) ** 2 + abs(self.v) ** 2 - 1) > 1e-10:
            raise ValueError("mode amplitudes must satisfy |u|^2 + |v|^2 = 1")


def floquet_mode(k: float, J: float, b: float) -> ModeUnitary:
    """One-period unitary of the mode pair ``(k, -k)``."""
    c2j, s2j = math.cos(2 * J), math.sin(2 * J)
    alpha = cmath.exp(2j * b) * (c2j - 1j * s2j * math.cos(k))
    beta = 1j * cmath.exp(-2j * b) * s2j * math.sin(k)
    return ModeUnitary(alpha, beta)


def _chebyshev_second_kind(n: int, cos_t: float, sin_t: float) -> float:
    """``U_n(cos t)`` for ``cos_t >= 0`` given an accurate ``sin t >= 0``."""
    if n < 0:
        return -_chebyshev_second_kind(-n - 2, cos_t, sin_t) if n < -1 else 0.0
    if sin_t == 0.0:
        return float(n + 1)
    theta = math.atan2(sin_t, cos_t)
    return math.sin((n + 1) * theta) / sin_t


def chebyshev_power(u: ModeUnitary, m: int) -> ModeUnitary:
    """``u**m`` from the Cayley-Hamilton identity.

    ``U^m = U_{m-1}(xi) U - U_{m-2}(xi) I`` with ``xi = Re(alpha)`` and the
    Chebyshev polynomials of the second kind evaluated in closed form.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return ModeUnitary.identity()
    xi = u.alpha.real
    # sin(theta) from the off-diagonal weight keeps precision near xi = +-1
    sin_t = math.hypot(u.alpha.imag, abs(u.beta))
    sign = 1.0 if xi >= 0 else -1.0
    cos_t = abs(xi)
    # U_n(-x) = (-1)^n U_n(x)
    c1 = _chebyshev_second_kind(m - 1, cos_t, sin_t) * sign ** (m - 1)
    c2 = _chebyshev_second_kind(m - 2, cos_t, sin_t) * sign ** (m - 2)
    alpha = c1 * u.alpha - c2
    beta = c1 * u.beta
    # renormalize away rounding so long powers stay on SU(2)
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return ModeUnitary(alpha / norm, beta / norm)


def _check_xx_ring(spec: ChargerSpec) -> tuple[float, float]:
    if spec.variant is not Variant.XX or spec.boundary is not Boundary.PBC:
        raise UnsupportedSpec(
            "momentum engine handles the XX charger with periodic boundaries; "
            "use the cqca engine (self-dual) or the statevector oracle instead"
        )
    if spec.long_range_alpha is not None:
        raise UnsupportedSpec("long-range couplings are not diagonal in momentum space")
    J, b = spec.couplings[0], spec.fields[0]
    if any(abs(c - J) > 1e-15 for c in spec.couplings) or any(abs(f - b) > 1e-15 for f in spec.fields):
        raise UnsupportedSpec("momentum engine needs uniform couplings and fields")
    return J, b


def mode_excitations(spec: ChargerSpec, m: int) -> np.ndarray:
    """Per-mode charge ``|beta_k(m)|^2`` after ``m`` kicks."""
    J, b = _check_xx_ring(spec)
    ks = pseudomomenta(spec.n_sites, sector_for(spec.n_sites))
    return np.array([abs(chebyshev_power(floquet_mode(k, J, b), m).beta) ** 2 for k in ks])


def injected_energy_momentum(spec: ChargerSpec, battery: BatterySpec | None, m: int) -> float:
    """Battery energy after ``m`` uniform kicks, shifted per ``battery``."""
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    if m < 0:
        raise ValueError("m must be non-negative")
    charge = math.fsum(mode_excitations(spec, m))
    e = battery.omega0 * charge
    return e if battery.shift_ground_to_zero else e - spec.n_sites * battery.omega0 / 2


def energy_trace_momentum(spec: ChargerSpec, m_max: int) -> ChargingTrace:
    battery = BatterySpec.for_charger(spec)
    n = spec.n_sites
    energy = [injected_energy_momentum(spec, battery, m) / (n * battery.omega0) for m in range(m_max + 1)]
    return ChargingTrace(list(range(m_max + 1)), energy, engine="momentum")


def _sin2_ratio(t: float | np.ndarray, gap: np.ndarray) -> np.ndarray:
    """``sin^2(2 t gap) / gap^2`` with its ``4 t^2`` limit at zero gap."""
    gap = np.asarray(gap, dtype=float)
    safe = np.where(gap > 1e-12, gap, 1.0)
    return np.where(gap > 1e-12, np.sin(2 * t * safe) ** 2 / safe**2, 4 * t * t)


def tfim_energy(n: int, J: float, b: float, t: float, omega0: float = 1.0, shifted: bool = True) -> float:
    """Battery energy after evolving for time ``t`` under the transverse-field Ising ring."""
    if t < 0:
        raise ValueError("t must be non-negative")
    ks = np.array(pseudomomenta(n, sector_for(n)))
    gap = np.sqrt(J * J - 2 * J * b * np.cos(ks) + b * b)
    e = omega0 * J * J * math.fsum(_sin2_ratio(t, gap) * np.sin(ks) ** 2)
    return e if shifted else e - n * omega0 / 2


def _clenshaw_curtis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]`` for ``n + 1`` Chebyshev points (``n`` even)."""
    theta = np.pi * np.arange(n + 1) / n
    x = np.cos(theta)
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    for k in range(1, n // 2):
        v -= 2 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
    v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    w[1:-1] = 2 * v / n
    w[0] = w[-1] = 1 / (n * n - 1)
    return x, w


def clenshaw_curtis(f, a: float, b: float, tol: float = 1e-10, max_order: int = 1 << 14) -> float:
    """Integrate ``f`` over ``[a, b]``, doubling the order until two estimates agree within ``tol``."""
    prev = None
    order = 8
    while order <= max_order:
        x, w = _clenshaw_curtis(order)
        est = 0.5 * (b - a) * float(np.dot(w, f(0.5 * (b - a) * x + 0.5 * (a + b))))
        if prev is not None and abs(est - prev) < tol:
            return est
        prev, order = est, order * 2
    raise RuntimeError("Clenshaw-Curtis quadrature did not converge")


def thermodynamic_limit_energy(t: float, omega0: float = 1.0, shifted: bool = False) -> float:
    """Energy per site of the infinite self-dual ring after continuous evolution for ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    integral = clenshaw_curtis(lambda th: np.sin(math.pi * t * np.cos(th)) ** 2 * np.sin(th) ** 2, 0.0, math.pi / 2)
    e = 2 * omega0 / math.pi * integral
    return e if shifted else e - omega0 / 2


def saturation_energy(spec: ChargerSpec, window: float = 1.0) -> float:
    """Shifted-normalized energy reached when kicks become dense inside ``window``."""
    J, b = _check_xx_ring(spec)
    return tfim_energy(spec.n_sites, J, b, window, spec.omega0) / (spec.n_sites * spec.omega0)


def kic_limit_energy(m: int, J: float = math.pi / 4, b: float = -math.pi / 4,
                     omega0: float = 1.0, shifted: bool = False) -> float:
    """Energy per site of the infinite kicked ring after ``m`` unit kicks.

    Averages the per-mode charge ``|beta_k(m)|^2`` over ``k`` in ``[0, pi]``.
    At the self-dual point the unshifted value is ``-sin(2 pi m) / (4 pi m)``,
    which vanishes for every positive integer ``m``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")

    def charge(ks):
        return np.array([abs(chebyshev_power(floquet_mode(float(k), J, b), m).beta) ** 2 for k in np.atleast_1d(ks)])

    e = omega0 * clenshaw_curtis(charge, 0.0, math.pi) / math.pi
    return e if shifted else e - omega0 / 2
