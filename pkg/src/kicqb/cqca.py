"""Clifford cellular-automaton engine for the self-dual kicked-Ising charger.

At ``|J| = |b| = pi/4`` both layers are Clifford, so a battery cell
operator stays a single Pauli string under Heisenberg evolution. The
injected energy then reduces to product-state expectations of those strings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Axis, BatterySpec, Boundary, ChargerSpec, Variant, is_self_dual
from .oracle import ChargingTrace
from .pauli import (
    LocalState,
    NonCliffordError,
    PauliString,
    commutes,
    conjugate_by_layer,
    expectation_in_product_state,
)


def _require_self_dual(spec: ChargerSpec) -> None:
    if not is_self_dual(spec):
        raise NonCliffordError("the Clifford engine needs |J| = |b| = pi/4 on every bond and site")


def cell_letter(spec: ChargerSpec) -> str:
    return "Z" if spec.variant is Variant.XX else "Y"


def center_site(n: int) -> int:
    """1-based central cell: ``N/2`` for even N, ``ceil(N/2)`` for odd N."""
    return (n + 1) // 2


def step(p: PauliString, spec: ChargerSpec) -> PauliString:
    """One Heisenberg step ``U_I^dagger U_K^dagger p U_K U_I``."""
    return conjugate_by_layer(conjugate_by_layer(p, spec, "Kick"), spec, "Ising")


def evolve_string(p: PauliString, spec: ChargerSpec, m: int) -> PauliString:
    _require_self_dual(spec)
    for _ in range(m):
        p = step(p, spec)
    return p


def string_history(p: PauliString, spec: ChargerSpec, m: int) -> list[PauliString]:
    """Strings after ``0..m`` kicks."""
    _require_self_dual(spec)
    out = [p]
    for _ in range(m):
        out.append(step(out[-1], spec))
    return out


def heisenberg_cell(spec: ChargerSpec, site: int, m: int) -> PauliString:
    """Battery cell operator at 1-based ``site`` after ``m`` kicks."""
    if not 1 <= site <= spec.n_sites:
        raise ValueError(f"site {site} outside 1..{spec.n_sites}")
    if m < 0:
        raise ValueError("m must be non-negative")
    return evolve_string(PauliString.single(spec.n_sites, site, cell_letter(spec)), spec, m)


def _local_state(spec: ChargerSpec) -> LocalState:
    return LocalState.KET_ONE if spec.variant is Variant.XX else LocalState.KET_MINUS_I


def _cell_sites(spec: ChargerSpec) -> list[int]:
    # translation invariance lets one site stand in for all under PBC
    return [1] if spec.boundary is Boundary.PBC else list(range(1, spec.n_sites + 1))


def energy_trace_cqca(spec: ChargerSpec, m_max: int, battery: BatterySpec | None = None) -> ChargingTrace:
    """Shifted-normalized energy after ``0..m_max`` kicks."""
    _require_self_dual(spec)
    battery = battery or BatterySpec.for_charger(spec)
    battery.check(spec)
    local = _local_state(spec)
    sites = _cell_sites(spec)
    totals = np.zeros(m_max + 1)
    for site in sites:
        hist = string_history(PauliString.single(spec.n_sites, site, cell_letter(spec)), spec, m_max)
        totals += [expectation_in_product_state(p, local).real for p in hist]
    mean_sigma = totals / len(sites)
    energy = list((mean_sigma + 1) / 2)
    return ChargingTrace(list(range(m_max + 1)), energy, engine="cqca")


def injected_energy_cqca(spec: ChargerSpec, battery: BatterySpec | None, m: int) -> float:
    """``<H0>`` after ``m`` kicks; shifted so the ground state is zero if requested."""
    battery = battery or BatterySpec.for_charger(spec)
    e_norm = energy_trace_cqca(spec, m, battery).energy[-1]
    n = spec.n_sites
    e = e_norm * n * battery.omega0
    return e if battery.shift_ground_to_zero else e - n * battery.omega0 / 2


@dataclass(frozen=True)
class PatternSummary:
    """Kick indices where the battery is fully charged or discharged.

    ``charged`` and ``discharged`` are residues modulo ``period``; all other
    kicks leave the shifted-normalized energy at 1/2.
    """

    period: int
    charged: tuple[int, ...]
    discharged: tuple[int, ...]

    def energy_at(self, m: int) -> float:
        r = m % self.period
        if r in self.charged:
            return 1.0
        if r in self.discharged:
            return 0.0
        return 0.5

    def charged_kicks(self, m_max: int) -> list[int]:
        return [m for m in range(m_max + 1) if m % self.period in self.charged]

    def discharged_kicks(self, m_max: int) -> list[int]:
        return [m for m in range(m_max + 1) if m % self.period in self.discharged]


def pattern_summary(spec: ChargerSpec) -> PatternSummary:
    """Charging rules of the self-dual charger by variant, boundary and parity."""
    _require_self_dual(spec)
    n = spec.n_sites
    even = n % 2 == 0
    if spec.variant is Variant.XX:
        if spec.boundary is Boundary.PBC and even:
            return PatternSummary(n, (n // 2,), (0,))
        return PatternSummary(n, (), (0,))
    if spec.boundary is Boundary.PBC and even:
        return PatternSummary(n, (), (0,))
    return PatternSummary(4 * n, (2 * n,), (0,))


def correlator_lightcone_cqca(spec: ChargerSpec, i: int, m: int) -> list[float]:
    """``||[Z_i(m), Z_j]||`` for ``j = 1..N``: 2 where the strings anticommute, else 0."""
    n = spec.n_sites
    zi = evolve_string(PauliString.single(n, i, "Z"), spec, m)
    return [0.0 if commutes(zi, PauliString.single(n, j, "Z")) else 2.0 for j in range(1, n + 1)]


def lightcone_map(spec: ChargerSpec, i: int, m_max: int) -> np.ndarray:
    """Rows ``m = 0..m_max`` of :func:`correlator_lightcone_cqca`."""
    n = spec.n_sites
    out = np.zeros((m_max + 1, n))
    zi = PauliString.single(n, i, "Z")
    _require_self_dual(spec)
    for m in range(m_max + 1):
        out[m] = [0.0 if commutes(zi, PauliString.single(n, j, "Z")) else 2.0 for j in range(1, n + 1)]
        zi = step(zi, spec)
    return out


# ---------------------------------------------------------------------------
# closed-form strings for the central cell


class UnsupportedClosedForm(ValueError):
    """No closed form is available for this (spec, site) combination."""


def _ordered_product(n: int, factors: list[tuple[int, str]], sign: int = 1, wrap: bool = False) -> PauliString:
    """Multiply single-site factors left to right; sites may wrap under PBC."""
    out = PauliString.identity(n)
    for site, letter in factors:
        if wrap:
            site = (site - 1) % n + 1
        elif not 1 <= site <= n:
            raise AssertionError(f"closed form produced site {site} outside 1..{n}")
        out = out * PauliString.single(n, site, letter)
    return out if sign > 0 else -out


def _run(letter: str, a: int, b: int) -> list[tuple[int, str]]:
    return [(k, letter) for k in range(a, b + 1)]


def _alternating(a: int, b: int, first: str) -> list[tuple[int, str]]:
    other = "Y" if first == "Z" else "Z"
    return [(k, first if (k - a) % 2 == 0 else other) for k in range(a, b + 1)]


def _xx_center(n: int, boundary: Boundary, m: int) -> PauliString:
    c = center_site(n)
    pbc = boundary is Boundary.PBC
    if n % 2 == 0 and not pbc:
        # the cell moves to its mirror image after N kicks; period 2N
        m %= 2 * n
        if m >= n:
            return _reflect(_xx_center(n, boundary, m - n))
    else:
        m %= n
    if m == 0:
        return PauliString.single(n, c, "Z")
    spread = m < c or (m == c and pbc and n % 2 == 1)
    if n % 2 == 0 and m == c:
        if pbc:
            return _ordered_product(n, _run("Z", 1, n - 1), -1)
        return _ordered_product(n, [(1, "Y"), *_run("Z", 2, n - 1), (n, "X")])
    if spread:
        return _ordered_product(
            n, [(c - m, "X"), *_run("Z", c - m + 1, c + m - 1), (c + m, "X")], -1, wrap=pbc
        )
    # contracting front: Y endpoints approach the centre again
    if n % 2 == 0:
        lo = m - c + (0 if pbc else 1)
        hi = 3 * c - m + (0 if pbc else 1)
    else:
        lo, hi = m - c + 1, 3 * c - m - 1
    return _ordered_product(n, [(lo, "Y"), *_run("Z", lo + 1, hi - 1), (hi, "Y")], -1)


def _zz_center(n: int, boundary: Boundary, m: int) -> PauliString:
    c = center_site(n)
    if n % 2 == 0 and boundary is Boundary.PBC:
        m %= n
        if m == 0:
            return PauliString.single(n, c, "Y")
        if m <= c:
            return _ordered_product(n, _alternating(c - m + 1, c + m - 1, "Z"))
        return _ordered_product(n, _alternating(m - c, 3 * c - m, "Y"))
    m %= 4 * n
    if m > 2 * n:
        return -_zz_center(n, boundary, m - 2 * n)
    if m == 0:
        return PauliString.single(n, c, "Y")
    if m <= c:
        return _ordered_product(n, _alternating(c - m + 1, c + m - 1, "Z"))
    if n % 2 == 1:
        # odd chains: the same strings arise with open or periodic ends
        if m < n:
            w = m - c
            return _ordered_product(n, [*_run("X", 1, w), *_alternating(w + 1, n - w, "Z"), *_run("X", n - w + 1, n)])
        if m == n:
            return _ordered_product(n, [*_run("X", 1, c - 1), (c, "Z"), *_run("X", c + 1, n)])
        if m == n + 1:
            return _ordered_product(n, [*_run("X", 1, c - 1), (c, "Y"), *_run("X", c + 1, n)], -1)
        if m < 3 * c:
            lo, hi = 3 * c - m, m - c
            return _ordered_product(n, [*_run("X", 1, lo - 1), *_alternating(lo, hi, "Y"), *_run("X", hi + 1, n)], -1)
        return _ordered_product(n, _alternating(m - 3 * c + 2, 5 * c - m - 2, "Y"), -1)
    # even N, open chain
    h = n // 2
    if m < n:
        w = m - h
        return _ordered_product(
            n, [*_run("X", 1, w), *_alternating(w + 1, 3 * h - m + 1, "Z"), *_run("X", 3 * h - m + 2, n)], -1
        )
    if m == n:
        return _ordered_product(n, [*_run("X", 1, h), (h + 1, "Z"), *_run("X", h + 2, n)], -1)
    if m <= 3 * h:
        lo, hi = 3 * h - m + 2, m - h
        return _ordered_product(n, [*_run("X", 1, lo - 1), *_alternating(lo, hi, "Y"), *_run("X", hi + 1, n)])
    return _ordered_product(n, _alternating(m - 3 * h, 5 * h - m, "Y"), -1)


def _reflect(p: PauliString) -> PauliString:
    """Mirror a string: site k goes to N + 1 - k, phase unchanged."""
    factors = {p.n + 1 - s: p.letter(s) for s in p.support()}
    return PauliString.from_sites(p.n, factors, p.phase_exp)


def translate(p: PauliString, shift: int) -> PauliString:
    """Cyclic shift of every factor by ``shift`` sites (periodic chains)."""
    n = p.n
    factors = {(s - 1 + shift) % n + 1: p.letter(s) for s in p.support()}
    return PauliString.from_sites(n, factors, p.phase_exp)


def closed_form_cell(spec: ChargerSpec, site: int, m: int) -> PauliString:
    """Cell operator after ``m`` kicks from piecewise formulas, O(N) per call.

    Available for the central cell of any chain, and for every site of a
    periodic chain by translation. Open-chain off-centre cells raise
    :class:`UnsupportedClosedForm`.
    """
    _require_self_dual(spec)
    if m < 0:
        raise ValueError("m must be non-negative")
    if any(v != spec.couplings[0] for v in spec.couplings) or any(v != spec.fields[0] for v in spec.fields):
        raise UnsupportedClosedForm("closed forms assume uniform J = pi/4, b = -pi/4")
    if spec.couplings[0] < 0 or spec.fields[0] > 0:
        raise UnsupportedClosedForm("closed forms assume J = pi/4, b = -pi/4")
    n, c = spec.n_sites, center_site(spec.n_sites)
    if spec.boundary is Boundary.OBC and site != c:
        raise UnsupportedClosedForm(f"open chain: closed form only for the central cell {c}")
    build = _xx_center if spec.variant is Variant.XX else _zz_center
    p = build(n, spec.boundary, m)
    return translate(p, site - c) if site != c else p
