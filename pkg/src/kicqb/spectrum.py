"""Floquet eigenphases of the self-dual kicked Ising chain.

All catalogued phases are rational multiples of 2*pi. They are stored exactly
as integer residues in units of ``2*pi / (8N)`` and converted to floats only
on output. Eigenvalues are ``exp(+i * phase)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .model import Boundary, ChargerSpec, Variant, _parse_enum, is_self_dual

DEDUP_TOL = 1e-9
MAX_BRUTE_FORCE_SITES = 12


class InfeasibleResidue(ValueError):
    """No spin string reaches the requested residue."""


@dataclass(frozen=True)
class EigenphaseSet:
    """Distinct eigenphases in ``[0, 2*pi)``.

    ``units`` holds the exact residues modulo ``8N`` when every phase is a
    multiple of ``2*pi / 8N``; it is ``None`` otherwise.
    """

    n: int
    boundary: Boundary
    phases: tuple[float, ...]
    units: tuple[int, ...] | None = None

    @classmethod
    def from_units(cls, n: int, boundary: Boundary, units) -> "EigenphaseSet":
        mod = 8 * n
        units = tuple(sorted({int(u) % mod for u in units}))
        return cls(n, boundary, tuple(2 * math.pi * u / mod for u in units), units)

    def __len__(self) -> int:
        return len(self.phases)

    def matches(self, other: "EigenphaseSet", tol: float = DEDUP_TOL) -> bool:
        """Set equality, exact when both carry units, else within ``tol`` on the circle."""
        if self.n != other.n:
            return False
        if self.units is not None and other.units is not None:
            return self.units == other.units
        if len(self) != len(other):
            return False
        a, b = np.array(self.phases), np.array(other.phases)
        gap = np.abs(np.angle(np.exp(1j * (a[:, None] - b[None, :]))))
        return bool(np.all(gap.min(axis=1) < tol) and np.all(gap.min(axis=0) < tol))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "boundary": self.boundary.value,
            "phases": list(self.phases),
            "units_of_2pi_over_8n": None if self.units is None else list(self.units),
        }


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"need at least 2 sites, got {n}")


def eigenphases_obc(n: int) -> EigenphaseSet:
    """Catalogued eigenphases of the open chain."""
    _check_n(n)
    u = 8 * n
    if n == 2:
        units = [k * u // 8 for k in (1, 2, 6, 7)]
    elif n == 3:
        units = [k * u // 24 for k in (1, 3, 7, 9, 15, 17, 21, 23)]
    elif n == 4:
        units = [k * u // 16 for k in range(16) if k not in (6, 10)]
    elif n % 2:
        units = [2 * k + 1 for k in range(4 * n)]
    else:
        units = [2 * k for k in range(4 * n)]
    return EigenphaseSet.from_units(n, Boundary.OBC, units)


def eigenphases_pbc(n: int) -> EigenphaseSet:
    """Catalogued eigenphases of the ring."""
    _check_n(n)
    if n % 4 == 0:
        units = [8 * k for k in range(n)]
    elif n % 4 == 2:
        units = [4 * (2 * k + 1) for k in range(n)]
    else:
        # even and odd fermion-parity sectors contribute separate families
        units = [8 * k for k in range(n)] + [2 * (4 * k + 3) for k in range(n)]
    return EigenphaseSet.from_units(n, Boundary.PBC, units)


def eigenphases(n: int, boundary: Boundary | str) -> EigenphaseSet:
    boundary = _parse_enum(Boundary, boundary)
    return eigenphases_obc(n) if boundary is Boundary.OBC else eigenphases_pbc(n)


def spin_sum(spins, boundary: Boundary | str = Boundary.OBC) -> int:
    """Integer phase in units of ``2*pi / 8N`` for a string of +-1 spins.

    Open chain: ``sum s_j (2j - 1)``. Ring: ``2 * sum s_k k``.
    """
    boundary = _parse_enum(Boundary, boundary)
    spins = list(spins)
    if any(s not in (1, -1) for s in spins):
        raise ValueError("spins must be +1 or -1")
    if boundary is Boundary.OBC:
        return sum(s * (2 * j - 1) for j, s in enumerate(spins, start=1))
    return 2 * sum(s * k for k, s in enumerate(spins, start=1))


def eigenphase_from_spins(n: int, spins, boundary: Boundary | str = Boundary.OBC) -> float:
    """Eigenphase in ``[0, 2*pi)`` generated by a spin string."""
    if len(spins) != n:
        raise ValueError(f"expected {n} spins, got {len(spins)}")
    return 2 * math.pi * (spin_sum(spins, boundary) % (8 * n)) / (8 * n)


def _pair_dp(n: int, blocked: set[int], need: int) -> list[int] | None:
    """Disjoint adjacent pairs ``(j, j+1)`` avoiding ``blocked`` with ``sum j = need (mod n)``."""
    # reach[j][r]: choice made at position j to land on residue r using sites < j
    reach: list[dict[int, tuple[int, bool]]] = [dict() for _ in range(n + 2)]
    reach[1][0] = (0, False)
    for j in range(1, n + 1):
        for r in list(reach[j]):
            # skip site j
            reach[j + 1].setdefault(r, (r, False))
            if j < n and j not in blocked and j + 1 not in blocked:
                r2 = (r + j) % n
                reach[j + 2].setdefault(r2, (r, True))
    target = need % n
    end = None
    for last in (n + 1, n + 2):
        if last < len(reach) and target in reach[last]:
            end = last
            break
    if end is None:
        return None
    pairs, j, r = [], end, target
    while j > 1:
        prev_r, took = reach[j][r]
        if took:
            pairs.append(j - 2)
            j -= 2
        else:
            j -= 1
        r = prev_r
    return sorted(pairs)


def _flip_candidates(n: int, delta_mod8: int):
    """Site sets whose single flips shift the sum by ``delta_mod8`` (mod 8)."""
    sites = sorted(range(1, n + 1), key=lambda j: min(j - 1, n - j))  # prefer the edges
    for size in range(0, 5):
        for combo in combinations(sites, size):
            if sum(2 if j % 2 == 0 else 6 for j in combo) % 8 == delta_mod8:
                yield set(combo)


def _residue_dp(n: int, target: int) -> list[int] | None:
    """Exact search over all strings: returns a spin list or None."""
    mod = 8 * n
    layers = [{n * n % mod: None}]  # all +1 start, flips subtract 2(2j-1)
    for j in range(1, n + 1):
        nxt = {}
        for r in layers[-1]:
            nxt.setdefault(r, (r, 1))
            nxt.setdefault((r - 2 * (2 * j - 1)) % mod, (r, -1))
        layers.append(nxt)
    if target not in layers[-1]:
        return None
    spins, r = [], target
    for j in range(n, 0, -1):
        prev, s = layers[j][r]
        spins.append(s)
        r = prev
    return spins[::-1]


def spin_string_for_residue(n: int, target: int) -> list[int]:
    """Open-chain spin string whose sum is ``target`` modulo ``8N``.

    Single-site flips fix the sum modulo 8; flipping an adjacent pair
    ``(j, j+1)`` shifts it by ``-8j`` and tunes the rest. If the
    constructive route leaves no room, an exhaustive residue search decides.
    """
    _check_n(n)
    mod = 8 * n
    target %= mod
    start = n * n
    if (target - start) % 2:
        raise InfeasibleResidue(
            f"residue {target} has the wrong parity: every spin sum for N={n} is "
            f"{'odd' if n % 2 else 'even'}"
        )
    delta8 = (target - start) % 8
    for flips in _flip_candidates(n, delta8):
        s1 = start - sum(2 * (2 * j - 1) for j in flips)
        # pairs must cover the remaining multiple of 8 exactly modulo 8N
        rest = (s1 - target) % mod
        pairs = _pair_dp(n, flips, rest // 8)
        if pairs is None:
            continue
        spins = [1] * n
        for j in flips:
            spins[j - 1] = -1
        for j in pairs:
            spins[j - 1] = spins[j] = -1
        if spin_sum(spins) % mod == target:
            return spins
    spins = _residue_dp(n, target)
    if spins is None:
        d = math.gcd(8, n)
        raise InfeasibleResidue(
            f"no spin string of length {n} reaches residue {target} mod {mod} "
            f"(pair flips move the sum in steps of 8j; with gcd(8, {n}) = {d} the "
            f"remaining offset must be divisible by {d})"
        )
    return spins


def attainable_residues(n: int, boundary: Boundary | str = Boundary.OBC) -> list[int]:
    """Every residue modulo ``8N`` reached by some spin string."""
    boundary = _parse_enum(Boundary, boundary)
    mod = 8 * n
    weight = (lambda j: 2 * (2 * j - 1)) if boundary is Boundary.OBC else (lambda j: 4 * j)
    reach = {spin_sum([1] * n, boundary) % mod}
    for j in range(1, n + 1):
        reach |= {(r - weight(j)) % mod for r in reach}
    return sorted(reach)


def brute_force_floquet_spectrum(spec: ChargerSpec) -> EigenphaseSet:
    """Distinct eigenphases of the dense one-period unitary."""
    from .oracle import floquet_matrix

    n = spec.n_sites
    if n > MAX_BRUTE_FORCE_SITES:
        raise ValueError(f"dense diagonalization limited to {MAX_BRUTE_FORCE_SITES} sites")
    if not is_self_dual(spec):
        raise ValueError("brute-force catalog comparison assumes the self-dual point")
    phases = np.sort(np.mod(np.angle(np.linalg.eigvals(floquet_matrix(spec))), 2 * math.pi))
    distinct: list[float] = []
    for p in phases:
        if not distinct or p - distinct[-1] > DEDUP_TOL:
            distinct.append(float(p))
    if len(distinct) > 1 and distinct[0] + 2 * math.pi - distinct[-1] <= DEDUP_TOL:
        distinct.pop()
    scaled = np.array(distinct) * 8 * n / (2 * math.pi)
    if np.all(np.abs(scaled - np.round(scaled)) < 1e-6):
        return EigenphaseSet.from_units(n, spec.boundary, np.round(scaled).astype(int))
    return EigenphaseSet(n, spec.boundary, tuple(distinct))


def verify_catalog(n: int, boundary: Boundary | str, variant: Variant | str = Variant.XX) -> bool:
    spec = ChargerSpec.uniform(variant, n, boundary)
    return brute_force_floquet_spectrum(spec).matches(eigenphases(n, spec.boundary))


def spectra_equivalent(n: int, boundary: Boundary | str) -> bool:
    """Whether the XX and ZZ chargers share their distinct eigenphases."""
    a = brute_force_floquet_spectrum(ChargerSpec.uniform(Variant.XX, n, boundary))
    b = brute_force_floquet_spectrum(ChargerSpec.uniform(Variant.ZZ, n, boundary))
    return a.matches(b)
