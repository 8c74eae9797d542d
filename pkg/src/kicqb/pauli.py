"""Exact Pauli-string algebra on N sites.

A string is ``i**phase_exp`` times a tensor product of single-site factors.
Bit ``k`` of ``x_mask``/``z_mask`` refers to 0-based site ``k``; a site with
both bits set carries a Y. Text rendering and the public site arguments are
1-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .model import ChargerSpec, Variant, is_self_dual

CLIFFORD_TOL = 1e-9

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


class NonCliffordError(ValueError):
    """Rotation angle does not map Pauli strings to Pauli strings."""


class LocalState(str, Enum):
    KET_ONE = "KetOne"  # |1>, eigenvalue -1 of Z
    KET_MINUS_I = "KetMinusI"  # |-i>, eigenvalue -1 of Y


def _single_site_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent g with sigma(x1,z1) sigma(x2,z2) = i**g sigma(x1^x2, z1^z2)."""
    if not (x1 or z1):
        return 0
    if x1 and z1:  # Y
        return z2 - x2
    if x1:  # X
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)  # Z


@dataclass(frozen=True)
class PauliString:
    n: int
    x_mask: int = 0
    z_mask: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks exceed {self.n} sites")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> "PauliString":
        """Single-site Pauli at 1-based ``site``."""
        return cls.from_sites(n, {site: letter})

    @classmethod
    def from_sites(cls, n: int, factors: dict[int, str], phase_exp: int = 0) -> "PauliString":
        x = z = 0
        for site, letter in factors.items():
            if not 1 <= site <= n:
                raise ValueError(f"site {site} outside 1..{n}")
            bx, bz = _BITS[letter.upper()]
            x |= bx << (site - 1)
            z |= bz << (site - 1)
        return cls(n, x, z, phase_exp)

    @classmethod
    def parse(cls, n: int, text: str) -> "PauliString":
        """Inverse of :meth:`__str__`, e.g. ``"-X3 Z4 Z5 X6"`` or ``"+iY1"``."""
        text = text.strip()
        m = re.match(r"^([+-]?)(i?)\s*(.*)$", text)
        sign, imag, body = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        factors: dict[int, str] = {}
        for tok in body.split():
            if tok == "I":
                continue
            tm = re.fullmatch(r"([XYZ])(\d+)", tok)
            if not tm:
                raise ValueError(f"bad Pauli token {tok!r}")
            factors[int(tm.group(2))] = tm.group(1)
        return cls.from_sites(n, factors, phase)

    # inspection -------------------------------------------------------
    def letter(self, site: int) -> str:
        k = site - 1
        return _LETTER[((self.x_mask >> k) & 1, (self.z_mask >> k) & 1)]

    def support(self) -> list[int]:
        mask = self.x_mask | self.z_mask
        return [k + 1 for k in range(self.n) if (mask >> k) & 1]

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def __str__(self) -> str:
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase_exp]
        body = " ".join(f"{self.letter(s)}{s}" for s in self.support())
        return (prefix + (body or "I")).strip()

    # algebra ----------------------------------------------------------
    def _check(self, other: "PauliString") -> None:
        if self.n != other.n:
            raise ValueError(f"width mismatch: {self.n} vs {other.n}")

    def __mul__(self, other: "PauliString") -> "PauliString":
        self._check(other)
        phase = self.phase_exp + other.phase_exp
        mask = (self.x_mask | self.z_mask) & (other.x_mask | other.z_mask)
        while mask:
            low = mask & -mask
            k = low.bit_length() - 1
            phase += _single_site_phase(
                (self.x_mask >> k) & 1, (self.z_mask >> k) & 1,
                (other.x_mask >> k) & 1, (other.z_mask >> k) & 1,
            )
            mask ^= low
        return PauliString(self.n, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask, phase)

    def times_phase(self, q: int) -> "PauliString":
        return PauliString(self.n, self.x_mask, self.z_mask, self.phase_exp + q)

    def __neg__(self) -> "PauliString":
        return self.times_phase(2)

    def same_operator(self, other: "PauliString") -> bool:
        """Equal up to the global phase."""
        return self.n == other.n and self.x_mask == other.x_mask and self.z_mask == other.z_mask


def commutes(p: PauliString, q: PauliString) -> bool:
    """True when ``p`` and ``q`` anticommute on an even number of sites."""
    p._check(q)
    return ((p.x_mask & q.z_mask) ^ (p.z_mask & q.x_mask)).bit_count() % 2 == 0


def conjugate_by_rotation(p: PauliString, g: PauliString, theta: float) -> PauliString:
    """Return ``exp(i theta g) p exp(-i theta g)`` for a Hermitian generator ``g``.

    Anticommuting operands require ``2*theta`` to be a multiple of pi/2.
    """
    if commutes(p, g):
        return p
    if not g.is_hermitian:
        raise ValueError("generator must be Hermitian")
    quarter = 2 * theta / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) * (math.pi / 2) > CLIFFORD_TOL:
        raise NonCliffordError(f"rotation angle {theta} is not Clifford for anticommuting strings")
    # exp(2 i theta g) p = cos(2 theta) p + i sin(2 theta) g p
    k %= 4
    if k == 0:
        return p
    if k == 2:
        return -p
    gp = g * p
    return gp.times_phase(1 if k == 1 else 3)


def _layer_generators(spec: ChargerSpec, layer: str) -> list[tuple[PauliString, float]]:
    n = spec.n_sites
    if layer == "Kick":
        letter = "Z" if spec.variant is Variant.XX else "X"
        return [(PauliString.single(n, i + 1, letter), b) for i, b in enumerate(spec.fields)]
    if layer == "Ising":
        letter = "X" if spec.variant is Variant.XX else "Z"
        gens = []
        for i, j, J in spec.bonds():
            if i == j:
                continue
            g = PauliString.from_sites(n, {i + 1: letter, j + 1: letter})
            gens.append((g, J))
        return gens
    raise ValueError(f"unknown layer {layer!r}")


def conjugate_by_layer(p: PauliString, spec: ChargerSpec, layer: str, inverse: bool = False) -> PauliString:
    """Heisenberg step ``U_layer^dagger p U_layer`` with ``U = exp(-i H_layer)``.

    ``layer`` is ``"Kick"`` or ``"Ising"``. With ``inverse=True`` the
    opposite conjugation ``U p U^dagger`` is applied.
    """
    if not is_self_dual(spec):
        raise NonCliffordError("layer conjugation needs the self-dual point")
    sign = -1.0 if inverse else 1.0
    for g, angle in _layer_generators(spec, layer):
        p = conjugate_by_rotation(p, g, sign * angle)
    return p


def expectation_in_product_state(p: PauliString, local: LocalState | str) -> complex:
    """``<psi|p|psi>`` for ``psi`` a product of identical single-site states."""
    local = LocalState(local)
    if local is LocalState.KET_ONE:
        if p.x_mask:
            return 0j
        count = p.z_mask.bit_count()
    else:
        if p.x_mask != p.z_mask:  # any bare X or Z
            return 0j
        count = p.x_mask.bit_count()
    value = (1j) ** p.phase_exp * (-1) ** count
    return complex(value)
