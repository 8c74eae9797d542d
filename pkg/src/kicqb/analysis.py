"""Entanglement-entropy profiles and measurement-sample statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import BatterySpec, Boundary, _parse_enum
from .oracle import SampleSet


# ---------------------------------------------------------------------------
# entropy of the ZZ charger at the self-dual point (integer kicks)


def _check_bond(n: int, i: int) -> None:
    if not 1 <= i <= n - 1:
        raise ValueError(f"bond index {i} outside 1..{n - 1}")


def entropy_cycle(n: int, boundary: Boundary | str) -> int:
    """Kicks after which the bond entropies repeat: ``2N`` open, ``N`` periodic."""
    boundary = _parse_enum(Boundary, boundary)
    return 2 * n if boundary is Boundary.OBC else n


def _front(n: int, boundary: Boundary, t: float) -> float:
    """Height of the entanglement front before the bond cap is applied."""
    t = t % entropy_cycle(n, boundary)
    if boundary is Boundary.OBC:
        x = min(t - n / 2, 3 * n / 2 - 1 - t)
        return max(0.0, n / 2 - abs(x))
    x = min(t - n / 4, 3 * n / 4 - 1 - t)
    return max(0.0, n / 2 - 2 * abs(x))


def entropy_profile(n: int, boundary: Boundary | str, i: int, t: float) -> float:
    """Von Neumann entropy (bits) across the cut after site ``i`` after ``t`` kicks.

    Exact for even ``N``: the front rises by one bit per kick (two under
    periodic boundaries, which entangle across both ends), saturates at
    ``min(i, N - i)`` and falls back to zero at the end of each cycle.
    """
    boundary = _parse_enum(Boundary, boundary)
    _check_bond(n, i)
    if n % 2:
        raise ValueError("entropy profile is derived for even N")
    return float(min(_front(n, boundary, t), i, n - i))


def entropy_total(n: int, boundary: Boundary | str, t: float) -> float:
    """Sum of :func:`entropy_profile` over all bonds.

    Equals ``N^2/4 - x^2`` (open) or ``N^2/4 - 4 x^2`` (periodic), clamped
    at zero, where ``x`` is the signed offset from the peak of the cycle.
    """
    boundary = _parse_enum(Boundary, boundary)
    return float(sum(entropy_profile(n, boundary, i, t) for i in range(1, n)))


def entropy_profile_floor(n: int, boundary: Boundary | str, i: int, t: float) -> float:
    """Floor-based piecewise estimate ``min(floor(t-1/2), N - floor(t+1/2), i, N-i)``.

    Periodic chains use ``2t`` in place of ``t``. Kept for comparison: it lags
    the exact profile by one kick on the rising edge.
    """
    boundary = _parse_enum(Boundary, boundary)
    _check_bond(n, i)
    if t < 0.5:
        return 0.0
    tt = 2 * t if boundary is Boundary.PBC else t
    return float(max(0, min(math.floor(tt - 0.5), n - math.floor(tt + 0.5), i, n - i)))


def entropy_total_parabola(n: int, boundary: Boundary | str, t: float) -> float:
    """Unclamped parabolic fit through the bond-summed entropy.

    Open: ``N^2/4 - min(t - N/2, 3N/2 - 1 - t)^2`` on ``[0, 2N]``.
    Periodic: ``c - (16 c / N^2) min(t - N/4, 3N/4 - 1 - t)^2`` with
    ``c = 1 + 2 floor(N^2/8)`` on ``[0, N]``.
    """
    boundary = _parse_enum(Boundary, boundary)
    if boundary is Boundary.OBC:
        x = min(t - n / 2, 3 * n / 2 - 1 - t)
        return n * n / 4 - x * x
    c = 1 + 2 * (n * n // 8)
    x = min(t - n / 4, 3 * n / 4 - 1 - t)
    return c - 16 * c / (n * n) * x * x


# ---------------------------------------------------------------------------
# sample statistics


def _require_shots(samples: SampleSet, minimum: int = 1) -> None:
    if samples.shots < minimum:
        raise ValueError(f"need at least {minimum} shots, got {samples.shots}")


def p0_statistics(samples: SampleSet) -> dict:
    """Fraction of zeros per bit and its mean, min, max and spread across bits."""
    _require_shots(samples)
    p0 = 1.0 - samples.bits.mean(axis=0)
    return {
        "per_qubit": p0.tolist(),
        "mean": float(p0.mean()),
        "min": float(p0.min()),
        "max": float(p0.max()),
        "std": float(p0.std()),
    }


def checkerboard(n: int) -> np.ndarray:
    """Ideal covariance of the half-cycle state: 1 where ``i = j (mod 2)``, else 0."""
    idx = np.arange(n)
    return ((idx[:, None] - idx[None, :]) % 2 == 0).astype(float)


@dataclass(frozen=True)
class CovarianceReport:
    """Spin covariance with its distance to a reference pattern.

    ``parity_split`` holds the mean off-diagonal entry over same-parity and
    opposite-parity site pairs.
    """

    matrix: np.ndarray
    checkerboard_deviation: float
    parity_split: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "checkerboard_deviation": self.checkerboard_deviation,
            "same_parity_mean": self.parity_split[0],
            "opposite_parity_mean": self.parity_split[1],
        }


def spins(samples: SampleSet) -> np.ndarray:
    """Bits mapped to Ising spins ``s = 1 - 2b``."""
    return 1.0 - 2.0 * samples.bits


def covariance_matrix(samples: SampleSet, reference: np.ndarray | None = None) -> CovarianceReport:
    """Plug-in covariance ``E[s_i s_j] - E[s_i] E[s_j]`` of the spins.

    ``reference`` defaults to the checkerboard pattern.
    """
    _require_shots(samples, 2)
    s = spins(samples)
    mean = s.mean(axis=0)
    cov = s.T @ s / samples.shots - np.outer(mean, mean)
    cov = (cov + cov.T) / 2
    n = samples.n
    ref = checkerboard(n) if reference is None else np.asarray(reference, dtype=float)
    idx = np.arange(n)
    off = idx[:, None] != idx[None, :]
    same = ((idx[:, None] - idx[None, :]) % 2 == 0) & off
    opposite = (idx[:, None] - idx[None, :]) % 2 == 1
    split = (
        float(cov[same].mean()) if same.any() else float("nan"),
        float(cov[opposite].mean()) if opposite.any() else float("nan"),
    )
    return CovarianceReport(cov, float(np.max(np.abs(cov - ref))), split)


def ideal_half_cycle_distribution(n: int) -> list[tuple[str, float]]:
    """Y-basis outcomes of the ZZ ring after ``N/2`` kicks: four strings, 1/4 each."""
    if n % 2 or n < 2:
        raise ValueError("half-cycle distribution needs an even N >= 2")
    half = n // 2
    strings = ["0" * n, "01" * half, "10" * half, "1" * n]
    return [(s, 0.25) for s in strings]


def distribution(samples: SampleSet) -> dict[str, float]:
    """Empirical frequency of every observed bitstring."""
    keys, counts = np.unique(samples.bits, axis=0, return_counts=True)
    return {"".join(map(str, k)): float(c) / samples.shots for k, c in zip(keys, counts)}


def energy_with_variance(samples: SampleSet, battery: BatterySpec) -> dict:
    """Battery energy and the variance of its estimator from the shots.

    Bit 0 is the excited level. Each ``<sigma_i>`` estimator has variance
    ``cov(s_i, s_j) / shots``; these propagate through ``(omega0/2) sum sigma_i``.
    """
    if samples.basis != battery.axis.value:
        raise ValueError(f"samples measured in {samples.basis}, battery axis is {battery.axis.value}")
    _require_shots(samples)
    s = spins(samples)
    n, shots = samples.n, samples.shots
    mean = s.mean(axis=0)
    energy = 0.5 * battery.omega0 * float(mean.sum())
    if battery.shift_ground_to_zero:
        energy += n * battery.omega0 / 2
    cov = s.T @ s / shots - np.outer(mean, mean)
    var = battery.omega0**2 / 4 * float(cov.sum()) / shots
    var = max(var, 0.0)
    return {
        "E": energy,
        "var": var,
        "std": math.sqrt(var),
        "E_normalized": energy / (n * battery.omega0),
        "shots": shots,
    }


def pooled_variance(energies: Sequence[float], variances: Sequence[float]) -> tuple[float, float]:
    """Mean and total variance over disorder realizations.

    ``V = (1/n_d) sum_d [V_d + (E_d - mean)^2]``.
    """
    e = np.asarray(energies, dtype=float)
    v = np.asarray(variances, dtype=float)
    if e.size == 0 or e.shape != v.shape:
        raise ValueError("need matching, non-empty energy and variance lists")
    mean = float(e.mean())
    return mean, float(np.mean(v + (e - mean) ** 2))
