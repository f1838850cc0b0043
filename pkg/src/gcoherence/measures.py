"""Coherence quantifiers in the computational basis."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._trig import sind
from .qstate import DensityMatrix, InvalidDimensionError


class MeasureKind(enum.Enum):
    G = "g"
    L1 = "l1"


@dataclass(frozen=True)
class CoherenceValue:
    value: float
    kind: MeasureKind
    d: int
    near_zero_warning: bool = False

    def __post_init__(self):
        upper = 1.0 if self.kind is MeasureKind.G else self.d - 1.0
        if not 0.0 <= self.value <= upper + 1e-12:
            raise ValueError(f"{self.kind.name} value {self.value!r} outside [0, {upper}]")


def _as_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    arr = np.asarray(rho, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def off_diagonal_moduli(rho) -> np.ndarray:
    """Moduli ``|rho_ij|`` for ``i < j``, in row-major order."""
    arr = _as_array(rho)
    iu = np.triu_indices(arr.shape[0], k=1)
    return np.abs(arr[iu])


def g_from_moduli(moduli, d: int) -> float:
    """G-coherence from the upper-triangle moduli of a ``d x d`` matrix.

    Each unordered pair appears twice in the full off-diagonal product, so
    the geometric mean over ``i < j`` equals the mean over ``i != j``.
    """
    if d < 2:
        raise InvalidDimensionError(f"G-coherence needs d >= 2, got {d}")
    moduli = np.asarray(moduli, dtype=float)
    if moduli.shape != (d * (d - 1) // 2,):
        raise ValueError(f"expected {d * (d - 1) // 2} moduli for d={d}, got shape {moduli.shape}")
    if np.any(moduli == 0.0):
        return 0.0
    return float(d * np.exp(np.mean(np.log(moduli))))


def g_coherence(rho) -> float:
    """``d`` times the geometric mean of all off-diagonal moduli.

    Accepts a :class:`DensityMatrix` or any square array; positivity is not
    required, so linearly inverted tomography output can be passed directly.
    Evaluated in the log domain; an exactly zero element gives exactly 0.
    """
    arr = _as_array(rho)
    d = arr.shape[0]
    if d < 2:
        raise InvalidDimensionError(f"G-coherence needs d >= 2, got {d}")
    return g_from_moduli(off_diagonal_moduli(arr), d)


def l1_coherence(rho) -> float:
    arr = _as_array(rho)
    return float(np.sum(np.abs(arr)) - np.sum(np.abs(np.diag(arr))))


def near_zero(rho, noise_floor: float = 0.0) -> bool:
    """True when the smallest off-diagonal modulus is below ten noise floors."""
    moduli = off_diagonal_moduli(rho)
    return bool(moduli.size and moduli.min() < 10.0 * noise_floor)


def coherence(rho: DensityMatrix, kind: MeasureKind | str = MeasureKind.G,
              noise_floor: float = 0.0) -> CoherenceValue:
    kind = MeasureKind(kind)
    value = g_coherence(rho) if kind is MeasureKind.G else l1_coherence(rho)
    return CoherenceValue(value, kind, rho.d, near_zero(rho, noise_floor))


def qubit_initial_g(theta1: float) -> float:
    """Closed form ``|sin 4 theta1|`` for the state ``sin 2t |1> + cos 2t |2>``."""
    return abs(sind(4.0 * theta1))


def qutrit_initial_g(theta2: float) -> float:
    """Closed form ``|sin 4 theta2|^(2/3)`` for the qutrit preparation state."""
    return abs(sind(4.0 * theta2)) ** (2.0 / 3.0)


def geometric_mean_bound(rho: DensityMatrix) -> float:
    """Upper bound on G from populations: ``d * prod_{i<j} sqrt(rho_ii rho_jj)^(2/(d(d-1)))``."""
    pops = np.clip(np.real(np.diag(rho.matrix)), 0.0, None)
    d = rho.d
    if np.any(pops == 0.0):
        return 0.0
    return d * math.exp(np.mean(np.log(pops)))
