"""Kraus-operator channels on a single qudit.

Permutations use one convention throughout: ``perm[i]`` is the row that
row ``i`` of every Kraus operator is moved to, so the permutation matrix
has ``P[perm[i], i] = 1``. The cyclic qutrit example ``P = [[0,1,0],
[0,0,1],[1,0,0]]`` is ``perm = (2, 0, 1)``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._trig import cosd, sind
from .qstate import DensityMatrix, InvalidDimensionError

COMPLETENESS_TOL = 1e-9
DIAGONAL_TOL = 1e-12


class InvalidChannelError(ValueError):
    """Raised when Kraus operators are malformed or not trace preserving."""


class ChannelKind(enum.Enum):
    GIO = "GIO"
    PERMUTED_GIO = "PERMUTED_GIO"
    OTHER = "OTHER"


@dataclass(frozen=True)
class ChannelClass:
    kind: ChannelKind
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.permutation is not None) != (self.kind is ChannelKind.PERMUTED_GIO):
            raise ValueError("permutation is present iff kind is PERMUTED_GIO")


def completeness_residual(operators: Sequence[np.ndarray]) -> float:
    d = operators[0].shape[0]
    total = sum(k.conj().T @ k for k in operators)
    return float(np.max(np.abs(total - np.eye(d))))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple[np.ndarray, ...]
    label: str = ""
    residual: float = field(init=False, default=0.0)

    def __post_init__(self):
        ops = []
        for k in self.operators:
            k = np.array(k, dtype=np.complex128, copy=True)
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise InvalidChannelError(f"Kraus operators must be square, got {shape}")
        if any(k.shape != shape for k in ops):
            raise InvalidChannelError("Kraus operators have unequal shapes")
        if not all(np.all(np.isfinite(k)) for k in ops):
            raise InvalidChannelError("Kraus operator contains NaN or Inf")
        residual = completeness_residual(ops)
        if residual > COMPLETENESS_TOL:
            raise InvalidChannelError(
                f"completeness violated: max|sum K^dag K - I| = {residual:.3e}")
        object.__setattr__(self, "operators", tuple(ops))
        object.__setattr__(self, "residual", residual)

    @property
    def d(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)


def make_channel(operators: Sequence, label: str = "") -> KrausChannel:
    return KrausChannel(tuple(np.asarray(k, dtype=np.complex128) for k in operators), label)


def identity_channel(d: int) -> KrausChannel:
    return make_channel([np.eye(d)], label=f"identity(d={d})")


def _is_diagonal(k: np.ndarray) -> bool:
    off = k - np.diag(np.diag(k))
    return bool(np.max(np.abs(off), initial=0.0) <= DIAGONAL_TOL)


def classify(channel: KrausChannel) -> ChannelClass:
    """Sort a channel into GIO, a common-permutation GIO, or OTHER.

    A channel is a permuted GIO when every ``K_n = P D_n`` for one shared
    permutation ``P`` and diagonal ``D_n``. Completeness makes every column
    nonzero in at least one operator, so the union support of column ``i``
    across all operators pins ``perm[i]`` uniquely; no search is needed.
    """
    ops = channel.operators
    if all(_is_diagonal(k) for k in ops):
        return ChannelClass(ChannelKind.GIO)
    support = np.zeros((channel.d, channel.d), dtype=bool)
    for k in ops:
        support |= np.abs(k) > DIAGONAL_TOL
    perm = []
    for col in range(channel.d):
        rows = np.flatnonzero(support[:, col])
        if rows.size != 1:
            return ChannelClass(ChannelKind.OTHER)
        perm.append(int(rows[0]))
    if sorted(perm) != list(range(channel.d)):
        return ChannelClass(ChannelKind.OTHER)
    return ChannelClass(ChannelKind.PERMUTED_GIO, tuple(perm))


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    d = len(perm)
    if sorted(perm) != list(range(d)):
        raise ValueError(f"{list(perm)} is not a permutation of 0..{d - 1}")
    p = np.zeros((d, d))
    p[list(perm), list(range(d))] = 1.0
    return p


def permute_channel(channel: KrausChannel, perm: Sequence[int]) -> KrausChannel:
    """Left-multiply every Kraus operator by the same permutation matrix."""
    if len(perm) != channel.d:
        raise ValueError(f"permutation has length {len(perm)}, channel has d={channel.d}")
    p = permutation_matrix(perm)
    label = f"{channel.label}|perm{tuple(perm)}" if channel.label else f"perm{tuple(perm)}"
    return make_channel([p @ k for k in channel.operators], label)


def qubit_paper_channel(theta2: float) -> KrausChannel:
    """Two-operator qubit GIO set by the wave-plate angle ``theta2`` (degrees).

    ``K1 = diag(sin 2t, cos 2t)``, ``K2 = diag(cos 2t, i sin 2t)``.
    """
    s, c = sind(2.0 * theta2), cosd(2.0 * theta2)
    return make_channel([np.diag([s, c]), np.diag([c, 1j * s])],
                        label=f"qubit-paper(theta2={theta2:g})")


def qutrit_phase_damping(theta3: float) -> KrausChannel:
    """Dephase paths 1 and 2 against path 3; ``theta3`` in degrees."""
    s, c = sind(2.0 * theta3), cosd(2.0 * theta3)
    return make_channel([np.diag([c, c, 1.0]), np.diag([s, s, 0.0])],
                        label=f"qutrit-pd(theta3={theta3:g})")


def amplitude_decay(epsilon: float) -> KrausChannel:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    k1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - epsilon)]])
    k2 = np.array([[0.0, np.sqrt(epsilon)], [0.0, 0.0]])
    return make_channel([k1, k2], label=f"amp-decay(eps={epsilon:g})")


def random_gio(d: int, num_kraus: int, seed: int) -> KrausChannel:
    """Seeded random GIO with ``num_kraus`` diagonal operators.

    For each basis index the vector ``(K_1,i, ..., K_m,i)`` is a normalized
    complex Gaussian draw, which makes the channel complete column by column.
    """
    if d < 2:
        raise InvalidDimensionError(f"dimension must be at least 2, got {d}")
    if num_kraus < 1:
        raise ValueError("num_kraus must be at least 1")
    rng = np.random.default_rng(seed)
    cols = rng.standard_normal((num_kraus, d)) + 1j * rng.standard_normal((num_kraus, d))
    cols /= np.linalg.norm(cols, axis=0, keepdims=True)
    return make_channel([np.diag(row) for row in cols], label=f"random-gio(d={d},m={num_kraus},seed={seed})")


def kraus_sum(channel: KrausChannel, x: np.ndarray) -> np.ndarray:
    """``sum_n K_n X K_n^dag`` on an arbitrary square array."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (channel.d, channel.d):
        raise InvalidDimensionError(f"operand shape {x.shape} does not match channel d={channel.d}")
    return sum(k @ x @ k.conj().T for k in channel.operators)


def apply(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if rho.d != channel.d:
        raise InvalidDimensionError(f"state d={rho.d} does not match channel d={channel.d}")
    out = kraus_sum(channel, rho.matrix)
    return DensityMatrix(0.5 * (out + out.conj().T))


def transfer_matrix(channel: KrausChannel) -> np.ndarray:
    """The channel applied to the all-ones matrix.

    For a GIO its entries are ``sum_n K_n,i conj(K_n,j)``; for any other
    channel this is still the image of the all-ones matrix, but it only acts
    as an element-wise multiplier in the GIO case.
    """
    m = kraus_sum(channel, np.ones((channel.d, channel.d)))
    m.setflags(write=False)
    return m


def apply_hadamard(transfer: np.ndarray, rho: DensityMatrix) -> DensityMatrix:
    """Element-wise product ``rho * M``; valid as a channel action only for GIO."""
    transfer = np.asarray(transfer)
    if transfer.shape != (rho.d, rho.d):
        raise InvalidDimensionError(f"transfer shape {transfer.shape} does not match state d={rho.d}")
    return DensityMatrix(rho.matrix * transfer)


# JSON ------------------------------------------------------------------------


def channel_to_json(channel: KrausChannel) -> dict:
    return {
        "d": channel.d,
        "label": channel.label,
        "kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in channel.operators],
    }


def channel_from_json(doc: dict) -> KrausChannel:
    try:
        d = int(doc["d"])
        ops = [np.asarray(k["re"], dtype=float) + 1j * np.asarray(k["im"], dtype=float)
               for k in doc["kraus"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidChannelError(f"malformed channel document: {exc}") from exc
    for k in ops:
        if k.shape != (d, d):
            raise InvalidChannelError(f"Kraus operator shape {k.shape} does not match d={d}")
    return make_channel(ops, doc.get("label", ""))


def load_channel(path: str | Path) -> KrausChannel:
    with open(path) as fh:
        return channel_from_json(json.load(fh))


def save_channel(channel: KrausChannel, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(channel_to_json(channel), fh, indent=2)
