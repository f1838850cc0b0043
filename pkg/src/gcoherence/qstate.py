"""Pure states and density matrices of a single qudit.

States are immutable: the underlying numpy arrays are flagged read-only
after validation, so a ``DensityMatrix`` can be shared freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-9
NORM_TOL = 1e-12
MIN_NORM = 1e-9


class InvalidStateError(ValueError):
    """Raised when amplitudes or a matrix do not describe a valid state."""


class InvalidDimensionError(ValueError):
    """Raised when a dimension is smaller than 2 or dimensions disagree."""


class InvalidMixtureError(ValueError):
    """Raised when mixture weights are negative or do not sum to one."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector ``sum_i a_i |i>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidStateError("amplitudes must be a nonempty 1-D vector")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes contain NaN or Inf")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def d(self) -> int:
        return self.amplitudes.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite ``d x d`` matrix.

    Every instance is checked on construction: Hermiticity and trace to
    1e-12, smallest eigenvalue no lower than -1e-9.
    """

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
        if rho.shape[0] < 1:
            raise InvalidStateError("density matrix is empty")
        if not np.all(np.isfinite(rho)):
            raise InvalidStateError("density matrix contains NaN or Inf")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (residual {herm:.3e})")
        trace = np.trace(rho)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {trace.real:.15g}, expected 1")
        lowest = np.linalg.eigvalsh(rho)[0]
        if lowest < -PSD_TOL:
            raise InvalidStateError(f"matrix is not positive semidefinite (eigenvalue {lowest:.3e})")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __getitem__(self, index):
        return self.matrix[index]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def pure_state_from_amplitudes(amplitudes: Sequence[complex]) -> PureState:
    """Build a pure state, rescaling the amplitudes to unit norm.

    Raises:
        InvalidStateError: if the vector is empty, non-finite, or has
            norm at most 1e-9.
    """
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.ndim != 1 or amps.size == 0:
        raise InvalidStateError("amplitudes must be a nonempty 1-D vector")
    if not np.all(np.isfinite(amps)):
        raise InvalidStateError("amplitudes contain NaN or Inf")
    norm = np.linalg.norm(amps)
    if norm <= MIN_NORM:
        raise InvalidStateError("cannot normalize a zero vector")
    return PureState(amps / norm)


def mcs(d: int) -> PureState:
    """Maximally coherent state: every amplitude equal to ``1/sqrt(d)``."""
    if d < 2:
        raise InvalidDimensionError(f"dimension must be at least 2, got {d}")
    return PureState(np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128))


def density_from_pure(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def mix(states: Iterable[tuple[float, DensityMatrix]]) -> DensityMatrix:
    """Convex combination ``sum_k w_k rho_k``.

    >>> rho = mix([(0.5, density_from_pure(mcs(2))), (0.5, density_from_pure(mcs(2)))])
    """
    states = list(states)
    if not states:
        raise InvalidMixtureError("mixture needs at least one state")
    weights = np.array([float(w) for w, _ in states])
    if np.any(weights < 0):
        raise InvalidMixtureError(f"negative weight in {weights.tolist()}")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise InvalidMixtureError(f"weights sum to {weights.sum()!r}, expected 1")
    dims = {rho.d for _, rho in states}
    if len(dims) != 1:
        raise InvalidDimensionError(f"cannot mix states of dimensions {sorted(dims)}")
    total = np.zeros_like(states[0][1].matrix)
    for w, rho in states:
        total = total + w * rho.matrix
    return DensityMatrix(total)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_density(d: int, seed: int) -> DensityMatrix:
    """Seeded Ginibre state ``A A^dag / tr(A A^dag)``; full rank almost surely."""
    if d < 2:
        raise InvalidDimensionError(f"dimension must be at least 2, got {d}")
    rng = np.random.default_rng(seed)
    a = _complex_gaussian(rng, (d, d))
    rho = a @ a.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(d: int, seed: int | np.random.Generator) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    if d < 2:
        raise InvalidDimensionError(f"dimension must be at least 2, got {d}")
    rng = np.random.default_rng(seed)
    return pure_state_from_amplitudes(_complex_gaussian(rng, d))


def basis_state(d: int, index: int) -> PureState:
    amps = np.zeros(d, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(amps)


# JSON ------------------------------------------------------------------------


def _split(values: np.ndarray) -> tuple[list, list]:
    return np.real(values).tolist(), np.imag(values).tolist()


def state_to_json(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        re, im = _split(state.amplitudes)
    else:
        re, im = _split(state.matrix)
    return {"d": state.d, "re": re, "im": im}


def state_from_json(doc: dict) -> PureState | DensityMatrix:
    """Read a state document; 1-D ``re``/``im`` give a pure state, 2-D a density matrix."""
    try:
        d = int(doc["d"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"malformed state document: {exc}") from exc
    if re.shape != im.shape:
        raise InvalidStateError(f"re shape {re.shape} differs from im shape {im.shape}")
    values = re + 1j * im
    if values.shape == (d,):
        return pure_state_from_amplitudes(values)
    if values.shape == (d, d):
        return DensityMatrix(values)
    raise InvalidStateError(f"shape {values.shape} does not match d={d}")


def as_density(state: PureState | DensityMatrix) -> DensityMatrix:
    if isinstance(state, PureState):
        return density_from_pure(state)
    return state


def load_state(path: str | Path) -> PureState | DensityMatrix:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def save_state(state: PureState | DensityMatrix, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(state), fh, indent=2)
