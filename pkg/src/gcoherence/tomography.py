"""Simulated photon-count tomography for qubits and qutrits.

Each projector is counted once; a projector shared by several measurement
groups (e.g. |lambda_3> in three qutrit groups) contributes the same count
to every group's normalization, as in ``P5 = C5 / (C5 + C4 + C3)``.

Projector ids are 1-based. Off-diagonal keys ``(i, j)`` are 1-based too and
match the ``"ij"`` keys of the result JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .measures import g_from_moduli
from .qstate import DensityMatrix, InvalidDimensionError

SQ2 = 1.0 / np.sqrt(2.0)
DEFAULT_RESAMPLES = 1000


class DegenerateDataError(ValueError):
    """Raised when a measurement group has no counts to normalize by."""


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    d: int
    vectors: Mapping[int, np.ndarray]
    groups: tuple[tuple[int, ...], ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        for pid, v in self.vectors.items():
            if v.shape != (self.d,):
                raise ValueError(f"projector {pid} has shape {v.shape}, expected ({self.d},)")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"projector {pid} is not unit norm")
        for group in self.groups:
            if len(group) != self.d:
                raise ValueError(f"group {group} does not have {self.d} members")
            basis = np.array([self.vectors[i] for i in group])
            gram = basis.conj() @ basis.T
            if np.max(np.abs(gram - np.eye(self.d))) > 1e-12:
                raise ValueError(f"group {group} is not orthonormal")
            total = sum(np.outer(v, v.conj()) for v in basis)
            if np.max(np.abs(total - np.eye(self.d))) > 1e-12:
                raise ValueError(f"group {group} is not complete")

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.vectors))

    def projector(self, pid: int) -> np.ndarray:
        v = self.vectors[pid]
        return np.outer(v, v.conj())


def qubit_projectors() -> ProjectorSet:
    """sigma_x eigenbasis {D, A} and sigma_y eigenbasis {L, R}."""
    vectors = {
        1: SQ2 * np.array([1, 1], dtype=complex),
        2: SQ2 * np.array([-1, 1], dtype=complex),
        3: SQ2 * np.array([1, 1j]),
        4: SQ2 * np.array([1, -1j]),
    }
    return ProjectorSet(2, vectors, ((1, 2), (3, 4)), {1: "D", 2: "A", 3: "L", 4: "R"})


def qutrit_projectors() -> ProjectorSet:
    """The fifteen Gell-Mann eigenvectors grouped into seven complete settings."""
    i = 1j
    raw = {
        1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1),
        4: (-1, 1, 0), 5: (1, 1, 0), 6: (i, 1, 0), 7: (-i, 1, 0),
        8: (-1, 0, 1), 9: (1, 0, 1), 10: (-i, 0, 1), 11: (i, 0, 1),
        12: (0, -1, 1), 13: (0, 1, 1), 14: (0, i, 1), 15: (0, -i, 1),
    }
    vectors = {}
    for pid, v in raw.items():
        v = np.array(v, dtype=complex)
        vectors[pid] = v if pid <= 3 else SQ2 * v
    groups = ((4, 5, 3), (6, 7, 3), (1, 2, 3), (8, 9, 2), (10, 11, 2), (12, 13, 1), (14, 15, 1))
    return ProjectorSet(3, vectors, groups, {pid: f"lambda{pid}" for pid in vectors})


def projectors_for(d: int) -> ProjectorSet:
    if d == 2:
        return qubit_projectors()
    if d == 3:
        return qutrit_projectors()
    raise InvalidDimensionError(f"tomography is implemented for d=2 and d=3 only, got d={d}")


def ideal_probabilities(rho: DensityMatrix, projectors: ProjectorSet) -> dict[int, float]:
    """``Tr(rho |v><v|)`` for every projector."""
    if rho.d != projectors.d:
        raise InvalidDimensionError(f"state d={rho.d} does not match projector set d={projectors.d}")
    probs = {}
    for pid in projectors.ids:
        v = projectors.vectors[pid]
        p = float(np.real(v.conj() @ rho.matrix @ v))
        probs[pid] = min(max(p, 0.0), 1.0)
    return probs


@dataclass(frozen=True)
class CountRecord:
    """Counts per projector id.

    Simulated and mixed records hold integers; :func:`exact_counts` stores
    unrounded expected counts for noiseless round-trip checks.
    """

    d: int
    shots_per_group: int
    counts: Mapping[int, float]
    seed: int | None = None
    background_rate: float = 0.0

    def __post_init__(self):
        if self.shots_per_group < 1:
            raise ValueError("shots_per_group must be at least 1")
        if self.background_rate < 0:
            raise ValueError("background_rate must be nonnegative")
        expected = set(projectors_for(self.d).ids)
        if set(self.counts) != expected:
            raise ValueError(f"counts must cover projector ids {sorted(expected)}, "
                             f"got {sorted(self.counts)}")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be nonnegative")

    def array(self) -> np.ndarray:
        return np.array([self.counts[pid] for pid in sorted(self.counts)], dtype=float)


def simulate_counts(rho: DensityMatrix, projectors: ProjectorSet, shots_per_group: int,
                    background_rate: float = 0.0, seed: int = 0) -> CountRecord:
    """Independent Poisson counts with mean ``shots * p_i + background_rate``."""
    if shots_per_group < 1:
        raise ValueError("shots_per_group must be at least 1")
    probs = ideal_probabilities(rho, projectors)
    rng = np.random.default_rng(seed)
    means = np.array([shots_per_group * probs[pid] + background_rate for pid in projectors.ids])
    draws = rng.poisson(means)
    counts = {pid: int(c) for pid, c in zip(projectors.ids, draws)}
    return CountRecord(projectors.d, shots_per_group, counts, seed, background_rate)


def exact_counts(rho: DensityMatrix, projectors: ProjectorSet, shots_per_group: int) -> CountRecord:
    probs = ideal_probabilities(rho, projectors)
    counts = {pid: shots_per_group * p for pid, p in probs.items()}
    return CountRecord(projectors.d, shots_per_group, counts, None, 0.0)


def mixed_counts(counts_a: CountRecord, counts_b: CountRecord, p: float) -> CountRecord:
    """Weighted average ``(1-p) a + p b`` of two count records, rounded half up."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if set(counts_a.counts) != set(counts_b.counts) or counts_a.d != counts_b.d:
        raise ValueError("count records cover different projector ids")
    if counts_a.shots_per_group != counts_b.shots_per_group:
        raise ValueError("count records use different shots_per_group")
    if p == 0.0:
        return counts_a
    if p == 1.0:
        return counts_b
    counts = {pid: int(np.floor((1.0 - p) * counts_a.counts[pid] + p * counts_b.counts[pid] + 0.5))
              for pid in counts_a.counts}
    background = (1.0 - p) * counts_a.background_rate + p * counts_b.background_rate
    return CountRecord(counts_a.d, counts_a.shots_per_group, counts, None, background)


# Reconstruction ----------------------------------------------------------------
#
# The numeric core works on arrays of shape (..., n_projectors) ordered by id,
# so a whole bootstrap batch reconstructs in one pass.


def _group_probabilities(arr: np.ndarray, projectors: ProjectorSet, strict: bool) -> list[dict]:
    """Normalize counts within each group; degenerate groups give NaN or raise."""
    col = {pid: k for k, pid in enumerate(projectors.ids)}
    out = []
    for group in projectors.groups:
        total = sum(arr[..., col[pid]] for pid in group)
        if strict and np.any(total <= 0):
            raise DegenerateDataError(f"measurement group {group} has zero total counts")
        with np.errstate(invalid="ignore", divide="ignore"):
            out.append({pid: np.where(total > 0, arr[..., col[pid]] / np.where(total > 0, total, 1), np.nan)
                        for pid in group})
    return out


def group_probabilities(counts: CountRecord) -> list[dict[int, float]]:
    """Per-group normalized probabilities after dark-count subtraction."""
    projectors = projectors_for(counts.d)
    arr = np.clip(counts.array() - counts.background_rate, 0.0, None)
    return [{pid: float(v) for pid, v in g.items()}
            for g in _group_probabilities(arr, projectors, strict=True)]


def _qubit_core(arr: np.ndarray, strict: bool):
    dx, ry = _group_probabilities(arr, qubit_projectors(), strict)
    sx = dx[1] - dx[2]
    sy = ry[3] - ry[4]
    rho12 = (sx - 1j * sy) / 2.0
    return rho12[..., None], None


def _qutrit_core(arr: np.ndarray, strict: bool):
    g453, g673, g123, g892, g1011, g12131, g14151 = _group_probabilities(arr, qutrit_projectors(), strict)
    lam1 = g453[5] - g453[4]
    lam2 = g673[7] - g673[6]
    lam3 = g123[1] - g123[2]
    lam4 = g892[9] - g892[8]
    # lambda_10 = (-i, 0, 1)/sqrt2 is the +1 eigenvector of the standard Lambda_5
    lam5 = g1011[10] - g1011[11]
    lam6 = g12131[13] - g12131[12]
    lam7 = g14151[15] - g14151[14]
    lam8 = (g123[1] + g123[2] - 2.0 * g123[3]) / np.sqrt(3.0)
    rho12 = (lam1 - 1j * lam2) / 2.0
    rho13 = (lam4 - 1j * lam5) / 2.0
    rho23 = (lam6 - 1j * lam7) / 2.0
    rho33 = (1.0 - np.sqrt(3.0) * lam8) / 3.0
    rho11 = (1.0 - rho33 + lam3) / 2.0
    rho22 = (1.0 - rho33 - lam3) / 2.0
    offdiag = np.stack([rho12, rho13, rho23], axis=-1)
    diag = np.stack([rho11, rho22, rho33], axis=-1)
    return offdiag, diag


_CORES = {2: _qubit_core, 3: _qutrit_core}


def _g_batch(offdiag: np.ndarray, d: int) -> np.ndarray:
    moduli = np.abs(offdiag)
    with np.errstate(divide="ignore"):
        g = d * np.exp(np.mean(np.log(moduli), axis=-1))
    return np.where(np.any(moduli == 0.0, axis=-1), 0.0, g)


def _pairs(d: int) -> list[tuple[int, int]]:
    return [(i + 1, j + 1) for i in range(d) for j in range(i + 1, d)]


@dataclass
class TomographyResult:
    d: int
    off_diagonals: dict[tuple[int, int], complex]
    diagonals: dict[int, float] | None
    g_value: float
    g_sigma3: float | None = None
    warnings: list[str] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        """Full reconstructed matrix; only available when diagonals were measured."""
        if self.diagonals is None:
            raise ValueError("diagonal elements were not reconstructed for this record")
        m = np.zeros((self.d, self.d), dtype=complex)
        for i, v in self.diagonals.items():
            m[i - 1, i - 1] = v
        for (i, j), v in self.off_diagonals.items():
            m[i - 1, j - 1] = v
            m[j - 1, i - 1] = np.conj(v)
        return m

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "off_diagonals": {f"{i}{j}": {"re": v.real, "im": v.imag}
                              for (i, j), v in self.off_diagonals.items()},
            "diagonals": None if self.diagonals is None
            else {str(i): v for i, v in self.diagonals.items()},
            "g_value": self.g_value,
            "g_sigma3": self.g_sigma3,
            "warnings": list(self.warnings),
        }


def project_psd(matrix: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and renormalize to unit trace."""
    herm = 0.5 * (matrix + matrix.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, 0.0, None)
    out = (vecs * vals) @ vecs.conj().T
    return out / np.trace(out).real


def _reconstruct(counts: CountRecord, project: bool = False) -> TomographyResult:
    d = counts.d
    arr = np.clip(counts.array() - counts.background_rate, 0.0, None)
    offdiag, diag = _CORES[d](arr, strict=True)
    pairs = _pairs(d)
    off = {pair: complex(v) for pair, v in zip(pairs, offdiag)}
    diagonals = None if diag is None else {i + 1: float(v) for i, v in enumerate(diag)}
    result = TomographyResult(d, off, diagonals, 0.0)
    if project:
        m = project_psd(result.matrix())
        result.off_diagonals = {(i, j): complex(m[i - 1, j - 1]) for i, j in pairs}
        result.diagonals = {i + 1: float(m[i, i].real) for i in range(d)}
        result.warnings.append("projected onto the PSD cone")
    moduli = np.array([abs(v) for v in result.off_diagonals.values()])
    result.g_value = g_from_moduli(moduli, d)
    floor = 1.0 / np.sqrt(counts.shots_per_group)
    if moduli.min() < 10.0 * floor:
        result.warnings.append(
            f"near-zero off-diagonal: min |rho_ij| = {moduli.min():.4g} is below "
            f"10x the shot-noise floor {floor:.4g}; G is unreliable")
    return result


def reconstruct_qubit(counts: CountRecord) -> TomographyResult:
    """Linear inversion from the D/A and L/R bases.

    ``<sx> = (C_D - C_A)/(C_D + C_A)``, ``<sy> = (C_L - C_R)/(C_L + C_R)``,
    ``rho_12 = (<sx> - i <sy>)/2`` and ``G = sqrt(<sx>^2 + <sy>^2)``.
    Diagonal elements are not measured by these two bases.
    """
    if counts.d != 2:
        raise InvalidDimensionError(f"expected a qubit count record, got d={counts.d}")
    return _reconstruct(counts)


def reconstruct_qutrit(counts: CountRecord, project: bool = False) -> TomographyResult:
    """Linear inversion from the fifteen Gell-Mann eigenprojector counts.

    Off-diagonals use ``rho_12 = (<L1> - i <L2>)/2`` and the analogous
    (4, 5) and (6, 7) pairs. Diagonals come from ``<L3>``, ``<L8>`` and unit
    trace. The raw estimate can be slightly non-positive; pass
    ``project=True`` to clip it onto the PSD cone before computing G.
    """
    if counts.d != 3:
        raise InvalidDimensionError(f"expected a qutrit count record, got d={counts.d}")
    return _reconstruct(counts, project)


def reconstruct(counts: CountRecord, project: bool = False) -> TomographyResult:
    if counts.d == 2:
        if project:
            raise ValueError("PSD projection needs diagonals, which qubit tomography does not measure")
        return reconstruct_qubit(counts)
    return reconstruct_qutrit(counts, project)


def g_batch_from_counts(arr: np.ndarray, d: int, background_rate: float = 0.0) -> np.ndarray:
    """G for a batch of count vectors; degenerate rows come back as NaN."""
    arr = np.clip(np.asarray(arr, dtype=float) - background_rate, 0.0, None)
    offdiag, _ = _CORES[d](arr, strict=False)
    return _g_batch(offdiag, d)


def bootstrap_samples(counts: CountRecord, resamples: int = DEFAULT_RESAMPLES,
                      seed: int = 0) -> np.ndarray:
    """G values from Poisson redraws of every observed count."""
    if resamples < 100:
        raise ValueError("resamples must be at least 100")
    rng = np.random.default_rng(seed)
    base = counts.array()
    draws = rng.poisson(base, size=(resamples, base.size)).astype(float)
    g = g_batch_from_counts(draws, counts.d, counts.background_rate)
    return g[np.isfinite(g)]


def bootstrap_sigma(counts: CountRecord, projectors: ProjectorSet | None = None,
                    resamples: int = DEFAULT_RESAMPLES, seed: int = 0) -> float:
    """Parametric-bootstrap 3-sigma half-width of the reconstructed G.

    Resamples whose redraw leaves a group empty are dropped.
    """
    if projectors is not None and projectors.d != counts.d:
        raise InvalidDimensionError("projector set does not match count record")
    g = bootstrap_samples(counts, resamples, seed)
    if g.size < 2:
        raise DegenerateDataError("fewer than two usable bootstrap resamples")
    return float(3.0 * np.std(g, ddof=1))


def tomograph(counts: CountRecord, resamples: int = DEFAULT_RESAMPLES, seed: int = 0,
              project: bool = False) -> TomographyResult:
    """Reconstruct and attach a bootstrap 3-sigma error bar."""
    result = reconstruct(counts, project)
    result.g_sigma3 = bootstrap_sigma(counts, resamples=resamples, seed=seed)
    return result


# JSON ------------------------------------------------------------------------


def counts_to_json(counts: CountRecord) -> dict:
    values = {}
    for pid, c in sorted(counts.counts.items()):
        values[str(pid)] = int(c) if float(c).is_integer() else float(c)
    return {
        "d": counts.d,
        "shots_per_group": counts.shots_per_group,
        "background_rate": counts.background_rate,
        "seed": counts.seed,
        "counts": values,
    }


def counts_from_json(doc: dict) -> CountRecord:
    try:
        return CountRecord(
            d=int(doc["d"]),
            shots_per_group=int(doc["shots_per_group"]),
            counts={int(k): v for k, v in doc["counts"].items()},
            seed=doc.get("seed"),
            background_rate=float(doc.get("background_rate", 0.0)),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed counts document: {exc}") from exc


def load_counts(path: str | Path) -> CountRecord:
    with open(path) as fh:
        return counts_from_json(json.load(fh))


def save_counts(counts: CountRecord, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(counts_to_json(counts), fh, indent=2)
