"""Figure-reproduction sweeps as data tables.

Three sweeps are provided:

* ``QUBIT_FIG3``: qubit initial state ``sin 2t1 |1> + cos 2t1 |2>`` through
  the two-operator qubit GIO at ``theta2``;
* ``QUTRIT_FIG4``: qutrit state ``sqrt(1/3)|1> + sqrt(2/3)(cos 2t2 |2> +
  sin 2t2 |3>)`` through phase damping at ``theta3``;
* ``MIXED_FIG5``: the mixture ``(1-p) mcs + p psi'`` (``psi'`` at
  ``theta2 = 7.5``) through the same phase damping.

Every row compares G of the output (``g_direct``), the factorized product
``G(rho) * G(Phi(mcs))`` (``g_product``) and the closed form (``g_theory``).
In ``SHOT_NOISE`` mode both measured columns come from simulated tomography
with bootstrap 3-sigma error bars.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._trig import cosd, sind
from .channels import KrausChannel, apply, qubit_paper_channel, qutrit_phase_damping
from .measures import g_coherence, g_from_moduli, qubit_initial_g, qutrit_initial_g
from .qstate import DensityMatrix, PureState, density_from_pure, mix
from .tomography import (
    CountRecord,
    TomographyResult,
    bootstrap_sigma,
    mixed_counts,
    projectors_for,
    reconstruct,
    simulate_counts,
)

COLUMNS = ("g_direct", "g_product", "g_theory", "sigma3_direct", "sigma3_product", "warning")
NEAR_ZERO = "near-zero off-diagonal"
# measurement tags keyed into the simulated-count cache and seed derivation
FINAL, INITIAL = 1, 2


class Experiment(enum.Enum):
    QUBIT_FIG3 = "QUBIT_FIG3"
    QUTRIT_FIG4 = "QUTRIT_FIG4"
    MIXED_FIG5 = "MIXED_FIG5"


class Mode(enum.Enum):
    EXACT = "EXACT"
    SHOT_NOISE = "SHOT_NOISE"


def _grid(start: float, stop: float, step: float) -> list[float]:
    n = int(round((stop - start) / step))
    return [start + k * step for k in range(n + 1)]


@dataclass
class SweepConfig:
    experiment: Experiment
    theta1: list[float] | None = None
    theta2: list[float] | None = None
    theta3: list[float] | None = None
    p: list[float] | None = None
    shots_per_group: int = 100_000
    seed: int = 0
    mode: Mode = Mode.EXACT
    resamples: int = 1000
    background_rate: float = 0.0
    mixed_theta2: float = 7.5

    def __post_init__(self):
        self.experiment = Experiment(self.experiment)
        self.mode = Mode(self.mode)
        if self.experiment is Experiment.QUBIT_FIG3:
            self.theta1 = self.theta1 if self.theta1 is not None else _grid(0.0, 45.0, 1.0)
            self.theta2 = self.theta2 if self.theta2 is not None else _grid(0.0, 45.0, 1.0)
            grids = (self.theta1, self.theta2)
        elif self.experiment is Experiment.QUTRIT_FIG4:
            self.theta2 = self.theta2 if self.theta2 is not None else [22.5, 7.5]
            self.theta3 = self.theta3 if self.theta3 is not None else _grid(0.0, 45.0, 7.5)
            grids = (self.theta2, self.theta3)
        else:
            self.theta3 = self.theta3 if self.theta3 is not None else _grid(0.0, 37.5, 7.5)
            self.p = self.p if self.p is not None else _grid(0.0, 1.0, 0.05)
            grids = (self.theta3, self.p)
        if any(len(g) == 0 for g in grids):
            raise ValueError("sweep grids must be nonempty")
        if self.mode is Mode.SHOT_NOISE and self.shots_per_group < 1:
            raise ValueError("shots_per_group must be at least 1 in SHOT_NOISE mode")
        if self.p is not None and any(not 0.0 <= x <= 1.0 for x in self.p):
            raise ValueError("mixing weights must lie in [0, 1]")

    @classmethod
    def from_json(cls, doc: dict) -> "SweepConfig":
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class SweepRow:
    parameters: dict[str, float]
    g_direct: float
    g_product: float
    g_theory: float | None
    sigma3_direct: float | None = None
    sigma3_product: float | None = None
    warning: str | None = None
    moduli: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = dict(self.parameters)
        out.update({name: getattr(self, name) for name in COLUMNS})
        return out


def qubit_initial_state(theta1: float) -> DensityMatrix:
    return density_from_pure(PureState(np.array([sind(2 * theta1), cosd(2 * theta1)], dtype=complex)))


def qutrit_initial_state(theta2: float) -> DensityMatrix:
    a = math.sqrt(2.0 / 3.0)
    amps = np.array([math.sqrt(1.0 / 3.0), a * cosd(2 * theta2), a * sind(2 * theta2)], dtype=complex)
    return density_from_pure(PureState(amps / np.linalg.norm(amps)))


def _derive_seed(seed: int, *keys: float) -> int:
    """Stable per-measurement seed from the base seed and the setting's angles."""
    entropy = [seed] + [int(round(k * 1_000_000)) & 0xFFFFFFFF for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


class _Lab:
    """Caches one simulated measurement per prepared setting."""

    def __init__(self, config: SweepConfig, d: int):
        self.config = config
        self.projectors = projectors_for(d)
        self._counts: dict[tuple, CountRecord] = {}

    def counts(self, key: tuple, prepare: Callable[[], DensityMatrix]) -> CountRecord:
        if key not in self._counts:
            c = self.config
            self._counts[key] = simulate_counts(prepare(), self.projectors, c.shots_per_group,
                                                c.background_rate, _derive_seed(c.seed, *key))
        return self._counts[key]

    def measure(self, counts: CountRecord, *keys: float) -> tuple[TomographyResult, float]:
        c = self.config
        result = reconstruct(counts)
        sigma = bootstrap_sigma(counts, resamples=c.resamples, seed=_derive_seed(c.seed + 1, *keys))
        return result, sigma


def _product_sigma(a: float, sa: float, b: float, sb: float) -> float:
    return math.hypot(b * sa, a * sb)


def _exact_warning(rho: DensityMatrix, shots: int) -> str | None:
    moduli = np.abs(rho.matrix[np.triu_indices(rho.d, 1)])
    if moduli.min() < 10.0 / math.sqrt(shots):
        return f"{NEAR_ZERO}: min |rho_ij| = {moduli.min():.4g}"
    return None


def _shot_warning(result: TomographyResult) -> str | None:
    return "; ".join(result.warnings) or None


def run_qubit_fig3(config: SweepConfig) -> list[SweepRow]:
    """Qubit sweep over ``theta1`` x ``theta2``.

    The product column multiplies G of the initial state by G of the qubit
    maximally coherent state (``theta1 = 22.5``) sent through the same channel.
    """
    rows = []
    mcs_state = qubit_initial_state(22.5)
    lab = _Lab(config, 2) if config.mode is Mode.SHOT_NOISE else None
    for t2 in config.theta2:
        channel = qubit_paper_channel(t2)
        for t1 in config.theta1:
            params = {"theta1": t1, "theta2": t2}
            theory = abs(sind(4 * t1) * sind(4 * t2)) / math.sqrt(2.0)
            rho = qubit_initial_state(t1)
            if lab is None:
                out = apply(channel, rho)
                g_direct = g_coherence(out)
                g_product = g_coherence(rho) * g_coherence(apply(channel, mcs_state))
                rows.append(SweepRow(params, g_direct, g_product, theory,
                                     warning=_exact_warning(out, config.shots_per_group),
                                     moduli=np.abs(out.matrix)))
                continue
            final = lab.counts((FINAL, t1, t2), lambda: apply(channel, rho))
            initial = lab.counts((INITIAL, t1), lambda: rho)
            through = lab.counts((FINAL, 22.5, t2), lambda: apply(channel, mcs_state))
            r_final, s_final = lab.measure(final, 1, t1, t2)
            r_init, s_init = lab.measure(initial, 2, t1)
            r_mcs, s_mcs = lab.measure(through, 1, 22.5, t2)
            rows.append(SweepRow(
                params, r_final.g_value, r_init.g_value * r_mcs.g_value, theory,
                s_final, _product_sigma(r_init.g_value, s_init, r_mcs.g_value, s_mcs),
                _shot_warning(r_final)))
    return rows


def run_qubit_initial(config: SweepConfig) -> list[SweepRow]:
    """G of the qubit initial states alone against ``|sin 4 theta1|``.

    No channel acts, so the product column is G(rho) times G(mcs) = 1.
    """
    rows = []
    lab = _Lab(config, 2) if config.mode is Mode.SHOT_NOISE else None
    for t1 in config.theta1:
        rho = qubit_initial_state(t1)
        theory = qubit_initial_g(t1)
        if lab is None:
            g = g_coherence(rho)
            rows.append(SweepRow({"theta1": t1}, g, g, theory,
                                 warning=_exact_warning(rho, config.shots_per_group)))
            continue
        result, sigma = lab.measure(lab.counts((INITIAL, t1), lambda: rho), 2, t1)
        rows.append(SweepRow({"theta1": t1}, result.g_value, result.g_value, theory,
                             sigma, sigma, _shot_warning(result)))
    return rows


def run_qutrit_fig4(config: SweepConfig) -> list[SweepRow]:
    """Qutrit phase-damping decay over ``theta2`` x ``theta3``.

    Each row also carries the ``|rho_ij|`` table of the output state in
    ``moduli``. In ``SHOT_NOISE`` mode the initial-state factor of the
    product is the measurement at ``theta3 = 0`` and the channel factor is
    the measurement of the maximally coherent input (``theta2 = 22.5``).
    """
    rows = []
    mcs_state = qutrit_initial_state(22.5)
    lab = _Lab(config, 3) if config.mode is Mode.SHOT_NOISE else None

    def final_counts(t2, t3):
        return lab.counts((FINAL, t2, t3),
                          lambda: apply(qutrit_phase_damping(t3), qutrit_initial_state(t2)))

    for t2 in config.theta2:
        rho = qutrit_initial_state(t2)
        for t3 in config.theta3:
            params = {"theta2": t2, "theta3": t3}
            theory = abs(sind(4 * t2) * cosd(2 * t3)) ** (2.0 / 3.0)
            channel = qutrit_phase_damping(t3)
            if lab is None:
                out = apply(channel, rho)
                g_direct = g_coherence(out)
                g_product = g_coherence(rho) * g_coherence(apply(channel, mcs_state))
                rows.append(SweepRow(params, g_direct, g_product, theory,
                                     warning=_exact_warning(out, config.shots_per_group),
                                     moduli=np.abs(out.matrix)))
                continue
            r_final, s_final = lab.measure(final_counts(t2, t3), 1, t2, t3)
            r_init, s_init = lab.measure(final_counts(t2, 0.0), 1, t2, 0.0)
            r_mcs, s_mcs = lab.measure(final_counts(22.5, t3), 1, 22.5, t3)
            rows.append(SweepRow(
                params, r_final.g_value, r_init.g_value * r_mcs.g_value, theory,
                s_final, _product_sigma(r_init.g_value, s_init, r_mcs.g_value, s_mcs),
                _shot_warning(r_final), moduli=np.abs(r_final.matrix())))
    return rows


def _mixed_theory(p: float, theta2: float, theta3: float) -> float:
    """G(rho_mix) |cos 2 theta3|^(2/3) from the amplitudes directly."""
    a = math.sqrt(2.0 / 3.0)
    amps = [math.sqrt(1.0 / 3.0), a * cosd(2 * theta2), a * sind(2 * theta2)]
    moduli = [abs((1.0 - p) / 3.0 + p * amps[i] * amps[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    return g_from_moduli(moduli, 3) * abs(cosd(2 * theta3)) ** (2.0 / 3.0)


def run_mixed_fig5(config: SweepConfig) -> list[SweepRow]:
    """Mixed-input sweep over ``theta3`` x ``p``.

    ``SHOT_NOISE`` mode never simulates the mixed state itself: it combines
    the count records of the two pure inputs with :func:`mixed_counts`, and
    the initial-state factor comes from the ``theta3 = 0`` records.
    """
    rows = []
    t2b = config.mixed_theta2
    pure_a = qutrit_initial_state(22.5)
    pure_b = qutrit_initial_state(t2b)
    lab = _Lab(config, 3) if config.mode is Mode.SHOT_NOISE else None

    def counts(t2, t3):
        return lab.counts((FINAL, t2, t3),
                          lambda: apply(qutrit_phase_damping(t3), qutrit_initial_state(t2)))

    for t3 in config.theta3:
        channel = qutrit_phase_damping(t3)
        g_mcs_exact = g_coherence(apply(channel, pure_a))
        for p in config.p:
            params = {"theta3": t3, "p": p}
            theory = _mixed_theory(p, t2b, t3)
            if lab is None:
                rho = mix([(1.0 - p, pure_a), (p, pure_b)])
                out = apply(channel, rho)
                rows.append(SweepRow(params, g_coherence(out), g_coherence(rho) * g_mcs_exact, theory,
                                     warning=_exact_warning(out, config.shots_per_group),
                                     moduli=np.abs(out.matrix)))
                continue
            direct = mixed_counts(counts(22.5, t3), counts(t2b, t3), p)
            initial = mixed_counts(counts(22.5, 0.0), counts(t2b, 0.0), p)
            r_dir, s_dir = lab.measure(direct, 3, t3, p)
            r_init, s_init = lab.measure(initial, 4, p)
            r_mcs, s_mcs = lab.measure(counts(22.5, t3), 1, 22.5, t3)
            rows.append(SweepRow(
                params, r_dir.g_value, r_init.g_value * r_mcs.g_value, theory,
                s_dir, _product_sigma(r_init.g_value, s_init, r_mcs.g_value, s_mcs),
                _shot_warning(r_dir), moduli=np.abs(r_dir.matrix())))
    return rows


def run_custom(channel: KrausChannel, rho: DensityMatrix,
               parameters: dict[str, float] | None = None) -> SweepRow:
    """Exact-mode row for any channel and state, e.g. a d=4 spot check.

    There is no closed form here, so ``g_theory`` is left empty.
    """
    out = apply(channel, rho)
    mcs_state = density_from_pure(PureState(np.full(rho.d, 1 / math.sqrt(rho.d), dtype=complex)))
    g_product = g_coherence(rho) * g_coherence(apply(channel, mcs_state))
    return SweepRow(dict(parameters or {}), g_coherence(out), g_product, None,
                    moduli=np.abs(out.matrix))


RUNNERS = {
    Experiment.QUBIT_FIG3: run_qubit_fig3,
    Experiment.QUTRIT_FIG4: run_qutrit_fig4,
    Experiment.MIXED_FIG5: run_mixed_fig5,
}


def run(config: SweepConfig) -> list[SweepRow]:
    return RUNNERS[config.experiment](config)


def max_residual(rows: Sequence[SweepRow]) -> float:
    return max((abs(r.g_direct - r.g_product) for r in rows), default=0.0)


# Output ----------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _parameter_names(rows: Sequence[SweepRow]) -> list[str]:
    names: list[str] = []
    for row in rows:
        for name in row.parameters:
            if name not in names:
                names.append(name)
    return names


def write_sweep(rows: Sequence[SweepRow], path: str | Path, fmt: str = "csv") -> None:
    """Write rows as CSV (12 significant digits) or as a JSON array."""
    fmt = fmt.lower()
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    names = _parameter_names(rows)
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "json":
                json.dump([row.as_dict() for row in rows], fh, indent=2)
                return
            writer = csv.writer(fh)
            writer.writerow(names + list(COLUMNS))
            for row in rows:
                writer.writerow([_fmt(row.parameters.get(n)) for n in names]
                                + [_fmt(getattr(row, c)) for c in COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write sweep to {path}: {exc}") from exc


def write_moduli(rows: Sequence[SweepRow], path: str | Path) -> None:
    """Write the ``|rho_ij|`` tables carried by the rows, one row per sweep point."""
    rows = [r for r in rows if r.moduli is not None]
    names = _parameter_names(rows)
    d = rows[0].moduli.shape[0] if rows else 0
    cells = [f"abs_rho_{i + 1}{j + 1}" for i in range(d) for j in range(d)]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(names + cells)
            for row in rows:
                writer.writerow([_fmt(row.parameters.get(n)) for n in names]
                                + [_fmt(float(v)) for v in row.moduli.ravel()])
    except OSError as exc:
        raise OSError(f"cannot write moduli table to {path}: {exc}") from exc
