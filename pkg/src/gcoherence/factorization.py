"""Checks of the coherence factorization law against direct Kraus sums.

Two identities are compared for a channel ``Phi`` and state ``rho``:

* element-wise: ``Phi(rho) == rho * Phi(J)`` with ``J`` the all-ones matrix;
* G-law: ``G(Phi(rho)) == G(rho) * G(Phi(mcs))``.

The left-hand sides always come from the brute-force Kraus sum, so the
checks stay meaningful for channels that are not GIO.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import KrausChannel, apply, kraus_sum, random_gio, transfer_matrix
from .measures import g_coherence, off_diagonal_moduli
from .qstate import (
    DensityMatrix,
    InvalidDimensionError,
    density_from_pure,
    mcs,
    mix,
    random_pure_state,
)

DEFAULT_TOL = 1e-10
# below this modulus an off-diagonal is treated as "small" for the G-law
SMALL_OFFDIAG = 1e-8


@dataclass(frozen=True)
class LawReport:
    element_law_max_residual: float
    g_law_residual: float
    g_lhs: float
    g_rhs_product: float
    holds_elementwise: bool
    holds_g: bool
    tolerance: float
    zero_branch: bool = False
    min_offdiag: float = 0.0


def _report(channel: KrausChannel, rho: DensityMatrix, tolerance: float) -> LawReport:
    if rho.d != channel.d:
        raise InvalidDimensionError(f"state d={rho.d} does not match channel d={channel.d}")
    out = apply(channel, rho).matrix
    hadamard = rho.matrix * transfer_matrix(channel)
    element_residual = float(np.max(np.abs(out - hadamard)))

    out_mcs = kraus_sum(channel, density_from_pure(mcs(channel.d)).matrix)
    lhs = g_coherence(out)
    g_rho = g_coherence(rho)
    g_mcs = g_coherence(out_mcs)
    rhs = g_rho * g_mcs
    g_residual = abs(lhs - rhs)

    moduli = np.concatenate([off_diagonal_moduli(m) for m in (out, rho.matrix, out_mcs)])
    zero_branch = bool(np.any(moduli == 0.0))
    holds_g = (lhs == 0.0 and rhs == 0.0) if zero_branch else g_residual <= tolerance
    return LawReport(
        element_law_max_residual=element_residual,
        g_law_residual=g_residual,
        g_lhs=lhs,
        g_rhs_product=rhs,
        holds_elementwise=element_residual <= tolerance,
        holds_g=bool(holds_g),
        tolerance=tolerance,
        zero_branch=zero_branch,
        min_offdiag=float(moduli.min()),
    )


def check_elementwise(channel: KrausChannel, rho: DensityMatrix,
                      tolerance: float = DEFAULT_TOL) -> LawReport:
    """Compare the Kraus sum with the Hadamard product on all ``d^2`` entries.

    The returned report carries the G-law fields too.
    """
    return _report(channel, rho, tolerance)


def check_g_law(channel: KrausChannel, rho: DensityMatrix,
                tolerance: float = DEFAULT_TOL) -> LawReport:
    """Evaluate ``|G(Phi(rho)) - G(rho) G(Phi(mcs))|`` against ``tolerance``.

    If any off-diagonal of ``Phi(rho)``, ``rho`` or ``Phi(mcs)`` is exactly
    zero, both sides must be exactly zero instead.
    """
    return _report(channel, rho, tolerance)


def stick_breaking_weights(rng: np.random.Generator, k: int) -> np.ndarray:
    """Uniform draw from the probability simplex with ``k`` vertices."""
    weights = np.empty(k)
    remaining = 1.0
    for i in range(k - 1):
        frac = 1.0 - rng.uniform() ** (1.0 / (k - 1 - i))
        weights[i] = remaining * frac
        remaining -= weights[i]
    weights[-1] = remaining
    return weights


def random_test_state(d: int, rng: np.random.Generator, pure: bool) -> DensityMatrix:
    """A pure state, or a mixture of 2-4 pure states with simplex-uniform weights."""
    if pure:
        return density_from_pure(random_pure_state(d, rng))
    k = int(rng.integers(2, 5))
    weights = stick_breaking_weights(rng, k)
    return mix((w, density_from_pure(random_pure_state(d, rng))) for w in weights)


@dataclass
class SweepSummary:
    d: int
    trials: int
    seed: int
    tolerance: float
    passes_elementwise: int = 0
    passes_g: int = 0
    g_not_applicable: int = 0
    max_residual_elementwise: float = 0.0
    max_residual_g: float = 0.0
    failing_seeds: list[int] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return not self.failing_seeds

    def to_dict(self) -> dict:
        return asdict(self)


def sweep_trial(d: int, sub_seed: int, trial: int, tolerance: float) -> LawReport:
    """One randomized (GIO, state) pair; even trials use pure states."""
    rng = np.random.default_rng(sub_seed)
    num_kraus = int(rng.integers(1, 5))
    channel = random_gio(d, num_kraus, int(rng.integers(2**63)))
    rho = random_test_state(d, rng, pure=(trial % 2 == 0))
    return _report(channel, rho, tolerance)


def property_sweep(d: int, trials: int, seed: int, tolerance: float = DEFAULT_TOL) -> SweepSummary:
    """Randomized verification of both identities over random GIO channels.

    Trial ``t`` is seeded with ``seed + t`` so each trial is reproducible on
    its own. The G-law is only scored when every relevant off-diagonal is
    either exactly zero or above 1e-8; otherwise the geometric mean amplifies
    round-off beyond any absolute tolerance and the trial is counted in
    ``g_not_applicable``.
    """
    if d < 2:
        raise InvalidDimensionError(f"dimension must be at least 2, got {d}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    summary = SweepSummary(d=d, trials=trials, seed=seed, tolerance=tolerance)
    for t in range(trials):
        sub_seed = seed + t
        report = sweep_trial(d, sub_seed, t, tolerance)
        summary.max_residual_elementwise = max(summary.max_residual_elementwise,
                                               report.element_law_max_residual)
        failed = not report.holds_elementwise
        if report.holds_elementwise:
            summary.passes_elementwise += 1
        if not report.zero_branch and report.min_offdiag <= SMALL_OFFDIAG:
            summary.g_not_applicable += 1
        else:
            summary.max_residual_g = max(summary.max_residual_g, report.g_law_residual)
            if report.holds_g:
                summary.passes_g += 1
            else:
                failed = True
        if failed:
            summary.failing_seeds.append(sub_seed)
    return summary
