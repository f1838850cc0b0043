import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcoherence.experiments import qubit_initial_state, qutrit_initial_state
from gcoherence.measures import (
    CoherenceValue,
    MeasureKind,
    coherence,
    g_coherence,
    g_from_moduli,
    geometric_mean_bound,
    l1_coherence,
    qubit_initial_g,
    qutrit_initial_g,
)
from gcoherence.qstate import (
    DensityMatrix,
    InvalidDimensionError,
    density_from_pure,
    mcs,
    pure_state_from_amplitudes,
    random_density,
    random_pure_state,
)

from conftest import brute_g, offdiag_state


def qubit_state(theta1):
    t = math.radians(2 * theta1)
    return density_from_pure(pure_state_from_amplitudes([math.sin(t), math.cos(t)]))


def qutrit_state(theta2):
    t = math.radians(2 * theta2)
    a = math.sqrt(2 / 3)
    return density_from_pure(pure_state_from_amplitudes([math.sqrt(1 / 3), a * math.cos(t), a * math.sin(t)]))


class TestGCoherence:
    @pytest.mark.parametrize("d", [2, 3, 4, 5, 8])
    def test_mcs_is_one(self, d):
        assert g_coherence(density_from_pure(mcs(d))) == pytest.approx(1.0, abs=1e-12)

    def test_worked_example(self):
        rho = offdiag_state(3, {(0, 1): 0.01, (0, 2): 0.2, (1, 2): 0.2})
        g = g_coherence(rho)
        assert g == pytest.approx(3 * 0.0004 ** (1 / 3), abs=1e-12)
        assert abs(g - 0.22) < 0.005

    def test_diagonal_is_exact_zero(self):
        assert g_coherence(DensityMatrix(np.diag([0.2, 0.3, 0.5]))) == 0.0

    def test_one_zero_offdiagonal_gives_zero(self):
        rho = offdiag_state(3, {(0, 1): 0.2, (1, 2): 0.2})
        assert g_coherence(rho) == 0.0

    def test_qubit_is_twice_modulus(self):
        assert g_coherence(offdiag_state(2, {(0, 1): 0.3})) == pytest.approx(0.6, abs=1e-15)

    def test_accepts_raw_arrays(self):
        # linear-inversion output can be non-PSD; G only reads off-diagonals
        m = np.array([[1.2, 0.3], [0.3, -0.2]])
        assert g_coherence(m) == pytest.approx(0.6)

    def test_dimension_one_rejected(self):
        with pytest.raises(InvalidDimensionError):
            g_coherence(np.ones((1, 1)))

    def test_log_domain_survives_underflow(self):
        # 28 pairs of 1e-200 underflow a direct product
        d = 8
        m = np.eye(d, dtype=complex) / d
        m[~np.eye(d, dtype=bool)] = 1e-200
        assert g_coherence(m) == pytest.approx(d * 1e-200, rel=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_brute_force(self, seed):
        rho = random_density(2 + seed % 5, seed)
        assert g_coherence(rho) == pytest.approx(brute_g(rho.matrix), rel=1e-12)

    def test_g_from_moduli_shape_checked(self):
        with pytest.raises(ValueError):
            g_from_moduli([0.1, 0.2], 3)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_g_bounded_by_one(d):
    rng = np.random.default_rng(1000 + d)
    for seed in rng.integers(0, 2**32, size=1000):
        rho = random_density(d, int(seed)) if seed % 2 else density_from_pure(random_pure_state(d, int(seed)))
        g = g_coherence(rho)
        assert 0.0 <= g <= 1.0 + 1e-12
        assert g <= geometric_mean_bound(rho) + 1e-12


class TestL1:
    def test_mcs_qutrit(self):
        assert l1_coherence(density_from_pure(mcs(3))) == pytest.approx(2.0, abs=1e-14)

    def test_diagonal(self):
        assert l1_coherence(DensityMatrix(np.diag([0.5, 0.5]))) == 0.0

    def test_qubit_mcs_matches_g(self):
        rho = density_from_pure(mcs(2))
        assert l1_coherence(rho) == pytest.approx(1.0, abs=1e-15)
        assert l1_coherence(rho) == pytest.approx(g_coherence(rho), abs=1e-15)

    @pytest.mark.parametrize("seed", range(50))
    def test_qubit_g_equals_l1(self, seed):
        rho = random_density(2, seed)
        assert abs(g_coherence(rho) - l1_coherence(rho)) <= 1e-14


class TestClosedForms:
    def test_qubit_endpoints(self):
        assert qubit_initial_g(22.5) == 1.0
        assert qubit_initial_g(0.0) == 0.0
        assert qubit_initial_g(45.0) == 0.0

    def test_qubit_11_25(self):
        assert qubit_initial_g(11.25) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert g_coherence(qubit_state(11.25)) == pytest.approx(math.sqrt(2) / 2, abs=1e-12)

    def test_qutrit_values(self):
        assert qutrit_initial_g(22.5) == pytest.approx(1.0, abs=1e-15)
        assert qutrit_initial_g(7.5) == pytest.approx(2 ** (-2 / 3), abs=1e-15)
        assert qutrit_initial_g(0.0) == 0.0

    @pytest.mark.parametrize("theta", range(0, 91))
    def test_closed_forms_match_states(self, theta):
        assert abs(qubit_initial_g(theta) - g_coherence(qubit_initial_state(theta))) <= 1e-12
        assert abs(qutrit_initial_g(theta) - g_coherence(qutrit_initial_state(theta))) <= 1e-12

    @pytest.mark.parametrize("theta", [1.0, 7.5, 13.0, 30.0, 44.0])
    def test_library_states_match_plain_trig(self, theta):
        np.testing.assert_allclose(qutrit_initial_state(theta).matrix, qutrit_state(theta).matrix, atol=1e-15)
        np.testing.assert_allclose(qubit_initial_state(theta).matrix, qubit_state(theta).matrix, atol=1e-15)


class TestCoherenceValue:
    def test_report(self):
        value = coherence(density_from_pure(mcs(3)), "g")
        assert value.kind is MeasureKind.G
        assert value.value == pytest.approx(1.0)
        assert not value.near_zero_warning

    def test_near_zero_flag(self):
        rho = offdiag_state(3, {(0, 1): 0.01, (0, 2): 0.2, (1, 2): 0.2})
        assert coherence(rho, "g", noise_floor=0.003).near_zero_warning
        assert not coherence(rho, "g", noise_floor=0.0001).near_zero_warning
        assert not coherence(rho, "g").near_zero_warning

    def test_l1_kind(self):
        assert coherence(density_from_pure(mcs(4)), MeasureKind.L1).value == pytest.approx(3.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            CoherenceValue(1.5, MeasureKind.G, 3)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6), data=st.data())
def test_permutation_invariance(seed, d, data):
    rho = random_density(d, seed)
    perm = data.draw(st.permutations(range(d)))
    p = np.eye(d)[list(perm)]
    permuted = DensityMatrix(p @ rho.matrix @ p.T)
    assert g_coherence(permuted) == pytest.approx(g_coherence(rho), rel=1e-12)
    assert l1_coherence(permuted) == pytest.approx(l1_coherence(rho), rel=1e-12)


@pytest.mark.parametrize("d", [3, 4])
def test_zero_iff_some_offdiagonal_zero(d):
    rho = density_from_pure(mcs(d)).matrix.copy()
    assert g_coherence(rho) > 0
    for i, j in itertools.combinations(range(d), 2):
        m = rho.copy()
        m[i, j] = m[j, i] = 0.0
        assert g_coherence(m) == 0.0
