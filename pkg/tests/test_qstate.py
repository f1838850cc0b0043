import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcoherence.qstate import (
    DensityMatrix,
    InvalidDimensionError,
    InvalidMixtureError,
    InvalidStateError,
    PureState,
    density_from_pure,
    load_state,
    mcs,
    mix,
    pure_state_from_amplitudes,
    random_density,
    random_pure_state,
    save_state,
    state_from_json,
    state_to_json,
)


def qutrit_amplitudes(theta2):
    t = math.radians(2 * theta2)
    a = math.sqrt(2 / 3)
    return [math.sqrt(1 / 3), a * math.cos(t), a * math.sin(t)]


class TestPureState:
    def test_basis_state(self):
        psi = pure_state_from_amplitudes([1, 0])
        np.testing.assert_array_equal(psi.amplitudes, [1, 0])
        assert psi.d == 2

    def test_normalizes_on_construction(self):
        psi = pure_state_from_amplitudes([1, 1, 1])
        np.testing.assert_allclose(psi.amplitudes, np.full(3, 1 / math.sqrt(3)), atol=1e-15)

    def test_qubit_mcs_from_angle(self):
        t = math.radians(45)
        psi = pure_state_from_amplitudes([math.sin(t), math.cos(t)])
        np.testing.assert_allclose(psi.amplitudes, mcs(2).amplitudes, atol=1e-15)

    def test_zero_vector_rejected(self):
        with pytest.raises(InvalidStateError):
            pure_state_from_amplitudes([0, 0, 0])

    def test_empty_and_nonfinite_rejected(self):
        with pytest.raises(InvalidStateError):
            pure_state_from_amplitudes([])
        with pytest.raises(InvalidStateError):
            pure_state_from_amplitudes([1, np.nan])

    def test_direct_constructor_requires_unit_norm(self):
        with pytest.raises(InvalidStateError):
            PureState(np.array([1.0, 1.0]))

    def test_immutable(self):
        psi = mcs(3)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 1


@pytest.mark.parametrize("d", [2, 3, 4])
def test_mcs_amplitudes(d):
    np.testing.assert_allclose(mcs(d).amplitudes, np.full(d, 1 / math.sqrt(d)), rtol=0, atol=1e-15)


def test_mcs_d4_is_one_half():
    np.testing.assert_array_equal(mcs(4).amplitudes, [0.5] * 4)


@pytest.mark.parametrize("d", [0, 1])
def test_mcs_invalid_dimension(d):
    with pytest.raises(InvalidDimensionError):
        mcs(d)


class TestDensityFromPure:
    def test_mcs_qubit_all_half(self):
        np.testing.assert_allclose(density_from_pure(mcs(2)).matrix, np.full((2, 2), 0.5), atol=1e-15)

    def test_basis_state(self):
        rho = density_from_pure(pure_state_from_amplitudes([1, 0]))
        np.testing.assert_array_equal(rho.matrix, np.diag([1, 0]))

    def test_qutrit_state_at_22_5_is_mcs(self):
        rho = density_from_pure(pure_state_from_amplitudes(qutrit_amplitudes(22.5)))
        np.testing.assert_allclose(rho.matrix, np.full((3, 3), 1 / 3), atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_rank_one(self, seed):
        rho = density_from_pure(random_pure_state(4, seed))
        vals = rho.eigenvalues()
        np.testing.assert_allclose(vals[-1], 1.0, atol=1e-9)
        np.testing.assert_allclose(vals[:-1], 0.0, atol=1e-9)


class TestDensityMatrixValidation:
    def test_non_hermitian(self):
        with pytest.raises(InvalidStateError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_bad_trace(self):
        with pytest.raises(InvalidStateError, match="trace"):
            DensityMatrix(np.eye(2))

    def test_not_psd(self):
        with pytest.raises(InvalidStateError, match="semidefinite"):
            DensityMatrix(np.array([[1.2, 0], [0, -0.2]]))

    def test_not_square(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.ones((2, 3)) / 2)

    def test_nan(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.array([[np.nan, 0], [0, 1]]))


class TestMix:
    def test_endpoints(self):
        a = density_from_pure(mcs(3))
        b = density_from_pure(pure_state_from_amplitudes(qutrit_amplitudes(7.5)))
        np.testing.assert_array_equal(mix([(1.0, a), (0.0, b)]).matrix, a.matrix)
        np.testing.assert_array_equal(mix([(0.0, a), (1.0, b)]).matrix, b.matrix)

    def test_midpoint_matches_arithmetic(self):
        amps = qutrit_amplitudes(7.5)
        a = density_from_pure(mcs(3))
        b = density_from_pure(pure_state_from_amplitudes(amps))
        rho = mix([(0.5, a), (0.5, b)])
        for i in range(3):
            for j in range(3):
                expected = 0.5 * (1 / 3) + 0.5 * amps[i] * amps[j]
                assert rho[i, j] == pytest.approx(expected, abs=1e-15)

    def test_weights_must_sum_to_one(self):
        a = density_from_pure(mcs(2))
        with pytest.raises(InvalidMixtureError):
            mix([(0.5, a), (0.6, a)])

    def test_negative_weight(self):
        a = density_from_pure(mcs(2))
        with pytest.raises(InvalidMixtureError):
            mix([(1.5, a), (-0.5, a)])

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            mix([(0.5, density_from_pure(mcs(2))), (0.5, density_from_pure(mcs(3)))])

    @settings(max_examples=50, deadline=None)
    @given(p=st.floats(0, 1), s1=st.integers(0, 10**6), s2=st.integers(0, 10**6))
    def test_affine(self, p, s1, s2):
        r1, r2 = random_density(3, s1), random_density(3, s2)
        rho = mix([(1 - p, r1), (p, r2)])
        np.testing.assert_allclose(rho.matrix, (1 - p) * r1.matrix + p * r2.matrix, rtol=0, atol=1e-15)


class TestRandomDensity:
    def test_deterministic(self):
        np.testing.assert_array_equal(random_density(2, 1).matrix, random_density(2, 1).matrix)

    def test_psd_and_trace(self):
        rho = random_density(3, 7)
        assert np.all(rho.eigenvalues() >= 0)
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)

    def test_hermitian_residual(self):
        rho = random_density(4, 9)
        assert np.max(np.abs(rho.matrix - rho.matrix.conj().T)) <= 1e-14

    def test_full_rank(self):
        assert random_density(5, 3).eigenvalues()[0] > 0

    def test_different_seeds_differ(self):
        assert not np.array_equal(random_density(3, 1).matrix, random_density(3, 2).matrix)


class TestJson:
    def test_density_round_trip(self, tmp_path):
        rho = random_density(3, 4)
        path = tmp_path / "rho.json"
        save_state(rho, path)
        back = load_state(path)
        np.testing.assert_array_equal(back.matrix, rho.matrix)
        assert json.loads(path.read_text())["d"] == 3

    def test_pure_round_trip(self):
        psi = random_pure_state(3, 2)
        back = state_from_json(state_to_json(psi))
        np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-15)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidStateError):
            state_from_json({"d": 3, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]})
        with pytest.raises(InvalidStateError):
            state_from_json({"d": 2, "re": [1, 0], "im": [0, 0, 0]})

    def test_missing_key(self):
        with pytest.raises(InvalidStateError):
            state_from_json({"d": 2, "re": [1, 0]})
