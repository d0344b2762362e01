import numpy as np
import pytest

from squeezecheck.FreeSpace import (
    FreeSpaceEmitter,
    bloch_matrix,
    freespace_variance,
    saturation_z,
    scenario_z,
    steady_state,
)
from squeezecheck.Observables import optimize_phase, purity
from squeezecheck.types.Exceptions import InvalidParamsError
from squeezecheck.types.ScenarioType import ScenarioType
from squeezecheck.types.SystemParams import FreeSpaceParams, SystemParams


def test_optimal_free_space_squeezing():
    # z = rabi^2 / (gamma^2/4 + delta_x^2) = 1/6
    params = FreeSpaceParams(gamma=1.0, rabi=np.sqrt(1 / 24))
    state = steady_state(params)

    assert saturation_z(params) == pytest.approx(1 / 6, abs=1e-15)
    assert state.excitation == pytest.approx(1 / 8, abs=1e-12)
    assert state.coherence_sq == pytest.approx(3 / 32, abs=1e-12)
    assert freespace_variance(params) == pytest.approx(-1 / 8, abs=1e-12)


def test_squeezing_vanishes_at_half_saturation():
    params = FreeSpaceParams(gamma=2.0, rabi=np.sqrt(0.5), delta_x=0.0)
    assert saturation_z(params) == pytest.approx(0.5)
    assert freespace_variance(params) == pytest.approx(0.0, abs=1e-12)

    for rabi in (0.1, 0.4, 0.6, 2.0):
        params = FreeSpaceParams(gamma=2.0, rabi=rabi, delta_x=0.3)
        assert (freespace_variance(params) < 0) == (saturation_z(params) < 0.5)


def test_purity_identity_without_environment():
    for rabi, delta_x in ((0.3, 0.0), (1.0, -2.0), (14.0, -19.29)):
        params = FreeSpaceParams(gamma=1 / 23, rabi=rabi, delta_x=delta_x)
        state = steady_state(params)
        assert purity(state) == pytest.approx(1 - 2 * state.excitation ** 2, abs=1e-12)


def test_dephasing_saturation_parameter():
    params = FreeSpaceParams(gamma=1.0, gamma_d=1.0, rabi=1.0, delta_x=10.0)
    assert saturation_z(params) == pytest.approx(2 / 101, rel=1e-12)

    matrix, rhs = bloch_matrix(params)
    excitation = np.linalg.solve(matrix, rhs)[0]
    z_d = saturation_z(params)
    assert excitation == pytest.approx(z_d / (1 + 2 * z_d), abs=1e-12)


def test_equal_dephasing_and_emission_gives_no_squeezing():
    for rabi in (0.2, 1.0, 3.0):
        params = FreeSpaceParams(gamma=1.0, gamma_d=1.0, rabi=rabi, delta_x=0.7)
        z_d = saturation_z(params)
        assert freespace_variance(params) == pytest.approx((2 * z_d / (1 + 2 * z_d)) ** 2, abs=1e-12)


@pytest.mark.parametrize(
    "gamma_d, p_x",
    [(0.0, 0.0), (2.0, 0.0), (0.0, 0.5), (2.0, 0.5)],
)
def test_closed_forms_match_bloch_solve(gamma_d, p_x):
    params = FreeSpaceParams(gamma=1.0, gamma_d=gamma_d, p_x=p_x, rabi=3.0, delta_x=5.0)
    matrix, rhs = bloch_matrix(params)
    excitation, re_coherence, im_coherence = np.linalg.solve(matrix, rhs)
    state = steady_state(params)

    assert state.excitation == pytest.approx(excitation, abs=1e-12)
    assert state.coherence == pytest.approx(complex(re_coherence, im_coherence), abs=1e-12)


def test_pump_at_emission_rate_saturates():
    for rabi in (0.0, 0.5, 14.0):
        params = FreeSpaceParams(gamma=1.0, p_x=1.0, rabi=rabi, delta_x=-3.0)
        state = steady_state(params)
        assert state.excitation == pytest.approx(0.5, abs=1e-12)
        assert abs(state.coherence) == pytest.approx(0.0, abs=1e-12)
        assert freespace_variance(params) == pytest.approx(1.0, abs=1e-12)


def test_dephasing_monotonicity():
    previous = None
    for gamma_d in np.linspace(0.0, 8.0, 17):
        state = steady_state(FreeSpaceParams(gamma=1.0, gamma_d=gamma_d, rabi=2.0, delta_x=-6.0))
        if previous is not None:
            assert state.excitation >= previous.excitation - 1e-15
            assert state.coherence_sq <= previous.coherence_sq + 1e-15
        previous = state


def test_scenario_z_and_combined_rates():
    params = FreeSpaceParams(gamma=1.0, gamma_d=0.5, p_x=0.2, rabi=1.0, delta_x=1.0)
    with pytest.raises(InvalidParamsError):
        saturation_z(params)

    assert scenario_z(params, ScenarioType.BASE) == pytest.approx(1 / (0.25 + 1))
    assert scenario_z(params, ScenarioType.CAVITY_PUMP) == scenario_z(params, ScenarioType.BASE)
    assert scenario_z(params, ScenarioType.SPE_PUMP) == pytest.approx(1 / (0.36 + 1))


def test_free_space_emitter_ignores_the_cavity():
    params = SystemParams(gamma=1 / 23, kappa=1.58, g=1.0, rabi=14.0, delta_x=-19.29, delta_c=-34.0)
    emitter = FreeSpaceEmitter(params)

    assert emitter.is_valid()
    assert emitter.qubit_state() == steady_state(params.to_freespace())
    assert emitter.squeezing_report() == optimize_phase(emitter.qubit_state())


def test_invalid_free_space_params():
    with pytest.raises(InvalidParamsError):
        FreeSpaceParams(gamma=0.0)
    with pytest.raises(InvalidParamsError):
        FreeSpaceParams(gamma=1.0, gamma_d=-0.1)
    with pytest.raises(InvalidParamsError):
        FreeSpaceParams(gamma=1.0, delta_x=float("nan"))
    with pytest.raises(InvalidParamsError):
        FreeSpaceParams(gamma=True)


def test_numpy_scalars_are_accepted():
    params = SystemParams(
        gamma=np.float64(1 / 23), kappa=np.float64(1.58), g=np.int64(1), rabi=np.int64(14), delta_c=np.float64(-34.0)
    )

    assert params.g == 1
    assert params.replace(delta_x=np.float64(-19.0)).delta_x == -19.0
    assert FreeSpaceParams(gamma=np.int32(1), rabi=np.float32(0.5)).rabi == 0.5
