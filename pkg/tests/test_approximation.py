import numpy as np
import pytest

from squeezecheck import config
from squeezecheck.Approximation import (
    ApproximateEmitter,
    approx_moments,
    approx_report,
    approx_variance,
    cavity_resonance_detuning,
    infer_scenario,
    purification_rate,
    v_factor,
    z_tilde,
)
from squeezecheck.CavitySolver import converged_steady_state, reduced_qubit_state
from squeezecheck.FreeSpace import scenario_z, steady_state
from squeezecheck.Observables import optimize_phase, purity
from squeezecheck.types.Exceptions import InvalidParamsError, NoRealSolutionError
from squeezecheck.types.ScenarioType import ScenarioType
from squeezecheck.types.SystemParams import SystemParams

REFERENCE = SystemParams(**config.REFERENCE_PARAMS)
GAMMA = REFERENCE.gamma

SCENARIO_PARAMS = {
    ScenarioType.BASE: REFERENCE,
    ScenarioType.DEPHASING: REFERENCE.replace(gamma_d=4 * GAMMA),
    ScenarioType.SPE_PUMP: REFERENCE.replace(p_x=0.5 * GAMMA),
    ScenarioType.CAVITY_PUMP: REFERENCE.replace(p_c=GAMMA),
}


def test_v_factor():
    params = REFERENCE.replace(g=0.0)
    assert v_factor(params) == pytest.approx(1j * params.delta_x + params.gamma / 2)

    free = 1j * REFERENCE.delta_x + REFERENCE.gamma / 2
    v = v_factor(REFERENCE)
    assert abs(v - free) / abs(v) < 0.05
    assert v.real > 0

    dephased = SCENARIO_PARAMS[ScenarioType.DEPHASING]
    assert v_factor(dephased, ScenarioType.DEPHASING) - v_factor(dephased) == pytest.approx(dephased.gamma_d / 2)


def test_z_tilde_stays_close_to_z():
    for scenario, params in SCENARIO_PARAMS.items():
        assert z_tilde(params, scenario) == pytest.approx(scenario_z(params, scenario), rel=0.1)


def test_purification_rate():
    assert purification_rate(REFERENCE, 0.0) == (0.0, 0.0)

    raw, effective = purification_rate(REFERENCE, 0.01)
    assert raw == pytest.approx(1.58 * 23 * 0.01)
    assert effective == raw

    params = SystemParams(gamma=1.0, kappa=2.0, g=1.0, p_x=1.0)
    raw, effective = purification_rate(params, 0.5, ScenarioType.SPE_PUMP)
    assert raw == pytest.approx(0.5)
    assert effective == pytest.approx(0.0, abs=1e-15)

    params = SystemParams(gamma=1.0, kappa=2.0, g=1.0, p_c=0.1)
    raw, effective = purification_rate(params, 0.2, ScenarioType.CAVITY_PUMP)
    assert raw == pytest.approx(1.9 * 0.2)
    assert effective == pytest.approx(1.9 * 0.2 - 0.1)

    with pytest.raises(InvalidParamsError):
        purification_rate(REFERENCE, -0.1)


def test_zero_rate_reproduces_free_space():
    for scenario in (ScenarioType.BASE, ScenarioType.DEPHASING):
        params = SCENARIO_PARAMS[scenario]
        expected = steady_state(params.to_freespace())
        moments = approx_moments(params, 0.0, scenario)
        assert moments.excitation == pytest.approx(expected.excitation, abs=1e-12)
        assert moments.coherence == pytest.approx(expected.coherence, abs=1e-12)
        assert approx_variance(params, 0.0, scenario) == pytest.approx(optimize_phase(expected).var_min, abs=1e-12)

    # the pump enters the effective rate as -p_x / (gamma + p_x)
    params = SCENARIO_PARAMS[ScenarioType.SPE_PUMP]
    expected = steady_state(params.to_freespace())
    moments = approx_moments(params, -params.p_x / (params.gamma + params.p_x), ScenarioType.SPE_PUMP)
    assert moments.excitation == pytest.approx(expected.excitation, abs=1e-12)
    assert moments.coherence_sq == pytest.approx(expected.coherence_sq, abs=1e-12)


@pytest.mark.parametrize("scenario", list(ScenarioType))
def test_variance_matches_moments(scenario):
    params = SCENARIO_PARAMS[scenario]
    for rate in (-0.2, 0.0, 0.05, 0.3):
        expected = optimize_phase(approx_moments(params, rate, scenario)).var_min
        assert approx_variance(params, rate, scenario) == pytest.approx(expected, abs=1e-12)


def test_purification_direction():
    params = REFERENCE
    free = approx_moments(params, 0.0)
    reference = approx_variance(params, 0.0)

    previous = reference
    for rate in np.linspace(0.01, 0.5, 50):
        moments = approx_moments(params, rate)
        variance = approx_variance(params, rate)
        assert moments.excitation < free.excitation
        assert moments.coherence_sq > free.coherence_sq
        assert variance < previous
        previous = variance

    assert purity(approx_moments(params, -0.1)) < purity(free)


def test_cavity_resonance_detuning():
    assert cavity_resonance_detuning(REFERENCE) == pytest.approx(-19.29, abs=0.01)
    assert cavity_resonance_detuning(REFERENCE.replace(rabi=0.0)) == pytest.approx(-34.0)
    assert cavity_resonance_detuning(REFERENCE.replace(rabi=1.0)) == pytest.approx(-33.94, abs=0.01)
    assert cavity_resonance_detuning(REFERENCE.replace(delta_c=34.0)) == pytest.approx(19.29, abs=0.01)

    with pytest.raises(NoRealSolutionError):
        cavity_resonance_detuning(REFERENCE.replace(delta_c=-20.0))


def test_infer_scenario():
    for scenario, params in SCENARIO_PARAMS.items():
        assert infer_scenario(params) == scenario

    with pytest.raises(InvalidParamsError):
        infer_scenario(REFERENCE.replace(gamma_d=GAMMA, p_x=GAMMA))


# dropping <A22 a> costs up to 0.085 in excitation once dephasing is on
@pytest.mark.parametrize("gamma_d_in_gamma, bound", [(0, 0.02), (2, 0.1), (4, 0.1), (6, 0.1), (8, 0.1)])
def test_approximation_fidelity_at_resonance(gamma_d_in_gamma, bound):
    params = REFERENCE.replace(gamma_d=gamma_d_in_gamma * GAMMA)
    params = params.replace(delta_x=cavity_resonance_detuning(params))

    report = converged_steady_state(params)
    solved = reduced_qubit_state(report.state)
    context = approx_report(params, report.state.n_cav)
    free = steady_state(params.to_freespace())

    assert report.converged
    assert context.valid
    assert context.purification_rate > 0
    assert abs(context.moments.excitation - solved.excitation) <= bound
    assert context.moments.excitation < free.excitation
    assert context.moments.coherence_sq > free.coherence_sq


def test_dropped_correlation_grows_with_dephasing():
    def a22_a(gamma_d_in_gamma):
        params = REFERENCE.replace(gamma_d=gamma_d_in_gamma * GAMMA)
        params = params.replace(delta_x=cavity_resonance_detuning(params))
        return abs(converged_steady_state(params).state.moments["a22_a"])

    clean, dephased = a22_a(0), a22_a(8)
    assert clean < 0.005
    assert dephased > 5 * clean


def test_approximate_emitter():
    n_cav = converged_steady_state(REFERENCE).state.n_cav
    emitter = ApproximateEmitter(REFERENCE, n_cav)

    assert emitter.is_valid()
    assert emitter.context.scenario == ScenarioType.BASE
    assert emitter.squeezing_report().var_min == pytest.approx(emitter.context.variance, abs=1e-12)
    assert emitter.squeezing_report().var_min < optimize_phase(steady_state(REFERENCE.to_freespace())).var_min

    invalid = ApproximateEmitter(REFERENCE, 10.0)
    assert not invalid.is_valid()
