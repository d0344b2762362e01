"""Analytical approximation chain of cavity-assisted purification.

The intracavity occupation <a^dag a> is an input taken from the numerical solver. The chain then follows the
simplifications Re[V] ~ (free-space damping)/2 and z~ ~ z of each environmental scenario, and always drops
the correlation <A22 a>.
"""
from dataclasses import dataclass

import numpy as np

from squeezecheck.FreeSpace import scenario_z
from squeezecheck.types.EmitterModel import EmitterModel
from squeezecheck.types.Exceptions import InvalidParamsError, NoRealSolutionError
from squeezecheck.types.QubitState import QubitState
from squeezecheck.types.ScenarioType import ScenarioType

__all__ = [
    "ApproxContext",
    "infer_scenario",
    "v_factor",
    "z_tilde",
    "purification_rate",
    "approx_moments",
    "approx_variance",
    "approx_report",
    "cavity_resonance_detuning",
    "ApproximateEmitter",
]


@dataclass(frozen=True)
class ApproxContext:
    """Quantities of the approximation chain at one parameter point.

    Attributes:
        scenario: The ScenarioType the formulas were taken from.
        v_factor: A complex rate, V of the scenario.
        z_tilde: A float, the unsimplified 2 rabi^2 Re[V] / (gamma_s |V|^2).
        z: A float, the simplified free-space z used by the moments.
        purification_rate: A float >= 0, R, R_x or R_c.
        effective_rate: A float, R, R~_x or R~_c; negative values impurify the emitter.
        moments: The approximate QubitState.
        variance: A float, the approximate minimal normally ordered variance.
        valid: A boolean, False when the predicted excitation is negative.
    """

    scenario: ScenarioType
    v_factor: complex
    z_tilde: float
    z: float
    purification_rate: float
    effective_rate: float
    moments: QubitState
    variance: float
    valid: bool


def infer_scenario(params):
    """Returns the scenario of the single active environmental channel, BASE when none is active."""
    active = [
        scenario
        for scenario, rate in (
            (ScenarioType.DEPHASING, params.gamma_d),
            (ScenarioType.SPE_PUMP, params.p_x),
            (ScenarioType.CAVITY_PUMP, params.p_c),
        )
        if rate > 0
    ]
    if len(active) > 1:
        raise InvalidParamsError(
            f"The approximation covers one environmental channel at a time, got {[s.value for s in active]}"
        )
    return active[0] if active else ScenarioType.BASE


def v_factor(params, scenario=ScenarioType.BASE):
    """
    Complex damping factor V of the emitter coherence with the cavity eliminated.

    Args:
        params: SystemParams.
        scenario: A ScenarioType.
    Returns:
        A complex number: i delta_x + gamma/2 + g^2 / (i delta_c + kappa/2) for BASE, plus gamma_d/2 for
        DEPHASING, with gamma replaced by gamma + p_x for SPE_PUMP and kappa by kappa - p_c for CAVITY_PUMP.
    """
    gamma = params.gamma
    kappa = params.kappa
    extra = 0.0
    if scenario == ScenarioType.DEPHASING:
        extra = params.gamma_d / 2
    elif scenario == ScenarioType.SPE_PUMP:
        gamma = params.gamma + params.p_x
    elif scenario == ScenarioType.CAVITY_PUMP:
        kappa = params.kappa - params.p_c

    purcell_term = params.g ** 2 / (1j * params.delta_c + kappa / 2)
    return complex(1j * params.delta_x + gamma / 2 + purcell_term + extra)


def _emitter_damping(params, scenario):
    return params.gamma + params.p_x if scenario == ScenarioType.SPE_PUMP else params.gamma


def z_tilde(params, scenario=ScenarioType.BASE):
    """Returns 2 rabi^2 Re[V] / (gamma_s |V|^2) before the z~ ~ z simplification."""
    v = v_factor(params, scenario)
    return 2 * params.rabi ** 2 * v.real / (_emitter_damping(params, scenario) * abs(v) ** 2)


def purification_rate(params, n_cav, scenario=ScenarioType.BASE):
    """
    Purification rate from the intracavity occupation.

    Args:
        params: SystemParams.
        n_cav: A float, <a^dag a> from the numerical solver.
        scenario: A ScenarioType.
    Returns:
        A tuple (raw, effective). The effective rate subtracts the incoherent pump contribution
        (p_x / (gamma + p_x) or p_c / gamma); raw and effective coincide for BASE and DEPHASING.
    """
    if n_cav < 0:
        raise InvalidParamsError(f"Intracavity occupation must be >= 0, got {n_cav}")

    if scenario == ScenarioType.SPE_PUMP:
        damping = params.gamma + params.p_x
        raw = params.kappa * n_cav / damping
        return raw, raw - params.p_x / damping
    if scenario == ScenarioType.CAVITY_PUMP:
        raw = (params.kappa - params.p_c) * n_cav / params.gamma
        return raw, raw - params.p_c / params.gamma

    raw = params.kappa / params.gamma * n_cav
    return raw, raw


def _coherence_prefactor(params, scenario):
    if scenario == ScenarioType.DEPHASING:
        return 1 / (1 + params.gamma_d / params.gamma)
    return 1.0


def approx_moments(params, rate_effective, scenario=ScenarioType.BASE):
    """
    Approximate emitter moments for a given effective purification rate R.

    <A22> = (z - R) / (1 + 2z) and |<A12>|^2 = f z (1 + 2R)^2 / (1 + 2z)^2 with the scenario's free-space z
    and f = 1 / (1 + gamma_d/gamma) for DEPHASING, f = 1 otherwise. The coherence phase is the free-space
    one, arg(-i / V) at g = 0.

    Returns:
        A QubitState; a negative excitation signals the approximation left its validity domain.
    """
    z = scenario_z(params, scenario)
    prefactor = _coherence_prefactor(params, scenario)

    excitation = (z - rate_effective) / (1 + 2 * z)
    coherence_sq = prefactor * z * (1 + 2 * rate_effective) ** 2 / (1 + 2 * z) ** 2

    v_free = 1j * params.delta_x + (params.gamma + params.gamma_d + params.p_x) / 2
    coherence = np.sqrt(coherence_sq) * np.exp(1j * np.angle(-1j / v_free))
    return QubitState(excitation=float(excitation), coherence=complex(coherence))


def approx_variance(params, rate_effective, scenario=ScenarioType.BASE):
    """
    Approximate minimal normally ordered variance.

    Reference variance at R = 0 minus the purification term (2R / (1 + 2z)) (1 + f 8z (1 + R) / (1 + 2z)).
    """
    z = scenario_z(params, scenario)
    prefactor = _coherence_prefactor(params, scenario)

    reference = 2 * (z / (1 + 2 * z) - 2 * prefactor * z / (1 + 2 * z) ** 2)
    correction = (2 * rate_effective / (1 + 2 * z)) * (
        1 + prefactor * 8 * z * (1 + rate_effective) / (1 + 2 * z)
    )
    return reference - correction


def approx_report(params, n_cav, scenario=None):
    """Bundles every quantity of the approximation chain into an ApproxContext."""
    scenario = infer_scenario(params) if scenario is None else scenario
    raw, effective = purification_rate(params, n_cav, scenario)
    moments = approx_moments(params, effective, scenario)

    return ApproxContext(
        scenario=scenario,
        v_factor=v_factor(params, scenario),
        z_tilde=z_tilde(params, scenario),
        z=scenario_z(params, scenario),
        purification_rate=raw,
        effective_rate=effective,
        moments=moments,
        variance=approx_variance(params, effective, scenario),
        valid=moments.excitation >= 0,
    )


def cavity_resonance_detuning(params):
    """
    Emitter detuning placing the lower Rabi sideband on the cavity, delta_c^2 = (2 rabi)^2 + delta_x^2.

    The root sharing the sign of delta_c is returned.
    """
    discriminant = params.delta_c ** 2 - 4 * params.rabi ** 2
    if discriminant < 0:
        raise NoRealSolutionError(
            f"No real sideband resonance: delta_c^2 = {params.delta_c ** 2} < 4 rabi^2 = {4 * params.rabi ** 2}"
        )
    return float(np.copysign(np.sqrt(discriminant), params.delta_c))


class ApproximateEmitter(EmitterModel):
    """Approximation-chain description of a parameter point, fed with the solver's intracavity occupation."""

    def __init__(self, params, n_cav, scenario=None):
        EmitterModel.__init__(self, params)
        self.context = approx_report(params, n_cav, scenario)

    def qubit_state(self):
        return self.context.moments

    def is_valid(self):
        return self.context.valid
