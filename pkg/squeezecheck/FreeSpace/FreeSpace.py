import numpy as np

from squeezecheck.Observables import optimize_phase
from squeezecheck.types.EmitterModel import EmitterModel
from squeezecheck.types.Exceptions import InvalidParamsError
from squeezecheck.types.QubitState import QubitState
from squeezecheck.types.ScenarioType import ScenarioType

__all__ = [
    "saturation_z",
    "scenario_z",
    "bloch_matrix",
    "steady_state",
    "freespace_variance",
    "FreeSpaceEmitter",
]


def _z_base(gamma, rabi, delta_x):
    return rabi ** 2 / ((gamma / 2) ** 2 + delta_x ** 2)


def _z_dephasing(gamma, gamma_d, rabi, delta_x):
    return (1 + gamma_d / gamma) * rabi ** 2 / (((gamma + gamma_d) / 2) ** 2 + delta_x ** 2)


def _z_pump(gamma, p_x, rabi, delta_x):
    return rabi ** 2 / (((gamma + p_x) / 2) ** 2 + delta_x ** 2)


def saturation_z(params):
    """
    Saturation parameter of the free-space steady state.

    Args:
        params: FreeSpaceParams with at most one of gamma_d, p_x nonzero.
    Returns:
        A float: z without environmental channels, z_D with pure dephasing, z_x with incoherent pumping.
    """
    if params.gamma_d > 0 and params.p_x > 0:
        raise InvalidParamsError(
            f"No closed-form z for gamma_d = {params.gamma_d} and p_x = {params.p_x} both nonzero; "
            f"use steady_state instead"
        )
    if params.gamma_d > 0:
        return _z_dephasing(params.gamma, params.gamma_d, params.rabi, params.delta_x)
    if params.p_x > 0:
        return _z_pump(params.gamma, params.p_x, params.rabi, params.delta_x)
    return _z_base(params.gamma, params.rabi, params.delta_x)


def scenario_z(params, scenario):
    """Returns the free-space z belonging to an environmental scenario (the cavity pump leaves z unchanged)."""
    if scenario == ScenarioType.DEPHASING:
        return _z_dephasing(params.gamma, params.gamma_d, params.rabi, params.delta_x)
    if scenario == ScenarioType.SPE_PUMP:
        return _z_pump(params.gamma, params.p_x, params.rabi, params.delta_x)
    return _z_base(params.gamma, params.rabi, params.delta_x)


def bloch_matrix(params):
    """
    Steady-state Bloch equations M @ y = rhs for y = (<A22>, Re<A12>, Im<A12>).

    Assembled from the Hamiltonian delta_x A22 + rabi (A12 + A21) with the Lindblad channels
    (gamma/2) L[A12], (gamma_d/2) L[A22] and (p_x/2) L[A21].
    """
    gamma_perp = (params.gamma + params.gamma_d + params.p_x) / 2
    matrix = np.array(
        [
            [-(params.gamma + params.p_x), 0.0, -2.0 * params.rabi],
            [0.0, -gamma_perp, params.delta_x],
            [2.0 * params.rabi, -params.delta_x, -gamma_perp],
        ]
    )
    rhs = np.array([-params.p_x, 0.0, params.rabi])
    return matrix, rhs


def _coherence(params, excitation):
    v_factor = 1j * params.delta_x + (params.gamma + params.gamma_d + params.p_x) / 2
    return complex(-1j * params.rabi * (1 - 2 * excitation) / v_factor)


def steady_state(params):
    """
    Free-space steady state of the driven emitter.

    Closed forms are used when at most one environmental channel is active, otherwise the Bloch
    equations are solved directly. The coherence carries its phase, <A12> = -i rabi (1 - 2<A22>) / V
    with V = i delta_x + (gamma + gamma_d + p_x) / 2.

    Args:
        params: FreeSpaceParams.
    Returns:
        A QubitState.
    """
    if params.gamma_d > 0 and params.p_x > 0:
        matrix, rhs = bloch_matrix(params)
        excitation, re_coherence, im_coherence = np.linalg.solve(matrix, rhs)
        return QubitState(excitation=float(excitation), coherence=complex(re_coherence, im_coherence))

    z = saturation_z(params)
    if params.p_x > 0:
        pump = params.p_x / (params.gamma + params.p_x)
        excitation = (z + pump) / (1 + 2 * z)
    else:
        excitation = z / (1 + 2 * z)

    return QubitState(excitation=excitation, coherence=_coherence(params, excitation))


def freespace_variance(params):
    """Returns the phase-optimized minimal normally ordered variance of free-space fluorescence."""
    return optimize_phase(steady_state(params)).var_min


class FreeSpaceEmitter(EmitterModel):
    """Closed-form free-space description of a parameter point; the cavity fields of params are ignored."""

    def __init__(self, params):
        EmitterModel.__init__(self, params)
        self._freespace_params = params.to_freespace() if hasattr(params, "to_freespace") else params
        self._state = None

    def qubit_state(self):
        if self._state is None:
            self._state = steady_state(self._freespace_params)
        return self._state

    def is_valid(self):
        return True
