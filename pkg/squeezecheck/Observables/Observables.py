"""Squeezing observables of a single-photon emitter: field variances, optimal phases, purity and bounds.

Variances are normally ordered field variances in units of |chi|^2, the source field of the emitter being
E = chi * (A12 * exp(-i*phase) + A21 * exp(i*phase)) with the laser phase absorbed into phase.
"""
import numpy as np

from squeezecheck.types.QubitState import QubitState, SqueezingReport

__all__ = [
    "variance_at_phase",
    "optimize_phase",
    "purity",
    "variance_envelope",
    "quadrature_variance",
    "QubitState",
    "SqueezingReport",
]

# Below this |coherence| the optimal phase is reported as undefined
COHERENCE_FLOOR = 1e-15

_A12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def _wrap_phase(phase):
    wrapped = float(np.mod(phase, np.pi))
    # np.mod can round up to exactly pi for tiny negative inputs
    return 0.0 if wrapped >= np.pi else wrapped


def variance_at_phase(state, phase):
    """
    Normally ordered field variance of the emitter fluorescence at a given field phase.

    Args:
        state: A QubitState.
        phase: A float representing the field phase in radians.
    Returns:
        A float, 2 * [<A22> - |<A12>|^2 - Re{<A12>^2 exp(-2i phase)}] in units of |chi|^2.
    """
    coherence = complex(state.coherence)
    rotated = coherence ** 2 * np.exp(-2j * phase)
    return 2.0 * (state.excitation - abs(coherence) ** 2 - float(np.real(rotated)))


def purity(state):
    """Returns Tr{sigma^2} = 1 - 2 * (<A22> - <A22>^2 - |<A12>|^2)."""
    return 1.0 - 2.0 * (state.excitation - state.excitation ** 2 - state.coherence_sq)


def variance_envelope(excitation):
    """Returns the minimal variance 2 * excitation * (2 * excitation - 1) reached at maximal coherence."""
    return 2.0 * excitation * (2.0 * excitation - 1.0)


def optimize_phase(state):
    """
    Optimizes the field phase of the emitter fluorescence.

    Args:
        state: A QubitState.
    Returns:
        A SqueezingReport. The minimum is 2 * (<A22> - 2|<A12>|^2), the maximum 2 * <A22>. Phases are
        reduced modulo pi; both are None when the coherence vanishes, as every phase is then equivalent.
    """
    coherence = complex(state.coherence)
    coherence_sq = abs(coherence) ** 2

    var_min = 2.0 * (state.excitation - 2.0 * coherence_sq)
    var_max = 2.0 * state.excitation

    if abs(coherence) <= COHERENCE_FLOOR:
        phase_min = None
        phase_max = None
    else:
        # exp(-2i phase_min) = conj(coherence^2) / |coherence|^2
        phase_min = _wrap_phase(np.angle(coherence))
        phase_max = _wrap_phase(phase_min + np.pi / 2)

    return SqueezingReport(
        var_min=var_min,
        var_max=var_max,
        phase_min=phase_min,
        phase_max=phase_max,
        purity=purity(state),
    )


def quadrature_variance(state, phase):
    """Normally ordered variance evaluated by explicit matrix algebra on the 2x2 density matrix."""
    sigma = state.density_matrix()
    e_plus = _A12 * np.exp(-1j * phase)
    e_minus = e_plus.conj().T

    def expect(op):
        return np.trace(op @ sigma)

    normally_ordered_square = expect(e_plus @ e_plus) + expect(e_minus @ e_minus) + 2.0 * expect(e_minus @ e_plus)
    mean_field = expect(e_plus) + expect(e_minus)
    return float(np.real(normally_ordered_square - mean_field ** 2))
