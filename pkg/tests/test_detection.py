import numpy as np
import pytest

from squeezecheck.Detection import (
    LocalOscillator,
    SignalMoments,
    delta_g22,
    g22_equal_time,
    g22_uncorrelated,
    optimal_lo_scan,
)
from squeezecheck.FreeSpace import steady_state
from squeezecheck.Observables import optimize_phase, variance_at_phase
from squeezecheck.types.Exceptions import EmptyGridError, InvalidParamsError
from squeezecheck.types.QubitState import QubitState
from squeezecheck.types.SystemParams import FreeSpaceParams

# Maximal free-space squeezing: excitation 1/8, variance -1/8 at the phase pi/2
OPTIMAL_STATE = steady_state(FreeSpaceParams(gamma=1.0, rabi=np.sqrt(1 / 24)))
PHASES = np.linspace(0.0, np.pi, 64, endpoint=False)


def test_criterion_for_maximal_free_space_squeezing():
    sig = SignalMoments.from_qubit(OPTIMAL_STATE)
    for eta in (1.0, 0.5, 0.1):
        result = delta_g22(sig, LocalOscillator(intensity=1.0), eta, variance_sig=-1 / 8)
        assert result.delta_g == pytest.approx(7 * eta ** 2 / 256, rel=1e-12)
        assert result.classical_floor == 0.0
        assert result.detectable


def test_lo_phase_rotates_the_signal():
    sig = SignalMoments.from_qubit(OPTIMAL_STATE)
    phase_min = optimize_phase(OPTIMAL_STATE).phase_min

    implicit = delta_g22(sig, LocalOscillator(intensity=1.0, phase=phase_min), 1.0)
    assert implicit.delta_g == pytest.approx(7 / 256, rel=1e-12)

    for phase in PHASES:
        lo = LocalOscillator(intensity=0.7, phase=phase)
        explicit = delta_g22(sig, lo, 0.8, variance_sig=variance_at_phase(OPTIMAL_STATE, phase))
        assert delta_g22(sig, lo, 0.8).delta_g == pytest.approx(explicit.delta_g, abs=1e-14)


def test_correlation_difference_equals_criterion():
    rng = np.random.default_rng(5)
    for _ in range(100):
        excitation = rng.uniform(0, 1)
        coherence = np.sqrt(excitation * (1 - excitation)) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        sig = SignalMoments.from_qubit(QubitState(excitation=excitation, coherence=coherence))
        lo = LocalOscillator(intensity=rng.uniform(0, 3), phase=rng.uniform(0, np.pi))
        eta = rng.uniform(0.1, 1)

        difference = g22_equal_time(sig, lo, eta) - g22_uncorrelated(sig, lo, eta)
        assert difference == pytest.approx(delta_g22(sig, lo, eta).delta_g, abs=1e-12)


def test_coherent_signal_shows_no_excess_correlation():
    sig = SignalMoments.coherent(0.6 * np.exp(0.4j))
    lo = LocalOscillator(intensity=2.0, phase=1.1)

    assert sig.intensity_variance() == pytest.approx(0.0, abs=1e-15)
    assert sig.rotated(1.1).field_variance() == pytest.approx(0.0, abs=1e-15)
    assert delta_g22(sig, lo, 0.9).delta_g == pytest.approx(0.0, abs=1e-15)
    assert g22_equal_time(sig, lo, 0.9) == pytest.approx(g22_uncorrelated(sig, lo, 0.9), abs=1e-14)


def test_unsqueezed_signals_are_never_detected():
    rng = np.random.default_rng(99)
    tested = 0
    for _ in range(1000):
        excitation = rng.uniform(0, 1)
        coherence = np.sqrt(excitation * (1 - excitation)) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        state = QubitState(excitation=excitation, coherence=coherence)
        phase = rng.uniform(0, np.pi)
        if variance_at_phase(state, phase) < 0:
            continue
        tested += 1

        lo = LocalOscillator(intensity=rng.uniform(0, 10), phase=phase)
        result = delta_g22(SignalMoments.from_qubit(state), lo, rng.uniform(0.05, 1))
        assert result.delta_g <= 1e-15
        assert not result.detectable

    assert tested > 500


def test_criterion_is_linear_in_lo_intensity():
    sig = SignalMoments.from_qubit(OPTIMAL_STATE)
    values = [delta_g22(sig, LocalOscillator(intensity=i), 1.0, variance_sig=-1 / 8).delta_g for i in (0, 1, 2, 3)]
    np.testing.assert_allclose(np.diff(values), 1 / 32, rtol=1e-12)
    assert values[0] == pytest.approx(-1 / 256)


def test_relative_lo_noise_has_an_interior_optimum():
    intensities = np.linspace(0.01, 1.0, 991)
    result, lo = optimal_lo_scan(
        OPTIMAL_STATE, intensities, PHASES, eta=1.0, classical_variance=0.05, noise_scaling="relative"
    )
    assert lo.intensity == pytest.approx(1 / (8 * 8 * 0.05), abs=1e-3)
    assert lo.phase == pytest.approx(np.pi / 2)
    assert result.detectable

    # detection needs a relative noise below variance^2 / (16 I^2) = 1/16
    result, _ = optimal_lo_scan(
        OPTIMAL_STATE, intensities, PHASES, eta=1.0, classical_variance=0.08, noise_scaling="relative"
    )
    assert not result.detectable


def test_absolute_lo_noise_above_quarter_variance_hides_squeezing():
    intensities = np.geomspace(0.01, 10.0, 200)
    result, lo = optimal_lo_scan(OPTIMAL_STATE, intensities, PHASES, eta=0.7, classical_variance=0.0)
    assert result.detectable
    assert lo.intensity == pytest.approx(10.0)

    result, _ = optimal_lo_scan(OPTIMAL_STATE, intensities, PHASES, eta=0.7, classical_variance=1 / 32 + 1e-3)
    assert not result.detectable


def test_invalid_detection_inputs():
    sig = SignalMoments.from_qubit(OPTIMAL_STATE)
    with pytest.raises(InvalidParamsError):
        delta_g22(sig, LocalOscillator(intensity=1.0), 0.0)
    with pytest.raises(InvalidParamsError):
        LocalOscillator(intensity=-1.0)
    with pytest.raises(InvalidParamsError):
        LocalOscillator(intensity=1.0, noise_scaling="quadratic")
    with pytest.raises(InvalidParamsError):
        SignalMoments(intensity=0.1, amplitude=1.0)
    with pytest.raises(EmptyGridError):
        optimal_lo_scan(OPTIMAL_STATE, [], PHASES, eta=1.0, classical_variance=0.0)
