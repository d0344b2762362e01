"""Homodyne cross-correlation detection of squeezed fluorescence.

The signal is mixed with a local oscillator (LO) on a 50:50 beam splitter and the intensity
cross-correlation of the two output ports is recorded. The LO phase is applied by rotating the phase
reference of the signal moments, so that the field variance entering the criterion is
Observables.variance_at_phase(state, lo.phase).
"""
from dataclasses import dataclass

import numpy as np

from squeezecheck.types.Exceptions import EmptyGridError, InvalidParamsError

__all__ = [
    "SignalMoments",
    "LocalOscillator",
    "DetectionResult",
    "g22_equal_time",
    "g22_uncorrelated",
    "delta_g22",
    "optimal_lo_scan",
]

SUPPORTED_NOISE_SCALINGS = ("absolute", "relative")


@dataclass(frozen=True)
class SignalMoments:
    """Moments of the signal field entering the cross-correlation, in units of |chi|^2.

    Attributes:
        intensity: <I_SI> = <E^- E^+>, >= 0.
        amplitude: <E^+>.
        squared_amplitude: <E^+ E^+>, zero for a single-photon emitter.
        normally_ordered_intensity_sq: <:I_SI^2:>, zero for a single-photon emitter.
    """

    intensity: float
    amplitude: complex = 0j
    squared_amplitude: complex = 0j
    normally_ordered_intensity_sq: float = 0.0

    def __post_init__(self):
        if self.intensity < 0:
            raise InvalidParamsError(f"Signal intensity must be >= 0, got {self.intensity}")
        if abs(self.amplitude) ** 2 > self.intensity * (1 + 1e-12) + 1e-15:
            raise InvalidParamsError(
                f"|<E+>|^2 = {abs(self.amplitude) ** 2} exceeds the intensity {self.intensity}"
            )

    @classmethod
    def from_qubit(cls, state, chi=1.0):
        """Single-photon emitter signal: E^+ = chi A12, so <E^+ E^+> = 0 and <:I^2:> = 0."""
        return cls(
            intensity=abs(chi) ** 2 * state.excitation,
            amplitude=complex(chi * state.coherence),
        )

    @classmethod
    def coherent(cls, amplitude):
        """Classical coherent signal of complex amplitude alpha."""
        amplitude = complex(amplitude)
        return cls(
            intensity=abs(amplitude) ** 2,
            amplitude=amplitude,
            squared_amplitude=amplitude ** 2,
            normally_ordered_intensity_sq=abs(amplitude) ** 4,
        )

    def rotated(self, phase):
        """Moments seen by an LO of the given phase, E^+ -> E^+ exp(-i phase)."""
        return SignalMoments(
            intensity=self.intensity,
            amplitude=self.amplitude * np.exp(-1j * phase),
            squared_amplitude=self.squared_amplitude * np.exp(-2j * phase),
            normally_ordered_intensity_sq=self.normally_ordered_intensity_sq,
        )

    def intensity_variance(self):
        """Normally ordered intensity variance <:(Delta I)^2:>."""
        return self.normally_ordered_intensity_sq - self.intensity ** 2

    def field_variance(self):
        """Normally ordered variance of E = E^+ + E^- at the current phase reference."""
        return 2 * float(np.real(self.squared_amplitude - self.amplitude ** 2)) + 2 * (
            self.intensity - abs(self.amplitude) ** 2
        )


@dataclass(frozen=True)
class LocalOscillator:
    """Classical local oscillator.

    Attributes:
        intensity: I_LO = E_LO^2 in units of |chi|^2, >= 0.
        phase: A float, the LO phase in radians.
        classical_variance: The classical amplitude variance of the LO, >= 0. With noise_scaling "relative" it
            is the variance per unit LO intensity (relative intensity noise of a laser).
        noise_scaling: "absolute" or "relative".
    """

    intensity: float
    phase: float = 0.0
    classical_variance: float = 0.0
    noise_scaling: str = "absolute"

    def __post_init__(self):
        for name in ("intensity", "phase", "classical_variance"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParamsError(f"Local oscillator {name} must be finite, got {getattr(self, name)}")
        if self.intensity < 0:
            raise InvalidParamsError(f"Local oscillator intensity must be >= 0, got {self.intensity}")
        if self.classical_variance < 0:
            raise InvalidParamsError(f"Classical variance must be >= 0, got {self.classical_variance}")
        if self.noise_scaling not in SUPPORTED_NOISE_SCALINGS:
            raise InvalidParamsError(
                f"{self.noise_scaling} is not one of the supported noise scalings: {SUPPORTED_NOISE_SCALINGS}"
            )

    @property
    def amplitude_variance(self):
        if self.noise_scaling == "relative":
            return self.classical_variance * self.intensity
        return self.classical_variance


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of the squeezing criterion Delta G > Delta G_cl.

    Attributes:
        delta_g: A float, equal-time minus uncorrelated cross-correlation.
        classical_floor: A float, the classical LO noise contribution.
        detectable: A boolean, delta_g > classical_floor.
        efficiency: A float in (0, 1], the detection efficiency eta (collection included).
    """

    delta_g: float
    classical_floor: float
    detectable: bool
    efficiency: float

    @property
    def margin(self):
        return self.delta_g - self.classical_floor


def _check_efficiency(eta):
    if not 0 < eta <= 1:
        raise InvalidParamsError(f"Detection efficiency must lie in (0, 1], got {eta}")


def g22_equal_time(sig, lo, eta):
    """
    Equal-time cross-correlation G(t, t) = eta^2/4 [<:I^2:> + I_LO^2 - 2 I_LO Re<E^+ E^+>].

    Args:
        sig: SignalMoments at the zero phase reference.
        lo: LocalOscillator.
        eta: A float, the detection efficiency.
    """
    _check_efficiency(eta)
    seen = sig.rotated(lo.phase)
    return (eta ** 2 / 4) * (
        seen.normally_ordered_intensity_sq
        + lo.intensity ** 2
        - 2 * lo.intensity * float(np.real(seen.squared_amplitude))
    )


def g22_uncorrelated(sig, lo, eta):
    """
    Cross-correlation in the limit of large time delay, where the two ports factorize:
    eta^2/4 [<I>^2 + I_LO^2 + 2 I_LO <I> - 4 I_LO (Re<E^+>)^2].

    The coherent cross term carries the factor 4, not 2: it is the product of the two port means,
    each holding 2 Re<E^+> sqrt(I_LO). With it, g22_equal_time - g22_uncorrelated equals delta_g22.
    """
    _check_efficiency(eta)
    seen = sig.rotated(lo.phase)
    return (eta ** 2 / 4) * (
        seen.intensity ** 2
        + lo.intensity ** 2
        + 2 * lo.intensity * seen.intensity
        - 4 * lo.intensity * float(np.real(seen.amplitude)) ** 2
    )


def delta_g22(sig, lo, eta, variance_sig=None):
    """
    Squeezing criterion of the homodyne cross-correlation.

    Args:
        sig: SignalMoments at the zero phase reference.
        lo: LocalOscillator.
        eta: A float in (0, 1], the detection efficiency.
        variance_sig: A float, the normally ordered field variance at the LO phase (e.g. from
            Observables.variance_at_phase). Computed from sig when None.
    Returns:
        A DetectionResult with delta_g = eta^2/4 (<:(Delta I)^2:> - I_LO variance_sig), which is
        -eta^2/4 (I_SI^2 + I_LO variance_sig) for a single-photon emitter, and the classical floor
        eta^2 I_LO <(delta E_LO)^2>.
    """
    _check_efficiency(eta)
    if variance_sig is None:
        variance_sig = sig.rotated(lo.phase).field_variance()

    delta_g = (eta ** 2 / 4) * (sig.intensity_variance() - lo.intensity * variance_sig)
    classical_floor = eta ** 2 * lo.intensity * lo.amplitude_variance

    return DetectionResult(
        delta_g=float(delta_g),
        classical_floor=float(classical_floor),
        detectable=bool(delta_g > classical_floor),
        efficiency=eta,
    )


def optimal_lo_scan(state, intensities, phases, eta, classical_variance, noise_scaling="absolute", chi=1.0):
    """
    Scans LO intensities and phases for the largest margin delta_g - classical_floor.

    Args:
        state: The QubitState of the emitter.
        intensities: A sequence of LO intensities.
        phases: A sequence of LO phases.
        eta: A float in (0, 1], the detection efficiency.
        classical_variance: A float, the classical LO amplitude variance of the laser in use.
        noise_scaling: "absolute" or "relative", see LocalOscillator.
        chi: The field-strength scale of the signal.
    Returns:
        A tuple (DetectionResult, LocalOscillator) at the best grid point; the first one wins ties.
    """
    intensities = np.asarray(intensities, dtype=float).ravel()
    phases = np.asarray(phases, dtype=float).ravel()
    if intensities.size == 0 or phases.size == 0:
        raise EmptyGridError(f"LO grid is empty: {intensities.size} intensities x {phases.size} phases")
    _check_efficiency(eta)

    sig = SignalMoments.from_qubit(state, chi=chi)

    best_result = None
    best_lo = None
    for phase in phases:
        variance_sig = sig.rotated(phase).field_variance()
        for intensity in intensities:
            lo = LocalOscillator(
                intensity=float(intensity),
                phase=float(phase),
                classical_variance=classical_variance,
                noise_scaling=noise_scaling,
            )
            result = delta_g22(sig, lo, eta, variance_sig=variance_sig)
            if best_result is None or result.margin > best_result.margin:
                best_result = result
                best_lo = lo

    return best_result, best_lo
