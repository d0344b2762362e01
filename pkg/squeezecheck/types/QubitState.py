from dataclasses import dataclass
from typing import Optional

import numpy as np

from squeezecheck.types.Exceptions import InvalidParamsError

STATE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class QubitState:
    """Reduced state of the single-photon emitter.

    Only the two numbers entering the squeezing formulas are stored. The ground-state occupation
    is 1 - excitation and <A21> is the complex conjugate of the coherence.

    Attributes:
        excitation: A float representing <A22>, the occupation of the excited level |2>.
        coherence: A complex number representing <A12> = <2|sigma|1>.
    """

    excitation: float
    coherence: complex = 0j

    @property
    def coherence_sq(self):
        return abs(self.coherence) ** 2

    @property
    def ground(self):
        return 1.0 - self.excitation

    def check(self, tol=STATE_TOLERANCE):
        """Raises InvalidParamsError if the state is not a valid qubit density matrix within tol."""
        if not np.isfinite(self.excitation) or not np.isfinite(self.coherence):
            raise InvalidParamsError(f"Non-finite qubit state: {self}")
        if self.excitation < -tol or self.excitation > 1.0 + tol:
            raise InvalidParamsError(f"Excitation {self.excitation} is outside [0, 1]")
        bound = self.excitation * (1.0 - self.excitation)
        if self.coherence_sq > bound + tol:
            raise InvalidParamsError(
                f"|coherence|^2 = {self.coherence_sq} exceeds excitation*(1-excitation) = {bound}"
            )
        return self

    def density_matrix(self):
        """Returns the 2x2 density matrix in the (|1>, |2>) basis, sigma[1, 0] being <A12>."""
        return np.array(
            [
                [self.ground, np.conj(self.coherence)],
                [self.coherence, self.excitation],
            ],
            dtype=complex,
        )

    @classmethod
    def from_density_matrix(cls, sigma):
        sigma = np.asarray(sigma, dtype=complex)
        if sigma.shape != (2, 2):
            raise InvalidParamsError(f"Expected a 2x2 density matrix, got shape {sigma.shape}")
        return cls(excitation=float(np.real(sigma[1, 1])), coherence=complex(sigma[1, 0]))


@dataclass(frozen=True)
class SqueezingReport:
    """Phase-optimized squeezing figures of a qubit state, variances in units of |chi|^2.

    Attributes:
        var_min: A float, the minimal normally ordered field variance.
        var_max: A float, the maximal normally ordered field variance.
        phase_min: The field phase in [0, pi) realizing var_min, or None when the coherence
            vanishes and the variance does not depend on the phase.
        phase_max: The field phase in [0, pi) realizing var_max, or None (see phase_min).
        purity: A float, Tr{sigma^2} of the emitter state.
    """

    var_min: float
    var_max: float
    phase_min: Optional[float]
    phase_max: Optional[float]
    purity: float

    @property
    def phase_defined(self):
        return self.phase_min is not None

    @property
    def squeezed(self):
        return self.var_min < 0.0
