from abc import ABC, abstractmethod

from squeezecheck.Observables import optimize_phase


class EmitterModel(ABC):
    """Abstract class for steady-state descriptions of the driven single-photon emitter.

    This is an abstract class that provides a template for the three descriptions squeezecheck compares
    at every parameter point: the free-space closed forms, the truncated cavity master equation and the
    analytical approximation chain. Each of them reduces to a QubitState from which the squeezing report
    is derived the same way.

    Attributes:
        params: The SystemParams of the parameter point.

    Methods:
        qubit_state(self): Abstract method, its implementation returns the steady QubitState of the emitter.
        is_valid(self): Abstract method, its implementation returns whether the returned state can be trusted
            (converged solve, approximation inside its validity domain).
        squeezing_report(self): Returns the phase-optimized SqueezingReport of qubit_state().
    """

    def __init__(self, params):
        """Inits EmitterModel with the parameter point to describe"""
        self.params = params

    @abstractmethod
    def qubit_state(self):
        """The implementation of this method will return the steady QubitState of the emitter"""
        pass

    @abstractmethod
    def is_valid(self):
        """The implementation of this method will return whether qubit_state() is trustworthy"""
        pass

    def squeezing_report(self):
        return optimize_phase(self.qubit_state())
