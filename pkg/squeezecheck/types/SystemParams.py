import dataclasses
import math
import numbers
import warnings
from dataclasses import dataclass

from squeezecheck.types.Exceptions import InvalidParamsError

# Above this ratio the intracavity field is no longer weakly excited
CAVITY_PUMP_WARNING_RATIO = 0.1


def _require_finite(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool) or not math.isfinite(value):
        raise InvalidParamsError(f"Parameter {name} must be a finite real number, got {value!r}")


def _require_non_negative(name, value):
    _require_finite(name, value)
    if value < 0:
        raise InvalidParamsError(f"Parameter {name} must be >= 0, got {value}")


@dataclass(frozen=True)
class FreeSpaceParams:
    """Rates and detuning of the laser-driven emitter without cavity.

    All values share one unit (by default the SPE-cavity coupling g, even in free space, so that
    free-space and cavity results are directly comparable).

    Attributes:
        gamma: Spontaneous emission rate, > 0.
        gamma_d: Pure (radiationless) dephasing rate, >= 0.
        p_x: Incoherent pumping rate of the emitter, >= 0.
        rabi: Rabi frequency of the driving laser, >= 0.
        delta_x: Detuning of the emitter transition from the laser, omega_x - omega_L.
    """

    gamma: float
    gamma_d: float = 0.0
    p_x: float = 0.0
    rabi: float = 0.0
    delta_x: float = 0.0

    def __post_init__(self):
        _require_finite("gamma", self.gamma)
        if self.gamma <= 0:
            raise InvalidParamsError(f"Parameter gamma must be > 0, got {self.gamma}")
        _require_non_negative("gamma_d", self.gamma_d)
        _require_non_negative("p_x", self.p_x)
        _require_non_negative("rabi", self.rabi)
        _require_finite("delta_x", self.delta_x)


@dataclass(frozen=True)
class SystemParams:
    """Rates and detunings of the driven emitter coupled to a lossy cavity.

    Attributes:
        gamma: Spontaneous emission rate of the emitter, > 0.
        kappa: Cavity emission rate, > p_c.
        g: Emitter-cavity coupling strength, >= 0 (0 decouples the cavity).
        rabi: Rabi frequency of the driving laser, >= 0.
        delta_x: omega_x - omega_L.
        delta_c: omega_c - omega_L.
        gamma_d: Pure dephasing rate of the emitter, >= 0.
        p_x: Incoherent pumping rate of the emitter, >= 0.
        p_c: Incoherent pumping rate of the cavity, 0 <= p_c < kappa.

    Methods:
        to_freespace(self): Returns the FreeSpaceParams obtained by removing the cavity.
        replace(self, **changes): Returns a copy with some fields changed (validated again).
        scaled(self, factor): Returns a copy with every rate and detuning multiplied by factor.
    """

    gamma: float
    kappa: float
    g: float
    rabi: float = 0.0
    delta_x: float = 0.0
    delta_c: float = 0.0
    gamma_d: float = 0.0
    p_x: float = 0.0
    p_c: float = 0.0

    def __post_init__(self):
        _require_finite("gamma", self.gamma)
        if self.gamma <= 0:
            raise InvalidParamsError(f"Parameter gamma must be > 0, got {self.gamma}")
        _require_finite("kappa", self.kappa)
        if self.kappa <= 0:
            raise InvalidParamsError(f"Parameter kappa must be > 0, got {self.kappa}")
        for name in ("g", "rabi", "gamma_d", "p_x", "p_c"):
            _require_non_negative(name, getattr(self, name))
        _require_finite("delta_x", self.delta_x)
        _require_finite("delta_c", self.delta_c)

        if self.p_c >= self.kappa:
            raise InvalidParamsError(
                f"Cavity pump p_c = {self.p_c} must stay below kappa = {self.kappa} "
                f"(the intracavity occupation diverges at saturation)"
            )
        if self.p_c / self.kappa > CAVITY_PUMP_WARNING_RATIO:
            warnings.warn(
                f"p_c/kappa = {self.p_c / self.kappa:.3g} exceeds {CAVITY_PUMP_WARNING_RATIO}: "
                f"the cavity is no longer weakly excited",
                RuntimeWarning,
            )

    def to_freespace(self):
        return FreeSpaceParams(
            gamma=self.gamma,
            gamma_d=self.gamma_d,
            p_x=self.p_x,
            rabi=self.rabi,
            delta_x=self.delta_x,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def scaled(self, factor):
        return SystemParams(**{key: value * factor for key, value in dataclasses.asdict(self).items()})

    @classmethod
    def field_names(cls):
        return [field.name for field in dataclasses.fields(cls)]
