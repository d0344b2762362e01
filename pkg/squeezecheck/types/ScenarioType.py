from enum import Enum


class ScenarioType(Enum):
    BASE = "base"
    DEPHASING = "dephasing"
    SPE_PUMP = "spe_pump"
    CAVITY_PUMP = "cavity_pump"
