from enum import Enum


class SweepAxis(Enum):
    DELTA_X = "delta_x"
    GAMMA_D = "gamma_d"
    P_X = "p_x"
    P_C = "p_c"
    RABI = "rabi"
