from squeezecheck.types.SweepAxis import SweepAxis


DEFAULT_SOLVER_PARAMS = {
    "tolerance": 1e-8,
    "schedule": (2, 4, 8, 16, 32, 64),
    "n_cap": 64,
}

DEFAULT_SCAN_PARAMS = {
    "units": "g",
    "workers": None,  # None uses every available core
    "outputs": None,  # None emits every column
    "format": "csv",
    "path": None,
}

# Base point of the cavity-assisted purification scenario, rates in units of g
REFERENCE_PARAMS = {
    "gamma": 1 / 23,
    "kappa": 1.58,
    "g": 1.0,
    "rabi": 14.0,
    "delta_c": -34.0,
    "delta_x": -19.29,
    "gamma_d": 0.0,
    "p_x": 0.0,
    "p_c": 0.0,
}

# Reference sweeps over delta_x, in units of g; family values are given in units of gamma
SCAN_PRESETS = {
    "baseline": {"sweep": {"axis": "delta_x", "start": -25.0, "stop": -10.0, "points": 301}},
    "dephasing": {
        "sweep": {"axis": "delta_x", "start": -25.0, "stop": -10.0, "points": 301},
        "family": {"axis": "gamma_d", "values_in_gamma": [0, 2, 4, 6, 8]},
    },
    "emitter_pump": {
        "sweep": {"axis": "delta_x", "start": -25.0, "stop": -10.0, "points": 301},
        "family": {"axis": "p_x", "values_in_gamma": [0, 0.2, 0.4, 0.6, 0.8, 1.0]},
    },
    "cavity_pump": {
        "sweep": {"axis": "delta_x", "start": -60.0, "stop": -5.0, "points": 551},
        "family": {"axis": "p_c", "values_in_gamma": [0, 1, 2, 3]},
    },
}

SUPPORTED_SWEEP_AXES = {axis.value: axis for axis in SweepAxis}

SUPPORTED_FORMATS = ("csv", "json")

SUPPORTED_UNITS = ("g", "gamma")

THRESHOLD_PARAMS = {
    "window": 3.0,  # half width of the detuning window around the predicted resonance, in units of g
    "points": 61,
    "refine_points": 61,
    "rel_tol": 1e-3,
    "max_iterations": 60,
}

LO_SCAN_PARAMS = {
    "intensities": (0.01, 10.0, 200),  # geometric grid of I_LO, in units of |chi|^2
    "phases": 64,
}

CSV_COLUMNS = (
    "family",
    "axis_value",
    "excitation",
    "coherence_re",
    "coherence_im",
    "coherence_sq",
    "purity",
    "var_min",
    "var_max",
    "phase_min",
    "n_cav",
    "a22_a_abs",
    "n_used",
    "residual",
    "converged",
    "r_raw",
    "r_effective",
    "approx_excitation",
    "approx_coherence_sq",
    "approx_var_min",
    "approx_purity",
    "fs_excitation",
    "fs_coherence_sq",
    "fs_var_min",
    "fs_purity",
    "flag",
)

# Columns that are always emitted, whatever the selected outputs
KEY_COLUMNS = ("family", "axis_value", "converged", "flag")
