import copy
import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import yaml

from squeezecheck import config
from squeezecheck.types.Exceptions import ConfigError, InvalidParamsError
from squeezecheck.types.SweepAxis import SweepAxis
from squeezecheck.types.SystemParams import SystemParams

SECTIONS = ("units", "params", "sweep", "family", "solver", "emit", "outputs", "workers", "preset")


def _as_float(name, value):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Config field {name} must be a real number, got {value!r}")
    if not math.isfinite(number):
        raise ConfigError(f"Config field {name} must be finite, got {value!r}")
    return number


def _as_int(name, value):
    number = _as_float(name, value)
    if number != int(number):
        raise ConfigError(f"Config field {name} must be an integer, got {value!r}")
    return int(number)


def _axis(name, value):
    if value not in config.SUPPORTED_SWEEP_AXES:
        raise ConfigError(f"{name} {value!r} is not one of the supported axes: {list(config.SUPPORTED_SWEEP_AXES)}")
    return config.SUPPORTED_SWEEP_AXES[value]


def _deep_merge(base, update):
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _axis_values(section, name, gamma):
    """Reads either an explicit value list or a linear range from a sweep/family section."""
    if "values" in section and "values_in_gamma" in section:
        raise ConfigError(f"{name} cannot define both values and values_in_gamma")
    if "values_in_gamma" in section:
        return tuple(_as_float(f"{name}.values_in_gamma", v) * gamma for v in section["values_in_gamma"])
    if "values" in section:
        return tuple(_as_float(f"{name}.values", v) for v in section["values"])

    missing = [key for key in ("start", "stop", "points") if key not in section]
    if missing:
        raise ConfigError(f"{name} needs either values or start/stop/points, missing {missing}")
    points = _as_int(f"{name}.points", section["points"])
    if points < 2:
        raise ConfigError(f"{name}.points must be >= 2, got {points}")
    start = _as_float(f"{name}.start", section["start"])
    stop = _as_float(f"{name}.stop", section["stop"])
    return tuple(float(v) for v in np.linspace(start, stop, points))


def parse_override(expression):
    """Splits a KEY=VALUE override; the value is typed by YAML rules ("1e-8" stays a string until validated)."""
    if "=" not in expression:
        raise ConfigError(f"Override {expression!r} is not of the form KEY=VALUE")
    key, raw_value = expression.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"Override {expression!r} has an empty key")
    return key, yaml.safe_load(raw_value)


def apply_override(raw, key, value):
    """Applies a dotted override to a raw config dictionary. Bare parameter names address the params table."""
    parts = key.split(".")
    if len(parts) == 1 and parts[0] in SystemParams.field_names():
        parts = ["params"] + parts
    if parts[0] not in SECTIONS:
        raise ConfigError(f"Unknown override key {key!r}; use a parameter name or one of {list(SECTIONS)}")

    target = raw
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ConfigError(f"Override key {key!r} does not address a table")
    target[parts[-1]] = value
    return raw


@dataclass(frozen=True)
class ScanConfig:
    """Validated description of a parameter sweep.

    Attributes:
        params: SystemParams holding the base values of every parameter.
        axis: The SweepAxis that is swept.
        values: A tuple of sorted axis values.
        family_axis: An optional second SweepAxis producing one block of rows per family value.
        family_values: A tuple of family values (empty without family_axis).
        outputs: A tuple of emitted column names, in config.CSV_COLUMNS order.
        tolerance: A float, the solver tolerance.
        n_cap: An integer, the largest Fock truncation.
        format: "csv" or "json".
        path: An optional output path.
        units: "g" or "gamma", the unit of every rate in params and values.
        workers: An optional integer worker count, None for every available core.
    """

    params: SystemParams
    axis: SweepAxis
    values: Tuple[float, ...]
    family_axis: Optional[SweepAxis] = None
    family_values: Tuple[float, ...] = ()
    outputs: Tuple[str, ...] = config.CSV_COLUMNS
    tolerance: float = config.DEFAULT_SOLVER_PARAMS["tolerance"]
    n_cap: int = config.DEFAULT_SOLVER_PARAMS["n_cap"]
    format: str = "csv"
    path: Optional[str] = None
    units: str = "g"
    workers: Optional[int] = None

    def point_params(self):
        """Yields (family value, axis value, SystemParams) for every point, in emission order."""
        families = self.family_values if self.family_axis is not None else (None,)
        for family_value in families:
            base = self.params
            if self.family_axis is not None:
                base = base.replace(**{self.family_axis.value: family_value})
            for value in self.values:
                yield family_value, value, base.replace(**{self.axis.value: value})

    def to_dict(self):
        raw = {
            "units": self.units,
            "params": dataclasses.asdict(self.params),
            "sweep": {"axis": self.axis.value, "values": list(self.values)},
            "solver": {"tolerance": self.tolerance, "n_cap": self.n_cap},
            "emit": {"format": self.format, "path": self.path},
            "outputs": list(self.outputs),
            "workers": self.workers,
        }
        if self.family_axis is not None:
            raw["family"] = {"axis": self.family_axis.value, "values": list(self.family_values)}
        return raw

    @classmethod
    def from_dict(cls, raw):
        """
        Validates a raw configuration dictionary.

        A "preset" entry names one of config.SCAN_PRESETS whose sweep/family tables and the base point
        config.REFERENCE_PARAMS serve as defaults for everything the dictionary leaves out.
        """
        if not isinstance(raw, dict):
            raise ConfigError(f"Config must be a mapping, got {type(raw).__name__}")
        unknown = [key for key in raw if key not in SECTIONS]
        if unknown:
            raise ConfigError(f"Unknown config sections {unknown}; supported: {list(SECTIONS)}")

        units = raw.get("units", config.DEFAULT_SCAN_PARAMS["units"])
        if units not in config.SUPPORTED_UNITS:
            raise ConfigError(f"{units!r} is not one of the supported units: {config.SUPPORTED_UNITS}")

        # presets are written in units of g
        scale = 1 / config.REFERENCE_PARAMS["gamma"] if units == "gamma" else 1.0
        defaults = {"params": dataclasses.asdict(SystemParams(**config.REFERENCE_PARAMS).scaled(scale))}
        preset = raw.get("preset")
        if preset is not None:
            if preset not in config.SCAN_PRESETS:
                raise ConfigError(f"{preset!r} is not one of the supported presets: {list(config.SCAN_PRESETS)}")
            tables = copy.deepcopy(config.SCAN_PRESETS[preset])
            tables["sweep"]["start"] *= scale
            tables["sweep"]["stop"] *= scale
            defaults = _deep_merge(defaults, tables)
        raw = _deep_merge(defaults, {key: value for key, value in raw.items() if key != "preset"})

        params_raw = raw.get("params") or {}
        unknown = [key for key in params_raw if key not in SystemParams.field_names()]
        if unknown:
            raise ConfigError(f"Unknown parameters {unknown}; supported: {SystemParams.field_names()}")
        try:
            params = SystemParams(**{key: _as_float(f"params.{key}", value) for key, value in params_raw.items()})
        except InvalidParamsError as err:
            raise ConfigError(f"Invalid params: {err}")
        except TypeError as err:
            raise ConfigError(f"Incomplete params: {err}")

        sweep = raw.get("sweep")
        if not isinstance(sweep, dict) or "axis" not in sweep:
            raise ConfigError("Config needs a sweep table with an axis")
        axis = _axis("sweep.axis", sweep["axis"])
        values = tuple(sorted(_axis_values(sweep, "sweep", params.gamma)))
        if len(values) < 2:
            raise ConfigError(f"A sweep needs at least 2 points, got {len(values)}")

        family_axis = None
        family_values = ()
        family = raw.get("family")
        if family:
            family_axis = _axis("family.axis", family.get("axis"))
            if family_axis == axis:
                raise ConfigError(f"family.axis must differ from sweep.axis ({axis.value})")
            family_values = tuple(sorted(_axis_values(family, "family", params.gamma)))

        solver = raw.get("solver") or {}
        tolerance = _as_float("solver.tolerance", solver.get("tolerance", config.DEFAULT_SOLVER_PARAMS["tolerance"]))
        if tolerance <= 0:
            raise ConfigError(f"solver.tolerance must be > 0, got {tolerance}")
        n_cap = _as_int("solver.n_cap", solver.get("n_cap", config.DEFAULT_SOLVER_PARAMS["n_cap"]))
        if n_cap < 1:
            raise ConfigError(f"solver.n_cap must be >= 1, got {n_cap}")

        emit = raw.get("emit") or {}
        emit_format = emit.get("format", config.DEFAULT_SCAN_PARAMS["format"])
        if emit_format not in config.SUPPORTED_FORMATS:
            raise ConfigError(f"{emit_format!r} is not one of the supported formats: {config.SUPPORTED_FORMATS}")

        outputs = raw.get("outputs")
        if outputs is None:
            outputs = config.CSV_COLUMNS
        else:
            unknown = [column for column in outputs if column not in config.CSV_COLUMNS]
            if unknown:
                raise ConfigError(f"Unknown outputs {unknown}; supported: {list(config.CSV_COLUMNS)}")
            selected = set(outputs) | set(config.KEY_COLUMNS)
            outputs = tuple(column for column in config.CSV_COLUMNS if column in selected)

        workers = raw.get("workers", config.DEFAULT_SCAN_PARAMS["workers"])
        if workers is not None:
            workers = _as_int("workers", workers)
            if workers < 1:
                raise ConfigError(f"workers must be >= 1, got {workers}")

        try:
            for _, _, _ in cls._endpoint_points(params, axis, values, family_axis, family_values):
                pass
        except InvalidParamsError as err:
            raise ConfigError(f"Sweep leaves the valid parameter range: {err}")

        return cls(
            params=params,
            axis=axis,
            values=values,
            family_axis=family_axis,
            family_values=tuple(family_values),
            outputs=tuple(outputs),
            tolerance=tolerance,
            n_cap=n_cap,
            format=emit_format,
            path=emit.get("path"),
            units=units,
            workers=workers,
        )

    @staticmethod
    def _endpoint_points(params, axis, values, family_axis, family_values):
        # Only the endpoints are validated; every parameter constraint is monotone in a single field
        families = (min(family_values), max(family_values)) if family_axis is not None and family_values else (None,)
        for family_value in families:
            base = params if family_value is None else params.replace(**{family_axis.value: family_value})
            for value in (values[0], values[-1]):
                yield family_value, value, base.replace(**{axis.value: value})

    @classmethod
    def from_file(cls, path=None, overrides=(), preset=None):
        """
        Loads a YAML config and applies KEY=VALUE overrides on top of it.

        Args:
            path: An optional path to a YAML file; without it the baseline preset is used.
            overrides: A sequence of "KEY=VALUE" strings.
            preset: An optional preset name taking the place of the file's own preset entry.
        """
        raw = {}
        if path is not None:
            try:
                with open(path) as infile:
                    raw = yaml.safe_load(infile) or {}
            except OSError as err:
                raise ConfigError(f"Cannot read config file {path}: {err}")
            except yaml.YAMLError as err:
                raise ConfigError(f"Cannot parse config file {path}: {err}")
        if preset is not None:
            raw["preset"] = preset
        if "sweep" not in raw and "preset" not in raw:
            raw["preset"] = "baseline"
        for expression in overrides:
            key, value = parse_override(expression)
            apply_override(raw, key, value)
        return cls.from_dict(raw)
