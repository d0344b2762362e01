import csv
import io
import json
import math
import os
from datetime import datetime, timezone

import mlflow
import numpy as np

PRINT_SEPARATOR = "_" * 19

SIGNIFICANT_DIGITS = 12


class NpEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, complex):
            return [obj.real, obj.imag]
        return super(NpEncoder, self).default(obj)


def _round_value(value):
    if value is None or isinstance(value, (bool, np.bool_, str)):
        return bool(value) if isinstance(value, np.bool_) else value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def _csv_cell(value):
    value = _round_value(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return value


def _columns_of(rows, columns):
    if columns is not None:
        return list(columns)
    return list(rows[0].keys()) if rows else []


def format_csv(rows, columns=None):
    """
    Renders rows as CSV text: one header row, LF line endings, 12 significant digits, empty cells for
    missing values. Columns absent from a row are emitted empty.
    """
    columns = _columns_of(rows, columns)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def format_json(rows, columns=None):
    """Renders rows as a JSON array of objects keeping the column order; floats carry 12 significant digits."""
    columns = _columns_of(rows, columns)
    payload = [{column: _round_value(row.get(column)) for column in columns} for row in rows]
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


FORMATTERS = {"csv": format_csv, "json": format_json}


def emit_rows(rows, path, fmt="csv", columns=None):
    """
    Writes rows to path in the given format.

    Arguments:
        rows: A list of dictionaries, one per scan point.
        path: A string representing the output file.
        fmt: "csv" or "json".
        columns: The column order; defaults to the keys of the first row.
    Returns:
        The path written to.
    """
    if fmt not in FORMATTERS:
        raise ValueError(f"{fmt} is not one of the supported formats: {list(FORMATTERS)}")
    text = FORMATTERS[fmt](rows, columns)
    with open(path, "w", newline="", encoding="utf-8") as outfile:
        outfile.write(text)
    return path


def load_json_rows(text):
    return json.loads(text)


def sidecar_path(path):
    return f"{path}.meta.json"


def write_sidecar(path, metadata):
    """
    Writes run metadata next to a data file, as <path>.meta.json. The data file itself never carries timestamps,
    so the UTC timestamp and the package version are added here.
    """
    from squeezecheck import __version__

    metadata = dict(metadata)
    metadata["version"] = __version__
    metadata["created_utc"] = datetime.now(timezone.utc).isoformat()

    meta_path = sidecar_path(path)
    with open(meta_path, "w", encoding="utf-8") as outfile:
        json.dump(metadata, outfile, cls=NpEncoder, indent=2)
        outfile.write("\n")
    return meta_path


def _flatten(prefix, value, flat):
    if isinstance(value, dict):
        for key, inner in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), inner, flat)
    elif isinstance(value, (list, tuple)):
        flat[prefix] = ",".join(str(v) for v in value) if len(value) <= 8 else f"{len(value)} values"
    else:
        flat[prefix] = value
    return flat


def generate_mlflow_logs(scan_check, run_name, experiment_name="default", tracking_uri="mlruns", artifact_paths=()):
    """
    Generates scan logs on mlflow.

    Arguments:
        scan_check: ScanCheck whose run_scan() method has been executed, so that there are stats to extract from it.
        run_name: A string representing the run name under which the mlflow artifacts and metrics will be logged.
        experiment_name: A string representing the experiment name under which the mlflow artifacts and metrics will be
            logged.
        tracking_uri: A string representing the path where the mlflow artifacts and metrics will be stored.
        artifact_paths: Paths of emitted files (data file, sidecar) to attach to the run.
    """
    mlflow.set_tracking_uri(tracking_uri)
    mlflow.set_experiment(experiment_name)
    mlflow.start_run(run_name=run_name)

    config_dict = scan_check.config.to_dict()
    mlflow.log_params(_flatten("", {k: config_dict[k] for k in ("units", "params", "sweep", "solver")}, {}))

    scan_stats = scan_check.get_stats()
    for metric in scan_stats:
        metric_value = scan_stats[metric]
        # mlflow.log_metric only takes numbers; axis values of missing minima are None
        if isinstance(metric_value, (bool, np.bool_)) or not isinstance(metric_value, (int, float, np.number)):
            continue
        if math.isfinite(metric_value):
            mlflow.log_metric(metric, float(metric_value))

    for path in artifact_paths:
        if path is not None and os.path.exists(path):
            mlflow.log_artifact(path)

    mlflow.end_run()
