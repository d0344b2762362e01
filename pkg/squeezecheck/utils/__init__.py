from .utils import (
    PRINT_SEPARATOR,
    NpEncoder,
    emit_rows,
    format_csv,
    format_json,
    generate_mlflow_logs,
    load_json_rows,
    sidecar_path,
    write_sidecar,
)
