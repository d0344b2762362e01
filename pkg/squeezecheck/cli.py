"""Command-line entrypoint: squeezecheck {scan, threshold, detect, dump-liouvillian}."""
import argparse
import contextlib
import dataclasses
import json
import sys

import numpy as np

from squeezecheck import config
from squeezecheck.CavitySolver import CavityEmitter, dump_liouvillian
from squeezecheck.Detection import optimal_lo_scan
from squeezecheck.ScanCheck import ScanCheck, find_threshold
from squeezecheck.types.Exceptions import (
    ConfigError,
    EmptyGridError,
    InvalidParamsError,
    NoRealSolutionError,
    NoSignChangeError,
    NonConvergenceError,
    SingularSystemError,
)
from squeezecheck.types.ScanConfig import ScanConfig
from squeezecheck.utils import (
    PRINT_SEPARATOR,
    NpEncoder,
    format_csv,
    format_json,
    generate_mlflow_logs,
    sidecar_path,
)

EXIT_SUCCESS = 0
EXIT_CONFIG = 1
EXIT_NON_CONVERGENCE = 2
EXIT_PARTIAL = 3

USAGE_ERRORS = (ConfigError, InvalidParamsError, NoSignChangeError, NoRealSolutionError, EmptyGridError)
SOLVER_ERRORS = (NonConvergenceError, SingularSystemError)


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors share exit code 1 with config errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_config_arguments(parser):
    parser.add_argument("--config", help="YAML scan config; the baseline preset is used without it")
    parser.add_argument("--preset", choices=sorted(config.SCAN_PRESETS), help="reference sweep filling config defaults")
    parser.add_argument("--tol", type=float, help="solver tolerance")
    parser.add_argument("--n-cap", type=int, help="largest Fock truncation")
    parser.add_argument(
        "--param",
        action="extend",
        nargs="+",
        default=[],
        metavar="KEY=VALUE",
        help="override a parameter (gamma_d=0.2) or a dotted config key (sweep.points=61)",
    )
    parser.add_argument("--verbose", action="store_true")


def _load_config(args, extra_overrides=()):
    overrides = []
    if args.tol is not None:
        overrides.append(f"solver.tolerance={args.tol!r}")
    if args.n_cap is not None:
        overrides.append(f"solver.n_cap={args.n_cap}")
    overrides.extend(extra_overrides)
    overrides.extend(args.param)
    return ScanConfig.from_file(args.config, overrides=overrides, preset=args.preset)


def build_parser():
    parser = _ArgumentParser(prog="squeezecheck", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    scan = subparsers.add_parser("scan", help="run a parameter sweep and emit plot-ready data")
    _add_config_arguments(scan)
    scan.add_argument("--out", help="output file; rows go to stdout without it")
    scan.add_argument("--format", choices=config.SUPPORTED_FORMATS)
    scan.add_argument("--workers", type=int, help="worker processes, all cores by default")
    scan.add_argument("--minimize", action="store_true", help="also minimize var_min over delta_x per family value")
    scan.add_argument("--mlflow-experiment", help="log the run to this mlflow experiment")
    scan.add_argument("--mlflow-tracking-uri", default="mlruns")
    scan.add_argument("--run-name", default="scan")

    threshold = subparsers.add_parser("threshold", help="bisect an outer parameter for a var_min crossing")
    _add_config_arguments(threshold)
    threshold.add_argument(
        "--axis",
        default="gamma_d",
        choices=[axis for axis in config.SUPPORTED_SWEEP_AXES if axis != "delta_x"],
    )
    threshold.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LOW", "HIGH"))
    threshold.add_argument("--in-gamma", action="store_true", help="the bracket is given in multiples of gamma")
    threshold.add_argument("--level", type=float, default=0.0, help="var_min level whose crossing is searched")
    threshold.add_argument("--rel-tol", type=float, help="relative width of the final bracket")
    threshold.add_argument(
        "--delta-x",
        type=float,
        help="evaluate var_min at this fixed emitter detuning (config units) instead of minimizing over it",
    )

    detect = subparsers.add_parser("detect", help="evaluate the homodyne cross-correlation criterion at one point")
    _add_config_arguments(detect)
    detect.add_argument("--out", help="JSON output file; printed without it")
    detect.add_argument("--eta", type=float, default=1.0, help="detection efficiency in (0, 1]")
    detect.add_argument("--classical-variance", type=float, default=0.0)
    detect.add_argument("--noise-scaling", choices=("absolute", "relative"), default="absolute")
    detect.add_argument("--lo-min", type=float, default=config.LO_SCAN_PARAMS["intensities"][0])
    detect.add_argument("--lo-max", type=float, default=config.LO_SCAN_PARAMS["intensities"][1])
    detect.add_argument("--lo-points", type=int, default=config.LO_SCAN_PARAMS["intensities"][2])
    detect.add_argument("--phases", type=int, default=config.LO_SCAN_PARAMS["phases"])

    dump = subparsers.add_parser("dump-liouvillian", help="write the steady-state system in coordinate format")
    _add_config_arguments(dump)
    dump.add_argument("--n-max", type=int, required=True)
    dump.add_argument("--out", required=True)

    return parser


def run_scan_command(args):
    overrides = []
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    if args.format is not None:
        overrides.append(f"emit.format={args.format}")
    scan_config = _load_config(args, overrides)
    if args.out is not None:
        scan_config = dataclasses.replace(scan_config, path=args.out)

    scan_check = ScanCheck(scan_config, verbose=args.verbose)
    result = scan_check.run_scan()
    if args.minimize:
        scan_check.minimize()

    if scan_config.path is not None:
        data_path, meta_path = scan_check.emit()
        if args.verbose:
            print(f"Wrote {data_path} and {meta_path}")
        if args.mlflow_experiment:
            generate_mlflow_logs(
                scan_check,
                run_name=args.run_name,
                experiment_name=args.mlflow_experiment,
                tracking_uri=args.mlflow_tracking_uri,
                artifact_paths=(data_path, sidecar_path(data_path)),
            )
    else:
        formatter = format_json if scan_config.format == "json" else format_csv
        sys.stdout.write(formatter(scan_check.get_rows(), result.columns))

    if scan_config.path is not None:
        scan_check.print_scan_stats()
    elif args.verbose:
        # stdout carries the rows
        with contextlib.redirect_stdout(sys.stderr):
            scan_check.print_scan_stats()

    if result.rows and result.failed_count == len(result.rows):
        return EXIT_NON_CONVERGENCE
    return EXIT_PARTIAL if result.status == "partial" else EXIT_SUCCESS


def run_threshold_command(args):
    scan_config = _load_config(args)
    params = scan_config.params
    bracket = [value * params.gamma for value in args.bracket] if args.in_gamma else args.bracket

    value = find_threshold(
        params,
        args.axis,
        bracket,
        level=args.level,
        delta_x=args.delta_x,
        tol=scan_config.tolerance,
        n_cap=scan_config.n_cap,
        rel_tol=args.rel_tol,
        verbose=args.verbose,
    )

    print(f"Threshold of {args.axis} for var_min = {args.level}")
    print(PRINT_SEPARATOR)
    print(f"{args.axis} = {value:.6g} (units of {scan_config.units}) = {value / params.gamma:.6g} gamma")
    print(PRINT_SEPARATOR)
    return EXIT_SUCCESS


def run_detect_command(args):
    scan_config = _load_config(args)
    params = scan_config.params

    emitter = CavityEmitter(params, tol=scan_config.tolerance, n_cap=scan_config.n_cap)
    emitter.solve().raise_for_convergence()
    state = emitter.qubit_state()
    squeezing = emitter.squeezing_report()

    intensities = np.geomspace(args.lo_min, args.lo_max, args.lo_points)
    phases = np.linspace(0.0, np.pi, args.phases, endpoint=False)
    result, lo = optimal_lo_scan(
        state,
        intensities,
        phases,
        eta=args.eta,
        classical_variance=args.classical_variance,
        noise_scaling=args.noise_scaling,
    )

    report = {
        "params": dataclasses.asdict(params),
        "units": scan_config.units,
        "n_used": emitter.solve().n_used,
        "excitation": state.excitation,
        "var_min": squeezing.var_min,
        "phase_min": squeezing.phase_min,
        "lo_intensity": lo.intensity,
        "lo_phase": lo.phase,
        "noise_scaling": lo.noise_scaling,
        "efficiency": result.efficiency,
        "delta_g": result.delta_g,
        "classical_floor": result.classical_floor,
        "margin": result.margin,
        "detectable": result.detectable,
    }

    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as outfile:
            json.dump(report, outfile, cls=NpEncoder, indent=2)
            outfile.write("\n")
    else:
        print("Detection at the configured point")
        print(PRINT_SEPARATOR)
        for key, value in report.items():
            if key != "params":
                print(f"{key}: {value}")
        print(PRINT_SEPARATOR)
    return EXIT_SUCCESS


def run_dump_command(args):
    scan_config = _load_config(args)
    nnz = dump_liouvillian(scan_config.params, args.n_max, args.out)
    if args.verbose:
        print(f"Wrote {nnz} entries to {args.out}")
    return EXIT_SUCCESS


COMMANDS = {
    "scan": run_scan_command,
    "threshold": run_threshold_command,
    "detect": run_detect_command,
    "dump-liouvillian": run_dump_command,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as err:
        print(f"squeezecheck: error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"squeezecheck: error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SOLVER_ERRORS as err:
        print(f"squeezecheck: solver error: {err}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
