import os
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from squeezecheck import config
from squeezecheck.Approximation import ApproximateEmitter, cavity_resonance_detuning
from squeezecheck.CavitySolver import CavityEmitter, reduced_qubit_state
from squeezecheck.FreeSpace import FreeSpaceEmitter
from squeezecheck.Observables import optimize_phase, purity
from squeezecheck.types.Exceptions import (
    InvalidParamsError,
    NonConvergenceError,
    NoSignChangeError,
    SqueezeCheckError,
)
from squeezecheck.types.SweepAxis import SweepAxis
from squeezecheck.utils import PRINT_SEPARATOR, emit_rows, write_sidecar
from squeezecheck.utils.metrics import health_issues

__all__ = [
    "ScanResult",
    "DetuningMinimum",
    "evaluate_point",
    "minimize_over_detuning",
    "find_threshold",
    "ScanCheck",
]


@dataclass
class ScanResult:
    """Ordered rows of a parameter sweep.

    Attributes:
        rows: A list of dictionaries keyed by config.CSV_COLUMNS, sorted by family value then axis value.
        columns: A tuple of the emitted column names.
        units: "g" or "gamma".
    """

    rows: list = field(default_factory=list)
    columns: tuple = config.CSV_COLUMNS
    units: str = "g"

    @property
    def flagged_count(self):
        return sum(1 for row in self.rows if row.get("flag"))

    @property
    def failed_count(self):
        """Rows without a usable cavity solution."""
        return sum(1 for row in self.rows if row.get("var_min") is None)

    @property
    def status(self):
        return "partial" if self.failed_count else "success"

    def selected_rows(self):
        return [{column: row.get(column) for column in self.columns} for row in self.rows]


@dataclass(frozen=True)
class DetuningMinimum:
    """Smallest cavity var_min over a delta_x window.

    Attributes:
        delta_x: A float, the minimizing emitter detuning.
        var_min: A float, the minimal phase-optimized variance found.
        row: The full scan row at delta_x.
    """

    delta_x: float
    var_min: float
    row: dict


def _cavity_columns(report):
    state = report.state
    qubit = reduced_qubit_state(state)
    squeezing = optimize_phase(qubit)
    return {
        "excitation": qubit.excitation,
        "coherence_re": qubit.coherence.real,
        "coherence_im": qubit.coherence.imag,
        "coherence_sq": qubit.coherence_sq,
        "purity": squeezing.purity,
        "var_min": squeezing.var_min,
        "var_max": squeezing.var_max,
        "phase_min": squeezing.phase_min,
        "n_cav": state.n_cav,
        "a22_a_abs": abs(state.moments["a22_a"]),
    }


def _clamp_round_off(n_cav, tol=None):
    # solver noise around an empty cavity
    tol = config.DEFAULT_SOLVER_PARAMS["tolerance"] if tol is None else tol
    return 0.0 if -tol < n_cav < 0.0 else n_cav


def evaluate_point(params, tol=None, n_cap=None):
    """
    Evaluates the three descriptions of the emitter at one parameter point.

    Failures never propagate: they leave the affected columns empty and are described in the "flag" column.
    The parameters are revalidated here, so their warnings (e.g. a strong cavity pump) land in the flag together
    with the warnings raised while solving.

    Args:
        params: SystemParams.
        tol: A float, the solver tolerance.
        n_cap: An integer, the largest truncation.
    Returns:
        A dictionary keyed by config.CSV_COLUMNS except "family" and "axis_value".
    """
    row = dict.fromkeys(config.CSV_COLUMNS)
    row["converged"] = False
    flags = []

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = params.replace()

        free_space = FreeSpaceEmitter(params)
        fs_state = free_space.qubit_state()
        fs_report = free_space.squeezing_report()
        row.update(
            fs_excitation=fs_state.excitation,
            fs_coherence_sq=fs_state.coherence_sq,
            fs_var_min=fs_report.var_min,
            fs_purity=fs_report.purity,
        )

        emitter = CavityEmitter(params, tol=tol, n_cap=n_cap)
        report = None
        try:
            report = emitter.solve()
        except SqueezeCheckError as err:
            flags.append(f"solver failed: {err}")

        if report is not None:
            row.update(n_used=report.n_used, residual=report.residual, converged=report.converged)
            issues = [] if report.converged else [
                f"not converged at N = {report.n_used} (moment change {report.max_change:.3g})"
            ]
            if report.converged:
                issues.extend(health_issues(report.state))
                try:
                    emitter.qubit_state().check()
                except InvalidParamsError as err:
                    issues.append(str(err))

            if issues:
                flags.extend(issues)
            else:
                row.update(_cavity_columns(report))
                try:
                    approx = ApproximateEmitter(params, _clamp_round_off(report.state.n_cav, tol))
                except InvalidParamsError as err:
                    flags.append(f"approximation skipped: {err}")
                else:
                    context = approx.context
                    row.update(
                        r_raw=context.purification_rate,
                        r_effective=context.effective_rate,
                        approx_excitation=context.moments.excitation,
                        approx_coherence_sq=context.moments.coherence_sq,
                        approx_var_min=context.variance,
                        approx_purity=purity(context.moments),
                    )
                    if not approx.is_valid():
                        flags.append("approximation outside validity (negative excitation)")

    flags.extend(str(warning.message) for warning in caught)
    row["flag"] = "; ".join(flags) if flags else None
    return row


def _evaluate_task(task):
    index, family_value, axis_value, params, tol, n_cap = task
    row = evaluate_point(params, tol=tol, n_cap=n_cap)
    row["family"] = family_value
    row["axis_value"] = axis_value
    return index, row


def minimize_over_detuning(params, window=None, points=None, refine_points=None, center=None, tol=None, n_cap=None):
    """
    Minimizes the cavity var_min over the emitter detuning around the sideband resonance.

    A grid of points values spans center +- window; a second grid of refine_points values spans the two
    neighbours of the coarse minimum.

    Args:
        params: SystemParams; its delta_x is ignored.
        window: A float, the half width of the window (config.THRESHOLD_PARAMS["window"], in units of g, by default).
        points: An integer, the coarse grid size.
        refine_points: An integer, the refined grid size.
        center: A float, the window center. Defaults to cavity_resonance_detuning(params).
        tol: A float, the solver tolerance.
        n_cap: An integer, the largest truncation.
    Returns:
        A DetuningMinimum.
    """
    window = config.THRESHOLD_PARAMS["window"] * params.g if window is None else window
    points = config.THRESHOLD_PARAMS["points"] if points is None else points
    refine_points = config.THRESHOLD_PARAMS["refine_points"] if refine_points is None else refine_points
    center = cavity_resonance_detuning(params) if center is None else center

    if window <= 0 or points < 3 or refine_points < 3:
        raise InvalidParamsError(
            f"Detuning window needs window > 0 and at least 3 points, got {window}, {points}, {refine_points}"
        )

    def scan(grid):
        rows = [evaluate_point(params.replace(delta_x=float(x)), tol=tol, n_cap=n_cap) for x in grid]
        values = np.array([np.inf if row["var_min"] is None else row["var_min"] for row in rows])
        return rows, values

    coarse = np.linspace(center - window, center + window, points)
    rows, values = scan(coarse)
    if not np.any(np.isfinite(values)):
        raise NonConvergenceError(f"No converged point in the detuning window {center} +- {window}")

    k = int(np.argmin(values))
    fine = np.linspace(coarse[max(k - 1, 0)], coarse[min(k + 1, points - 1)], refine_points)
    fine_rows, fine_values = scan(fine)

    j = int(np.argmin(fine_values))
    if fine_values[j] <= values[k]:
        best_x, best_value, best_row = fine[j], fine_values[j], fine_rows[j]
    else:
        best_x, best_value, best_row = coarse[k], values[k], rows[k]

    best_row = dict(best_row, axis_value=float(best_x))
    return DetuningMinimum(delta_x=float(best_x), var_min=float(best_value), row=best_row)


def find_threshold(params, axis, bracket, level=0.0, delta_x=None, tol=None, n_cap=None, rel_tol=None,
                   max_iterations=None, verbose=False):
    """
    Bisects an outer parameter for the crossing of var_min with level.

    With delta_x set, var_min is evaluated at that fixed emitter detuning. Without it, var_min is minimized
    over delta_x at every trial, which moves the crossing to larger dephasing since the dip shifts with the
    outer parameter.

    Args:
        params: SystemParams of the base point.
        axis: The SweepAxis (or its string value) to bisect; delta_x is reserved for the inner evaluation.
        bracket: A pair (low, high) of axis values straddling the crossing.
        level: A float, the variance level whose crossing is searched (0 for the onset of squeezing).
        delta_x: An optional float, the fixed emitter detuning of every trial.
        tol: A float, the solver tolerance.
        n_cap: An integer, the largest truncation.
        rel_tol: A float, the relative width of the final bracket (config.THRESHOLD_PARAMS["rel_tol"]).
        max_iterations: An integer bound on the bisection steps.
        verbose: A boolean, prints every bisection step when True.
    Returns:
        A float, the axis value of the crossing.
    """
    axis = config.SUPPORTED_SWEEP_AXES.get(axis, axis) if isinstance(axis, str) else axis
    if not isinstance(axis, SweepAxis):
        raise InvalidParamsError(f"{axis} is not one of the supported axes: {list(config.SUPPORTED_SWEEP_AXES)}")
    if axis == SweepAxis.DELTA_X:
        raise InvalidParamsError("delta_x is minimized over at every trial and cannot be the threshold axis")

    rel_tol = config.THRESHOLD_PARAMS["rel_tol"] if rel_tol is None else rel_tol
    max_iterations = config.THRESHOLD_PARAMS["max_iterations"] if max_iterations is None else max_iterations
    low, high = sorted(float(v) for v in bracket)

    def excess(value):
        trial = params.replace(**{axis.value: value})
        if delta_x is not None:
            row = evaluate_point(trial.replace(delta_x=delta_x), tol=tol, n_cap=n_cap)
            if row["var_min"] is None:
                raise NonConvergenceError(f"No solution at {axis.value} = {value}, delta_x = {delta_x}: {row['flag']}")
            var_min, at = row["var_min"], delta_x
        else:
            minimum = minimize_over_detuning(trial, tol=tol, n_cap=n_cap)
            var_min, at = minimum.var_min, minimum.delta_x
        if verbose:
            print(f"{axis.value} = {value:.6g}: var_min = {var_min:.6g} at delta_x = {at:.6g}")
        return var_min - level

    f_low = excess(low)
    if f_low == 0.0:
        return low
    f_high = excess(high)
    if f_high == 0.0:
        return high
    if f_low * f_high > 0.0:
        raise NoSignChangeError(
            f"Bracket [{low}, {high}] of {axis.value} does not straddle var_min = {level}: "
            f"excess {f_low:.4g} and {f_high:.4g}"
        )

    for _ in range(max_iterations):
        middle = 0.5 * (low + high)
        if high - low <= rel_tol * max(abs(middle), np.finfo(float).tiny):
            break
        f_middle = excess(middle)
        if f_middle == 0.0:
            return middle
        if f_low * f_middle < 0.0:
            high, f_high = middle, f_middle
        else:
            low, f_low = middle, f_middle

    return 0.5 * (low + high)


class ScanCheck:
    """ Main entrypoint to the package: used to run parameter sweeps of the cavity-assisted squeezing setup.

    It encapsulates a validated ScanConfig and evaluates, at every point of the sweep, the truncation-converged
    master equation, the free-space closed forms and the analytical approximation chain fed with the solver's
    intracavity occupation.

    Attributes:
        config: The ScanConfig to run.
        verbose: A boolean, shows progress bars and summaries when True.

    Methods:
        run_scan(self): Evaluates every sweep point and returns a ScanResult. Points that fail are kept as flagged
            rows, the scan is never aborted.
        minimize(self): Minimizes var_min over delta_x around the sideband resonance, once per family value.
        emit(self, path=None, fmt=None): Writes the rows and the metadata sidecar.
        get_stats(self): Returns the scan statistics computed by run_scan(self).
        get_rows(self): Returns the emitted rows computed by run_scan(self).
        print_scan_stats(self): Prints the cached scan statistics in a human-readable format. It needs
            run_scan(self) to have completed before being called, otherwise it will raise an exception.
    """

    def __init__(self, scan_config, verbose=False):
        self.config = scan_config
        self.verbose = verbose
        self._result = None
        self._stats = {}
        self._minima = []

    def _tasks(self):
        return [
            (index, family_value, axis_value, params, self.config.tolerance, self.config.n_cap)
            for index, (family_value, axis_value, params) in enumerate(self.config.point_params())
        ]

    def _worker_count(self, task_count):
        workers = self.config.workers if self.config.workers is not None else (os.cpu_count() or 1)
        return max(1, min(workers, task_count))

    def run_scan(self):
        """
        Runs the sweep. Rows land in indexed slots, so the output does not depend on the worker count.

        Returns:
            A ScanResult.
        """
        tasks = self._tasks()
        rows = [None] * len(tasks)
        workers = self._worker_count(len(tasks))

        if workers == 1:
            for task in tqdm(tasks, disable=not self.verbose):
                index, row = _evaluate_task(task)
                rows[index] = row
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_evaluate_task, task) for task in tasks]
                for future in tqdm(as_completed(futures), total=len(futures), disable=not self.verbose):
                    index, row = future.result()
                    rows[index] = row

        self._result = ScanResult(rows=rows, columns=self.config.outputs, units=self.config.units)
        self._stats = self._compute_scan_stats()
        return self._result

    def _compute_scan_stats(self):
        if self._result is None:
            raise Exception("There is no scan result computed as part of this instance")

        rows = self._result.rows
        solved = [row for row in rows if row["var_min"] is not None]
        best = min(solved, key=lambda row: row["var_min"]) if solved else None

        return {
            "count_points": len(rows),
            "count_converged": sum(1 for row in rows if row["converged"]),
            "count_flagged": self._result.flagged_count,
            "count_failed": self._result.failed_count,
            "var_min_min": best["var_min"] if best else None,
            "var_min_axis_value": best["axis_value"] if best else None,
            "var_min_family": best["family"] if best else None,
            "purity_max": max(row["purity"] for row in solved) if solved else None,
            "n_used_max": max((row["n_used"] for row in rows if row["n_used"] is not None), default=None),
        }

    def minimize(self):
        """
        Returns:
            A list of (family value, DetuningMinimum) pairs, family value None without a family axis.
        """
        families = self.config.family_values if self.config.family_axis is not None else (None,)
        minima = []
        for family_value in tqdm(families, disable=not self.verbose):
            params = self.config.params
            if family_value is not None:
                params = params.replace(**{self.config.family_axis.value: family_value})
            minimum = minimize_over_detuning(params, tol=self.config.tolerance, n_cap=self.config.n_cap)
            minima.append((family_value, minimum))
        self._minima = minima
        return minima

    def emit(self, path=None, fmt=None):
        """
        Writes the scan rows and a <path>.meta.json sidecar.

        Returns:
            A tuple (data path, sidecar path).
        """
        if self._result is None:
            raise Exception("No scan has been run as part of this instance")
        path = self.config.path if path is None else path
        fmt = self.config.format if fmt is None else fmt
        if path is None:
            raise Exception("No output path is configured")

        emit_rows(self._result.selected_rows(), path, fmt=fmt, columns=self._result.columns)
        metadata = {
            "config": self.config.to_dict(),
            "units": self.config.units,
            "format": fmt,
            "status": self._result.status,
            "stats": self.get_stats(),
            "minima": [
                {"family": family_value, "delta_x": minimum.delta_x, "var_min": minimum.var_min}
                for family_value, minimum in self._minima
            ],
        }
        return path, write_sidecar(path, metadata)

    def get_result(self):
        if self._result is None:
            raise Exception("No scan has been run as part of this instance")
        return self._result

    def get_rows(self):
        return self.get_result().selected_rows()

    def get_stats(self):
        """
        Returns:
             A dictionary containing the statistics of the scan if it was run or raises an exception if not.
        """
        if self._stats == {}:
            raise Exception("No stats have been computed as part of this instance")
        return dict.copy(self._stats)

    def print_scan_stats(self):
        """
        Prints the scan statistics in a human-readable format.
        """
        if self._stats == {}:
            raise Exception("No stats have been computed as part of this instance")

        stats = self._stats
        unit = self.config.units

        print()
        print(f"Scan statistics - sweeping {self.config.axis.value} (units of {unit})")
        print(PRINT_SEPARATOR)

        print(f"Converged {stats['count_converged']}/{stats['count_points']} points")
        print(f"Flagged rows: {stats['count_flagged']}, failed rows: {stats['count_failed']}")

        print()
        if stats["var_min_min"] is not None:
            print(f"Minimal var_min: {stats['var_min_min']:.6g} at {self.config.axis.value} = "
                  f"{stats['var_min_axis_value']:.6g}")
            if stats["var_min_family"] is not None:
                print(f"  in the family {self.config.family_axis.value} = {stats['var_min_family']:.6g}")
            print(f"Maximal purity: {stats['purity_max']:.6g}")
        print(f"Largest truncation used: {stats['n_used_max']}")

        for family_value, minimum in self._minima:
            label = "" if family_value is None else f"{self.config.family_axis.value} = {family_value:.6g}: "
            print(f"{label}var_min {minimum.var_min:.6g} at delta_x = {minimum.delta_x:.6g}")
        print(PRINT_SEPARATOR)
        print()
